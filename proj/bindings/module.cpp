#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <array>
#include <complex>
#include <stdexcept>

#include "d2d/auction.hpp"
#include "d2d/beamforming.hpp"
#include "d2d/config.hpp"
#include "d2d/harness.hpp"
#include "d2d/lifetime.hpp"
#include "d2d/power_control.hpp"
#include "d2d/propagation.hpp"
#include "d2d/rng.hpp"
#include "d2d/stackelberg.hpp"
#include "d2d/units.hpp"

namespace py = pybind11;

namespace {

d2d::propagation::LinkScenario scenario_from_name(const std::string& name) {
  using d2d::propagation::LinkScenario;
  if (name == "d2d_los") return LinkScenario::kD2dLos;
  if (name == "d2d_nlos") return LinkScenario::kD2dNlos;
  if (name == "cellular_los") return LinkScenario::kCellularLos;
  if (name == "cellular_nlos") return LinkScenario::kCellularNlos;
  if (name == "outdoor_to_indoor") return LinkScenario::kOutdoorToIndoor;
  throw std::invalid_argument("unknown scenario: " + name);
}

d2d::propagation::LinkFamily family_from_name(const std::string& name) {
  using d2d::propagation::LinkFamily;
  if (name == "d2d") return LinkFamily::kD2d;
  if (name == "cellular") return LinkFamily::kCellular;
  if (name == "interference") return LinkFamily::kInterference;
  throw std::invalid_argument("unknown family: " + name);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Simulator and solvers for D2D underlay cellular networks";

  m.def("db_to_linear", &d2d::db_to_linear, py::arg("db"));
  m.def("linear_to_db", &d2d::linear_to_db, py::arg("value"));
  m.def("dbm_to_mw", &d2d::dbm_to_mw, py::arg("dbm"));
  m.def("mw_to_dbm", &d2d::mw_to_dbm, py::arg("mw"));
  m.def("noise_power_mw", &d2d::noise_power_mw, py::arg("density_dbm_hz"),
        py::arg("bandwidth_hz"), py::arg("noise_figure_db"));

  py::class_<d2d::propagation::PropagationParams>(m, "PropagationParams")
      .def(py::init<>())
      .def_readwrite("carrier_frequency_hz",
                     &d2d::propagation::PropagationParams::carrier_frequency_hz)
      .def_readwrite("bs_antenna_height_m",
                     &d2d::propagation::PropagationParams::bs_antenna_height_m)
      .def_readwrite("ms_antenna_height_m",
                     &d2d::propagation::PropagationParams::ms_antenna_height_m)
      .def_readwrite("nlos_wall_count",
                     &d2d::propagation::PropagationParams::nlos_wall_count)
      .def("breakpoint_distance_m",
           &d2d::propagation::PropagationParams::breakpoint_distance_m)
      .def("noise_power_bs_mw",
           &d2d::propagation::PropagationParams::noise_power_bs_mw)
      .def("noise_power_ue_mw",
           &d2d::propagation::PropagationParams::noise_power_ue_mw);

  m.def(
      "path_loss_db",
      [](const std::string& scenario, double distance_m,
         const d2d::propagation::PropagationParams& params) {
        return d2d::propagation::path_loss_db(scenario_from_name(scenario),
                                              distance_m, params);
      },
      py::arg("scenario"), py::arg("distance_m"),
      py::arg("params") = d2d::propagation::PropagationParams{});
  m.def(
      "los_probability",
      [](const std::string& family, double distance_m) {
        return d2d::propagation::los_probability(family_from_name(family),
                                                 distance_m);
      },
      py::arg("family"), py::arg("distance_m"));

  m.def(
      "ofpc_power_dbm",
      [](double pathloss_db, double p_max_dbm, double p0_dbm, double alpha,
         int m_rbs) {
        d2d::powerctl::OfpcParams p{p_max_dbm, p0_dbm, alpha, m_rbs};
        return d2d::powerctl::ofpc_power_dbm(p, pathloss_db);
      },
      py::arg("pathloss_db"), py::arg("p_max_dbm") = 24.0,
      py::arg("p0_dbm") = -78.0, py::arg("alpha") = 0.8, py::arg("m_rbs") = 1);

  m.def(
      "slnr_beamformer",
      [](std::array<std::complex<double>, 2> h_c,
         std::array<std::complex<double>, 2> h_d, double p_b_mw,
         double n0_mw) {
        d2d::beamforming::MisoChannel ch;
        ch.h_c << h_c[0], h_c[1];
        ch.h_d << h_d[0], h_d[1];
        ch.p_b_mw = p_b_mw;
        ch.n0_mw = n0_mw;
        const auto bf = d2d::beamforming::slnr_beamformer(ch);
        return std::array<std::complex<double>, 2>{bf.w(0), bf.w(1)};
      },
      py::arg("h_c"), py::arg("h_d"), py::arg("p_b_mw"), py::arg("n0_mw"));

  m.def(
      "optimal_d2d_power",
      [](std::array<std::complex<double>, 2> h_c,
         std::array<std::complex<double>, 2> h_d, double h_dd, double h_dc,
         double p_b_mw, double n0_mw, double beta_c, double beta_d,
         double p_max_mw) {
        d2d::beamforming::MisoChannel ch;
        ch.h_c << h_c[0], h_c[1];
        ch.h_d << h_d[0], h_d[1];
        ch.h_dd = h_dd;
        ch.h_dc = h_dc;
        ch.p_b_mw = p_b_mw;
        ch.n0_mw = n0_mw;
        ch.beta_c = beta_c;
        ch.beta_d = beta_d;
        ch.p_max_mw = p_max_mw;
        const auto bf = d2d::beamforming::slnr_beamformer(ch);
        const auto res = d2d::beamforming::optimal_d2d_power(ch, bf);
        py::dict out;
        out["feasible"] = res.feasible;
        out["p_mw"] = res.p_mw;
        out["sum_rate"] =
            res.feasible ? d2d::beamforming::dl_pair_sum_rate(ch, bf, res.p_mw)
                         : 0.0;
        return out;
      },
      py::arg("h_c"), py::arg("h_d"), py::arg("h_dd"), py::arg("h_dc"),
      py::arg("p_b_mw"), py::arg("n0_mw"), py::arg("beta_c"),
      py::arg("beta_d"), py::arg("p_max_mw"));

  m.def(
      "reverse_ica",
      [](const std::vector<std::vector<double>>& valuations, double delta,
         int fine_i, bool singleton_only) {
        if (valuations.empty()) {
          throw std::invalid_argument("valuation table must be non-empty");
        }
        d2d::auction::ValuationTable v;
        v.num_bidders = static_cast<int>(valuations.size());
        const size_t packages = valuations.front().size();
        int items = 0;
        while ((1u << items) - 1 < packages) ++items;
        if ((1u << items) - 1 != packages) {
          throw std::invalid_argument(
              "each row must list 2^D - 1 package valuations");
        }
        v.num_items = items;
        for (const auto& row : valuations) {
          if (row.size() != packages) {
            throw std::invalid_argument("ragged valuation table");
          }
          v.v.insert(v.v.end(), row.begin(), row.end());
        }
        const double step =
            delta > 0.0 ? delta : d2d::auction::default_delta(v);
        d2d::auction::IcaOptions opts;
        opts.singleton_only = singleton_only;
        const auto res = d2d::auction::run_reverse_ica(
            v, d2d::auction::default_initial_prices(v, step), step, fine_i,
            opts);
        const auto oracle = d2d::auction::exhaustive_optimal(v);
        py::dict out;
        out["winner_package"] = res.winner_package;
        out["price_paid"] = res.price_paid;
        out["revenue"] = res.revenue;
        out["total_value"] = res.total_value;
        out["rounds"] = res.rounds;
        out["oracle_value"] = oracle.total_value;
        return out;
      },
      py::arg("valuations"), py::arg("delta") = -1.0, py::arg("fine_i") = 10,
      py::arg("singleton_only") = false);

  m.def(
      "stackelberg_equilibrium",
      [](double g_ke, double g_ki, double g_ie, double g_ii, double p_k_mw,
         double n0_mw, double beta, double p_min_mw, double p_max_mw) {
        d2d::stackelberg::PairGame game{g_ke,  g_ki, g_ie,     g_ii,
                                        p_k_mw, n0_mw, beta,    p_min_mw,
                                        p_max_mw};
        const auto eq = d2d::stackelberg::leader_optimal_price(game);
        py::dict out;
        out["alpha_star"] = eq.alpha_star;
        out["p_star"] = eq.p_star;
        out["u_leader"] = eq.u_leader;
        out["u_follower"] = eq.u_follower;
        return out;
      },
      py::arg("g_ke"), py::arg("g_ki"), py::arg("g_ie"), py::arg("g_ii"),
      py::arg("p_k_mw"), py::arg("n0_mw"), py::arg("beta") = 1.0,
      py::arg("p_min_mw") = 1.0, py::arg("p_max_mw") = 199.52623149688797);

  m.def(
      "waterfill_best_response",
      [](const std::vector<double>& qualities, double rate) {
        return d2d::lifetime::best_response(qualities, rate);
      },
      py::arg("qualities"), py::arg("rate"));

  m.def(
      "battery_lifetime_hours",
      [](double avg_total_power_mw, double capacity_ah, double peukert,
         double voltage_v, double circuit_power_mw) {
        d2d::lifetime::BatteryModel model{capacity_ah, peukert, voltage_v,
                                          circuit_power_mw};
        return d2d::lifetime::battery_lifetime_hours(model, avg_total_power_mw);
      },
      py::arg("avg_total_power_mw"), py::arg("capacity_ah") = 0.8,
      py::arg("peukert") = 1.3, py::arg("voltage_v") = 4.0,
      py::arg("circuit_power_mw") = 100.0);

  m.def(
      "run_experiment",
      [](const std::string& kind, const std::string& config_text,
         long seed, long drops) {
        auto cfg = d2d::harness::Config::parse(config_text);
        if (seed >= 0) cfg.set("run", "seed", std::to_string(seed));
        if (drops >= 0) cfg.set("run", "drops", std::to_string(drops));
        const auto experiment = d2d::harness::ExperimentConfig::from_config(
            d2d::harness::parse_kind(kind), cfg);
        const auto result = d2d::harness::run_experiment(experiment);
        return d2d::harness::summary_json_text(result);
      },
      py::arg("kind"), py::arg("config_text") = "", py::arg("seed") = -1,
      py::arg("drops") = -1,
      "Run one experiment and return the summary JSON text");
}
