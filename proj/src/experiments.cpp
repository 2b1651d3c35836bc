#include "experiments.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "d2d/auction.hpp"
#include "d2d/beamforming.hpp"
#include "d2d/lifetime.hpp"
#include "d2d/power_control.hpp"
#include "d2d/propagation.hpp"
#include "d2d/rng.hpp"
#include "d2d/stackelberg.hpp"
#include "d2d/units.hpp"

namespace d2d::harness::detail {

namespace {

using propagation::DropLayout;
using propagation::LinkGain;
using propagation::PropagationParams;
using propagation::UserDrop;

PropagationParams propagation_params(const Config& cfg) {
  PropagationParams p;
  p.carrier_frequency_hz =
      cfg.get_double("propagation", "carrier_frequency_hz", 2.0e9);
  p.bs_antenna_height_m = cfg.get_double("propagation", "bs_height_m", 25.0);
  p.ms_antenna_height_m = cfg.get_double("propagation", "ms_height_m", 1.5);
  p.noise_spectral_density_dbm_hz =
      cfg.get_double("propagation", "noise_density_dbm_hz", -174.0);
  p.noise_figure_bs_db = cfg.get_double("propagation", "nf_bs_db", 5.0);
  p.noise_figure_ue_db = cfg.get_double("propagation", "nf_ue_db", 9.0);
  p.bandwidth_per_subcarrier_hz =
      cfg.get_double("propagation", "subcarrier_bw_hz", 15e3);
  p.antenna_gain_bs_dbi = cfg.get_double("propagation", "gain_bs_dbi", 14.0);
  p.antenna_gain_ue_dbi = cfg.get_double("propagation", "gain_ue_dbi", 0.0);
  p.nlos_wall_count =
      static_cast<int>(cfg.get_int("propagation", "n_walls", 1));
  p.o2i_indoor_depth_m =
      cfg.get_double("propagation", "o2i_indoor_depth_m", 3.0);
  p.interference_d2d_cutoff_m =
      cfg.get_double("propagation", "interference_d2d_cutoff_m", 25.0);
  p.validate();
  return p;
}

DropLayout layout_params(const Config& cfg, const std::string& fallback_kind,
                         double fallback_radius) {
  DropLayout layout;
  const std::string kind = cfg.get_string("run", "layout", fallback_kind);
  if (kind == "single") {
    layout.kind = DropLayout::Kind::kSingleCell;
  } else if (kind == "hex19") {
    layout.kind = DropLayout::Kind::kHex19;
  } else {
    throw std::invalid_argument("unknown layout: " + kind);
  }
  layout.cell_radius_m =
      cfg.get_double("propagation", "cell_radius_m", fallback_radius);
  return layout;
}

powerctl::OfpcParams ofpc_params(const Config& cfg) {
  powerctl::OfpcParams p;
  p.p_max_dbm = cfg.get_double("ofpc", "p_max_dbm", 24.0);
  p.p0_dbm = cfg.get_double("ofpc", "p0_dbm", -78.0);
  p.alpha = cfg.get_double("ofpc", "alpha", 0.8);
  p.m_rbs = static_cast<int>(cfg.get_int("ofpc", "m_rbs", 1));
  return p;
}

double large_scale_loss_db(const LinkGain& g) {
  return g.path_loss_db + g.shadow_db;
}

// ---------------------------------------------------------------------------
// sinr_dist: uplink and downlink SINR of one cellular user and one D2D pair
// per cell, under fixed or open-loop device power.

struct SinrDistParams {
  PropagationParams prop;
  DropLayout layout;
  double pair_distance_m;
  double bs_power_mw;
  double fixed_ue_power_dbm;
  bool cellular_ofpc;
  bool d2d_ofpc;
  powerctl::OfpcParams ofpc;
};

SinrDistParams sinr_dist_params(const Config& cfg) {
  SinrDistParams p;
  p.prop = propagation_params(cfg);
  p.layout = layout_params(cfg, "single", 500.0);
  p.pair_distance_m = cfg.get_double("sinr_dist", "pair_distance_m", 25.0);
  p.bs_power_mw = dbm_to_mw(cfg.get_double("sinr_dist", "bs_power_dbm", 46.0));
  p.fixed_ue_power_dbm = cfg.get_double("sinr_dist", "ue_power_dbm", 24.0);
  p.cellular_ofpc =
      cfg.get_string("sinr_dist", "cellular_power", "ofpc") == "ofpc";
  p.d2d_ofpc = cfg.get_string("sinr_dist", "d2d_power", "fixed") == "ofpc";
  p.ofpc = ofpc_params(cfg);
  return p;
}

DropResult run_sinr_dist_drop(const SinrDistParams& p, Rng& rng) {
  DropResult out;
  const UserDrop drop = propagation::drop_users(rng, p.layout, 1, 1,
                                                p.pair_distance_m, p.prop);
  const int cells = drop.num_bs();
  std::vector<double> p_c(cells), p_d(cells);
  for (int j = 0; j < cells; ++j) {
    p_c[j] = p.cellular_ofpc
                 ? dbm_to_mw(powerctl::ofpc_power_dbm(
                       p.ofpc, large_scale_loss_db(drop.gain_cell_bs(j, j))))
                 : dbm_to_mw(p.fixed_ue_power_dbm);
    p_d[j] = p.d2d_ofpc
                 ? dbm_to_mw(powerctl::ofpc_power_dbm(
                       p.ofpc, large_scale_loss_db(drop.gain_pair(j))))
                 : dbm_to_mw(p.fixed_ue_power_dbm);
  }
  const double noise_bs = p.prop.noise_power_bs_mw();
  const double noise_ue = p.prop.noise_power_ue_mw();

  // Uplink period: all cellular users and all D2D transmitters are active.
  double intf_bs = 0.0;
  for (int j = 1; j < cells; ++j) {
    intf_bs += p_c[j] * drop.gain_cell_bs(j, 0).composite_linear_gain();
  }
  for (int d = 0; d < cells; ++d) {
    intf_bs += p_d[d] * drop.gain_d2dtx_bs(d, 0).composite_linear_gain();
  }
  const double bs_sinr_ul =
      p_c[0] * drop.gain_cell_bs(0, 0).composite_linear_gain() /
      (intf_bs + noise_bs);

  double intf_rx = 0.0;
  for (int j = 0; j < cells; ++j) {
    intf_rx += p_c[j] * drop.gain_cell_d2drx(j, 0).composite_linear_gain();
  }
  for (int d = 1; d < cells; ++d) {
    intf_rx += p_d[d] * drop.gain_d2dtx_d2drx(d, 0).composite_linear_gain();
  }
  const double d2d_sinr_ul =
      p_d[0] * drop.gain_pair(0).composite_linear_gain() /
      (intf_rx + noise_ue);

  // Downlink period: all base stations and all D2D transmitters are active.
  double intf_cell = 0.0;
  for (int b = 1; b < cells; ++b) {
    intf_cell +=
        p.bs_power_mw * drop.gain_cell_bs(0, b).composite_linear_gain();
  }
  for (int d = 0; d < cells; ++d) {
    intf_cell += p_d[d] * drop.gain_d2dtx_cell(d, 0).composite_linear_gain();
  }
  const double cell_sinr_dl =
      p.bs_power_mw * drop.gain_cell_bs(0, 0).composite_linear_gain() /
      (intf_cell + noise_ue);

  double intf_rx_dl = 0.0;
  for (int b = 0; b < cells; ++b) {
    intf_rx_dl +=
        p.bs_power_mw * drop.gain_d2drx_bs(0, b).composite_linear_gain();
  }
  for (int d = 1; d < cells; ++d) {
    intf_rx_dl += p_d[d] * drop.gain_d2dtx_d2drx(d, 0).composite_linear_gain();
  }
  const double d2d_sinr_dl =
      p_d[0] * drop.gain_pair(0).composite_linear_gain() /
      (intf_rx_dl + noise_ue);

  out.add("bs_sinr_ul_db", linear_to_db(bs_sinr_ul));
  out.add("d2d_sinr_ul_db", linear_to_db(d2d_sinr_ul));
  out.add("cell_sinr_dl_db", linear_to_db(cell_sinr_dl));
  out.add("d2d_sinr_dl_db", linear_to_db(d2d_sinr_dl));
  return out;
}

// ---------------------------------------------------------------------------
// mode_select: one communicating pair per cell measured under the three
// selection criteria; cellular mode is the weaker of the two hops.

struct ModeSelectParams {
  PropagationParams prop;
  DropLayout layout;
  double pair_distance_m;
  double ue_power_mw;
  double bs_power_mw;
};

ModeSelectParams mode_select_params(const Config& cfg) {
  ModeSelectParams p;
  p.prop = propagation_params(cfg);
  p.layout = layout_params(cfg, "hex19", 500.0);
  p.pair_distance_m = cfg.get_double("mode_select", "pair_distance_m", 25.0);
  p.ue_power_mw = dbm_to_mw(cfg.get_double("mode_select", "ue_power_dbm", 24.0));
  p.bs_power_mw = dbm_to_mw(cfg.get_double("mode_select", "bs_power_dbm", 46.0));
  return p;
}

DropResult run_mode_select_drop(const ModeSelectParams& p, Rng& rng) {
  DropResult out;
  const UserDrop drop = propagation::drop_users(rng, p.layout, 0, 1,
                                                p.pair_distance_m, p.prop);
  const int cells = drop.num_bs();
  const double noise_bs = p.prop.noise_power_bs_mw();
  const double noise_ue = p.prop.noise_power_ue_mw();

  double intf_rx = 0.0;
  double intf_bs = 0.0;
  double intf_rx_dl = 0.0;
  for (int j = 1; j < cells; ++j) {
    intf_rx += p.ue_power_mw * drop.gain_d2dtx_d2drx(j, 0).composite_linear_gain();
    intf_bs += p.ue_power_mw * drop.gain_d2dtx_bs(j, 0).composite_linear_gain();
    intf_rx_dl +=
        p.bs_power_mw * drop.gain_d2drx_bs(0, j).composite_linear_gain();
  }
  const double d2d_sinr =
      p.ue_power_mw * drop.gain_pair(0).composite_linear_gain() /
      (intf_rx + noise_ue);
  const double ul_sinr =
      p.ue_power_mw * drop.gain_d2dtx_bs(0, 0).composite_linear_gain() /
      (intf_bs + noise_bs);
  const double dl_sinr =
      p.bs_power_mw * drop.gain_d2drx_bs(0, 0).composite_linear_gain() /
      (intf_rx_dl + noise_ue);
  const double cel_sinr = std::min(ul_sinr, dl_sinr);

  const double pl_src = drop.gain_d2dtx_bs(0, 0).path_loss_db;
  const double pl_dst = drop.gain_d2drx_bs(0, 0).path_loss_db;
  const double pl_direct = drop.gain_pair(0).path_loss_db;

  const struct {
    const char* name;
    propagation::ModeCriterion criterion;
  } criteria[] = {
      {"sinr_cellular_db", propagation::ModeCriterion::kCellular},
      {"sinr_force_db", propagation::ModeCriterion::kForceD2d},
      {"sinr_pl_db", propagation::ModeCriterion::kPlD2d},
  };
  for (const auto& entry : criteria) {
    const propagation::Mode mode =
        propagation::select_mode(pl_src, pl_dst, pl_direct, entry.criterion);
    const double sinr =
        mode == propagation::Mode::kD2d ? d2d_sinr : cel_sinr;
    out.add(entry.name, linear_to_db(sinr));
    if (entry.criterion == propagation::ModeCriterion::kPlD2d &&
        mode == propagation::Mode::kD2d) {
      out.count("pl_selected_d2d");
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// threshold_pc: distributed threshold-based D2D power control against the
// open-loop cellular baseline.

struct ThresholdPcParamsResolved {
  PropagationParams prop;
  DropLayout layout;
  double pair_distance_m;
  powerctl::ThresholdPcParams pc;
  powerctl::OfpcParams ofpc;
  double est_error;
  double fixed_power_mw;
};

ThresholdPcParamsResolved threshold_pc_params(const Config& cfg) {
  ThresholdPcParamsResolved p;
  p.prop = propagation_params(cfg);
  p.layout = layout_params(cfg, "single", 500.0);
  p.pair_distance_m = cfg.get_double("power_control", "cluster_radius_m", 150.0);
  p.pc = powerctl::ThresholdPcParams::from_db(
      cfg.get_double("power_control", "kappa_db", 3.0),
      cfg.get_double("power_control", "beta_b_db", 10.0),
      cfg.get_double("power_control", "beta_d_db", 5.0),
      cfg.get_double("power_control", "p_ue_max_dbm", 23.0));
  p.ofpc = ofpc_params(cfg);
  p.est_error = cfg.get_double("power_control", "est_error", 0.1);
  p.fixed_power_mw =
      dbm_to_mw(cfg.get_double("power_control", "fixed_power_dbm", 23.0));
  return p;
}

DropResult run_threshold_pc_drop(const ThresholdPcParamsResolved& p, Rng& rng) {
  DropResult out;
  const UserDrop drop = propagation::drop_users(rng, p.layout, 1, 1,
                                                p.pair_distance_m, p.prop);
  const LinkGain& cb = drop.gain_cell_bs(0, 0);
  const LinkGain& db = drop.gain_d2dtx_bs(0, 0);
  const LinkGain& dd = drop.gain_pair(0);
  const LinkGain& cd = drop.gain_cell_d2drx(0, 0);

  powerctl::PcLinkSet links;
  links.loss_cell_bs = 1.0 / cb.large_scale_linear();
  links.loss_d2d_bs = 1.0 / db.large_scale_linear();
  links.loss_pair = 1.0 / dd.large_scale_linear();
  links.loss_cell_d2d = 1.0 / cd.large_scale_linear();
  links.gain_cell_bs = cb.fast_fading_power;
  links.gain_d2d_bs = db.fast_fading_power;
  links.gain_pair = dd.fast_fading_power;
  links.gain_cell_d2d = cd.fast_fading_power;
  links.est_gain_d2d_bs =
      db.fast_fading_power * (1.0 + rng.uniform(-p.est_error, p.est_error));
  links.est_gain_pair =
      dd.fast_fading_power * (1.0 + rng.uniform(-p.est_error, p.est_error));
  links.noise_mw = p.prop.noise_power_bs_mw();

  const double p_c_ol = dbm_to_mw(
      powerctl::ofpc_power_dbm(p.ofpc, large_scale_loss_db(cb)));

  // Fine-tuned power from the BS-side margin, clamped by the receiver-side
  // minimum under the cellular user's actual open-loop power.
  const double raw = (p.pc.kappa - 1.0) * links.loss_d2d_bs * links.noise_mw /
                     (links.est_gain_d2d_bs * links.est_gain_pair);
  powerctl::PcLinkSet rx_links = links;
  rx_links.noise_mw = p.prop.noise_power_ue_mw();
  const double lo = powerctl::d2d_min_power_mw(rx_links, p.pc, p_c_ol);
  const double hi = p.pc.p_ue_max_mw;
  double p_d_star = raw;
  if (lo > hi) {
    out.count("infeasible");
    return out;  // the pair defers; excluded from the distributions
  }
  if (raw < lo) {
    p_d_star = lo;
    out.count("clamped_low");
  } else if (raw > hi) {
    p_d_star = hi;
    out.count("clamped_high");
  } else {
    out.count("feasible");
  }

  const double saving =
      powerctl::power_saving_factor(p_c_ol, p.fixed_power_mw, p_d_star);

  const auto sinrs = [&](double p_d) {
    const double sinr_c =
        p_c_ol * cb.composite_linear_gain() /
        (p_d * db.composite_linear_gain() + p.prop.noise_power_bs_mw());
    const double sinr_d =
        p_d * dd.composite_linear_gain() /
        (p_c_ol * cd.composite_linear_gain() + p.prop.noise_power_ue_mw());
    return std::pair<double, double>(sinr_c, sinr_d);
  };
  const auto [sinr_c, sinr_d] = sinrs(p_d_star);
  const auto [sinr_c_fixed, sinr_d_fixed] = sinrs(p.fixed_power_mw);

  out.add("power_saving", saving);
  out.add("d2d_power_mw", p_d_star);
  out.add("cellular_power_mw", p_c_ol);
  out.add("bs_sinr_db", linear_to_db(sinr_c));
  out.add("d2d_sinr_db", linear_to_db(sinr_d));
  out.add("energy_efficiency",
          powerctl::energy_efficiency(sinr_c, sinr_d, p_c_ol, p_d_star));
  out.add("energy_efficiency_fixed",
          powerctl::energy_efficiency(sinr_c_fixed, sinr_d_fixed, p_c_ol,
                                      p.fixed_power_mw));
  return out;
}

// ---------------------------------------------------------------------------
// beamforming: SLNR beamforming with sum-rate optimal D2D power against the
// fixed-weight and fixed-power ablations.

struct BeamformingParams {
  PropagationParams prop;
  DropLayout layout;
  double pair_distance_m;
  int num_pairs;
  double p_b_mw;
  double p_max_mw;
  double beta_c;
  double beta_d;
};

BeamformingParams beamforming_params(const Config& cfg) {
  BeamformingParams p;
  p.prop = propagation_params(cfg);
  p.layout = layout_params(cfg, "single", 600.0);
  p.pair_distance_m = cfg.get_double("beamforming", "cluster_radius_m", 50.0);
  p.num_pairs = static_cast<int>(cfg.get_int("beamforming", "num_pairs", 1));
  p.p_b_mw = dbm_to_mw(cfg.get_double("beamforming", "p_b_dbm", 46.0));
  p.p_max_mw = dbm_to_mw(cfg.get_double("beamforming", "p_max_dbm", 23.0));
  p.beta_c = db_to_linear(cfg.get_double("beamforming", "beta_c_db", 5.0));
  p.beta_d = db_to_linear(cfg.get_double("beamforming", "beta_d_db", 5.0));
  if (p.num_pairs < 1) {
    throw std::invalid_argument("beamforming requires at least one pair");
  }
  return p;
}

// Multi-pair drops admit pairs sequentially with the single-pair objective;
// the BS beamformer targets the first admitted pair and the reported rates
// include the cross-pair interference.
DropResult run_beamforming_drop(const BeamformingParams& p, Rng& rng) {
  DropResult out;
  const UserDrop drop = propagation::drop_users(
      rng, p.layout, 1, p.num_pairs, p.pair_distance_m, p.prop);
  const double amp_c =
      std::sqrt(drop.gain_cell_bs(0, 0).large_scale_linear());
  const Eigen::Vector2cd h_c(amp_c * rng.complex_normal(),
                             amp_c * rng.complex_normal());

  std::vector<beamforming::MisoChannel> channels(p.num_pairs);
  for (int d = 0; d < p.num_pairs; ++d) {
    beamforming::MisoChannel& ch = channels[d];
    const double amp_d =
        std::sqrt(drop.gain_d2drx_bs(d, 0).large_scale_linear());
    ch.h_c = h_c;
    ch.h_d << amp_d * rng.complex_normal(), amp_d * rng.complex_normal();
    ch.h_dd = std::sqrt(drop.gain_pair(d).composite_linear_gain());
    ch.h_dc = std::sqrt(drop.gain_d2dtx_cell(d, 0).composite_linear_gain());
    ch.p_b_mw = p.p_b_mw;
    ch.n0_mw = p.prop.noise_power_ue_mw();
    ch.beta_c = p.beta_c;
    ch.beta_d = p.beta_d;
    ch.p_max_mw = p.p_max_mw;
  }

  beamforming::Beamformer w_fixed;
  w_fixed.w << std::complex<double>(1.0 / std::sqrt(2.0), 0.0),
      std::complex<double>(1.0 / std::sqrt(2.0), 0.0);
  const beamforming::Beamformer w_slnr =
      beamforming::slnr_beamformer(channels[0]);

  // per-pair powers for each scheme; -1 marks a pair that is not admitted
  struct Scheme {
    const char* name;
    const beamforming::Beamformer* w;
    bool optimize;
    std::vector<double> power;
  };
  Scheme schemes[] = {
      {"sumrate_pcbf", &w_slnr, true, {}},
      {"sumrate_bf_only", &w_slnr, false, {}},
      {"sumrate_pc_only", &w_fixed, true, {}},
      {"sumrate_none", &w_fixed, false, {}},
  };
  for (auto& scheme : schemes) {
    scheme.power.assign(p.num_pairs, -1.0);
    for (int d = 0; d < p.num_pairs; ++d) {
      const beamforming::D2dPowerResult res =
          beamforming::optimal_d2d_power(channels[d], *scheme.w);
      if (!res.feasible) continue;
      // fixed-power schemes transmit at the UE cap clamped to the cellular
      // feasibility bound
      scheme.power[d] = scheme.optimize ? res.p_mw : res.hi_mw;
    }
  }
  // keep the scheme vectors aligned: a drop counts only when every scheme
  // admits the same pairs, which for one pair is plain joint feasibility
  for (int d = 0; d < p.num_pairs; ++d) {
    bool any = false;
    bool all = true;
    for (const auto& scheme : schemes) {
      any |= scheme.power[d] >= 0.0;
      all &= scheme.power[d] >= 0.0;
    }
    if (any != all) {
      out.count("infeasible");
      return out;
    }
  }
  if (schemes[0].power[0] < 0.0 && p.num_pairs == 1) {
    out.count("infeasible");
    return out;
  }

  const auto sum_rate = [&](const Scheme& scheme) {
    const Eigen::Vector2cd& w = scheme.w->w;
    double d2d_into_cell = 0.0;
    for (int d = 0; d < p.num_pairs; ++d) {
      if (scheme.power[d] < 0.0) continue;
      d2d_into_cell += scheme.power[d] * channels[d].h_dc * channels[d].h_dc;
    }
    const double n0 = p.prop.noise_power_ue_mw();
    double rate = std::log2(1.0 + p.p_b_mw * std::norm(h_c.dot(w)) /
                                      (d2d_into_cell + n0));
    for (int d = 0; d < p.num_pairs; ++d) {
      if (scheme.power[d] < 0.0) continue;
      double intf = p.p_b_mw * std::norm(channels[d].h_d.dot(w)) + n0;
      for (int o = 0; o < p.num_pairs; ++o) {
        if (o != d && scheme.power[o] >= 0.0) {
          intf += scheme.power[o] *
                  drop.gain_d2dtx_d2drx(o, d).composite_linear_gain();
        }
      }
      rate += std::log2(1.0 + scheme.power[d] * channels[d].h_dd *
                                  channels[d].h_dd / intf);
    }
    return rate;
  };

  out.count("feasible");
  for (const auto& scheme : schemes) {
    out.add(scheme.name, sum_rate(scheme));
  }
  if (schemes[0].power[0] >= 0.0) {
    out.add("d2d_power_pcbf_mw", schemes[0].power[0]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// auction: reverse iterative combinatorial auction against the exhaustive
// CAP oracle and a random allocation.

struct AuctionParams {
  PropagationParams prop;
  DropLayout layout;
  double pair_distance_m;
  int num_channels;
  int num_pairs;
  double p_b_mw;
  double p_d_mw;
  double delta_frac;
  int fine_i;
  bool reduced;
  bool oracle;
  bool random_baseline;
};

AuctionParams auction_params(const Config& cfg) {
  AuctionParams p;
  p.prop = propagation_params(cfg);
  p.layout = layout_params(cfg, "single", 500.0);
  p.pair_distance_m = cfg.get_double("auction", "pair_distance_m", 5.0);
  p.num_channels = static_cast<int>(cfg.get_int("auction", "num_channels", 8));
  p.num_pairs = static_cast<int>(cfg.get_int("auction", "num_pairs", 4));
  p.p_b_mw = dbm_to_mw(cfg.get_double("auction", "bs_power_dbm", 46.0));
  p.p_d_mw = dbm_to_mw(cfg.get_double("auction", "ue_power_dbm", 23.0));
  p.delta_frac = cfg.get_double("auction", "delta_frac", 0.01);
  p.fine_i = static_cast<int>(cfg.get_int("auction", "fine_i", 10));
  p.reduced = cfg.get_bool("auction", "reduced", false);
  p.oracle = cfg.get_bool("auction", "oracle",
                          p.num_pairs <= 12 && p.num_channels <= 8);
  p.random_baseline = cfg.get_bool("auction", "random_baseline", true);
  if (p.num_channels < 1 || p.num_pairs < 1) {
    throw std::invalid_argument("auction requires C >= 1 and D >= 1");
  }
  if (p.num_pairs > 20) {
    throw std::invalid_argument("auction package space is guarded to D <= 20");
  }
  return p;
}

auction::SharingInstance instance_from_drop(const AuctionParams& p,
                                            const UserDrop& drop) {
  auction::SharingInstance inst;
  inst.num_bidders = p.num_channels;
  inst.num_items = p.num_pairs;
  inst.p_b_mw = p.p_b_mw;
  inst.n0_mw = p.prop.noise_power_ue_mw();
  inst.p_d_mw.assign(p.num_pairs, p.p_d_mw);
  for (int c = 0; c < p.num_channels; ++c) {
    inst.g_bs_cell.push_back(drop.gain_cell_bs(c, 0).composite_linear_gain());
  }
  for (int d = 0; d < p.num_pairs; ++d) {
    inst.g_bs_d2d.push_back(drop.gain_d2drx_bs(d, 0).composite_linear_gain());
    inst.g_pair.push_back(drop.gain_pair(d).composite_linear_gain());
  }
  inst.g_d2d_cell.resize(static_cast<size_t>(p.num_pairs) * p.num_channels);
  for (int d = 0; d < p.num_pairs; ++d) {
    for (int c = 0; c < p.num_channels; ++c) {
      inst.g_d2d_cell[static_cast<size_t>(d) * p.num_channels + c] =
          drop.gain_d2dtx_cell(d, c).composite_linear_gain();
    }
  }
  inst.g_d2d_d2d.assign(static_cast<size_t>(p.num_pairs) * p.num_pairs, 0.0);
  for (int t = 0; t < p.num_pairs; ++t) {
    for (int r = 0; r < p.num_pairs; ++r) {
      if (t == r) continue;
      inst.g_d2d_d2d[static_cast<size_t>(t) * p.num_pairs + r] =
          drop.gain_d2dtx_d2drx(t, r).composite_linear_gain();
    }
  }
  return inst;
}

DropResult run_auction_drop(const AuctionParams& p, Rng& rng,
                            std::uint64_t drop_index) {
  DropResult out;
  const UserDrop drop = propagation::drop_users(
      rng, p.layout, p.num_channels, p.num_pairs, p.pair_distance_m, p.prop);
  const auction::SharingInstance inst = instance_from_drop(p, drop);
  const auction::ValuationTable v = auction::build_valuation_table(inst);
  const double delta = auction::default_delta(v, p.delta_frac);
  const std::vector<double> p0 = auction::default_initial_prices(v, delta);

  const auction::AllocationResult rica =
      auction::run_reverse_ica(v, p0, delta, p.fine_i);
  const double sum_rica = auction::allocation_sum_rate(inst, rica);
  out.add("sumrate_rica", sum_rica);
  out.add("rounds", rica.rounds);
  out.add("revenue", rica.revenue);
  if (drop_index == 0) out.price_trace = rica.trace;

  if (p.reduced) {
    auction::IcaOptions opts;
    opts.singleton_only = true;
    const auction::AllocationResult reduced =
        auction::run_reverse_ica(v, p0, delta, p.fine_i, opts);
    out.add("sumrate_reduced", auction::allocation_sum_rate(inst, reduced));
  }
  if (p.random_baseline) {
    auction::AllocationResult random;
    random.winner_package.assign(p.num_channels, 0);
    random.price_paid.assign(p.num_channels, 0.0);
    for (int d = 0; d < p.num_pairs; ++d) {
      random.winner_package[rng.uniform_int(p.num_channels)] |= (1u << d);
    }
    out.add("sumrate_random", auction::allocation_sum_rate(inst, random));
  }
  if (p.oracle) {
    const auction::AllocationResult oracle = auction::exhaustive_optimal(v);
    const double sum_oracle = auction::allocation_sum_rate(inst, oracle);
    out.add("sumrate_oracle", sum_oracle);
    out.add("eta", auction::system_efficiency(sum_rica, sum_oracle));
  }
  return out;
}

// ---------------------------------------------------------------------------
// scheduling: Stackelberg priority scheduler over T TTIs; one drop is one
// geometry with per-TTI fading.

struct SchedulingParams {
  PropagationParams prop;
  DropLayout layout;
  double pair_distance_m;
  int num_channels;
  int num_pairs;
  int ttis;
  double beta;
  double fairness_delta;
  double p_k_mw;
  double p_min_mw;
  double p_max_mw;
  double n0_mw;
};

SchedulingParams scheduling_params(const Config& cfg) {
  SchedulingParams p;
  p.prop = propagation_params(cfg);
  p.layout = layout_params(cfg, "single", 500.0);
  p.pair_distance_m = cfg.get_double("stackelberg", "pair_distance_m", 50.0);
  p.num_channels = static_cast<int>(cfg.get_int("stackelberg", "num_channels", 5));
  p.num_pairs = static_cast<int>(cfg.get_int("stackelberg", "num_pairs", 10));
  p.ttis = static_cast<int>(cfg.get_int("stackelberg", "ttis", 1000));
  p.beta = cfg.get_double("stackelberg", "beta", 1.0);
  p.fairness_delta = cfg.get_double("stackelberg", "fairness_delta", 1.0);
  p.p_k_mw = dbm_to_mw(cfg.get_double("stackelberg", "cell_power_dbm", 23.0));
  p.p_min_mw = dbm_to_mw(cfg.get_double("stackelberg", "p_min_dbm", 0.0));
  p.p_max_mw = dbm_to_mw(cfg.get_double("stackelberg", "p_max_dbm", 23.0));
  const double bw = cfg.get_double("stackelberg", "bandwidth_hz", 180e3);
  p.n0_mw = noise_power_mw(p.prop.noise_spectral_density_dbm_hz, bw, 0.0);
  if (p.num_pairs < p.num_channels) {
    throw std::invalid_argument("scheduler expects at least K D2D pairs");
  }
  return p;
}

DropResult run_scheduling_drop(const SchedulingParams& p, Rng& rng,
                               std::uint64_t drop_index) {
  DropResult out;
  const UserDrop drop =
      propagation::drop_users(rng, p.layout, p.num_channels, p.num_pairs,
                              p.pair_distance_m, p.prop, /*with_gains=*/false);
  const propagation::Vec2 enb = drop.bs_positions[0];
  const int kk = p.num_channels;
  const int dd = p.num_pairs;

  stackelberg::SchedulerState state =
      stackelberg::make_scheduler_state(dd, p.fairness_delta);
  std::vector<double> cum_utility(dd, 0.0);
  std::vector<double> scheduled(dd, 0.0);
  std::vector<double> d2d_rate_sum(dd, 0.0);
  std::vector<double> cell_rate_sum(kk, 0.0);
  std::vector<stackelberg::PairGame> games(static_cast<size_t>(dd) * kk);

  for (int t = 0; t < p.ttis; ++t) {
    std::vector<double> g_ke(kk), g_ie(dd), g_ii(dd);
    std::vector<double> g_ki(static_cast<size_t>(kk) * dd);
    for (int k = 0; k < kk; ++k) {
      g_ke[k] = propagation::free_space_gain(
          rng, propagation::distance(drop.cellular_positions[k], enb));
    }
    for (int i = 0; i < dd; ++i) {
      g_ie[i] = propagation::free_space_gain(
          rng, propagation::distance(drop.d2d_tx_positions[i], enb));
      g_ii[i] = propagation::free_space_gain(
          rng, propagation::distance(drop.d2d_tx_positions[i],
                                     drop.d2d_rx_positions[i]));
    }
    for (int k = 0; k < kk; ++k) {
      for (int i = 0; i < dd; ++i) {
        g_ki[static_cast<size_t>(k) * dd + i] = propagation::free_space_gain(
            rng, propagation::distance(drop.cellular_positions[k],
                                       drop.d2d_rx_positions[i]));
      }
    }
    for (int i = 0; i < dd; ++i) {
      for (int k = 0; k < kk; ++k) {
        stackelberg::PairGame& g = games[static_cast<size_t>(i) * kk + k];
        g.g_ke = g_ke[k];
        g.g_ki = g_ki[static_cast<size_t>(k) * dd + i];
        g.g_ie = g_ie[i];
        g.g_ii = g_ii[i];
        g.p_k_mw = p.p_k_mw;
        g.n0_mw = p.n0_mw;
        g.beta = p.beta;
        g.p_min_mw = p.p_min_mw;
        g.p_max_mw = p.p_max_mw;
      }
    }
    const stackelberg::TtiAssignment tti =
        stackelberg::schedule_tti(games, dd, kk, state);
    for (int k = 0; k < kk; ++k) {
      const int i = tti.pair_for_channel[k];
      if (i < 0) continue;
      const auto& eq = tti.outcome[static_cast<size_t>(i) * kk + k];
      if (drop_index == 0) {
        auto& records = out.tables["tti_records"];
        if (records.columns.empty()) {
          records.columns = {"tti",      "pair",       "channel", "alpha",
                             "power_mw", "u_leader",   "u_follower",
                             "cumulative_cost"};
        }
        records.rows.push_back({static_cast<double>(t),
                                static_cast<double>(i),
                                static_cast<double>(k), eq.alpha_star,
                                eq.p_star, eq.u_leader, eq.u_follower,
                                state.cumulative_cost[i]});
      }
      cum_utility[i] += eq.u_follower;
      scheduled[i] += 1.0;
      d2d_rate_sum[i] += std::log2(
          1.0 + eq.p_star * g_ii[i] /
                    (p.p_k_mw * g_ki[static_cast<size_t>(k) * dd + i] +
                     p.n0_mw));
      cell_rate_sum[k] +=
          std::log2(1.0 + p.p_k_mw * g_ke[k] /
                              (eq.p_star * g_ie[i] + p.n0_mw));
    }
  }

  double mean_u = 0.0;
  for (int i = 0; i < dd; ++i) mean_u += cum_utility[i];
  mean_u /= dd;
  double variance = 0.0;
  for (int i = 0; i < dd; ++i) {
    variance += (cum_utility[i] - mean_u) * (cum_utility[i] - mean_u);
  }
  variance /= dd;

  for (int i = 0; i < dd; ++i) {
    out.add("cum_utility", cum_utility[i]);
    out.add("scheduled_fraction", scheduled[i] / p.ttis);
    if (scheduled[i] > 0.0) {
      out.add("d2d_rate", d2d_rate_sum[i] / scheduled[i]);
    }
  }
  for (int k = 0; k < kk; ++k) {
    out.add("cellular_rate", cell_rate_sum[k] / p.ttis);
  }
  out.add("cum_utility_variance", variance);
  return out;
}

// ---------------------------------------------------------------------------
// lifetime: priced resource auction for battery lifetime with random and
// (small instances) centralized baselines.

struct LifetimeParams {
  PropagationParams prop;
  DropLayout layout;
  double pair_distance_m;
  int num_channels;
  int num_pairs;
  double rate_target;
  double unit_price;
  double p_cell_mw;
  double n0_mw;
  lifetime::BatteryModel battery;
  bool exclusive_channel;
  bool single_channel;
  bool centralized;
};

LifetimeParams lifetime_params(const Config& cfg) {
  LifetimeParams p;
  p.prop = propagation_params(cfg);
  p.layout = layout_params(cfg, "single", 350.0);
  p.pair_distance_m = cfg.get_double("lifetime", "pair_distance_m", 30.0);
  p.num_channels = static_cast<int>(cfg.get_int("lifetime", "num_channels", 8));
  p.num_pairs = static_cast<int>(cfg.get_int("lifetime", "num_pairs", 3));
  p.rate_target = cfg.get_double("lifetime", "rate_target", 4.0);
  p.unit_price = cfg.get_double("lifetime", "unit_price", 1.0);
  p.p_cell_mw = cfg.get_double("lifetime", "cell_power_mw", 250.0);
  p.n0_mw = cfg.get_double("lifetime", "noise_mw", 1e-4);
  p.battery.capacity_ah = cfg.get_double("lifetime", "capacity_ah", 0.8);
  p.battery.peukert = cfg.get_double("lifetime", "peukert", 1.3);
  p.battery.voltage_v = cfg.get_double("lifetime", "voltage_v", 4.0);
  p.battery.circuit_power_mw =
      cfg.get_double("lifetime", "circuit_power_mw", 100.0);
  p.exclusive_channel = cfg.get_bool("lifetime", "exclusive_channel", false);
  p.single_channel = cfg.get_bool("lifetime", "single_channel", false);
  p.centralized = cfg.get_bool("lifetime", "centralized",
                               p.num_pairs <= 3 && p.num_channels <= 4);
  return p;
}

DropResult run_lifetime_drop(const LifetimeParams& p, Rng& rng,
                             std::uint64_t drop_index) {
  DropResult out;
  const UserDrop drop =
      propagation::drop_users(rng, p.layout, p.num_channels, p.num_pairs,
                              p.pair_distance_m, p.prop, /*with_gains=*/false);
  const propagation::Vec2 enb = drop.bs_positions[0];
  const int cc = p.num_channels;
  const int dd = p.num_pairs;

  lifetime::GameContext ctx;
  ctx.num_pairs = dd;
  ctx.num_channels = cc;
  ctx.n0_mw = p.n0_mw;
  ctx.rate_target = p.rate_target;
  ctx.p_cell_mw.assign(cc, p.p_cell_mw);
  ctx.g_pair.resize(dd);
  ctx.g_cross.assign(static_cast<size_t>(dd) * dd, 0.0);
  ctx.g_cell_d2d.resize(static_cast<size_t>(cc) * dd);
  std::vector<double> g_cell_enb(cc), g_d2d_enb(dd);
  for (int i = 0; i < dd; ++i) {
    ctx.g_pair[i] = propagation::free_space_gain(
        rng, propagation::distance(drop.d2d_tx_positions[i],
                                   drop.d2d_rx_positions[i]));
    g_d2d_enb[i] = propagation::free_space_gain(
        rng, propagation::distance(drop.d2d_tx_positions[i], enb));
  }
  for (int j = 0; j < dd; ++j) {
    for (int i = 0; i < dd; ++i) {
      if (j == i) continue;
      ctx.g_cross[static_cast<size_t>(j) * dd + i] =
          propagation::free_space_gain(
              rng, propagation::distance(drop.d2d_tx_positions[j],
                                         drop.d2d_rx_positions[i]));
    }
  }
  for (int c = 0; c < cc; ++c) {
    g_cell_enb[c] = propagation::free_space_gain(
        rng, propagation::distance(drop.cellular_positions[c], enb));
    for (int i = 0; i < dd; ++i) {
      ctx.g_cell_d2d[static_cast<size_t>(c) * dd + i] =
          propagation::free_space_gain(
              rng, propagation::distance(drop.cellular_positions[c],
                                         drop.d2d_rx_positions[i]));
    }
  }

  lifetime::AuctionModeOptions modes;
  modes.exclusive_channel = p.exclusive_channel;
  modes.single_channel = p.single_channel;
  const lifetime::ResourceAuctionResult res =
      lifetime::run_resource_auction(ctx, p.unit_price, modes);
  if (!res.complete) {
    out.count("auction_incomplete");
    return out;
  }

  const auto cellular_rate = [&](const lifetime::PowerMatrix& powers, int c) {
    double intf = 0.0;
    for (int i = 0; i < dd; ++i) intf += powers.at(i, c) * g_d2d_enb[i];
    return std::log2(1.0 + p.p_cell_mw * g_cell_enb[c] / (intf + p.n0_mw));
  };
  const auto mean_lifetime = [&](const lifetime::PowerMatrix& powers) {
    double total = 0.0;
    for (int i = 0; i < dd; ++i) {
      total += lifetime::battery_lifetime_hours(
          p.battery, powers.row_total(i) + p.battery.circuit_power_mw);
    }
    return total / dd;
  };

  for (int i = 0; i < dd; ++i) {
    out.add("lifetime_h",
            lifetime::battery_lifetime_hours(
                p.battery,
                res.powers.row_total(i) + p.battery.circuit_power_mw));
  }
  for (int c = 0; c < cc; ++c) {
    out.add("cellular_rate", cellular_rate(res.powers, c));
  }
  out.add("mean_lifetime_auction", mean_lifetime(res.powers));

  NumericTable assignment;
  assignment.columns = {"drop", "pair", "channel", "power_mw", "rate"};
  for (int i = 0; i < dd; ++i) {
    for (int c = 0; c < cc; ++c) {
      if (!res.ledger.is_sold(i, c)) continue;
      assignment.rows.push_back({static_cast<double>(drop_index),
                                 static_cast<double>(i),
                                 static_cast<double>(c), res.powers.at(i, c),
                                 res.target(i, c)});
    }
  }
  out.tables["assignment"] = std::move(assignment);

  // Random baseline: every pair takes one uniformly drawn channel.
  {
    std::vector<int> channel_of(dd);
    for (int i = 0; i < dd; ++i) channel_of[i] = rng.uniform_int(cc);
    lifetime::PowerMatrix powers = lifetime::PowerMatrix::zeros(dd, cc);
    bool feasible = true;
    for (int c = 0; c < cc && feasible; ++c) {
      std::vector<std::pair<int, double>> sharers;
      for (int i = 0; i < dd; ++i) {
        if (channel_of[i] == c) sharers.emplace_back(i, p.rate_target);
      }
      if (sharers.empty()) continue;
      const auto sol = lifetime::adjust_shared_powers(ctx, powers, c, sharers);
      if (!sol.has_value()) {
        feasible = false;
        break;
      }
      for (size_t s = 0; s < sharers.size(); ++s) {
        powers.at(sharers[s].first, c) = (*sol)[s];
      }
    }
    if (feasible) {
      out.add("mean_lifetime_random", mean_lifetime(powers));
      out.add("mean_lifetime_auction_paired", mean_lifetime(res.powers));
      for (int c = 0; c < cc; ++c) {
        out.add("cellular_rate_random", cellular_rate(powers, c));
      }
    } else {
      out.count("random_infeasible");
    }
  }

  if (p.centralized && dd <= 3 && cc <= 4) {
    const auto central = lifetime::exhaustive_max_lifetime(ctx, p.battery);
    if (central.has_value()) {
      out.add("mean_lifetime_centralized", mean_lifetime(central->powers));
    }
  }
  return out;
}

}  // namespace

std::function<DropResult(std::uint64_t)> make_drop_function(
    const ExperimentConfig& cfg) {
  const std::uint64_t seed = cfg.seed;
  switch (cfg.kind) {
    case ExperimentKind::kSinrDist: {
      const SinrDistParams p = sinr_dist_params(cfg.params);
      return [p, seed](std::uint64_t i) {
        Rng rng = Rng::for_drop(seed, i);
        return run_sinr_dist_drop(p, rng);
      };
    }
    case ExperimentKind::kModeSelect: {
      const ModeSelectParams p = mode_select_params(cfg.params);
      return [p, seed](std::uint64_t i) {
        Rng rng = Rng::for_drop(seed, i);
        return run_mode_select_drop(p, rng);
      };
    }
    case ExperimentKind::kThresholdPc: {
      const ThresholdPcParamsResolved p = threshold_pc_params(cfg.params);
      return [p, seed](std::uint64_t i) {
        Rng rng = Rng::for_drop(seed, i);
        return run_threshold_pc_drop(p, rng);
      };
    }
    case ExperimentKind::kBeamforming: {
      const BeamformingParams p = beamforming_params(cfg.params);
      return [p, seed](std::uint64_t i) {
        Rng rng = Rng::for_drop(seed, i);
        return run_beamforming_drop(p, rng);
      };
    }
    case ExperimentKind::kAuction: {
      const AuctionParams p = auction_params(cfg.params);
      return [p, seed](std::uint64_t i) {
        Rng rng = Rng::for_drop(seed, i);
        return run_auction_drop(p, rng, i);
      };
    }
    case ExperimentKind::kScheduling: {
      const SchedulingParams p = scheduling_params(cfg.params);
      return [p, seed](std::uint64_t i) {
        Rng rng = Rng::for_drop(seed, i);
        return run_scheduling_drop(p, rng, i);
      };
    }
    case ExperimentKind::kLifetime: {
      const LifetimeParams p = lifetime_params(cfg.params);
      return [p, seed](std::uint64_t i) {
        Rng rng = Rng::for_drop(seed, i);
        return run_lifetime_drop(p, rng, i);
      };
    }
  }
  throw std::logic_error("unknown experiment kind");
}

}  // namespace d2d::harness::detail
