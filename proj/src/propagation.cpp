#include "d2d/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace d2d::propagation {

namespace {

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

}  // namespace

void PropagationParams::validate() const {
  if (carrier_frequency_hz <= 0.0) {
    throw std::invalid_argument("carrier frequency must be positive");
  }
  if (bandwidth_per_subcarrier_hz <= 0.0) {
    throw std::invalid_argument("subcarrier bandwidth must be positive");
  }
  if (bs_antenna_height_m <= effective_environment_height_m ||
      ms_antenna_height_m <= effective_environment_height_m) {
    throw std::invalid_argument(
        "antenna heights must exceed the effective environment height");
  }
  if (nlos_wall_count < 0) {
    throw std::invalid_argument("wall count must be non-negative");
  }
}

PathLossValue path_loss_detail(LinkScenario scenario, double distance_m,
                               const PropagationParams& params,
                               std::optional<O2iGeometry> o2i) {
  if (!(distance_m > 0.0)) {
    throw std::domain_error("path loss requires a positive distance");
  }
  PathLossValue out;
  switch (scenario) {
    case LinkScenario::kD2dLos:
      out.db = 18.7 * std::log10(distance_m) + 46.8;
      return out;
    case LinkScenario::kD2dNlos:
      out.db = 36.8 * std::log10(distance_m) + 43.8 +
               5.0 * (params.nlos_wall_count - 1);
      return out;
    case LinkScenario::kCellularLos: {
      const double d_bp = params.breakpoint_distance_m();
      double d = distance_m;
      if (d < 10.0) {
        d = 10.0;
        out.clamped = true;
      } else if (d > 5000.0) {
        d = 5000.0;
        out.clamped = true;
      }
      if (d < d_bp) {
        out.db = 26.0 * std::log10(d) + 39.0;
      } else {
        // second branch taken at d == d_BP'
        const double h_bs =
            params.bs_antenna_height_m - params.effective_environment_height_m;
        const double h_ms =
            params.ms_antenna_height_m - params.effective_environment_height_m;
        out.db = 40.0 * std::log10(d) + 13.47 - 14.0 * std::log10(h_bs) -
                 14.0 * std::log10(h_ms);
      }
      return out;
    }
    case LinkScenario::kCellularNlos: {
      double d = distance_m;
      if (d < 50.0) {
        d = 50.0;
        out.clamped = true;
      } else if (d > 5000.0) {
        d = 5000.0;
        out.clamped = true;
      }
      const double h_bs = params.bs_antenna_height_m;
      out.db = (44.9 - 6.55 * std::log10(h_bs)) * std::log10(d) + 34.46 +
               5.83 * std::log10(h_bs);
      return out;
    }
    case LinkScenario::kOutdoorToIndoor: {
      O2iGeometry g;
      if (o2i.has_value()) {
        g = *o2i;
      } else {
        g.d_in_m = std::min(params.o2i_indoor_depth_m, distance_m / 2.0);
        g.d_out_m = distance_m - g.d_in_m;
        g.theta_rad = 0.0;
      }
      // PL_b uses the cellular LOS row as the PL_B1 stand-in.
      const PathLossValue pl_b = path_loss_detail(
          LinkScenario::kCellularLos, g.d_out_m + g.d_in_m, params);
      const double c = 1.0 - std::cos(g.theta_rad);
      const double pl_tw = 14.0 + 15.0 * c * c;
      const double pl_in = 0.5 * g.d_in_m;
      out.db = pl_b.db + pl_tw + pl_in;
      out.clamped = pl_b.clamped;
      return out;
    }
  }
  throw std::logic_error("unknown link scenario");
}

double path_loss_db(LinkScenario scenario, double distance_m,
                    const PropagationParams& params,
                    std::optional<O2iGeometry> o2i) {
  return path_loss_detail(scenario, distance_m, params, o2i).db;
}

double shadow_sigma_db(LinkScenario scenario, double distance_m,
                       const PropagationParams& params) {
  switch (scenario) {
    case LinkScenario::kD2dLos:
      return 3.0;
    case LinkScenario::kD2dNlos:
      return 4.0;
    case LinkScenario::kCellularLos:
      return distance_m < params.breakpoint_distance_m() ? 4.0 : 6.0;
    case LinkScenario::kCellularNlos:
      return 8.0;
    case LinkScenario::kOutdoorToIndoor:
      return 7.0;
  }
  throw std::logic_error("unknown link scenario");
}

double los_probability(LinkFamily family, double distance_m) {
  if (!(distance_m > 0.0)) {
    throw std::domain_error("LOS probability requires a positive distance");
  }
  switch (family) {
    case LinkFamily::kD2d: {
      if (distance_m <= 2.5) return 1.0;
      const double t = 1.24 - 0.61 * std::log10(distance_m);
      return clamp01(1.0 - 0.9 * std::cbrt(1.0 - t * t * t));
    }
    case LinkFamily::kCellular: {
      const double e = std::exp(-distance_m / 63.0);
      return clamp01(std::min(18.0 / distance_m, 1.0) * (1.0 - e) + e);
    }
    case LinkFamily::kInterference:
      break;
  }
  throw std::invalid_argument(
      "LOS probability is defined for the D2D and cellular families");
}

LinkGain draw_link(Rng& rng, const Vec2& tx, const Vec2& rx, LinkFamily family,
                   const PropagationParams& params) {
  const double d = distance(tx, rx);
  if (!(d > 0.0)) {
    throw std::domain_error("draw_link requires distinct positions");
  }

  LinkScenario scenario;
  double antenna_gain_db = 2.0 * params.antenna_gain_ue_dbi;
  switch (family) {
    case LinkFamily::kCellular:
      scenario = rng.bernoulli(los_probability(LinkFamily::kCellular, d))
                     ? LinkScenario::kCellularLos
                     : LinkScenario::kCellularNlos;
      antenna_gain_db = params.antenna_gain_bs_dbi + params.antenna_gain_ue_dbi;
      break;
    case LinkFamily::kD2d:
      scenario = rng.bernoulli(los_probability(LinkFamily::kD2d, d))
                     ? LinkScenario::kD2dLos
                     : LinkScenario::kD2dNlos;
      break;
    case LinkFamily::kInterference:
      if (d <= params.interference_d2d_cutoff_m) {
        scenario = rng.bernoulli(los_probability(LinkFamily::kD2d, d))
                       ? LinkScenario::kD2dLos
                       : LinkScenario::kD2dNlos;
      } else {
        scenario = LinkScenario::kOutdoorToIndoor;
      }
      break;
    default:
      throw std::logic_error("unknown link family");
  }

  LinkGain gain;
  gain.scenario = scenario;
  gain.distance_m = d;
  const PathLossValue pl = path_loss_detail(scenario, d, params);
  gain.path_loss_db = pl.db;
  gain.clamped = pl.clamped;
  gain.shadow_db = rng.normal(0.0, shadow_sigma_db(scenario, d, params));
  gain.fast_fading_power = rng.exponential(1.0);
  gain.antenna_gain_db = antenna_gain_db;
  return gain;
}

double received_power_mw(double p_tx_mw, const LinkGain& gain) {
  if (p_tx_mw < 0.0) {
    throw std::domain_error("transmit power must be non-negative");
  }
  return p_tx_mw * gain.composite_linear_gain();
}

double free_space_gain(Rng& rng, double distance_m, double exponent) {
  if (!(distance_m > 0.0)) {
    throw std::domain_error("free-space gain requires a positive distance");
  }
  return std::pow(distance_m, -exponent) * rng.exponential(1.0);
}

std::vector<Vec2> hex19_bs_positions(double cell_radius_m) {
  // Rings 0..2 of a hexagonal lattice, center cell first; neighbor spacing
  // sqrt(3) R.
  std::vector<Vec2> out;
  const double s = std::sqrt(3.0) * cell_radius_m;
  for (int q = -2; q <= 2; ++q) {
    for (int r = -2; r <= 2; ++r) {
      const int dist = (std::abs(q) + std::abs(r) + std::abs(q + r)) / 2;
      if (dist > 2) continue;
      out.push_back({s * (q + 0.5 * r), s * (std::sqrt(3.0) / 2.0) * r});
    }
  }
  std::sort(out.begin(), out.end(), [](const Vec2& a, const Vec2& b) {
    const double ra = a.x * a.x + a.y * a.y;
    const double rb = b.x * b.x + b.y * b.y;
    if (ra != rb) return ra < rb;
    if (a.x != b.x) return a.x < b.x;
    return a.y < b.y;
  });
  return out;
}

namespace {

Vec2 uniform_in_disc(Rng& rng, const Vec2& center, double radius) {
  const double r = radius * std::sqrt(rng.uniform());
  const double theta = 2.0 * 3.14159265358979323846 * rng.uniform();
  return {center.x + r * std::cos(theta), center.y + r * std::sin(theta)};
}

}  // namespace

UserDrop drop_users(Rng& rng, const DropLayout& layout, int cellular_per_cell,
                    int pairs_per_cell, double pair_distance_limit_m,
                    const PropagationParams& params, bool with_gains) {
  if (cellular_per_cell < 0 || pairs_per_cell < 0) {
    throw std::invalid_argument("user counts must be non-negative");
  }
  if (!(pair_distance_limit_m > 0.0)) {
    throw std::invalid_argument("pair distance limit must be positive");
  }
  if (!(layout.cell_radius_m > 0.0)) {
    throw std::invalid_argument("cell radius must be positive");
  }
  if (pair_distance_limit_m > 2.0 * layout.cell_radius_m) {
    throw std::invalid_argument(
        "pair distance limit exceeds the cell diameter");
  }

  UserDrop drop;
  drop.layout = layout;
  drop.cellular_per_cell = cellular_per_cell;
  drop.pairs_per_cell = pairs_per_cell;
  drop.pair_distance_limit_m = pair_distance_limit_m;
  drop.bs_positions = layout.kind == DropLayout::Kind::kHex19
                          ? hex19_bs_positions(layout.cell_radius_m)
                          : std::vector<Vec2>{{0.0, 0.0}};

  const double radius = layout.cell_radius_m;
  for (int cell = 0; cell < drop.num_bs(); ++cell) {
    const Vec2 bs = drop.bs_positions[cell];
    for (int c = 0; c < cellular_per_cell; ++c) {
      drop.cellular_positions.push_back(uniform_in_disc(rng, bs, radius));
      drop.cellular_cell.push_back(cell);
    }
    for (int d = 0; d < pairs_per_cell; ++d) {
      const Vec2 tx = uniform_in_disc(rng, bs, radius);
      Vec2 rx;
      int attempts = 0;
      do {
        rx = uniform_in_disc(rng, tx, pair_distance_limit_m);
        if (++attempts > 100000) {
          throw std::logic_error("pair placement did not converge");
        }
      } while (distance(rx, bs) > radius ||
               distance(rx, tx) <= 0.0);  // redraw until inside the cell
      drop.d2d_tx_positions.push_back(tx);
      drop.d2d_rx_positions.push_back(rx);
      drop.d2d_cell.push_back(cell);
    }
  }

  if (!with_gains) return drop;

  const int nb = drop.num_bs();
  const int nc = drop.num_cellular();
  const int nd = drop.num_pairs();
  drop.cell_bs.reserve(static_cast<size_t>(nc) * nb);
  for (int c = 0; c < nc; ++c) {
    for (int b = 0; b < nb; ++b) {
      drop.cell_bs.push_back(draw_link(rng, drop.cellular_positions[c],
                                       drop.bs_positions[b],
                                       LinkFamily::kCellular, params));
    }
  }
  drop.d2dtx_bs.reserve(static_cast<size_t>(nd) * nb);
  drop.d2drx_bs.reserve(static_cast<size_t>(nd) * nb);
  for (int d = 0; d < nd; ++d) {
    for (int b = 0; b < nb; ++b) {
      drop.d2dtx_bs.push_back(draw_link(rng, drop.d2d_tx_positions[d],
                                        drop.bs_positions[b],
                                        LinkFamily::kCellular, params));
      drop.d2drx_bs.push_back(draw_link(rng, drop.d2d_rx_positions[d],
                                        drop.bs_positions[b],
                                        LinkFamily::kCellular, params));
    }
  }
  drop.pair.reserve(nd);
  for (int d = 0; d < nd; ++d) {
    drop.pair.push_back(draw_link(rng, drop.d2d_tx_positions[d],
                                  drop.d2d_rx_positions[d], LinkFamily::kD2d,
                                  params));
  }
  drop.d2dtx_cell.reserve(static_cast<size_t>(nd) * nc);
  for (int d = 0; d < nd; ++d) {
    for (int c = 0; c < nc; ++c) {
      drop.d2dtx_cell.push_back(draw_link(rng, drop.d2d_tx_positions[d],
                                          drop.cellular_positions[c],
                                          LinkFamily::kInterference, params));
    }
  }
  drop.cell_d2drx.reserve(static_cast<size_t>(nc) * nd);
  for (int c = 0; c < nc; ++c) {
    for (int d = 0; d < nd; ++d) {
      drop.cell_d2drx.push_back(draw_link(rng, drop.cellular_positions[c],
                                          drop.d2d_rx_positions[d],
                                          LinkFamily::kInterference, params));
    }
  }
  drop.d2dtx_d2drx.resize(static_cast<size_t>(nd) * nd);
  for (int t = 0; t < nd; ++t) {
    for (int r = 0; r < nd; ++r) {
      if (t == r) continue;
      drop.d2dtx_d2drx[static_cast<size_t>(t) * nd + r] =
          draw_link(rng, drop.d2d_tx_positions[t], drop.d2d_rx_positions[r],
                    LinkFamily::kInterference, params);
    }
  }
  return drop;
}

Mode select_mode(double pl_src_bs_db, double pl_dst_bs_db, double pl_direct_db,
                 ModeCriterion criterion) {
  switch (criterion) {
    case ModeCriterion::kCellular:
      return Mode::kCellular;
    case ModeCriterion::kForceD2d:
      return Mode::kD2d;
    case ModeCriterion::kPlD2d:
      return (pl_src_bs_db > pl_direct_db || pl_dst_bs_db > pl_direct_db)
                 ? Mode::kD2d
                 : Mode::kCellular;
  }
  throw std::logic_error("unknown mode criterion");
}

}  // namespace d2d::propagation
