#pragma once

#include <optional>
#include <vector>

#include "d2d/rng.hpp"
#include "d2d/units.hpp"

namespace d2d::propagation {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline double distance(const Vec2& a, const Vec2& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

// WINNER II scenario rows. The outdoor-to-indoor row models long-distance
// interference between a D2D user and a cellular user.
enum class LinkScenario {
  kD2dLos,
  kD2dNlos,
  kCellularLos,
  kCellularNlos,
  kOutdoorToIndoor,
};

enum class LinkFamily { kD2d, kCellular, kInterference };

enum class ModeCriterion { kCellular, kForceD2d, kPlD2d };
enum class Mode { kCellular, kD2d };

struct PropagationParams {
  double carrier_frequency_hz = 2.0e9;
  double bs_antenna_height_m = 25.0;
  double ms_antenna_height_m = 1.5;
  double effective_environment_height_m = 1.0;
  double noise_spectral_density_dbm_hz = -174.0;
  double noise_figure_bs_db = 5.0;
  double noise_figure_ue_db = 9.0;
  double bandwidth_per_subcarrier_hz = 15e3;
  double antenna_gain_bs_dbi = 14.0;
  double antenna_gain_ue_dbi = 0.0;
  int nlos_wall_count = 1;
  // Indoor depth assumed for the outdoor-to-indoor row (theta = 0).
  double o2i_indoor_depth_m = 3.0;
  // Interference links at or below this distance use the D2D rows.
  double interference_d2d_cutoff_m = 25.0;

  // d_BP' = 4 h'_BS h'_MS f_c / c with effective heights h - 1.0 m.
  double breakpoint_distance_m() const {
    const double h_bs = bs_antenna_height_m - effective_environment_height_m;
    const double h_ms = ms_antenna_height_m - effective_environment_height_m;
    return 4.0 * h_bs * h_ms * carrier_frequency_hz / 3.0e8;
  }

  double noise_power_bs_mw() const {
    return noise_power_mw(noise_spectral_density_dbm_hz,
                          bandwidth_per_subcarrier_hz, noise_figure_bs_db);
  }
  double noise_power_ue_mw() const {
    return noise_power_mw(noise_spectral_density_dbm_hz,
                          bandwidth_per_subcarrier_hz, noise_figure_ue_db);
  }

  void validate() const;  // throws std::invalid_argument
};

struct O2iGeometry {
  double d_out_m = 0.0;
  double d_in_m = 0.0;
  double theta_rad = 0.0;
};

struct PathLossValue {
  double db = 0.0;
  bool clamped = false;  // distance fell outside the row's validity window
};

PathLossValue path_loss_detail(LinkScenario scenario, double distance_m,
                               const PropagationParams& params,
                               std::optional<O2iGeometry> o2i = std::nullopt);

double path_loss_db(LinkScenario scenario, double distance_m,
                    const PropagationParams& params,
                    std::optional<O2iGeometry> o2i = std::nullopt);

double shadow_sigma_db(LinkScenario scenario, double distance_m,
                       const PropagationParams& params);

// LOS probability for the D2D and cellular families, clamped into [0,1].
double los_probability(LinkFamily family, double distance_m);

struct LinkGain {
  LinkScenario scenario = LinkScenario::kD2dLos;
  double distance_m = 0.0;
  double path_loss_db = 0.0;
  double shadow_db = 0.0;
  double fast_fading_power = 1.0;  // |h0|^2, exponential with mean 1
  double antenna_gain_db = 0.0;    // sum of both link ends
  bool clamped = false;

  // Path loss + shadow + antenna gains, without fast fading.
  double large_scale_linear() const {
    return db_to_linear(-(path_loss_db + shadow_db) + antenna_gain_db);
  }
  double composite_linear_gain() const {
    return large_scale_linear() * fast_fading_power;
  }
};

LinkGain draw_link(Rng& rng, const Vec2& tx, const Vec2& rx, LinkFamily family,
                   const PropagationParams& params);

double received_power_mw(double p_tx_mw, const LinkGain& gain);

// Simple free-space gain d^-alpha * |h0|^2 used by the uplink game models.
double free_space_gain(Rng& rng, double distance_m, double exponent = 2.0);

struct DropLayout {
  enum class Kind { kSingleCell, kHex19 };
  Kind kind = Kind::kSingleCell;
  double cell_radius_m = 500.0;
};

std::vector<Vec2> hex19_bs_positions(double cell_radius_m);

// One Monte Carlo placement with all pairwise link gains. In the multi-cell
// layout every cell hosts `cellular_per_cell` users and `pairs_per_cell` D2D
// pairs; lists are cell-major.
struct UserDrop {
  DropLayout layout;
  int cellular_per_cell = 0;
  int pairs_per_cell = 0;
  double pair_distance_limit_m = 0.0;

  std::vector<Vec2> bs_positions;
  std::vector<Vec2> cellular_positions;
  std::vector<Vec2> d2d_tx_positions;
  std::vector<Vec2> d2d_rx_positions;
  std::vector<int> cellular_cell;  // owning cell per cellular user
  std::vector<int> d2d_cell;       // owning cell per pair

  // Gain tables, row-major. Links are drawn once per drop and reciprocal.
  std::vector<LinkGain> cell_bs;      // [c][b] cellular user <-> BS
  std::vector<LinkGain> d2dtx_bs;     // [d][b]
  std::vector<LinkGain> d2drx_bs;     // [d][b]
  std::vector<LinkGain> pair;         // [d] direct link
  std::vector<LinkGain> d2dtx_cell;   // [d][c] D2D tx -> cellular user
  std::vector<LinkGain> cell_d2drx;   // [c][d] cellular user -> D2D rx
  std::vector<LinkGain> d2dtx_d2drx;  // [d_tx][d_rx], diagonal unused

  int num_bs() const { return static_cast<int>(bs_positions.size()); }
  int num_cellular() const { return static_cast<int>(cellular_positions.size()); }
  int num_pairs() const { return static_cast<int>(d2d_tx_positions.size()); }

  const LinkGain& gain_cell_bs(int c, int b) const {
    return cell_bs[static_cast<size_t>(c) * num_bs() + b];
  }
  const LinkGain& gain_d2dtx_bs(int d, int b) const {
    return d2dtx_bs[static_cast<size_t>(d) * num_bs() + b];
  }
  const LinkGain& gain_d2drx_bs(int d, int b) const {
    return d2drx_bs[static_cast<size_t>(d) * num_bs() + b];
  }
  const LinkGain& gain_pair(int d) const { return pair[d]; }
  const LinkGain& gain_d2dtx_cell(int d, int c) const {
    return d2dtx_cell[static_cast<size_t>(d) * num_cellular() + c];
  }
  const LinkGain& gain_cell_d2drx(int c, int d) const {
    return cell_d2drx[static_cast<size_t>(c) * num_pairs() + d];
  }
  const LinkGain& gain_d2dtx_d2drx(int d_tx, int d_rx) const {
    return d2dtx_d2drx[static_cast<size_t>(d_tx) * num_pairs() + d_rx];
  }
};

UserDrop drop_users(Rng& rng, const DropLayout& layout, int cellular_per_cell,
                    int pairs_per_cell, double pair_distance_limit_m,
                    const PropagationParams& params, bool with_gains = true);

Mode select_mode(double pl_src_bs_db, double pl_dst_bs_db, double pl_direct_db,
                 ModeCriterion criterion);

}  // namespace d2d::propagation
