#pragma once

#include <Eigen/Dense>
#include <complex>

namespace d2d::beamforming {

// Downlink MISO channel for one cellular user and one D2D pair; the BS has
// two antennas, both UEs a single antenna.
struct MisoChannel {
  Eigen::Vector2cd h_c;  // BS -> cellular user signal channel
  Eigen::Vector2cd h_d;  // BS -> D2D receiver interference channel
  double h_dd = 0.0;     // D2D direct amplitude gain
  double h_dc = 0.0;     // D2D tx -> cellular user amplitude gain
  double p_b_mw = 0.0;
  double n0_mw = 0.0;
  double beta_c = 0.0;  // linear SINR thresholds
  double beta_d = 0.0;
  double p_max_mw = 0.0;
};

struct Beamformer {
  Eigen::Vector2cd w;  // unit norm
};

double slnr(const MisoChannel& ch, const Eigen::Vector2cd& w);

// Closed-form SLNR-maximizing unit beamformer.
Beamformer slnr_beamformer(const MisoChannel& ch);

struct D2dPowerResult {
  bool feasible = false;
  double p_mw = 0.0;
  double lo_mw = 0.0;
  double hi_mw = 0.0;
};

// Sum-rate maximizing D2D power over the SINR-feasible interval; interval
// endpoints plus interior stationary points are compared, ties toward the
// smaller power.
D2dPowerResult optimal_d2d_power(const MisoChannel& ch, const Beamformer& bf);

double dl_pair_sum_rate(const MisoChannel& ch, const Beamformer& bf,
                        double p_d_mw);

double cellular_sinr(const MisoChannel& ch, const Beamformer& bf,
                     double p_d_mw);
double d2d_sinr(const MisoChannel& ch, const Beamformer& bf, double p_d_mw);

}  // namespace d2d::beamforming
