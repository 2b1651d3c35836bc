#pragma once

#include "d2d/units.hpp"

namespace d2d::powerctl {

// LTE uplink open-loop fractional power control.
struct OfpcParams {
  double p_max_dbm = 24.0;
  double p0_dbm = -78.0;
  double alpha = 0.8;
  int m_rbs = 1;
};

double ofpc_power_dbm(const OfpcParams& params, double pathloss_db);

// Threshold-based D2D power control. Thresholds are configured in dB and
// converted once to linear.
struct ThresholdPcParams {
  double kappa = 0.0;   // interference margin, linear (> 1)
  double beta_b = 0.0;  // minimum SINR at the BS, linear
  double beta_d = 0.0;  // minimum SINR at the D2D receiver, linear
  double p_ue_max_mw = 0.0;

  static ThresholdPcParams from_db(double kappa_db = 3.0,
                                   double beta_b_db = 10.0,
                                   double beta_d_db = 5.0,
                                   double p_ue_max_dbm = 23.0) {
    ThresholdPcParams p;
    p.kappa = db_to_linear(kappa_db);
    p.beta_b = db_to_linear(beta_b_db);
    p.beta_d = db_to_linear(beta_d_db);
    p.p_ue_max_mw = dbm_to_mw(p_ue_max_dbm);
    return p;
  }
};

// Linear path-loss factors L (so that received power = P L^-1 h) and channel
// gains h for the four links of one cellular/D2D sharing pair.
struct PcLinkSet {
  double loss_cell_bs = 1.0;   // L_cB
  double loss_d2d_bs = 1.0;    // L_dB
  double loss_pair = 1.0;      // L_dd
  double loss_cell_d2d = 1.0;  // L_cd
  double gain_cell_bs = 1.0;   // h_cB
  double gain_d2d_bs = 1.0;    // h_dB
  double gain_pair = 1.0;      // h_dd
  double gain_cell_d2d = 1.0;  // h_cd
  double est_gain_d2d_bs = 1.0;  // \hat h_dB
  double est_gain_pair = 1.0;    // \hat h_dd
  double noise_mw = 0.0;
};

enum class ClampOutcome { kFeasible, kClampedLow, kClampedHigh, kInfeasible };

struct AdjustedPower {
  double power_mw = 0.0;
  ClampOutcome outcome = ClampOutcome::kFeasible;
};

// Minimum cellular power meeting the margin-scaled SNR target.
double cellular_min_power_mw(const PcLinkSet& links,
                             const ThresholdPcParams& pc);

// Largest D2D power that keeps the BS SINR at beta_b given minimum-power
// cellular transmission.
double d2d_max_power_mw(const PcLinkSet& links, const ThresholdPcParams& pc);

// Smallest D2D power meeting the D2D receiver SINR target under cellular
// interference at p_c.
double d2d_min_power_mw(const PcLinkSet& links, const ThresholdPcParams& pc,
                        double p_c_mw);

// Estimation-based fine-tuned power, clamped into the feasible interval.
AdjustedPower d2d_power_adjusted(const PcLinkSet& links,
                                 const ThresholdPcParams& pc);

double power_saving_factor(double p_c_ol_mw, double p_d_fixed_mw,
                           double p_d_star_mw);

double energy_efficiency(double sinr_c, double sinr_d, double p_c_mw,
                         double p_d_mw);

}  // namespace d2d::powerctl
