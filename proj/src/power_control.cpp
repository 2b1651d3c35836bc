#include "d2d/power_control.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace d2d::powerctl {

double ofpc_power_dbm(const OfpcParams& params, double pathloss_db) {
  if (!std::isfinite(pathloss_db)) {
    throw std::domain_error("OFPC requires a finite path loss");
  }
  return std::min(params.p_max_dbm,
                  params.p0_dbm + 10.0 * std::log10(params.m_rbs) +
                      params.alpha * pathloss_db);
}

double cellular_min_power_mw(const PcLinkSet& links,
                             const ThresholdPcParams& pc) {
  return pc.kappa * pc.beta_b * links.loss_cell_bs / links.gain_cell_bs *
         links.noise_mw;
}

double d2d_max_power_mw(const PcLinkSet& links, const ThresholdPcParams& pc) {
  return (pc.kappa - 1.0) * links.loss_d2d_bs / links.gain_d2d_bs *
         links.noise_mw;
}

double d2d_min_power_mw(const PcLinkSet& links, const ThresholdPcParams& pc,
                        double p_c_mw) {
  if (p_c_mw < 0.0) {
    throw std::domain_error("cellular power must be non-negative");
  }
  return links.loss_pair / links.gain_pair *
         (p_c_mw / links.loss_cell_d2d * links.gain_cell_d2d +
          links.noise_mw) *
         pc.beta_d;
}

AdjustedPower d2d_power_adjusted(const PcLinkSet& links,
                                 const ThresholdPcParams& pc) {
  if (!(links.est_gain_d2d_bs > 0.0) || !(links.est_gain_pair > 0.0)) {
    throw std::domain_error("estimated gains must be positive");
  }
  const double max_star = (pc.kappa - 1.0) * links.loss_d2d_bs *
                          links.noise_mw / links.est_gain_d2d_bs;
  const double raw = max_star / links.est_gain_pair;
  const double p_c = cellular_min_power_mw(links, pc);
  const double lo = d2d_min_power_mw(links, pc, p_c);
  const double hi = pc.p_ue_max_mw;

  AdjustedPower out;
  if (lo > hi) {
    out.outcome = ClampOutcome::kInfeasible;
    out.power_mw = 0.0;  // the pair defers transmission
    return out;
  }
  if (raw < lo) {
    out.power_mw = lo;
    out.outcome = ClampOutcome::kClampedLow;
  } else if (raw > hi) {
    out.power_mw = hi;
    out.outcome = ClampOutcome::kClampedHigh;
  } else {
    out.power_mw = raw;
    out.outcome = ClampOutcome::kFeasible;
  }
  return out;
}

double power_saving_factor(double p_c_ol_mw, double p_d_fixed_mw,
                           double p_d_star_mw) {
  const double base = p_c_ol_mw + p_d_fixed_mw;
  if (!(base > 0.0)) {
    throw std::domain_error("power saving requires a positive baseline");
  }
  return (base - (p_c_ol_mw + p_d_star_mw)) / base;
}

double energy_efficiency(double sinr_c, double sinr_d, double p_c_mw,
                         double p_d_mw) {
  const double total = p_c_mw + p_d_mw;
  if (!(total > 0.0)) {
    throw std::domain_error("energy efficiency requires positive total power");
  }
  return (std::log2(1.0 + sinr_c) + std::log2(1.0 + sinr_d)) / total;
}

}  // namespace d2d::powerctl
