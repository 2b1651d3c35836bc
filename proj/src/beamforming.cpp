#include "d2d/beamforming.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace d2d::beamforming {

namespace {

double desired_power(const MisoChannel& ch, const Eigen::Vector2cd& w) {
  return std::norm(ch.h_c.dot(w));  // |h_c^H w|^2 (dot conjugates the left arg)
}

double leakage_power(const MisoChannel& ch, const Eigen::Vector2cd& w) {
  return std::norm(ch.h_d.dot(w));
}

}  // namespace

double slnr(const MisoChannel& ch, const Eigen::Vector2cd& w) {
  return desired_power(ch, w) /
         (leakage_power(ch, w) + ch.n0_mw / ch.p_b_mw);
}

Beamformer slnr_beamformer(const MisoChannel& ch) {
  if (ch.h_c.norm() <= 0.0) {
    throw std::domain_error("degenerate channel: h_c is zero");
  }
  if (!(ch.p_b_mw > 0.0) || !(ch.n0_mw > 0.0)) {
    throw std::domain_error("BS power and noise must be positive");
  }
  Eigen::Matrix2cd h;
  h.col(0) = ch.h_c;
  h.col(1) = ch.h_d;
  Eigen::Matrix2cd m = h * h.adjoint();
  m += (ch.n0_mw / ch.p_b_mw) * Eigen::Matrix2cd::Identity();
  Eigen::Vector2cd w = m.inverse() * ch.h_c;
  const double rho = w.norm();
  Beamformer bf;
  bf.w = w / rho;
  return bf;
}

double cellular_sinr(const MisoChannel& ch, const Beamformer& bf,
                     double p_d_mw) {
  const double signal = ch.p_b_mw * desired_power(ch, bf.w);
  return signal / (p_d_mw * ch.h_dc * ch.h_dc + ch.n0_mw);
}

double d2d_sinr(const MisoChannel& ch, const Beamformer& bf, double p_d_mw) {
  const double interference = ch.p_b_mw * leakage_power(ch, bf.w) + ch.n0_mw;
  return p_d_mw * ch.h_dd * ch.h_dd / interference;
}

double dl_pair_sum_rate(const MisoChannel& ch, const Beamformer& bf,
                        double p_d_mw) {
  if (p_d_mw < 0.0) {
    throw std::domain_error("D2D power must be non-negative");
  }
  return std::log2(1.0 + cellular_sinr(ch, bf, p_d_mw)) +
         std::log2(1.0 + d2d_sinr(ch, bf, p_d_mw));
}

D2dPowerResult optimal_d2d_power(const MisoChannel& ch, const Beamformer& bf) {
  D2dPowerResult out;
  const double s = ch.p_b_mw * desired_power(ch, bf.w);      // signal at UE_c
  const double m = ch.p_b_mw * leakage_power(ch, bf.w) + ch.n0_mw;
  const double a = ch.h_dc * ch.h_dc;
  const double b = ch.h_dd * ch.h_dd;
  const double n = ch.n0_mw;

  if (!(b > 0.0)) return out;  // D2D link cannot carry power

  out.lo_mw = m * ch.beta_d / b;
  if (a > 0.0) {
    const double cap = (s / ch.beta_c - n) / a;
    if (cap < 0.0) return out;  // cellular SINR unreachable
    out.hi_mw = std::min(cap, ch.p_max_mw);
  } else {
    if (s / n < ch.beta_c) return out;
    out.hi_mw = ch.p_max_mw;
  }
  if (out.lo_mw > out.hi_mw) return out;

  std::vector<double> candidates = {out.lo_mw, out.hi_mw};
  if (a > 0.0) {
    // dR/dP = 0 reduces to a^2 b P^2 + 2 a b n P + (b n (n+s) - s a m) = 0.
    const double disc = b * s * (a * m - b * n);
    if (disc > 0.0) {
      const double root = (-b * n + std::sqrt(disc)) / (a * b);
      if (root > out.lo_mw && root < out.hi_mw) candidates.push_back(root);
    }
  }
  std::sort(candidates.begin(), candidates.end());

  out.feasible = true;
  double best_rate = -1.0;
  for (double p : candidates) {
    const double rate = dl_pair_sum_rate(ch, bf, p);
    if (rate > best_rate) {  // ties keep the smaller power
      best_rate = rate;
      out.p_mw = p;
    }
  }
  return out;
}

}  // namespace d2d::beamforming
