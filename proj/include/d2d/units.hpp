#pragma once

#include <cmath>

namespace d2d {

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }
inline double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }
inline double mw_to_dbm(double mw) { return 10.0 * std::log10(mw); }

// Thermal noise over a bandwidth: density + 10*log10(B) + noise figure.
inline double noise_power_mw(double density_dbm_hz, double bandwidth_hz,
                             double noise_figure_db) {
  return dbm_to_mw(density_dbm_hz + 10.0 * std::log10(bandwidth_hz) +
                   noise_figure_db);
}

inline double shannon_rate(double sinr_linear) {
  return std::log2(1.0 + sinr_linear);
}

}  // namespace d2d
