#pragma once

#include <optional>
#include <string>
#include <vector>

namespace d2d::lifetime {

// Peukert battery model; lifetime in hours for capacity in A*h.
struct BatteryModel {
  double capacity_ah = 0.8;
  double peukert = 1.3;
  double voltage_v = 4.0;
  double circuit_power_mw = 100.0;
};

double battery_lifetime_hours(const BatteryModel& model,
                              double avg_total_power_mw);

// Uplink sharing context for the rate-constrained power game. Gains are flat
// across channels; the per-channel quality varies through the cellular
// occupant and the other players' powers.
struct GameContext {
  int num_pairs = 0;     // D
  int num_channels = 0;  // C
  std::vector<double> g_pair;      // [i] g_ii
  std::vector<double> g_cross;     // [j][i] g_ji, diagonal unused
  std::vector<double> g_cell_d2d;  // [c][i] g_ci
  std::vector<double> p_cell_mw;   // [c] cellular transmit power
  double n0_mw = 0.0;
  double rate_target = 0.0;  // R, per pair

  double gain_cross(int j, int i) const {
    return g_cross[static_cast<size_t>(j) * num_pairs + i];
  }
  double gain_cell(int c, int i) const {
    return g_cell_d2d[static_cast<size_t>(c) * num_pairs + i];
  }
};

struct PowerMatrix {
  int num_pairs = 0;
  int num_channels = 0;
  std::vector<double> p;  // [i][c]

  static PowerMatrix zeros(int pairs, int channels) {
    PowerMatrix m;
    m.num_pairs = pairs;
    m.num_channels = channels;
    m.p.assign(static_cast<size_t>(pairs) * channels, 0.0);
    return m;
  }
  double at(int i, int c) const {
    return p[static_cast<size_t>(i) * num_channels + c];
  }
  double& at(int i, int c) {
    return p[static_cast<size_t>(i) * num_channels + c];
  }
  double row_total(int i) const {
    double s = 0.0;
    for (int c = 0; c < num_channels; ++c) s += at(i, c);
    return s;
  }
};

// Per-channel quality q_i^c = (p_0^c g_ci + sum_{j != i} p_j^c g_ji + N0)/g_ii.
std::vector<double> effective_interference(const GameContext& ctx,
                                           const PowerMatrix& p, int i);

// Water-filling best response: minimum-power vector achieving rate R over
// channels with qualities q.
std::vector<double> best_response(const std::vector<double>& q, double rate);

double achieved_rate(const std::vector<double>& q,
                     const std::vector<double>& p);

struct AuctionLedger {
  double unit_price = 0.0;                // beta
  std::vector<int> occupants_per_channel;  // m_c
  std::vector<int> channels_per_pair;      // n_i
  std::vector<bool> sold;                  // [i][c]

  bool is_sold(int i, int c) const {
    return sold[static_cast<size_t>(i) * occupants_per_channel.size() + c];
  }
};

// Linear-pricing cost of buying channel c: power plus beta (m_c + n_i). The
// associated utility is its negation.
double priced_cost(double p_mw, const AuctionLedger& ledger, int i, int c);

// Re-solve the powers on one shared channel so every sharer meets its target
// rate exactly; returns powers aligned with `sharers`, or nullopt when the
// system is singular or produces a non-positive component.
std::optional<std::vector<double>> adjust_shared_powers(
    const GameContext& ctx, const PowerMatrix& p, int channel,
    const std::vector<std::pair<int, double>>& sharer_rates);

struct AuctionModeOptions {
  bool exclusive_channel = false;  // at most one pair per channel
  bool single_channel = false;     // at most one channel per pair
};

struct ResourceAuctionResult {
  PowerMatrix powers;
  AuctionLedger ledger;
  std::vector<double> rate_targets;  // [i][c]
  bool complete = false;
  int rounds = 0;
  std::string diagnostic;

  double target(int i, int c) const {
    return rate_targets[static_cast<size_t>(i) * powers.num_channels + c];
  }
};

// Iterative channel auction: each round the cheapest (pair, channel) cell
// wins, shared columns are re-solved keeping incumbents' rates, until every
// pair holds at least one channel or the round cap D*C*4 is hit.
ResourceAuctionResult run_resource_auction(const GameContext& ctx,
                                           double unit_price,
                                           const AuctionModeOptions& = {});

struct NashResult {
  PowerMatrix powers;
  bool converged = false;
  int sweeps = 0;
};

// Synchronous iterated best response from the all-zero profile; a fixed
// point is a Nash equilibrium of the power game.
NashResult find_nash(const GameContext& ctx, int max_sweeps = 1000,
                     double tol_mw = 1e-8);

// Centralized baseline: exhaustive search over single-channel assignments
// maximizing total lifetime. Guarded to D <= 3, C <= 4.
std::optional<ResourceAuctionResult> exhaustive_max_lifetime(
    const GameContext& ctx, const BatteryModel& model);

}  // namespace d2d::lifetime
