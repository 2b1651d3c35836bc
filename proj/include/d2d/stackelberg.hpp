#pragma once

#include <vector>

namespace d2d::stackelberg {

// One leader-follower game: cellular UE k (leader, fixed power p_k) prices
// the channel, D2D pair i (follower) buys transmit power.
struct PairGame {
  double g_ke = 0.0;  // leader -> eNB
  double g_ki = 0.0;  // leader -> D2D receiver
  double g_ie = 0.0;  // D2D tx -> eNB
  double g_ii = 0.0;  // D2D direct
  double p_k_mw = 0.0;
  double n0_mw = 0.0;
  double beta = 1.0;  // leader gain per unit of payment
  double p_min_mw = 0.0;
  double p_max_mw = 0.0;
};

// Coefficients of the leader's reduced utility u_k(a) =
// log2(1 + A a / (C a + B)) + (C - n0) beta a + B beta.
struct AuxCoefficients {
  double a = 0.0;  // p_k g_ke
  double b = 0.0;  // 1 / ln 2
  double c = 0.0;  // -g_ie (p_k g_ki + n0) / g_ii + n0
};

AuxCoefficients aux_coefficients(const PairGame& game);

double follower_utility(const PairGame& game, double alpha, double p_mw);
double leader_utility(const PairGame& game, double alpha, double p_mw);

// Unconstrained stationary power 1/(a g_ie ln2) - (p_k g_ki + n0)/g_ii.
double follower_stationary_power(const PairGame& game, double alpha);

// Utility-maximizing power among {p_min, p_max, interior stationary point};
// ties toward the smaller power.
double follower_best_response(const PairGame& game, double alpha);

struct PriceBounds {
  double lo = 0.0;
  double hi = 0.0;
};

// Price range keeping the follower's stationary power inside [p_min, p_max].
PriceBounds price_bounds(const PairGame& game);

struct EquilibriumOutcome {
  double alpha_star = 0.0;
  double p_star = 0.0;
  double u_leader = 0.0;
  double u_follower = 0.0;
  bool interior = false;  // an interior candidate won (vs a price bound)
};

// Stackelberg solution: the optimal price is searched over the price bounds
// plus every closed-form interior candidate; the follower reacts with its
// best response.
EquilibriumOutcome leader_optimal_price(const PairGame& game);

struct SchedulerState {
  std::vector<double> cumulative_cost;  // c_i(t)
  int tti = 0;
  double fairness_delta = 0.0;
};

SchedulerState make_scheduler_state(int num_pairs, double fairness_delta);

struct TtiAssignment {
  std::vector<int> pair_for_channel;  // [k], -1 = unassigned
  std::vector<EquilibriumOutcome> outcome;  // [i][k] flattened (i*K + k)
};

// One TTI of the joint scheduler: solve all pair/channel games, rank by
// priority u_i - c_i, greedily assign one pair per channel, then accumulate
// delta * u_i for the scheduled pairs.
TtiAssignment schedule_tti(const std::vector<PairGame>& games, int num_pairs,
                           int num_channels, SchedulerState& state);

}  // namespace d2d::stackelberg
