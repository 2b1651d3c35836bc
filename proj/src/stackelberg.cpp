#include "d2d/stackelberg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace d2d::stackelberg {

namespace {
constexpr double kLn2 = 0.6931471805599453;
}

AuxCoefficients aux_coefficients(const PairGame& game) {
  AuxCoefficients aux;
  aux.a = game.p_k_mw * game.g_ke;
  aux.b = 1.0 / kLn2;
  aux.c = -game.g_ie * (game.p_k_mw * game.g_ki + game.n0_mw) / game.g_ii +
          game.n0_mw;
  return aux;
}

double follower_utility(const PairGame& game, double alpha, double p_mw) {
  return std::log2(1.0 + p_mw * game.g_ii /
                             (game.p_k_mw * game.g_ki + game.n0_mw)) -
         alpha * p_mw * game.g_ie;
}

double leader_utility(const PairGame& game, double alpha, double p_mw) {
  return std::log2(1.0 + game.p_k_mw * game.g_ke /
                             (p_mw * game.g_ie + game.n0_mw)) +
         alpha * game.beta * p_mw * game.g_ie;
}

double follower_stationary_power(const PairGame& game, double alpha) {
  return 1.0 / (alpha * game.g_ie * kLn2) -
         (game.p_k_mw * game.g_ki + game.n0_mw) / game.g_ii;
}

double follower_best_response(const PairGame& game, double alpha) {
  if (!(alpha > 0.0)) throw std::domain_error("price must be positive");
  double best_p = game.p_min_mw;
  double best_u = follower_utility(game, alpha, best_p);
  const double u_max = follower_utility(game, alpha, game.p_max_mw);
  if (u_max > best_u) {
    best_p = game.p_max_mw;
    best_u = u_max;
  }
  const double p_hat = follower_stationary_power(game, alpha);
  if (p_hat > game.p_min_mw && p_hat < game.p_max_mw) {
    const double u_hat = follower_utility(game, alpha, p_hat);
    if (u_hat > best_u || (u_hat == best_u && p_hat < best_p)) {
      best_p = p_hat;
      best_u = u_hat;
    }
  }
  return best_p;
}

PriceBounds price_bounds(const PairGame& game) {
  const double load = game.p_k_mw * game.g_ki + game.n0_mw;
  PriceBounds bounds;
  bounds.lo = game.g_ii /
              ((game.g_ii * game.p_max_mw + load) * game.g_ie * kLn2);
  bounds.hi = game.g_ii /
              ((game.g_ii * game.p_min_mw + load) * game.g_ie * kLn2);
  return bounds;
}

EquilibriumOutcome leader_optimal_price(const PairGame& game) {
  const PriceBounds bounds = price_bounds(game);
  const AuxCoefficients aux = aux_coefficients(game);
  const double a = aux.a;
  const double b = aux.b;
  const double c = aux.c;
  const double n0 = game.n0_mw;

  // The sign analysis of du_k/da yields one closed form per case; all of
  // them are seeded as candidates and evaluation picks the winner.
  std::vector<double> candidates = {bounds.lo, bounds.hi};
  auto push = [&](double alpha) {
    if (std::isfinite(alpha) && alpha > bounds.lo && alpha < bounds.hi) {
      candidates.push_back(alpha);
    }
  };
  if (n0 * game.beta > 0.0 && a > 0.0) {
    push(b / (n0 * game.beta) - b / a);  // case C = 0
  }
  if (a > 0.0) {
    push(b / a - b / ((a + n0) * game.beta));  // case A + C = 0
  }
  if (c != 0.0 && a + c != 0.0 && n0 != c) {
    const double disc =
        a * b * b * (a + 4.0 * c * (a + c) / ((n0 - c) * game.beta));
    if (disc >= 0.0) {
      const double root = std::sqrt(disc);
      push((-b * (a + 2.0 * c) + root) / (2.0 * c * (a + c)));
      push((-b * (a + 2.0 * c) - root) / (2.0 * c * (a + c)));
    }
  }
  std::sort(candidates.begin(), candidates.end());

  EquilibriumOutcome out;
  double best_u = -std::numeric_limits<double>::infinity();
  for (const double alpha : candidates) {
    const double p = follower_best_response(game, alpha);
    const double u = leader_utility(game, alpha, p);
    if (u > best_u) {
      best_u = u;
      out.alpha_star = alpha;
      out.p_star = p;
      out.u_leader = u;
      out.interior = alpha != bounds.lo && alpha != bounds.hi;
    }
  }
  out.u_follower = follower_utility(game, out.alpha_star, out.p_star);
  return out;
}

SchedulerState make_scheduler_state(int num_pairs, double fairness_delta) {
  SchedulerState state;
  state.cumulative_cost.assign(num_pairs, 0.0);
  state.fairness_delta = fairness_delta;
  return state;
}

TtiAssignment schedule_tti(const std::vector<PairGame>& games, int num_pairs,
                           int num_channels, SchedulerState& state) {
  if (static_cast<int>(games.size()) != num_pairs * num_channels) {
    throw std::invalid_argument("expected one game per (pair, channel)");
  }
  TtiAssignment out;
  out.pair_for_channel.assign(num_channels, -1);
  out.outcome.resize(games.size());

  struct Entry {
    double priority;
    int pair;
    int channel;
  };
  std::vector<Entry> queue;
  queue.reserve(games.size());
  for (int i = 0; i < num_pairs; ++i) {
    for (int k = 0; k < num_channels; ++k) {
      const size_t idx = static_cast<size_t>(i) * num_channels + k;
      out.outcome[idx] = leader_optimal_price(games[idx]);
      queue.push_back(
          {out.outcome[idx].u_follower - state.cumulative_cost[i], i, k});
    }
  }
  std::sort(queue.begin(), queue.end(), [](const Entry& x, const Entry& y) {
    if (x.priority != y.priority) return x.priority > y.priority;
    if (x.pair != y.pair) return x.pair < y.pair;
    return x.channel < y.channel;
  });

  std::vector<bool> pair_taken(num_pairs, false);
  int assigned = 0;
  for (const Entry& e : queue) {
    if (assigned == num_channels) break;
    if (pair_taken[e.pair] || out.pair_for_channel[e.channel] != -1) continue;
    out.pair_for_channel[e.channel] = e.pair;
    pair_taken[e.pair] = true;
    ++assigned;
    const size_t idx = static_cast<size_t>(e.pair) * num_channels + e.channel;
    state.cumulative_cost[e.pair] +=
        state.fairness_delta * out.outcome[idx].u_follower;
  }
  ++state.tti;
  return out;
}

}  // namespace d2d::stackelberg
