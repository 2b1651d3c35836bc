#include "d2d/lifetime.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace d2d::lifetime {

double battery_lifetime_hours(const BatteryModel& model,
                              double avg_total_power_mw) {
  if (!(avg_total_power_mw >= model.circuit_power_mw) ||
      !(model.circuit_power_mw > 0.0)) {
    throw std::domain_error("average power must cover the circuit floor");
  }
  const double current_a = avg_total_power_mw * 1e-3 / model.voltage_v;
  return model.capacity_ah / std::pow(current_a, model.peukert);
}

std::vector<double> effective_interference(const GameContext& ctx,
                                           const PowerMatrix& p, int i) {
  std::vector<double> q(ctx.num_channels, 0.0);
  for (int c = 0; c < ctx.num_channels; ++c) {
    double load = ctx.p_cell_mw[c] * ctx.gain_cell(c, i) + ctx.n0_mw;
    for (int j = 0; j < ctx.num_pairs; ++j) {
      if (j != i) load += p.at(j, c) * ctx.gain_cross(j, i);
    }
    q[c] = load / ctx.g_pair[i];
  }
  return q;
}

double achieved_rate(const std::vector<double>& q,
                     const std::vector<double>& p) {
  double rate = 0.0;
  for (size_t c = 0; c < q.size(); ++c) {
    rate += std::log2(1.0 + p[c] / q[c]);
  }
  return rate;
}

std::vector<double> best_response(const std::vector<double>& q, double rate) {
  if (rate < 0.0) throw std::domain_error("rate target must be non-negative");
  if (rate == 0.0) return std::vector<double>(q.size(), 0.0);
  if (q.empty()) {
    throw std::domain_error("positive rate requires at least one channel");
  }
  for (double quality : q) {
    if (!(quality > 0.0)) {
      throw std::domain_error("channel qualities must be positive");
    }
  }
  const int n = static_cast<int>(q.size());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return q[a] < q[b]; });

  std::vector<double> best(n, 0.0);
  double best_total = std::numeric_limits<double>::infinity();
  double log_q_sum = 0.0;
  for (int k = 1; k <= n; ++k) {
    log_q_sum += std::log2(q[order[k - 1]]);
    // water level mu_k = (2^R prod q)^{1/k}
    const double mu = std::exp2((rate + log_q_sum) / k);
    std::vector<double> cand(n, 0.0);
    double total = 0.0;
    for (int c = 0; c < k; ++c) {
      cand[order[c]] = std::max(mu - q[order[c]], 0.0);
      total += cand[order[c]];
    }
    if (std::abs(achieved_rate(q, cand) - rate) > 1e-9) continue;
    if (total < best_total) {
      best_total = total;
      best = cand;
    }
  }
  return best;
}

double priced_cost(double p_mw, const AuctionLedger& ledger, int i, int c) {
  return p_mw +
         ledger.unit_price *
             (ledger.occupants_per_channel[c] + ledger.channels_per_pair[i]);
}

std::optional<std::vector<double>> adjust_shared_powers(
    const GameContext& ctx, const PowerMatrix& p, int channel,
    const std::vector<std::pair<int, double>>& sharer_rates) {
  const int n = static_cast<int>(sharer_rates.size());
  if (n == 0) return std::vector<double>{};
  for (const auto& [i, r] : sharer_rates) {
    if (!(r > 0.0)) {
      throw std::domain_error("sharer target rates must be positive");
    }
    (void)i;
  }
  Eigen::MatrixXd mat(n, n);
  Eigen::VectorXd rhs(n);
  for (int row = 0; row < n; ++row) {
    const int i = sharer_rates[row].first;
    const double r = sharer_rates[row].second;
    double load = ctx.p_cell_mw[channel] * ctx.gain_cell(channel, i) +
                  ctx.n0_mw;
    // interference from pairs outside the sharer set stays fixed
    for (int j = 0; j < ctx.num_pairs; ++j) {
      if (j == i) continue;
      bool in_set = false;
      for (const auto& [s, sr] : sharer_rates) {
        if (s == j) in_set = true;
        (void)sr;
      }
      if (!in_set) load += p.at(j, channel) * ctx.gain_cross(j, i);
    }
    rhs(row) = load;
    for (int col = 0; col < n; ++col) {
      const int j = sharer_rates[col].first;
      if (j == i) {
        mat(row, col) = ctx.g_pair[i] / (std::exp2(r) - 1.0);
      } else {
        mat(row, col) = -ctx.gain_cross(j, i);
      }
    }
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(mat);
  if (!lu.isInvertible()) return std::nullopt;
  Eigen::VectorXd sol = lu.solve(rhs);
  std::vector<double> out(n);
  for (int row = 0; row < n; ++row) {
    if (!(sol(row) > 0.0) || !std::isfinite(sol(row))) return std::nullopt;
    out[row] = sol(row);
  }
  return out;
}

namespace {

struct Candidate {
  int pair = -1;
  int channel = -1;
  double cost = std::numeric_limits<double>::infinity();
  double power = 0.0;
  // proposed rate split over the pair's channels after acquiring `channel`
  std::vector<std::pair<int, double>> split;
};

std::vector<int> owned_channels(const ResourceAuctionResult& state, int i) {
  std::vector<int> owned;
  for (int c = 0; c < state.powers.num_channels; ++c) {
    if (state.ledger.is_sold(i, c)) owned.push_back(c);
  }
  return owned;
}

// Try to commit a winning cell: set the winner's new rate split and re-solve
// every affected column keeping all sharers' targets. Returns false when any
// column becomes infeasible.
bool try_commit(const GameContext& ctx, ResourceAuctionResult& state,
                const Candidate& cand) {
  std::vector<double> new_targets(
      static_cast<size_t>(ctx.num_channels), 0.0);
  for (const auto& [c, r] : cand.split) new_targets[c] = r;

  std::vector<int> affected;
  for (int c = 0; c < ctx.num_channels; ++c) {
    if (new_targets[c] != state.target(cand.pair, c)) affected.push_back(c);
  }
  if (std::find(affected.begin(), affected.end(), cand.channel) ==
      affected.end()) {
    affected.push_back(cand.channel);
  }

  PowerMatrix updated = state.powers;
  for (int c : affected) {
    std::vector<std::pair<int, double>> sharers;
    for (int j = 0; j < ctx.num_pairs; ++j) {
      const double r = j == cand.pair ? new_targets[c] : state.target(j, c);
      if (r > 0.0) sharers.emplace_back(j, r);
    }
    if (sharers.empty()) {
      for (int j = 0; j < ctx.num_pairs; ++j) updated.at(j, c) = 0.0;
      continue;
    }
    auto sol = adjust_shared_powers(ctx, updated, c, sharers);
    if (!sol.has_value()) return false;
    for (int j = 0; j < ctx.num_pairs; ++j) updated.at(j, c) = 0.0;
    for (size_t s = 0; s < sharers.size(); ++s) {
      updated.at(sharers[s].first, c) = (*sol)[s];
    }
  }

  state.powers = std::move(updated);
  for (int c = 0; c < ctx.num_channels; ++c) {
    state.rate_targets[static_cast<size_t>(cand.pair) * ctx.num_channels + c] =
        new_targets[c];
  }
  return true;
}

}  // namespace

ResourceAuctionResult run_resource_auction(const GameContext& ctx,
                                           double unit_price,
                                           const AuctionModeOptions& options) {
  if (ctx.num_pairs < 1 || ctx.num_channels < 1) {
    throw std::invalid_argument("auction needs at least one pair and channel");
  }
  if (unit_price < 0.0) {
    throw std::invalid_argument("unit price must be non-negative");
  }
  ResourceAuctionResult state;
  state.powers = PowerMatrix::zeros(ctx.num_pairs, ctx.num_channels);
  state.ledger.unit_price = unit_price;
  state.ledger.occupants_per_channel.assign(ctx.num_channels, 0);
  state.ledger.channels_per_pair.assign(ctx.num_pairs, 0);
  state.ledger.sold.assign(
      static_cast<size_t>(ctx.num_pairs) * ctx.num_channels, false);
  state.rate_targets.assign(
      static_cast<size_t>(ctx.num_pairs) * ctx.num_channels, 0.0);

  const int round_cap = ctx.num_pairs * ctx.num_channels * 4;
  auto unserved = [&]() {
    for (int i = 0; i < ctx.num_pairs; ++i) {
      if (state.ledger.channels_per_pair[i] == 0) return true;
    }
    return false;
  };

  while (unserved()) {
    if (state.rounds >= round_cap) {
      state.diagnostic = "round cap exceeded";
      return state;
    }
    ++state.rounds;

    std::vector<Candidate> candidates;
    for (int i = 0; i < ctx.num_pairs; ++i) {
      const int n_i = state.ledger.channels_per_pair[i];
      if (options.single_channel && n_i >= 1) continue;
      const std::vector<double> q =
          effective_interference(ctx, state.powers, i);
      const std::vector<int> owned = owned_channels(state, i);
      for (int c = 0; c < ctx.num_channels; ++c) {
        if (state.ledger.is_sold(i, c)) continue;  // never the same cell twice
        if (options.exclusive_channel &&
            state.ledger.occupants_per_channel[c] > 0) {
          continue;
        }
        Candidate cand;
        cand.pair = i;
        cand.channel = c;
        if (n_i == 0 || options.single_channel) {
          cand.power = q[c] * (std::exp2(ctx.rate_target) - 1.0);
          cand.split = {{c, ctx.rate_target}};
        } else {
          // evaluate c as the (n_i + 1)-th channel by rate splitting
          std::vector<int> channels = owned;
          channels.push_back(c);
          std::vector<double> q_sub;
          q_sub.reserve(channels.size());
          for (int ch : channels) q_sub.push_back(q[ch]);
          const std::vector<double> split =
              best_response(q_sub, ctx.rate_target);
          cand.power = split.back();
          if (!(cand.power > 0.0)) continue;  // the extra channel buys nothing
          for (size_t s = 0; s < channels.size(); ++s) {
            if (split[s] > 0.0) {
              cand.split.emplace_back(
                  channels[s], std::log2(1.0 + split[s] / q_sub[s]));
            }
          }
        }
        cand.cost = priced_cost(cand.power, state.ledger, i, c);
        candidates.push_back(std::move(cand));
      }
    }
    std::sort(candidates.begin(), candidates.end(),
              [](const Candidate& x, const Candidate& y) {
                if (x.cost != y.cost) return x.cost < y.cost;
                if (x.pair != y.pair) return x.pair < y.pair;
                return x.channel < y.channel;
              });

    bool committed = false;
    for (const Candidate& cand : candidates) {
      if (try_commit(ctx, state, cand)) {
        state.ledger.sold[static_cast<size_t>(cand.pair) * ctx.num_channels +
                          cand.channel] = true;
        state.ledger.occupants_per_channel[cand.channel] += 1;
        state.ledger.channels_per_pair[cand.pair] += 1;
        committed = true;
        break;
      }
    }
    if (!committed) {
      state.diagnostic = "no feasible cell for the remaining pairs";
      return state;
    }
  }
  state.complete = true;
  return state;
}

NashResult find_nash(const GameContext& ctx, int max_sweeps, double tol_mw) {
  NashResult res;
  res.powers = PowerMatrix::zeros(ctx.num_pairs, ctx.num_channels);
  for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
    PowerMatrix next = res.powers;
    double max_change = 0.0;
    for (int i = 0; i < ctx.num_pairs; ++i) {
      const std::vector<double> q =
          effective_interference(ctx, res.powers, i);
      const std::vector<double> br = best_response(q, ctx.rate_target);
      for (int c = 0; c < ctx.num_channels; ++c) {
        max_change = std::max(max_change, std::abs(br[c] - res.powers.at(i, c)));
        next.at(i, c) = br[c];
      }
    }
    res.powers = std::move(next);
    res.sweeps = sweep;
    if (max_change < tol_mw) {
      res.converged = true;
      break;
    }
  }
  return res;
}

std::optional<ResourceAuctionResult> exhaustive_max_lifetime(
    const GameContext& ctx, const BatteryModel& model) {
  if (ctx.num_pairs > 3 || ctx.num_channels > 4) return std::nullopt;

  ResourceAuctionResult best;
  double best_lifetime = -1.0;
  long total = 1;
  for (int i = 0; i < ctx.num_pairs; ++i) total *= ctx.num_channels;

  for (long code = 0; code < total; ++code) {
    long rest = code;
    std::vector<int> channel_of(ctx.num_pairs);
    for (int i = 0; i < ctx.num_pairs; ++i) {
      channel_of[i] = static_cast<int>(rest % ctx.num_channels);
      rest /= ctx.num_channels;
    }
    PowerMatrix powers = PowerMatrix::zeros(ctx.num_pairs, ctx.num_channels);
    bool feasible = true;
    for (int c = 0; c < ctx.num_channels && feasible; ++c) {
      std::vector<std::pair<int, double>> sharers;
      for (int i = 0; i < ctx.num_pairs; ++i) {
        if (channel_of[i] == c) sharers.emplace_back(i, ctx.rate_target);
      }
      if (sharers.empty()) continue;
      auto sol = adjust_shared_powers(ctx, powers, c, sharers);
      if (!sol.has_value()) {
        feasible = false;
        break;
      }
      for (size_t s = 0; s < sharers.size(); ++s) {
        powers.at(sharers[s].first, c) = (*sol)[s];
      }
    }
    if (!feasible) continue;
    double lifetime = 0.0;
    for (int i = 0; i < ctx.num_pairs; ++i) {
      lifetime += battery_lifetime_hours(
          model, powers.row_total(i) + model.circuit_power_mw);
    }
    if (lifetime > best_lifetime) {
      best_lifetime = lifetime;
      best.powers = powers;
      best.complete = true;
      best.rate_targets.assign(
          static_cast<size_t>(ctx.num_pairs) * ctx.num_channels, 0.0);
      for (int i = 0; i < ctx.num_pairs; ++i) {
        best.rate_targets[static_cast<size_t>(i) * ctx.num_channels +
                          channel_of[i]] = ctx.rate_target;
      }
    }
  }
  if (best_lifetime < 0.0) return std::nullopt;
  return best;
}

}  // namespace d2d::lifetime
