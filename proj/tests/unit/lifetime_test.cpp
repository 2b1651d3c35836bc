#include <doctest.h>

#include <cmath>

#include "d2d/lifetime.hpp"
#include "d2d/rng.hpp"

using namespace d2d;
using namespace d2d::lifetime;

namespace {

// rate-split oracle: nested ternary search over the convex split
double oracle_total_power(const std::vector<double>& q, double rate) {
  if (q.size() == 1) return q[0] * (std::exp2(rate) - 1.0);
  const auto tail = std::vector<double>(q.begin() + 1, q.end());
  const auto cost = [&](double r0) {
    return q[0] * (std::exp2(r0) - 1.0) + oracle_total_power(tail, rate - r0);
  };
  double lo = 0.0, hi = rate;
  for (int it = 0; it < 200; ++it) {
    const double a = lo + (hi - lo) / 3.0;
    const double b = hi - (hi - lo) / 3.0;
    if (cost(a) < cost(b)) {
      hi = b;
    } else {
      lo = a;
    }
  }
  return cost(0.5 * (lo + hi));
}

GameContext random_context(Rng& rng, int pairs, int channels) {
  GameContext ctx;
  ctx.num_pairs = pairs;
  ctx.num_channels = channels;
  ctx.n0_mw = 1e-4;
  ctx.rate_target = rng.uniform(0.5, 6.0);
  ctx.p_cell_mw.assign(channels, 250.0);
  for (int i = 0; i < pairs; ++i) {
    ctx.g_pair.push_back(std::pow(10.0, rng.uniform(-4.0, -2.0)));
  }
  ctx.g_cross.assign(static_cast<size_t>(pairs) * pairs, 0.0);
  for (int j = 0; j < pairs; ++j) {
    for (int i = 0; i < pairs; ++i) {
      if (j != i) {
        ctx.g_cross[static_cast<size_t>(j) * pairs + i] =
            std::pow(10.0, rng.uniform(-8.0, -5.0));
      }
    }
  }
  ctx.g_cell_d2d.resize(static_cast<size_t>(channels) * pairs);
  for (auto& g : ctx.g_cell_d2d) g = std::pow(10.0, rng.uniform(-8.0, -5.0));
  return ctx;
}

}  // namespace

TEST_CASE("battery lifetime follows Peukert's law") {
  BatteryModel model;  // 0.8 Ah, b = 1.3, 4 V, 100 mW circuit floor
  CHECK(battery_lifetime_hours(model, 350.0) ==
        doctest::Approx(19.0).epsilon(0.01));
  BatteryModel linear = model;
  linear.peukert = 1.0;
  // pure energy budget Q V0 / P
  CHECK(battery_lifetime_hours(linear, 400.0) ==
        doctest::Approx(0.8 * 4.0 / 0.4));
  BatteryModel doubled = model;
  doubled.capacity_ah *= 2.0;
  CHECK(battery_lifetime_hours(doubled, 350.0) ==
        doctest::Approx(2.0 * battery_lifetime_hours(model, 350.0)));
  CHECK_THROWS_AS(battery_lifetime_hours(model, 50.0), std::domain_error);
}

TEST_CASE("battery lifetime is monotone in power and capacity") {
  BatteryModel model;
  double prev = 1e300;
  for (double p = 100.0; p <= 1000.0; p += 50.0) {
    const double l = battery_lifetime_hours(model, p);
    CHECK(l < prev);
    prev = l;
  }
}

TEST_CASE("effective interference matches the definition") {
  Rng rng(1);
  const GameContext ctx = random_context(rng, 3, 2);
  PowerMatrix p = PowerMatrix::zeros(3, 2);
  p.at(1, 0) = 5.0;
  p.at(2, 1) = 2.0;
  const auto q = effective_interference(ctx, p, 0);
  REQUIRE(q.size() == 2);
  CHECK(q[0] == doctest::Approx((ctx.p_cell_mw[0] * ctx.gain_cell(0, 0) +
                                 5.0 * ctx.gain_cross(1, 0) + ctx.n0_mw) /
                                ctx.g_pair[0])
                    .epsilon(1e-12));
  CHECK(q[1] == doctest::Approx((ctx.p_cell_mw[1] * ctx.gain_cell(1, 0) +
                                 2.0 * ctx.gain_cross(2, 0) + ctx.n0_mw) /
                                ctx.g_pair[0])
                    .epsilon(1e-12));
  // adding interferer power raises the load
  PowerMatrix p2 = p;
  p2.at(1, 0) += 1.0;
  CHECK(effective_interference(ctx, p2, 0)[0] > q[0]);

  SUBCASE("noise-only load is flat") {
    GameContext quiet = ctx;
    quiet.p_cell_mw.assign(2, 0.0);
    const auto q0 = effective_interference(quiet, PowerMatrix::zeros(3, 2), 0);
    CHECK(q0[0] == doctest::Approx(quiet.n0_mw / quiet.g_pair[0]));
    CHECK(q0[1] == doctest::Approx(quiet.n0_mw / quiet.g_pair[0]));
  }
}

TEST_CASE("single-channel best response inverts the rate") {
  const std::vector<double> q = {0.7};
  const auto p = best_response(q, 3.0);
  CHECK(p[0] == doctest::Approx(0.7 * (std::exp2(3.0) - 1.0)));
  CHECK(best_response(q, 0.0)[0] == doctest::Approx(0.0));
  CHECK_THROWS_AS(best_response({}, 1.0), std::domain_error);
  CHECK_THROWS_AS(best_response(q, -1.0), std::domain_error);
}

TEST_CASE("equal qualities split the rate evenly") {
  const auto p = best_response({1.0, 1.0}, 4.0);
  CHECK(p[0] == doctest::Approx(3.0));
  CHECK(p[1] == doctest::Approx(3.0));
  // splitting beats the single-channel inversion (15)
  CHECK(p[0] + p[1] == doctest::Approx(6.0));
}

TEST_CASE("best response matches the convex split oracle") {
  Rng rng(2);
  for (int trial = 0; trial < 1000; ++trial) {
    const int channels = 1 + rng.uniform_int(3);
    std::vector<double> q;
    for (int c = 0; c < channels; ++c) {
      q.push_back(std::pow(10.0, rng.uniform(-4.0, 2.0)));
    }
    const double rate = rng.uniform(0.5, 8.0);
    const auto p = best_response(q, rate);
    double total = 0.0;
    for (double v : p) {
      CHECK(v >= 0.0);
      total += v;
    }
    CHECK(std::abs(achieved_rate(q, p) - rate) <= 1e-9);
    const double oracle = oracle_total_power(q, rate);
    CHECK(total <= oracle + 1e-6 * std::max(1.0, oracle));
    // never worse than dumping everything on the best channel
    const double single = *std::min_element(q.begin(), q.end()) *
                          (std::exp2(rate) - 1.0);
    CHECK(total <= single + 1e-9);
  }
}

TEST_CASE("priced cost accounting") {
  AuctionLedger ledger;
  ledger.unit_price = 2.0;
  ledger.occupants_per_channel = {1, 0};
  ledger.channels_per_pair = {1, 0};
  ledger.sold.assign(4, false);
  CHECK(priced_cost(3.0, ledger, 0, 0) == doctest::Approx(7.0));
  ledger.unit_price = 0.0;
  CHECK(priced_cost(3.0, ledger, 0, 0) == doctest::Approx(3.0));
  AuctionLedger fresh;
  fresh.unit_price = 5.0;
  fresh.occupants_per_channel = {0};
  fresh.channels_per_pair = {0};
  fresh.sold.assign(1, false);
  CHECK(priced_cost(3.0, fresh, 0, 0) == doctest::Approx(3.0));
}

TEST_CASE("shared power adjustment") {
  GameContext ctx;
  ctx.num_pairs = 2;
  ctx.num_channels = 1;
  ctx.n0_mw = 0.5;
  ctx.rate_target = 1.0;
  ctx.p_cell_mw = {0.5};
  ctx.g_pair = {1.0, 1.0};
  ctx.g_cross = {0.0, 0.1, 0.1, 0.0};
  ctx.g_cell_d2d = {1.0, 1.0};  // q load = 0.5 * 1 + 0.5 = 1 per pair
  const PowerMatrix zero = PowerMatrix::zeros(2, 1);

  SUBCASE("single sharer reduces to the scalar inversion") {
    const auto sol = adjust_shared_powers(ctx, zero, 0, {{0, 1.0}});
    REQUIRE(sol.has_value());
    CHECK((*sol)[0] == doctest::Approx(1.0 * (std::exp2(1.0) - 1.0)));
  }
  SUBCASE("two symmetric sharers") {
    const auto sol = adjust_shared_powers(ctx, zero, 0, {{0, 1.0}, {1, 1.0}});
    REQUIRE(sol.has_value());
    CHECK((*sol)[0] == doctest::Approx(1.0 / 0.9).epsilon(1e-9));
    CHECK((*sol)[1] == doctest::Approx(1.0 / 0.9).epsilon(1e-9));
  }
  SUBCASE("excessive cross gains are rejected") {
    GameContext strong = ctx;
    strong.g_cross = {0.0, 2.0, 2.0, 0.0};
    const auto sol =
        adjust_shared_powers(strong, zero, 0, {{0, 1.0}, {1, 1.0}});
    CHECK_FALSE(sol.has_value());
  }
  SUBCASE("achieved rates equal the targets") {
    Rng rng(3);
    for (int trial = 0; trial < 200; ++trial) {
      GameContext random = random_context(rng, 3, 1);
      const std::vector<std::pair<int, double>> sharers = {
          {0, rng.uniform(0.5, 3.0)},
          {1, rng.uniform(0.5, 3.0)},
          {2, rng.uniform(0.5, 3.0)}};
      const auto sol = adjust_shared_powers(random, PowerMatrix::zeros(3, 1),
                                            0, sharers);
      if (!sol.has_value()) continue;
      PowerMatrix p = PowerMatrix::zeros(3, 1);
      for (size_t s = 0; s < sharers.size(); ++s) {
        p.at(sharers[s].first, 0) = (*sol)[s];
      }
      for (size_t s = 0; s < sharers.size(); ++s) {
        const auto q = effective_interference(random, p, sharers[s].first);
        const double rate =
            std::log2(1.0 + p.at(sharers[s].first, 0) / q[0]);
        CHECK(rate == doctest::Approx(sharers[s].second).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("resource auction basics") {
  Rng rng(4);

  SUBCASE("one pair takes the channel with the lowest load") {
    GameContext ctx = random_context(rng, 1, 2);
    const auto res = run_resource_auction(ctx, 0.0);
    REQUIRE(res.complete);
    const auto q = effective_interference(
        ctx, PowerMatrix::zeros(1, 2), 0);
    const int best = q[0] <= q[1] ? 0 : 1;
    CHECK(res.ledger.is_sold(0, best));
    CHECK(res.powers.at(0, best) ==
          doctest::Approx(q[best] * (std::exp2(ctx.rate_target) - 1.0)));
    CHECK(res.powers.at(0, 1 - best) == doctest::Approx(0.0));
  }

  SUBCASE("a huge unit price prevents any sharing") {
    GameContext ctx = random_context(rng, 3, 4);
    const auto res = run_resource_auction(ctx, 1e9);
    REQUIRE(res.complete);
    for (int c = 0; c < 4; ++c) {
      CHECK(res.ledger.occupants_per_channel[c] <= 1);
    }
    for (int i = 0; i < 3; ++i) {
      CHECK(res.ledger.channels_per_pair[i] == 1);
    }
  }

  SUBCASE("every assigned pair meets its rate target") {
    for (int trial = 0; trial < 50; ++trial) {
      GameContext ctx = random_context(rng, 3, 3);
      const auto res = run_resource_auction(ctx, 1.0);
      if (!res.complete) continue;
      for (int i = 0; i < 3; ++i) {
        const auto q = effective_interference(ctx, res.powers, i);
        double rate = 0.0;
        for (int c = 0; c < 3; ++c) {
          if (res.powers.at(i, c) > 0.0) {
            rate += std::log2(1.0 + res.powers.at(i, c) / q[c]);
          }
        }
        CHECK(rate >= ctx.rate_target - 1e-9);
      }
    }
  }

  SUBCASE("no cell is sold twice") {
    for (int trial = 0; trial < 50; ++trial) {
      GameContext ctx = random_context(rng, 2, 2);
      const auto res = run_resource_auction(ctx, 0.5);
      // ledger occupancy must match the sold matrix exactly
      for (int c = 0; c < 2; ++c) {
        int occupants = 0;
        for (int i = 0; i < 2; ++i) {
          if (res.ledger.is_sold(i, c)) ++occupants;
        }
        CHECK(occupants == res.ledger.occupants_per_channel[c]);
      }
    }
  }

  SUBCASE("mode switches restrict the candidates") {
    GameContext ctx = random_context(rng, 2, 3);
    AuctionModeOptions exclusive;
    exclusive.exclusive_channel = true;
    const auto res = run_resource_auction(ctx, 0.0, exclusive);
    REQUIRE(res.complete);
    for (int c = 0; c < 3; ++c) {
      CHECK(res.ledger.occupants_per_channel[c] <= 1);
    }
    AuctionModeOptions single;
    single.single_channel = true;
    const auto res2 = run_resource_auction(ctx, 0.0, single);
    REQUIRE(res2.complete);
    for (int i = 0; i < 2; ++i) {
      CHECK(res2.ledger.channels_per_pair[i] == 1);
    }
  }
}

TEST_CASE("iterated best response finds a fixed point") {
  Rng rng(5);

  SUBCASE("a single player converges in one sweep") {
    GameContext ctx = random_context(rng, 1, 3);
    const auto res = find_nash(ctx, 10);
    CHECK(res.converged);
    CHECK(res.sweeps <= 2);  // one sweep plus the zero-change confirmation
    const auto q = effective_interference(ctx, PowerMatrix::zeros(1, 3), 0);
    const auto br = best_response(q, ctx.rate_target);
    for (int c = 0; c < 3; ++c) {
      CHECK(res.powers.at(0, c) == doctest::Approx(br[c]));
    }
  }

  SUBCASE("zero rate fixes the all-zero profile immediately") {
    GameContext ctx = random_context(rng, 2, 2);
    ctx.rate_target = 0.0;
    const auto res = find_nash(ctx, 10);
    CHECK(res.converged);
    for (double p : res.powers.p) CHECK(p == 0.0);
  }

  SUBCASE("weak coupling matches a mutual best-response grid search") {
    GameContext ctx = random_context(rng, 2, 2);
    ctx.rate_target = 2.0;
    for (int j = 0; j < 2; ++j) {
      for (int i = 0; i < 2; ++i) {
        if (j != i) {
          ctx.g_cross[static_cast<size_t>(j) * 2 + i] = 0.01 * ctx.g_pair[i];
        }
      }
    }
    const auto res = find_nash(ctx, 500);
    REQUIRE(res.converged);
    // at the fixed point no player's best response differs from its row
    for (int i = 0; i < 2; ++i) {
      const auto q = effective_interference(ctx, res.powers, i);
      const auto br = best_response(q, ctx.rate_target);
      for (int c = 0; c < 2; ++c) {
        CHECK(std::abs(br[c] - res.powers.at(i, c)) <= 1e-4);
      }
    }
  }

  SUBCASE("lowering any positive power violates the rate constraint") {
    GameContext ctx = random_context(rng, 3, 2);
    ctx.rate_target = 1.5;
    const auto res = find_nash(ctx, 500);
    if (!res.converged) return;
    for (int i = 0; i < 3; ++i) {
      const auto q = effective_interference(ctx, res.powers, i);
      for (int c = 0; c < 2; ++c) {
        if (res.powers.at(i, c) <= 0.0) continue;
        std::vector<double> reduced(2);
        for (int cc = 0; cc < 2; ++cc) reduced[cc] = res.powers.at(i, cc);
        reduced[c] *= 1.0 - 1e-6;
        CHECK(achieved_rate(q, reduced) < ctx.rate_target);
      }
    }
  }
}

TEST_CASE("centralized exhaustive baseline") {
  Rng rng(6);
  GameContext ctx = random_context(rng, 2, 3);
  BatteryModel model;
  const auto central = exhaustive_max_lifetime(ctx, model);
  REQUIRE(central.has_value());
  const auto auction = run_resource_auction(ctx, 1.0);
  REQUIRE(auction.complete);
  const auto total_lifetime = [&](const PowerMatrix& p) {
    double total = 0.0;
    for (int i = 0; i < ctx.num_pairs; ++i) {
      total += battery_lifetime_hours(
          model, p.row_total(i) + model.circuit_power_mw);
    }
    return total;
  };
  // the centralized search upper-bounds any single-channel outcome
  AuctionModeOptions single;
  single.single_channel = true;
  const auto restricted = run_resource_auction(ctx, 1.0, single);
  if (restricted.complete) {
    CHECK(total_lifetime(central->powers) >=
          total_lifetime(restricted.powers) - 1e-9);
  }
  GameContext big = random_context(rng, 3, 5);
  CHECK_FALSE(exhaustive_max_lifetime(big, model).has_value());
}
