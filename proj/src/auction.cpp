#include "d2d/auction.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

namespace d2d::auction {

double standalone_rate(const SharingInstance& inst, int c) {
  return std::log2(1.0 + inst.p_b_mw * inst.g_bs_cell[c] / inst.n0_mw);
}

double package_rate(const SharingInstance& inst, int c, PackageMask mask) {
  double d2d_into_cell = 0.0;
  for (int d = 0; d < inst.num_items; ++d) {
    if (mask & (1u << d)) {
      d2d_into_cell += inst.p_d_mw[d] * inst.gain_d2d_cell(d, c);
    }
  }
  double rate = std::log2(1.0 + inst.p_b_mw * inst.g_bs_cell[c] /
                                    (d2d_into_cell + inst.n0_mw));
  for (int d = 0; d < inst.num_items; ++d) {
    if (!(mask & (1u << d))) continue;
    double intra = 0.0;
    for (int o = 0; o < inst.num_items; ++o) {
      if (o != d && (mask & (1u << o))) {
        intra += inst.p_d_mw[o] * inst.gain_d2d_d2d(o, d);
      }
    }
    rate += std::log2(1.0 + inst.p_d_mw[d] * inst.g_pair[d] /
                                (inst.p_b_mw * inst.g_bs_d2d[d] + intra +
                                 inst.n0_mw));
  }
  return rate;
}

double valuation(const SharingInstance& inst, int c, PackageMask mask) {
  return std::max(package_rate(inst, c, mask) - standalone_rate(inst, c), 0.0);
}

ValuationTable build_valuation_table(const SharingInstance& inst) {
  ValuationTable table;
  table.num_bidders = inst.num_bidders;
  table.num_items = inst.num_items;
  const PackageMask n = (1u << inst.num_items) - 1;
  table.v.resize(static_cast<size_t>(inst.num_bidders) * n);
  for (int c = 0; c < inst.num_bidders; ++c) {
    for (PackageMask mask = 1; mask <= n; ++mask) {
      table.at(c, mask) = valuation(inst, c, mask);
    }
  }
  return table;
}

double bidder_utility(const ValuationTable& v, const std::vector<double>& price,
                      int c, PackageMask mask) {
  double paid = 0.0;
  for (int d = 0; d < v.num_items; ++d) {
    if (mask & (1u << d)) paid += price[d];
  }
  return v.at(c, mask) - paid;
}

std::vector<double> default_initial_prices(const ValuationTable& v,
                                           double delta) {
  std::vector<double> p0(v.num_items, delta);
  for (int d = 0; d < v.num_items; ++d) {
    double best = 0.0;
    for (int c = 0; c < v.num_bidders; ++c) {
      best = std::max(best, v.at(c, 1u << d));
    }
    p0[d] = best + delta;
  }
  return p0;
}

double default_delta(const ValuationTable& v, double fraction) {
  double best = 0.0;
  for (int d = 0; d < v.num_items; ++d) {
    for (int c = 0; c < v.num_bidders; ++c) {
      best = std::max(best, v.at(c, 1u << d));
    }
  }
  return best > 0.0 ? fraction * best : fraction;
}

namespace {

// Truthful demand at current prices: the utility-maximizing package over
// unsold items with positive valuation and non-negative utility. Ties prefer
// smaller packages, then lower mask.
PackageMask best_demand(const ValuationTable& v,
                        const std::vector<double>& price, int c,
                        PackageMask available, bool singleton_only) {
  PackageMask best = 0;
  double best_u = -1.0;
  int best_count = 0;
  const PackageMask n = (1u << v.num_items) - 1;
  for (PackageMask mask = 1; mask <= n; ++mask) {
    if ((mask & available) != mask) continue;
    const int count = std::popcount(mask);
    if (singleton_only && count != 1) continue;
    if (!(v.at(c, mask) > 0.0)) continue;
    const double u = bidder_utility(v, price, c, mask);
    if (u < 0.0) continue;
    if (u > best_u || (u == best_u && (best == 0 || count < best_count))) {
      best = mask;
      best_u = u;
      best_count = count;
    }
  }
  return best;
}

}  // namespace

AllocationResult run_reverse_ica(const ValuationTable& v,
                                 std::vector<double> price, double delta,
                                 int fine_i, const IcaOptions& options) {
  if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
  if (fine_i < 2) throw std::invalid_argument("fine-tuning factor must be >= 2");
  if (static_cast<int>(price.size()) != v.num_items) {
    throw std::invalid_argument("initial price vector size mismatch");
  }
  const double fine_step = delta / fine_i;

  AllocationResult res;
  res.winner_package.assign(v.num_bidders, 0);
  res.price_paid.assign(v.num_bidders, 0.0);

  std::vector<bool> sold(v.num_items, false);
  std::vector<bool> frozen(v.num_bidders, false);
  PackageMask available = (1u << v.num_items) - 1;

  const double max_p0 = *std::max_element(price.begin(), price.end());
  long round_cap = options.round_cap;
  if (round_cap < 0) {
    // descending rounds plus a generous allowance for fine-tuning phases
    round_cap = static_cast<long>(v.num_items) *
                    (static_cast<long>(std::ceil(max_p0 / delta)) + 1) +
                static_cast<long>(std::ceil(max_p0 / fine_step)) *
                    (v.num_bidders + 1) +
                1000;
  }
  const int fine_cap = options.fine_tune_cap_factor * fine_i;

  int consecutive_raises = 0;
  std::vector<PackageMask> demand(v.num_bidders, 0);
  std::vector<int> demand_count(v.num_items, 0);

  while (true) {
    if (res.rounds > round_cap) {
      throw AuctionDivergence("auction exceeded its round cap",
                              std::move(res.trace));
    }
    if (available == 0) break;
    bool any_active = false;
    bool any_demand = false;
    std::fill(demand_count.begin(), demand_count.end(), 0);
    for (int c = 0; c < v.num_bidders; ++c) {
      demand[c] = 0;
      if (frozen[c]) continue;
      any_active = true;
      demand[c] = best_demand(v, price, c, available, options.singleton_only);
      if (demand[c] != 0) {
        any_demand = true;
        for (int d = 0; d < v.num_items; ++d) {
          if (demand[c] & (1u << d)) ++demand_count[d];
        }
      }
    }
    if (!any_active) break;  // every channel won a package

    if (!any_demand) {
      bool all_zero = true;
      for (int d = 0; d < v.num_items; ++d) {
        if (!sold[d] && price[d] > 0.0) {
          all_zero = false;
          break;
        }
      }
      if (all_zero) break;  // nothing can ever be demanded
      for (int d = 0; d < v.num_items; ++d) {
        if (sold[d]) continue;
        price[d] = std::max(0.0, price[d] - delta);
        res.trace.push_back({res.rounds, d, price[d], 'd'});
      }
      ++res.rounds;
      ++res.descending_rounds;
      // the raise counter persists across price drops so that a
      // raise/quit/drop cycle between matched bidders still hits the cap
      continue;
    }

    bool contention = false;
    for (int d = 0; d < v.num_items; ++d) {
      if (demand_count[d] > 1) contention = true;
    }

    if (contention && consecutive_raises < fine_cap) {
      for (int d = 0; d < v.num_items; ++d) {
        if (demand_count[d] > 1) {
          price[d] += fine_step;
          res.trace.push_back({res.rounds, d, price[d], 'r'});
        }
      }
      ++res.rounds;
      ++consecutive_raises;
      continue;
    }

    // Sale: winners are non-conflicting demands; if contention survived the
    // fine-tuning cap, the lowest-indexed bidder of each conflict wins.
    consecutive_raises = 0;
    std::vector<bool> item_taken(v.num_items, false);
    for (int c = 0; c < v.num_bidders; ++c) {
      const PackageMask pkg = demand[c];
      if (pkg == 0) continue;
      bool conflict = false;
      for (int d = 0; d < v.num_items; ++d) {
        if ((pkg & (1u << d)) && item_taken[d]) conflict = true;
      }
      if (conflict) continue;  // lexicographic tie-break by bidder index
      double paid = 0.0;
      for (int d = 0; d < v.num_items; ++d) {
        if (!(pkg & (1u << d))) continue;
        item_taken[d] = true;
        sold[d] = true;
        available &= ~(1u << d);
        paid += price[d];
        res.trace.push_back({res.rounds, d, price[d], 's'});
      }
      frozen[c] = true;
      res.winner_package[c] = pkg;
      res.price_paid[c] = paid;
      res.revenue += paid;
      res.total_value += v.at(c, pkg);
      res.total_bidder_utility += v.at(c, pkg) - paid;
    }
    // Undemanded unsold items become cheaper.
    bool dropped = false;
    for (int d = 0; d < v.num_items; ++d) {
      if (sold[d] || demand_count[d] != 0 || price[d] <= 0.0) continue;
      price[d] = std::max(0.0, price[d] - delta);
      res.trace.push_back({res.rounds, d, price[d], 'd'});
      dropped = true;
    }
    ++res.rounds;
    if (dropped) ++res.descending_rounds;
  }
  return res;
}

AllocationResult exhaustive_optimal(const ValuationTable& v,
                                    bool singleton_only) {
  if (v.num_items > 12 || v.num_bidders > 8) {
    throw std::invalid_argument(
        "exhaustive CAP solver is guarded to D <= 12, C <= 8");
  }
  const int base = v.num_bidders + 1;  // digit 0 = unassigned
  long total = 1;
  for (int d = 0; d < v.num_items; ++d) total *= base;

  AllocationResult best;
  best.winner_package.assign(v.num_bidders, 0);
  best.price_paid.assign(v.num_bidders, 0.0);
  double best_value = 0.0;
  std::vector<PackageMask> pkg(v.num_bidders, 0);

  for (long code = 0; code < total; ++code) {
    std::fill(pkg.begin(), pkg.end(), 0);
    long rest = code;
    bool valid = true;
    for (int d = 0; d < v.num_items; ++d) {
      const int digit = static_cast<int>(rest % base);
      rest /= base;
      if (digit > 0) pkg[digit - 1] |= (1u << d);
    }
    double value = 0.0;
    for (int c = 0; c < v.num_bidders; ++c) {
      if (pkg[c] == 0) continue;
      if (singleton_only && std::popcount(pkg[c]) != 1) {
        valid = false;
        break;
      }
      value += v.at(c, pkg[c]);
    }
    if (!valid) continue;
    if (value > best_value) {  // first maximum = fewest-assignment tie-break
      best_value = value;
      std::copy(pkg.begin(), pkg.end(), best.winner_package.begin());
    }
  }
  best.total_value = best_value;
  best.total_bidder_utility = best_value;  // zero prices
  return best;
}

double allocation_sum_rate(const SharingInstance& inst,
                           const AllocationResult& alloc) {
  double sum = 0.0;
  for (int c = 0; c < inst.num_bidders; ++c) {
    const PackageMask pkg = alloc.winner_package[c];
    sum += pkg == 0 ? standalone_rate(inst, c) : package_rate(inst, c, pkg);
  }
  return sum;
}

double system_efficiency(double sum_rate, double sum_rate_opt) {
  if (!(sum_rate_opt > 0.0)) {
    throw std::domain_error("optimal sum rate must be positive");
  }
  return sum_rate / sum_rate_opt;
}

}  // namespace d2d::auction
