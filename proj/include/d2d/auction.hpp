#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace d2d::auction {

using PackageMask = std::uint32_t;  // bit d set = D2D pair d in the package

// Downlink sharing instance: C resource units (bidders), D D2D pairs (items).
// Gains are linear power gains (|h|^2 including large-scale loss).
struct SharingInstance {
  int num_bidders = 0;  // C
  int num_items = 0;    // D
  double p_b_mw = 0.0;
  double n0_mw = 0.0;
  std::vector<double> g_bs_cell;   // [c] BS -> cellular user
  std::vector<double> g_bs_d2d;    // [d] BS -> D2D receiver
  std::vector<double> g_pair;      // [d] D2D direct
  std::vector<double> g_d2d_cell;  // [d][c] D2D tx -> cellular user
  std::vector<double> g_d2d_d2d;   // [d_tx][d_rx] cross-pair, diagonal unused
  std::vector<double> p_d_mw;      // [d] D2D transmit power

  double gain_d2d_cell(int d, int c) const {
    return g_d2d_cell[static_cast<size_t>(d) * num_bidders + c];
  }
  double gain_d2d_d2d(int d_tx, int d_rx) const {
    return g_d2d_d2d[static_cast<size_t>(d_tx) * num_items + d_rx];
  }
};

// Interference-free rate of resource unit c.
double standalone_rate(const SharingInstance& inst, int c);

// Channel rate of unit c when shared with the package of pairs in `mask`:
// cellular term with aggregate D2D interference plus the per-pair D2D terms
// with BS and intra-package interference.
double package_rate(const SharingInstance& inst, int c, PackageMask mask);

// Private valuation: rate gain over the interference-free rate, floored at 0.
double valuation(const SharingInstance& inst, int c, PackageMask mask);

struct ValuationTable {
  int num_bidders = 0;
  int num_items = 0;
  std::vector<double> v;  // [c][mask-1], mask in 1..2^D-1

  double at(int c, PackageMask mask) const {
    return v[static_cast<size_t>(c) * ((1u << num_items) - 1) + (mask - 1)];
  }
  double& at(int c, PackageMask mask) {
    return v[static_cast<size_t>(c) * ((1u << num_items) - 1) + (mask - 1)];
  }
};

ValuationTable build_valuation_table(const SharingInstance& inst);

double bidder_utility(const ValuationTable& v, const std::vector<double>& price,
                      int c, PackageMask mask);

struct TraceEvent {
  int round = 0;
  int item = 0;
  double price = 0.0;
  char event = 0;  // 'd' drop, 'r' raise, 's' sold
};

struct AllocationResult {
  std::vector<PackageMask> winner_package;  // [c], 0 = no package
  std::vector<double> price_paid;           // [c]
  double revenue = 0.0;
  double total_bidder_utility = 0.0;
  double total_value = 0.0;  // sum of allocated valuations
  int rounds = 0;
  int descending_rounds = 0;
  std::vector<TraceEvent> trace;
};

struct IcaOptions {
  bool singleton_only = false;  // reduced variant: one pair per channel
  int fine_tune_cap_factor = 10;  // contention broken after cap * i raises
  long round_cap = -1;            // -1 = derive from prices and steps
};

class AuctionDivergence : public std::runtime_error {
 public:
  AuctionDivergence(const std::string& what, std::vector<TraceEvent> trace)
      : std::runtime_error(what), trace_(std::move(trace)) {}
  const std::vector<TraceEvent>& trace() const { return trace_; }

 private:
  std::vector<TraceEvent> trace_;
};

// Default opening prices: max single-item valuation plus delta, so that the
// first round sees no bids.
std::vector<double> default_initial_prices(const ValuationTable& v,
                                           double delta);

double default_delta(const ValuationTable& v, double fraction = 0.01);

// Reverse iterative combinatorial auction with linear anonymous prices,
// descending steps delta and fine-tuning steps delta / fine_i.
AllocationResult run_reverse_ica(const ValuationTable& v,
                                 std::vector<double> initial_prices,
                                 double delta, int fine_i,
                                 const IcaOptions& options = {});

// Exhaustive CAP solver over all item-to-bidder assignments. Guarded to
// D <= 12, C <= 8.
AllocationResult exhaustive_optimal(const ValuationTable& v,
                                    bool singleton_only = false);

// DL system sum rate of an allocation; unallocated units contribute their
// interference-free rate.
double allocation_sum_rate(const SharingInstance& inst,
                           const AllocationResult& alloc);

double system_efficiency(double sum_rate, double sum_rate_opt);

}  // namespace d2d::auction
