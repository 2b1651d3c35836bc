#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "d2d/auction.hpp"
#include "d2d/config.hpp"

namespace d2d::harness {

enum class ExperimentKind {
  kSinrDist,
  kModeSelect,
  kThresholdPc,
  kBeamforming,
  kAuction,
  kScheduling,
  kLifetime,
};

ExperimentKind parse_kind(const std::string& name);
std::string kind_name(ExperimentKind kind);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kSinrDist;
  std::uint64_t seed = 1;
  int drops = 100;
  int threads = 1;
  std::string out_dir;
  Config params;

  static ExperimentConfig from_config(ExperimentKind kind, const Config& cfg);
};

struct SummaryStats {
  long count = 0;
  double mean = 0.0;
  double median = 0.0;
  double p05 = 0.0;
  double p25 = 0.0;
  double p75 = 0.0;
  double p95 = 0.0;
  double min = 0.0;
  double max = 0.0;
};

SummaryStats summarize(const std::vector<double>& values);

struct NumericTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct MonteCarloResult {
  std::string kind;
  std::uint64_t seed = 0;
  int drops = 0;
  // Sample vectors in drop order; infeasible drops contribute nothing and
  // are counted instead.
  std::map<std::string, std::vector<double>> samples;
  std::map<std::string, long> counters;
  std::map<std::string, NumericTable> tables;
  std::vector<d2d::auction::TraceEvent> price_trace;
  Config config_echo;

  const std::vector<double>& vector(const std::string& name) const;
};

// Deterministic given (cfg, seed): drops run on per-index RNG streams and
// aggregation is order-insensitive, so any worker count gives identical
// results.
MonteCarloResult run_experiment(const ExperimentConfig& cfg);

// Two-column CSV "value,cdf", values ascending, cdf = rank / n.
void emit_cdf_csv(const MonteCarloResult& result, const std::string& vector,
                  const std::string& path);

void emit_summary_json(const MonteCarloResult& result, const std::string& path);

// "round,item,price,event" with event in {drop, raise, sold}.
void emit_price_trace_csv(const MonteCarloResult& result,
                          const std::string& path);

void emit_table_csv(const MonteCarloResult& result, const std::string& table,
                    const std::string& path);

// Writes every artifact for the experiment into out_dir; returns the list of
// files written.
std::vector<std::string> emit_all(const MonteCarloResult& result,
                                  const std::string& out_dir);

std::string summary_json_text(const MonteCarloResult& result);

}  // namespace d2d::harness
