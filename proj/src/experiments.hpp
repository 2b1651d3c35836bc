#pragma once

#include <functional>

#include "d2d/harness.hpp"

namespace d2d::harness::detail {

struct DropResult {
  std::map<std::string, std::vector<double>> samples;
  std::map<std::string, long> counters;
  std::map<std::string, NumericTable> tables;
  std::vector<d2d::auction::TraceEvent> price_trace;

  void add(const std::string& name, double value) {
    samples[name].push_back(value);
  }
  void count(const std::string& name, long n = 1) { counters[name] += n; }
};

// Resolves all parameters once; the returned callable is safe to invoke from
// multiple threads with distinct drop indices.
std::function<DropResult(std::uint64_t)> make_drop_function(
    const ExperimentConfig& cfg);

}  // namespace d2d::harness::detail
