#include "d2d/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "experiments.hpp"

namespace d2d::harness {

ExperimentKind parse_kind(const std::string& name) {
  if (name == "sinr_dist") return ExperimentKind::kSinrDist;
  if (name == "mode_select") return ExperimentKind::kModeSelect;
  if (name == "threshold_pc") return ExperimentKind::kThresholdPc;
  if (name == "beamforming") return ExperimentKind::kBeamforming;
  if (name == "auction") return ExperimentKind::kAuction;
  if (name == "scheduling") return ExperimentKind::kScheduling;
  if (name == "lifetime") return ExperimentKind::kLifetime;
  throw std::invalid_argument("unknown experiment kind: " + name);
}

std::string kind_name(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kSinrDist: return "sinr_dist";
    case ExperimentKind::kModeSelect: return "mode_select";
    case ExperimentKind::kThresholdPc: return "threshold_pc";
    case ExperimentKind::kBeamforming: return "beamforming";
    case ExperimentKind::kAuction: return "auction";
    case ExperimentKind::kScheduling: return "scheduling";
    case ExperimentKind::kLifetime: return "lifetime";
  }
  throw std::logic_error("unknown experiment kind");
}

ExperimentConfig ExperimentConfig::from_config(ExperimentKind kind,
                                               const Config& cfg) {
  ExperimentConfig out;
  out.kind = kind;
  out.seed = static_cast<std::uint64_t>(cfg.get_int("run", "seed", 1));
  out.drops = static_cast<int>(cfg.get_int("run", "drops", 100));
  out.threads = static_cast<int>(cfg.get_int("run", "threads", 1));
  out.out_dir = cfg.get_string("run", "out", "");
  out.params = cfg;
  return out;
}

SummaryStats summarize(const std::vector<double>& values) {
  SummaryStats s;
  s.count = static_cast<long>(values.size());
  if (values.empty()) return s;
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  double sum = 0.0;
  for (double v : sorted) sum += v;
  s.mean = sum / sorted.size();
  auto quantile = [&](double q) {
    const double pos = q * (sorted.size() - 1);
    const size_t lo = static_cast<size_t>(pos);
    const size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - lo;
    return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
  };
  s.median = quantile(0.5);
  s.p05 = quantile(0.05);
  s.p25 = quantile(0.25);
  s.p75 = quantile(0.75);
  s.p95 = quantile(0.95);
  s.min = sorted.front();
  s.max = sorted.back();
  return s;
}

const std::vector<double>& MonteCarloResult::vector(
    const std::string& name) const {
  const auto it = samples.find(name);
  if (it == samples.end()) {
    throw std::invalid_argument("no sample vector named " + name);
  }
  return it->second;
}

MonteCarloResult run_experiment(const ExperimentConfig& cfg) {
  if (cfg.drops < 1) throw std::invalid_argument("drop count must be >= 1");
  const auto drop_fn = detail::make_drop_function(cfg);

  std::vector<detail::DropResult> per_drop(cfg.drops);
  const int workers = std::max(1, std::min(cfg.threads, cfg.drops));
  if (workers == 1) {
    for (int i = 0; i < cfg.drops; ++i) {
      per_drop[i] = drop_fn(static_cast<std::uint64_t>(i));
    }
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&]() {
        while (true) {
          const int i = next.fetch_add(1);
          if (i >= cfg.drops) break;
          per_drop[i] = drop_fn(static_cast<std::uint64_t>(i));
        }
      });
    }
    for (auto& t : pool) t.join();
  }

  MonteCarloResult result;
  result.kind = kind_name(cfg.kind);
  result.seed = cfg.seed;
  result.drops = cfg.drops;
  result.config_echo = cfg.params;
  for (const auto& drop : per_drop) {
    for (const auto& [name, values] : drop.samples) {
      auto& dst = result.samples[name];
      dst.insert(dst.end(), values.begin(), values.end());
    }
    for (const auto& [name, n] : drop.counters) result.counters[name] += n;
    for (const auto& [name, table] : drop.tables) {
      auto& dst = result.tables[name];
      if (dst.columns.empty()) dst.columns = table.columns;
      dst.rows.insert(dst.rows.end(), table.rows.begin(), table.rows.end());
    }
    if (!drop.price_trace.empty() && result.price_trace.empty()) {
      result.price_trace = drop.price_trace;
    }
  }
  return result;
}

namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void ensure_parent(const std::string& path) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
}

}  // namespace

void emit_cdf_csv(const MonteCarloResult& result, const std::string& vector,
                  const std::string& path) {
  const std::vector<double>& values = result.vector(vector);
  if (values.empty()) {
    throw std::invalid_argument("refusing to emit an empty CDF for " + vector);
  }
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  ensure_parent(path);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "value,cdf\n";
  const double n = static_cast<double>(sorted.size());
  for (size_t i = 0; i < sorted.size(); ++i) {
    out << format_double(sorted[i]) << ','
        << format_double(static_cast<double>(i + 1) / n) << '\n';
  }
}

std::string summary_json_text(const MonteCarloResult& result) {
  bool any = false;
  for (const auto& [name, values] : result.samples) {
    if (!values.empty()) any = true;
  }
  if (!any) {
    throw std::invalid_argument("refusing to summarize a result with no samples");
  }
  nlohmann::ordered_json doc;
  doc["schema"] = "d2dsim-summary-v1";
  doc["kind"] = result.kind;
  doc["seed"] = result.seed;
  doc["drops"] = result.drops;
  nlohmann::ordered_json cfg;
  for (const auto& [section, keys] : result.config_echo.sections()) {
    for (const auto& [key, value] : keys) {
      cfg[section][key] = value;
    }
  }
  doc["config"] = std::move(cfg);
  nlohmann::ordered_json counters;
  for (const auto& [name, n] : result.counters) counters[name] = n;
  doc["counters"] = std::move(counters);
  nlohmann::ordered_json samples;
  for (const auto& [name, values] : result.samples) {
    const SummaryStats s = summarize(values);
    nlohmann::ordered_json entry;
    entry["count"] = s.count;
    entry["mean"] = s.mean;
    entry["median"] = s.median;
    entry["p05"] = s.p05;
    entry["p25"] = s.p25;
    entry["p75"] = s.p75;
    entry["p95"] = s.p95;
    entry["min"] = s.min;
    entry["max"] = s.max;
    samples[name] = std::move(entry);
  }
  doc["samples"] = std::move(samples);
  return doc.dump(2) + "\n";
}

void emit_summary_json(const MonteCarloResult& result,
                       const std::string& path) {
  const std::string text = summary_json_text(result);
  ensure_parent(path);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

void emit_price_trace_csv(const MonteCarloResult& result,
                          const std::string& path) {
  ensure_parent(path);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "round,item,price,event\n";
  for (const auto& e : result.price_trace) {
    const char* name = e.event == 'd' ? "drop" : e.event == 'r' ? "raise" : "sold";
    out << e.round << ',' << e.item << ',' << format_double(e.price) << ','
        << name << '\n';
  }
}

void emit_table_csv(const MonteCarloResult& result, const std::string& table,
                    const std::string& path) {
  const auto it = result.tables.find(table);
  if (it == result.tables.end()) {
    throw std::invalid_argument("no table named " + table);
  }
  ensure_parent(path);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (size_t i = 0; i < it->second.columns.size(); ++i) {
    out << (i ? "," : "") << it->second.columns[i];
  }
  out << '\n';
  for (const auto& row : it->second.rows) {
    for (size_t i = 0; i < row.size(); ++i) {
      out << (i ? "," : "") << format_double(row[i]);
    }
    out << '\n';
  }
}

std::vector<std::string> emit_all(const MonteCarloResult& result,
                                  const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  std::vector<std::string> written;
  for (const auto& [name, values] : result.samples) {
    if (values.empty()) continue;
    const std::string path =
        (fs::path(out_dir) / (result.kind + "_" + name + ".csv")).string();
    emit_cdf_csv(result, name, path);
    written.push_back(path);
  }
  for (const auto& [name, table] : result.tables) {
    const std::string path =
        (fs::path(out_dir) / (result.kind + "_" + name + ".csv")).string();
    emit_table_csv(result, name, path);
    written.push_back(path);
  }
  if (!result.price_trace.empty()) {
    const std::string path = (fs::path(out_dir) / "price_trace.csv").string();
    emit_price_trace_csv(result, path);
    written.push_back(path);
  }
  const std::string summary = (fs::path(out_dir) / "summary.json").string();
  emit_summary_json(result, summary);
  written.push_back(summary);
  return written;
}

}  // namespace d2d::harness
