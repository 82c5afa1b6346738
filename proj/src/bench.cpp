#include <algorithm>
#include <chrono>
#include <cmath>

#include "daec/errors.hpp"
#include "daec/harness.hpp"

namespace daec {

namespace {

using Clock = std::chrono::steady_clock;

// Smallest batch wall time we trust, in nanoseconds.
constexpr double kMinBatchNs = 200'000.0;

double percentile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = static_cast<std::size_t>(std::ceil(pos));
  return v[lo] + (v[hi] - v[lo]) * (pos - static_cast<double>(lo));
}

// Wall time of one pass over the batch, in nanoseconds.
double time_pass(const std::vector<Heatmap>& batch, const DecoderConfig& config) {
  volatile double sink = 0.0;
  const auto t0 = Clock::now();
  double acc = 0.0;
  for (const auto& hm : batch) {
    const Coord c = decode(hm, config).coord;
    acc += c.x + c.y;
  }
  const auto t1 = Clock::now();
  sink = acc;
  (void)sink;
  return std::chrono::duration<double, std::nano>(t1 - t0).count();
}

}  // namespace

const BenchEntry& BenchResult::entry(const std::string& label) const {
  for (const auto& e : entries) {
    if (e.label == label) return e;
  }
  throw ContractError("no bench entry labelled '" + label + "'");
}

BenchResult bench(const ExperimentPlan& plan, std::size_t iterations) {
  if (iterations < 30) throw DomainError("bench needs at least 30 timed iterations, got " + std::to_string(iterations));
  if (plan.decoders.empty()) throw ConfigError("bench plan has no decoders");
  if (plan.bench_batch == 0) throw ConfigError("bench_batch must be positive");

  ExperimentPlan batch_plan = plan;
  batch_plan.samples = plan.bench_batch;
  batch_plan.joints = 1;
  batch_plan.occlusion_rate = 0.0;
  const NoiseCondition noise = plan.noise.empty() ? NoiseCondition{"clean", {}} : plan.noise.front();
  std::vector<Heatmap> batch;
  for (auto& s : generate(batch_plan, noise)) batch.push_back(std::move(s.heatmaps.front()));

  BenchResult result;
  result.iterations = iterations;

  std::vector<BenchEntry> entries;
  for (const auto& d : plan.decoders) {
    BenchEntry e;
    e.config = d.config;
    // Timing only depends on Δ through the window size; calibrated entries
    // use the documented default.
    if (d.delta_source != DeltaSource::Fixed) {
      e.config.delta = paper_default_delta(plan.sigma, d.config.presmooth.has_value());
    }
    e.label = d.label.empty() ? describe(e.config) : d.label;
    entries.push_back(e);
  }
  const DecoderConfig standard{};

  for (std::size_t w = 0; w < result.warmup; ++w) {
    time_pass(batch, standard);
    for (const auto& e : entries) time_pass(batch, e.config);
  }

  // Grow the batch until one standard pass is long enough to time reliably.
  const std::size_t base = batch.size();
  while (time_pass(batch, standard) < kMinBatchNs && batch.size() < base * 1024) {
    const std::size_t n = batch.size();
    for (std::size_t k = 0; k < n; ++k) batch.push_back(batch[k]);
    result.batch_adjusted = true;
  }
  result.batch = batch.size();
  const double per = 1.0 / static_cast<double>(batch.size());

  std::vector<std::vector<double>> extra(entries.size()), total(entries.size());
  std::vector<double> standard_times;
  for (std::size_t it = 0; it < iterations; ++it) {
    const double before = time_pass(batch, standard);
    std::vector<double> t(entries.size());
    for (std::size_t e = 0; e < entries.size(); ++e) t[e] = time_pass(batch, entries[e].config);
    const double after = time_pass(batch, standard);
    const double baseline = 0.5 * (before + after) * per;
    standard_times.push_back(baseline);
    for (std::size_t e = 0; e < entries.size(); ++e) {
      total[e].push_back(t[e] * per);
      extra[e].push_back(t[e] * per - baseline);
    }
  }

  result.standard_median_ns = percentile(standard_times, 0.5);
  for (std::size_t e = 0; e < entries.size(); ++e) {
    // Every refinement runs the same argmax first; a negative difference is
    // timer noise around zero.
    entries[e].median_extra_ns = std::max(0.0, percentile(extra[e], 0.5));
    entries[e].p95_extra_ns = std::max(0.0, percentile(extra[e], 0.95));
    entries[e].median_total_ns = percentile(total[e], 0.5);
  }
  result.entries = std::move(entries);
  return result;
}

std::string bench_csv(const BenchResult& result) {
  std::string out =
      "decoder,method,delta,pattern,presmooth,median_extra_ns,p95_extra_ns,median_total_ns,iterations,batch\n";
  for (const auto& e : result.entries) {
    const bool daec = e.config.method == Method::Daec;
    out += csv_field(e.label) + "," + std::string(to_string(e.config.method)) + "," +
           (daec ? std::to_string(e.config.delta) : "") + "," + (daec ? std::string(to_string(e.config.pattern)) : "") +
           "," + (e.config.presmooth ? format_number(*e.config.presmooth) : "") + "," +
           format_number(e.median_extra_ns) + "," + format_number(e.p95_extra_ns) + "," +
           format_number(e.median_total_ns) + "," + std::to_string(result.iterations) + "," +
           std::to_string(result.batch) + "\n";
  }
  return out;
}

}  // namespace daec
