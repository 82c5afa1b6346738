#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "daec/calibration.hpp"
#include "daec/decoders.hpp"
#include "daec/metrics.hpp"
#include "daec/noise.hpp"

namespace daec {

// A named noise condition; specs are applied in order.
struct NoiseCondition {
  std::string id;
  std::vector<NoiseSpec> specs;
};

enum class DeltaSource {
  Fixed,       // config.delta as given
  AutoPaper,   // σ+2 raw, σ+1 when presmoothed
  Calibrated,  // Δ_opt learned on the calibration set for this noise condition
};

struct DecoderEntry {
  DecoderConfig config;
  DeltaSource delta_source = DeltaSource::Fixed;
  std::string label;  // defaults to describe(config)
};

struct CalibrationPlan {
  std::vector<Pattern> patterns;  // curves emitted per pattern
  std::vector<int> candidates;    // empty: default_candidates(σ)
  Objective objective;
  std::optional<double> presmooth;
  std::size_t samples = 0;        // 0: calibrate on the evaluation set
  std::uint64_t seed = 0x5eed;
};

struct ExperimentPlan {
  int height = 64;
  int width = 48;
  double stride = 4.0;
  double sigma = 2.0;
  std::size_t samples = 2000;
  std::size_t joints = 1;
  double margin = 8.0;            // heatmap px kept clear of the border
  bool border = false;            // allow margin < 3σ+2
  double norm_length = 32.0;      // image px
  double occlusion_rate = 0.0;    // probability a joint is marked invisible
  std::vector<double> pck_thresholds = kDefaultPckThresholds;
  std::vector<NoiseCondition> noise;
  std::vector<DecoderEntry> decoders;
  CalibrationPlan calibration;
  std::size_t bench_batch = 256;
  std::uint64_t seed = 1;
};

// Throws ConfigError when the plan cannot run.
void validate(const ExperimentPlan& plan);

ExperimentPlan plan_from_json(const std::string& text);
std::string to_json(const ExperimentPlan& plan);

// Deterministic under plan.seed: ground-truth centers are uniform over the
// margin-inset interior, encoded, then perturbed by `noise`. Each spec's seed
// is mixed with the sample and joint index.
std::vector<SyntheticSample> generate(const ExperimentPlan& plan, const NoiseCondition& noise = {});

// Dataset dumps pair a .hmz file (sample-major, joint-minor) with a truth
// document: {"joints": J, "norm_length": L, "keypoints": [[x, y, visible], ...]}
// in image px, one keypoint per heatmap.
std::vector<Heatmap> flatten_heatmaps(std::span<const SyntheticSample> samples);
std::string truth_to_json(std::span<const SyntheticSample> samples);
// Throws FormatError on a malformed document or a count mismatch.
std::vector<SyntheticSample> attach_truth(std::vector<Heatmap> heatmaps, const std::string& truth_json);

// Decodes every visible joint; counts fallbacks.
struct DecodeRun {
  std::vector<Coord> predictions;
  std::size_t fallbacks = 0;
};
DecodeRun decode_dataset(std::span<const SyntheticSample> samples, const DecoderConfig& config);

struct CellResult {
  std::string noise_id;
  std::string label;
  DecoderConfig config;  // Δ resolved
  EvalReport report;
  std::size_t fallbacks = 0;
  std::string error;     // non-empty when the cell failed
};

struct CurveRow {
  int delta = 0;
  Pattern pattern = Pattern::BR;
  std::string noise_id;
  double score = 0.0;
  bool rejected = false;
};

struct ExperimentResult {
  std::vector<CellResult> cells;  // noise-major, decoder order within
  std::vector<CurveRow> curves;
  std::map<std::string, std::map<Pattern, int>> delta_opt;  // noise_id -> pattern -> Δ_opt
};

ExperimentResult run_experiment(const ExperimentPlan& plan);

std::string results_csv(const ExperimentResult& result, const std::vector<double>& thresholds);
std::string curves_csv(const ExperimentResult& result);

struct BenchEntry {
  std::string label;
  DecoderConfig config;
  double median_extra_ns = 0.0;  // per heatmap, over decode_standard
  double p95_extra_ns = 0.0;
  double median_total_ns = 0.0;
};

struct BenchResult {
  std::vector<BenchEntry> entries;
  double standard_median_ns = 0.0;
  std::size_t iterations = 0;
  std::size_t warmup = 10;
  std::size_t batch = 0;
  bool batch_adjusted = false;

  const BenchEntry& entry(const std::string& label) const;
};

// Single-threaded wall-clock timing of each plan decoder against
// decode_standard on identical batches. Requires iterations >= 30.
BenchResult bench(const ExperimentPlan& plan, std::size_t iterations);

std::string bench_csv(const BenchResult& result);

}  // namespace daec
