#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "daec/decoders.hpp"
#include "daec/metrics.hpp"

namespace daec {

// Maximize-better score used to rank Δ candidates.
struct Objective {
  enum class Kind { MeanErrorNeg, PckAtT };
  Kind kind = Kind::MeanErrorNeg;
  std::vector<double> thresholds;  // PckAtT: score is the mean PCK over these

  static Objective mean_error() { return {}; }
  static Objective pck(std::vector<double> ts) { return {Kind::PckAtT, std::move(ts)}; }
};

std::string to_string(const Objective& objective);
// "mean-error" or "pck:0.1[,0.5...]".
Objective parse_objective(const std::string& text);

struct CalibrationSpec {
  std::vector<int> candidates;
  Pattern pattern = Pattern::BR;
  std::optional<double> presmooth;
  Objective objective;
};

// -2 ... σ+4 inclusive, capped at the window half-span.
std::vector<int> default_candidates(double sigma);

struct CurvePoint {
  int delta = 0;
  double score = 0.0;             // -inf when rejected
  std::size_t flagged_samples = 0;  // samples with an empty region or zero mass
  bool rejected = false;            // flagged on more than half the samples
};

struct CalibrationReport {
  std::vector<CurvePoint> curve;
  int delta_opt = 0;
  Objective objective;
  Pattern pattern = Pattern::BR;
  std::optional<double> presmooth;
  std::size_t samples = 0;

  const CurvePoint& at(int delta) const;
};

// Grid search: decode every visible joint with DAEC(Δ, pattern) for each
// candidate, score the dataset, keep the best (ties go to the smaller Δ).
CalibrationReport calibrate(std::span<const SyntheticSample> dataset, const CalibrationSpec& spec);

// Calibrates unsmoothed and with presmooth = σ; returns {unsmoothed, smoothed} optima.
std::pair<int, int> smoothing_shift_check(std::span<const SyntheticSample> dataset, const CalibrationSpec& spec);

// {"objective", "pattern", "presmooth", "curve": [[delta, score]...], "delta_opt", "samples"}.
// Rejected points carry a null score.
std::string to_json(const CalibrationReport& report);

// Aligned two-column text table of the curve, best row marked with '*'.
std::string curve_table(const CalibrationReport& report);

}  // namespace daec
