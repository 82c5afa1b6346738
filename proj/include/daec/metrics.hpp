#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "daec/heatmap.hpp"

namespace daec {

// One labeled instance: a heatmap per joint, image-space ground truth,
// visibility flags and the PCK normalizer (head-size stand-in).
struct SyntheticSample {
  std::vector<Heatmap> heatmaps;
  std::vector<Coord> truth;
  std::vector<bool> visible;
  double norm_length = 1.0;
};

// Throws ContractError on misaligned lists, non-positive norm_length or
// visible truth outside the image extent.
void validate(const SyntheticSample& sample);

std::size_t count_visible(std::span<const SyntheticSample> samples);

struct JointStats {
  std::size_t count = 0;
  double mean_error = 0.0;
  std::map<double, double> pck;
};

struct EvalReport {
  std::size_t count = 0;     // visible joints scored
  double mean_error = 0.0;   // image px
  double median_error = 0.0;
  std::map<double, double> pck;       // threshold -> fraction
  std::vector<JointStats> per_joint;  // indexed by joint slot
};

inline const std::vector<double> kDefaultPckThresholds{0.1, 0.5};

// Euclidean distance in image space.
double distance(const Coord& a, const Coord& b);

// `predictions` holds one image-space coordinate per visible joint, in
// sample-major then joint order. PCK@t counts error / norm_length < t.
EvalReport evaluate(std::span<const SyntheticSample> samples, std::span<const Coord> predictions,
                    std::span<const double> thresholds = kDefaultPckThresholds);

// Per-visible-joint normalized errors (error / norm_length), same ordering.
std::vector<double> normalized_errors(std::span<const SyntheticSample> samples,
                                      std::span<const Coord> predictions);

std::string to_json(const EvalReport& report);

// Flat CSV for the harness. `header` lists the PCK columns for the thresholds.
std::string csv_header(std::span<const double> thresholds);
std::string csv_row(const EvalReport& report, std::span<const double> thresholds);

// Quotes a CSV field when it contains a comma, quote or newline.
std::string csv_field(const std::string& text);

// Shortest round-trip decimal form, used for all CSV and table output.
std::string format_number(double value);

}  // namespace daec
