#include "daec/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

#include "json.hpp"

#include "daec/errors.hpp"

namespace daec {

void validate(const SyntheticSample& sample) {
  const std::size_t n = sample.heatmaps.size();
  if (sample.truth.size() != n || sample.visible.size() != n) {
    throw ContractError("sample lists differ in length");
  }
  if (!(sample.norm_length > 0.0)) throw ContractError("norm_length must be positive");
  for (std::size_t j = 0; j < n; ++j) {
    if (!sample.visible[j]) continue;
    const Heatmap& hm = sample.heatmaps[j];
    const Coord t = sample.truth[j].to_image(hm.stride());
    if (!(t.x >= 0.0 && t.y >= 0.0 && t.x <= hm.width() * hm.stride() && t.y <= hm.height() * hm.stride())) {
      throw ContractError("visible truth of joint " + std::to_string(j) + " lies outside the image extent");
    }
  }
}

std::size_t count_visible(std::span<const SyntheticSample> samples) {
  std::size_t n = 0;
  for (const auto& s : samples) n += static_cast<std::size_t>(std::count(s.visible.begin(), s.visible.end(), true));
  return n;
}

double distance(const Coord& a, const Coord& b) {
  if (a.space != b.space) throw ContractError("distance between coordinates in different spaces");
  return std::hypot(a.x - b.x, a.y - b.y);
}

namespace {

struct ScoredJoint {
  std::size_t slot;
  double error;
  double normalized;
};

std::vector<ScoredJoint> score(std::span<const SyntheticSample> samples, std::span<const Coord> predictions) {
  if (predictions.size() != count_visible(samples)) {
    throw ContractError("got " + std::to_string(predictions.size()) + " predictions for " +
                        std::to_string(count_visible(samples)) + " visible joints");
  }
  std::vector<ScoredJoint> out;
  out.reserve(predictions.size());
  std::size_t k = 0;
  for (const auto& s : samples) {
    validate(s);
    for (std::size_t j = 0; j < s.heatmaps.size(); ++j) {
      if (!s.visible[j]) continue;
      const double stride = s.heatmaps[j].stride();
      const double err = distance(predictions[k++].to_image(stride), s.truth[j].to_image(stride));
      out.push_back({j, err, err / s.norm_length});
    }
  }
  return out;
}

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + mid);
  return 0.5 * (lower + upper);
}

}  // namespace

std::vector<double> normalized_errors(std::span<const SyntheticSample> samples,
                                      std::span<const Coord> predictions) {
  std::vector<double> out;
  for (const auto& j : score(samples, predictions)) out.push_back(j.normalized);
  return out;
}

EvalReport evaluate(std::span<const SyntheticSample> samples, std::span<const Coord> predictions,
                    std::span<const double> thresholds) {
  const auto joints = score(samples, predictions);
  EvalReport report;
  report.count = joints.size();

  std::size_t slots = 0;
  for (const auto& s : samples) slots = std::max(slots, s.heatmaps.size());
  report.per_joint.resize(slots);

  std::vector<double> errors;
  errors.reserve(joints.size());
  double total = 0.0;
  std::vector<double> slot_total(slots, 0.0);
  std::map<double, std::size_t> hits;
  std::vector<std::map<double, std::size_t>> slot_hits(slots);
  for (const auto& j : joints) {
    errors.push_back(j.error);
    total += j.error;
    slot_total[j.slot] += j.error;
    report.per_joint[j.slot].count++;
    for (double t : thresholds) {
      if (j.normalized < t) {
        hits[t]++;
        slot_hits[j.slot][t]++;
      }
    }
  }

  auto fraction = [](std::size_t num, std::size_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
  };
  if (!joints.empty()) report.mean_error = total / static_cast<double>(joints.size());
  report.median_error = median_of(std::move(errors));
  for (double t : thresholds) report.pck[t] = fraction(hits[t], joints.size());
  for (std::size_t s = 0; s < slots; ++s) {
    JointStats& js = report.per_joint[s];
    if (js.count > 0) js.mean_error = slot_total[s] / static_cast<double>(js.count);
    for (double t : thresholds) js.pck[t] = fraction(slot_hits[s][t], js.count);
  }
  return report;
}

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

std::string to_json(const EvalReport& report) {
  nlohmann::ordered_json doc;
  doc["count"] = report.count;
  doc["mean_error"] = report.mean_error;
  doc["median_error"] = report.median_error;
  auto pck_json = [](const std::map<double, double>& pck) {
    nlohmann::ordered_json out = nlohmann::ordered_json::object();
    for (const auto& [t, v] : pck) out[format_number(t)] = v;
    return out;
  };
  doc["pck"] = pck_json(report.pck);
  doc["per_joint"] = nlohmann::ordered_json::array();
  for (const auto& js : report.per_joint) {
    doc["per_joint"].push_back({{"count", js.count}, {"mean_error", js.mean_error}, {"pck", pck_json(js.pck)}});
  }
  return doc.dump(2);
}

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string csv_header(std::span<const double> thresholds) {
  std::string out = "count,mean_error,median_error";
  for (double t : thresholds) out += ",pck@" + format_number(t);
  return out;
}

std::string csv_row(const EvalReport& report, std::span<const double> thresholds) {
  std::string out = std::to_string(report.count) + "," + format_number(report.mean_error) + "," +
                    format_number(report.median_error);
  for (double t : thresholds) {
    const auto it = report.pck.find(t);
    out += "," + format_number(it == report.pck.end() ? 0.0 : it->second);
  }
  return out;
}

}  // namespace daec
