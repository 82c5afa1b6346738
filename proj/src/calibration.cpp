#include "daec/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "json.hpp"

#include "daec/errors.hpp"
#include "daec/parallel.hpp"

namespace daec {

std::string to_string(const Objective& objective) {
  if (objective.kind == Objective::Kind::MeanErrorNeg) return "mean-error";
  std::string out = "pck:";
  for (std::size_t i = 0; i < objective.thresholds.size(); ++i) {
    if (i > 0) out += ",";
    out += format_number(objective.thresholds[i]);
  }
  return out;
}

Objective parse_objective(const std::string& text) {
  if (text == "mean-error") return Objective::mean_error();
  if (text.rfind("pck:", 0) == 0) {
    std::vector<double> ts;
    std::stringstream ss(text.substr(4));
    std::string item;
    while (std::getline(ss, item, ',')) {
      std::size_t used = 0;
      double t = 0.0;
      try {
        t = std::stod(item, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != item.size() || !(t > 0.0)) throw DomainError("bad PCK threshold '" + item + "'");
      ts.push_back(t);
    }
    if (ts.empty()) throw DomainError("pck objective needs at least one threshold");
    return Objective::pck(std::move(ts));
  }
  throw DomainError("unknown objective '" + text + "' (expected mean-error or pck:<t>[,<t>...])");
}

std::vector<int> default_candidates(double sigma) {
  const int hi = std::min(static_cast<int>(std::lround(sigma)) + 4, window_half_span(sigma));
  std::vector<int> out;
  for (int d = -2; d <= hi; ++d) out.push_back(d);
  return out;
}

const CurvePoint& CalibrationReport::at(int delta) const {
  for (const auto& p : curve) {
    if (p.delta == delta) return p;
  }
  throw ContractError("delta " + std::to_string(delta) + " is not on the calibration curve");
}

namespace {

struct PreparedJoint {
  const Heatmap* heatmap;
  PixelIndex peak;
};

double objective_score(const Objective& objective, const EvalReport& report) {
  if (objective.kind == Objective::Kind::MeanErrorNeg) return -report.mean_error;
  double total = 0.0;
  for (double t : objective.thresholds) total += report.pck.at(t);
  return total / static_cast<double>(objective.thresholds.size());
}

}  // namespace

CalibrationReport calibrate(std::span<const SyntheticSample> dataset, const CalibrationSpec& spec) {
  if (dataset.empty()) throw ContractError("calibration dataset is empty");
  if (spec.candidates.empty()) throw DomainError("calibration needs at least one delta candidate");
  if (spec.objective.kind == Objective::Kind::PckAtT && spec.objective.thresholds.empty()) {
    throw DomainError("pck objective needs at least one threshold");
  }

  std::optional<double> sigma, stride;
  for (const auto& s : dataset) {
    validate(s);
    for (const auto& hm : s.heatmaps) {
      if (!sigma) {
        sigma = hm.sigma();
        stride = hm.stride();
      } else if (hm.sigma() != *sigma || hm.stride() != *stride) {
        throw ContractError("calibration dataset mixes sigma or stride values");
      }
    }
  }
  if (!sigma) throw ContractError("calibration dataset has no heatmaps");

  const Heatmap* reference = nullptr;
  for (const auto& s : dataset) {
    if (!s.heatmaps.empty()) reference = &s.heatmaps.front();
  }
  for (std::size_t i = 0; i < spec.candidates.size(); ++i) {
    if (i > 0 && spec.candidates[i] <= spec.candidates[i - 1]) {
      throw DomainError("delta candidates must be strictly increasing");
    }
    check_delta(spec.candidates[i], *reference);
  }

  // Smoothing and argmax do not depend on Δ; compute them once.
  std::vector<std::vector<std::optional<Heatmap>>> smoothed(dataset.size());
  std::vector<std::vector<PreparedJoint>> joints(dataset.size());
  for (std::size_t s = 0; s < dataset.size(); ++s) {
    const auto& sample = dataset[s];
    smoothed[s].resize(sample.heatmaps.size());
    for (std::size_t j = 0; j < sample.heatmaps.size(); ++j) {
      if (!sample.visible[j]) continue;
      const Heatmap* hm = &sample.heatmaps[j];
      if (spec.presmooth) {
        smoothed[s][j].emplace(smooth(*hm, *spec.presmooth));
        hm = &*smoothed[s][j];
      }
      joints[s].push_back({hm, argmax(*hm)});
    }
  }

  const std::vector<double>& thresholds =
      spec.objective.kind == Objective::Kind::PckAtT ? spec.objective.thresholds : kDefaultPckThresholds;

  CalibrationReport report;
  report.objective = spec.objective;
  report.pattern = spec.pattern;
  report.presmooth = spec.presmooth;
  report.samples = dataset.size();
  report.curve.resize(spec.candidates.size());

  parallel_for(spec.candidates.size(), [&](std::size_t c) {
    const int delta = spec.candidates[c];
    std::vector<Coord> predictions;
    predictions.reserve(count_visible(dataset));
    std::size_t flagged = 0;
    for (std::size_t s = 0; s < dataset.size(); ++s) {
      bool sample_flagged = false;
      for (const auto& joint : joints[s]) {
        const Heatmap& hm = *joint.heatmap;
        WindowedMean mean{joint.peak};
        try {
          mean = windowed_mean(hm, joint.peak, build_region(hm, joint.peak, delta, spec.pattern));
        } catch (const DomainError&) {
          // empty region; falls through to the argmax below
        }
        if (!mean.valid()) {
          sample_flagged = true;
          mean.dx = mean.dy = 0.0;
        }
        predictions.push_back(
            {(joint.peak.x + mean.dx) * hm.stride(), (joint.peak.y + mean.dy) * hm.stride(), Space::Image});
      }
      if (sample_flagged) ++flagged;
    }

    CurvePoint& point = report.curve[c];
    point.delta = delta;
    point.flagged_samples = flagged;
    point.rejected = 2 * flagged > dataset.size();
    point.score = point.rejected ? -std::numeric_limits<double>::infinity()
                                 : objective_score(spec.objective, evaluate(dataset, predictions, thresholds));
  });

  const CurvePoint* best = nullptr;
  for (const auto& p : report.curve) {
    if (p.rejected) continue;
    if (!best || p.score > best->score) best = &p;
  }
  if (!best) {
    std::string flags;
    for (const auto& p : report.curve) {
      flags += " d=" + std::to_string(p.delta) + ":" + std::to_string(p.flagged_samples) + "/" +
               std::to_string(dataset.size());
    }
    throw CalibrationError("calibration failed: every delta candidate emptied regions on most samples;" + flags);
  }
  report.delta_opt = best->delta;
  return report;
}

std::pair<int, int> smoothing_shift_check(std::span<const SyntheticSample> dataset, const CalibrationSpec& spec) {
  if (dataset.empty() || dataset.front().heatmaps.empty()) throw ContractError("calibration dataset is empty");
  CalibrationSpec raw = spec;
  raw.presmooth.reset();
  CalibrationSpec smoothed = spec;
  smoothed.presmooth = dataset.front().heatmaps.front().sigma();
  return {calibrate(dataset, raw).delta_opt, calibrate(dataset, smoothed).delta_opt};
}

std::string to_json(const CalibrationReport& report) {
  nlohmann::ordered_json doc;
  doc["objective"] = to_string(report.objective);
  doc["pattern"] = std::string(to_string(report.pattern));
  doc["presmooth"] = report.presmooth ? nlohmann::ordered_json(*report.presmooth) : nlohmann::ordered_json();
  doc["curve"] = nlohmann::ordered_json::array();
  for (const auto& p : report.curve) {
    doc["curve"].push_back({p.delta, p.rejected ? nlohmann::ordered_json() : nlohmann::ordered_json(p.score)});
  }
  doc["delta_opt"] = report.delta_opt;
  doc["samples"] = report.samples;
  return doc.dump(2);
}

std::string curve_table(const CalibrationReport& report) {
  std::ostringstream out;
  out << std::setw(7) << "delta" << "  " << std::setw(22) << "score" << "  flagged\n";
  for (const auto& p : report.curve) {
    out << (p.delta == report.delta_opt ? '*' : ' ') << std::setw(6) << p.delta << "  " << std::setw(22)
        << (p.rejected ? std::string("rejected") : format_number(p.score)) << "  " << p.flagged_samples << "\n";
  }
  return out.str();
}

}  // namespace daec
