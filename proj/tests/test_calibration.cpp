#include <cmath>
#include <limits>

#include "doctest.h"
#include "oracles.hpp"

#include "daec/calibration.hpp"
#include "daec/errors.hpp"
#include "daec/harness.hpp"

using namespace daec;

namespace {

std::vector<SyntheticSample> dataset(std::size_t n, const NoiseCondition& noise = {}, std::uint64_t seed = 1) {
  ExperimentPlan plan;
  plan.samples = n;
  plan.seed = seed;
  return generate(plan, noise);
}

NoiseCondition ghost(double amp, double off = 2.0) {
  return {"ghost", {{NoiseKind::GhostGaussian, amp, off, off, 0, 0, 11}}};
}

// Mean error of DAEC(Δ, pattern) using the naive box mean.
double oracle_mean_error(const std::vector<SyntheticSample>& data, int delta, Pattern pattern,
                         std::optional<double> presmooth = {}) {
  double total = 0;
  std::size_t n = 0;
  for (const auto& s : data) {
    for (std::size_t j = 0; j < s.heatmaps.size(); ++j) {
      const Heatmap hm = presmooth ? smooth(s.heatmaps[j], *presmooth) : s.heatmaps[j];
      const PixelIndex p = argmax(hm);
      const auto m = oracle::box_mean(hm, oracle::region(p.x, p.y, 7, delta, pattern, hm.width(), hm.height()));
      total += std::hypot(m.x * hm.stride() - s.truth[j].x, m.y * hm.stride() - s.truth[j].y);
      ++n;
    }
  }
  return total / static_cast<double>(n);
}

}  // namespace

TEST_CASE("default candidates") {
  CHECK(default_candidates(2.0) == std::vector<int>{-2, -1, 0, 1, 2, 3, 4, 5, 6});
  CHECK(default_candidates(3.0).back() == 7);
  // σ = 0.5: σ+4 would pass the half-span of 3.
  CHECK(default_candidates(0.5).back() == 3);
}

TEST_CASE("calibrate: noiseless data peaks at zero") {
  const auto data = dataset(500);
  CalibrationSpec spec;
  spec.candidates = default_candidates(2.0);
  const auto report = calibrate(data, spec);
  CHECK(report.delta_opt == 0);

  // Independent sweep over the same candidates.
  int best = 0;
  double best_err = std::numeric_limits<double>::infinity();
  for (int d : spec.candidates) {
    const double e = oracle_mean_error(data, d, Pattern::BR);
    CHECK(-report.at(d).score == doctest::Approx(e).epsilon(1e-9));
    if (e < best_err) {
      best_err = e;
      best = d;
    }
  }
  CHECK(best == 0);
  CHECK(smoothing_shift_check(data, spec) == std::pair{0, 0});
}

TEST_CASE("calibrate: bottom-right ghost bias needs a positive cut") {
  const auto data = dataset(500, ghost(0.05));
  CalibrationSpec spec;
  spec.candidates = default_candidates(2.0);
  const auto report = calibrate(data, spec);
  CHECK(report.delta_opt > 0);

  // Unimodal over the default range.
  std::size_t peak = 0;
  for (std::size_t i = 0; i < report.curve.size(); ++i) {
    if (report.curve[i].delta == report.delta_opt) peak = i;
  }
  for (std::size_t i = 1; i <= peak; ++i) CHECK(report.curve[i].score >= report.curve[i - 1].score);
  for (std::size_t i = peak + 1; i < report.curve.size(); ++i) CHECK(report.curve[i].score <= report.curve[i - 1].score);

  const auto [raw, smoothed] = smoothing_shift_check(data, spec);
  CHECK(raw == report.delta_opt);
  CHECK(smoothed <= raw);
  CHECK(-calibrate(data, {spec.candidates, Pattern::BR, 2.0, {}}).at(smoothed).score ==
        doctest::Approx(oracle_mean_error(data, smoothed, Pattern::BR, 2.0)).epsilon(1e-9));
}

TEST_CASE("calibrate: report consistency and curve shape") {
  const auto data = dataset(200, ghost(0.1));
  CalibrationSpec spec;
  spec.candidates = {-1, 0, 2, 3, 5};
  spec.pattern = Pattern::UR;
  const auto report = calibrate(data, spec);
  REQUIRE(report.curve.size() == spec.candidates.size());
  for (std::size_t i = 0; i < report.curve.size(); ++i) {
    CHECK(report.curve[i].delta == spec.candidates[i]);
    CHECK(report.at(report.delta_opt).score >= report.curve[i].score);
  }
  CHECK(report.samples == 200);
  CHECK(report.pattern == Pattern::UR);
}

TEST_CASE("calibrate: ties go to the smaller delta") {
  // Impulse heatmaps decode exactly under every Δ that keeps the peak.
  std::vector<SyntheticSample> data;
  for (int k = 0; k < 5; ++k) {
    std::vector<float> v(30 * 30, 0.0f);
    v[(10 + k) * 30 + 12] = 1.0f;
    data.push_back({{Heatmap(30, 30, 4.0, 2.0, v)}, {{12.0 * 4, (10.0 + k) * 4}}, {true}, 32.0});
  }
  CalibrationSpec spec;
  spec.candidates = {-2, -1, 0, 3, 7};
  const auto report = calibrate(data, spec);
  for (const auto& p : report.curve) CHECK(p.score == 0.0);
  CHECK(report.delta_opt == -2);
}

TEST_CASE("calibrate: perfectly decoded samples do not move the optimum") {
  auto data = dataset(300, ghost(0.1));
  CalibrationSpec spec;
  spec.candidates = default_candidates(2.0);
  const int before = calibrate(data, spec).delta_opt;
  std::vector<float> v(48 * 64, 0.0f);
  v[30 * 48 + 20] = 1.0f;
  data.push_back({{Heatmap(48, 64, 4.0, 2.0, v)}, {{80.0, 120.0}}, {true}, 32.0});
  CHECK(calibrate(data, spec).delta_opt == before);
}

TEST_CASE("calibrate: PCK objective") {
  const auto data = dataset(300, ghost(0.05));
  CalibrationSpec spec;
  spec.candidates = default_candidates(2.0);
  spec.objective = Objective::pck({0.01, 0.02});
  const auto report = calibrate(data, spec);
  for (const auto& p : report.curve) {
    CHECK(p.score >= 0.0);
    CHECK(p.score <= 1.0);
  }
  CHECK(to_string(report.objective) == "pck:0.01,0.02");
}

TEST_CASE("calibrate: deltas without positive mass are flagged, all-flagged fails") {
  // The window always keeps the peak, so only non-positive mass can flag:
  // a negative surround cancels the peak in the full window but not in
  // the 3x3 block left by the largest cut.
  std::vector<SyntheticSample> data;
  for (int k = 0; k < 4; ++k) {
    std::vector<float> v(25, -0.05f);
    v[12] = 1.0f;
    data.push_back({{Heatmap(5, 5, 1.0, 1.0, v)}, {{2.2, 1.9}}, {true}, 1.0});
  }
  CalibrationSpec spec;
  spec.candidates = {0, 4};
  const auto report = calibrate(data, spec);
  CHECK(report.at(0).flagged_samples == 4);
  CHECK(report.at(0).rejected);
  CHECK(std::isinf(report.at(0).score));
  CHECK_FALSE(report.at(4).rejected);
  CHECK(report.delta_opt == 4);
  CHECK(to_json(report).find("[\n      0,\n      null\n    ]") != std::string::npos);

  spec.candidates = {0};
  CHECK_THROWS_AS(calibrate(data, spec), CalibrationError);

  // Flagged on a minority of samples: scored, not rejected.
  data[1].heatmaps[0] = Heatmap(5, 5, 1.0, 1.0, std::vector<float>(25, 0.0f));
  spec.candidates = {4};
  const auto partial = calibrate(data, spec);
  CHECK(partial.at(4).flagged_samples == 1);
  CHECK_FALSE(partial.at(4).rejected);
}

TEST_CASE("calibrate: contract errors") {
  const auto data = dataset(10);
  CalibrationSpec spec;
  CHECK_THROWS_AS(calibrate(data, spec), DomainError);
  spec.candidates = {0, 0};
  CHECK_THROWS_AS(calibrate(data, spec), DomainError);
  spec.candidates = {2, 1};
  CHECK_THROWS_AS(calibrate(data, spec), DomainError);
  spec.candidates = {0, 8};
  CHECK_THROWS_AS(calibrate(data, spec), DomainError);
  spec.candidates = {0};
  CHECK_THROWS_AS(calibrate(std::vector<SyntheticSample>{}, spec), ContractError);
  auto mixed = data;
  mixed.push_back(dataset(1).front());
  mixed.back().heatmaps[0] = encode({80.0, 80.0}, 48, 64, 4.0, 3.0);
  CHECK_THROWS_AS(calibrate(mixed, spec), ContractError);
}

TEST_CASE("calibration report JSON and table") {
  const auto data = dataset(50, ghost(0.05));
  CalibrationSpec spec;
  spec.candidates = {0, 3};
  spec.presmooth = 2.0;
  const auto report = calibrate(data, spec);
  const std::string json = to_json(report);
  for (const char* key : {"\"objective\": \"mean-error\"", "\"pattern\": \"br\"", "\"presmooth\": 2.0",
                          "\"delta_opt\": ", "\"samples\": 50", "\"curve\": ["}) {
    CHECK(json.find(key) != std::string::npos);
  }
  const std::string table = curve_table(report);
  CHECK(table.find("*") != std::string::npos);
  CHECK(std::count(table.begin(), table.end(), '\n') == 3);
}

TEST_CASE("objective parsing") {
  CHECK(parse_objective("mean-error").kind == Objective::Kind::MeanErrorNeg);
  const auto p = parse_objective("pck:0.1,0.5");
  CHECK(p.kind == Objective::Kind::PckAtT);
  CHECK(p.thresholds == std::vector<double>{0.1, 0.5});
  CHECK_THROWS_AS(parse_objective("pck:"), DomainError);
  CHECK_THROWS_AS(parse_objective("pck:abc"), DomainError);
  CHECK_THROWS_AS(parse_objective("auc"), DomainError);
}
