#include <cmath>

#include "doctest.h"
#include "oracles.hpp"

#include "daec/errors.hpp"
#include "daec/heatmap.hpp"
#include "daec/noise.hpp"

using namespace daec;

TEST_CASE("noise: None is the identity") {
  std::mt19937_64 rng(1);
  const auto r = oracle::random_heatmap(rng);
  CHECK(inject_noise(r.hm, {}) == r.hm);
  CHECK(inject_noise(r.hm, {NoiseKind::None, 5.0, 1, 1, 1, 1, 99}) == r.hm);
}

TEST_CASE("noise: every kind is deterministic under its seed") {
  const Heatmap hm = encode({40.0, 50.0}, 48, 64, 4.0, 2.0);
  for (auto kind : {NoiseKind::WhiteGaussian, NoiseKind::GhostGaussian, NoiseKind::Ramp}) {
    const NoiseSpec spec{kind, 0.1, 2, 2, 1, -1, 1234};
    CHECK(inject_noise(hm, spec) == inject_noise(hm, spec));
  }
  NoiseSpec a{NoiseKind::WhiteGaussian, 0.1, 0, 0, 0, 0, 1};
  NoiseSpec b = a;
  b.seed = 2;
  CHECK_FALSE(inject_noise(hm, a) == inject_noise(hm, b));
}

TEST_CASE("noise: ghost with a positive offset pulls the windowed mean bottom-right") {
  const Heatmap hm = encode({20.0 * 4, 22.0 * 4}, 48, 64, 4.0, 2.0);
  const Heatmap noisy = inject_noise(hm, {NoiseKind::GhostGaussian, 0.15, 2, 2, 0, 0, 0});
  const PixelIndex p = argmax(noisy);
  REQUIRE(p == argmax(hm));
  const auto box = oracle::region(p.x, p.y, 7, 0, Pattern::BR, 48, 64);
  const auto mu = oracle::box_mean(hm, box);
  const auto nu = oracle::box_mean(noisy, box);
  CHECK(nu.x > mu.x);
  CHECK(nu.y > mu.y);
}

TEST_CASE("noise: white amplitude 0.01 has mean absolute perturbation near 0.008") {
  // Constant background keeps the clamp at 0 out of play.
  const Heatmap base(48, 64, 4.0, 2.0, std::vector<float>(48 * 64, 0.5f));
  for (std::uint64_t seed : {1u, 2u, 3u, 42u}) {
    const Heatmap noisy = inject_noise(base, {NoiseKind::WhiteGaussian, 0.01, 0, 0, 0, 0, seed});
    double mad = 0;
    for (std::size_t k = 0; k < base.size(); ++k) mad += std::abs(noisy.values()[k] - base.values()[k]);
    mad /= static_cast<double>(base.size());
    CHECK(mad >= 0.006);
    CHECK(mad <= 0.010);
  }
}

TEST_CASE("noise: ramp adds a plane and the result is clamped at zero") {
  const Heatmap zero(10, 5, 1.0, 1.0, std::vector<float>(50, 0.0f));
  const Heatmap ramp = inject_noise(zero, {NoiseKind::Ramp, 2.0, 0, 0, 1.0, 0.5, 0});
  for (int y = 0; y < 5; ++y) {
    for (int x = 0; x < 10; ++x) CHECK(ramp.at(x, y) == doctest::Approx(2.0 * (x + 0.5 * y) / 10.0));
  }
  const Heatmap down = inject_noise(zero, {NoiseKind::Ramp, 1.0, 0, 0, -1.0, 0.0, 0});
  for (float v : down.values()) CHECK(v == 0.0f);
}

TEST_CASE("noise: names round trip") {
  for (auto k : {NoiseKind::None, NoiseKind::WhiteGaussian, NoiseKind::GhostGaussian, NoiseKind::Ramp}) {
    CHECK(parse_noise_kind(to_string(k)) == k);
  }
  CHECK_FALSE(parse_noise_kind("pink").has_value());
}

TEST_CASE("noise: bad specs are domain errors") {
  const Heatmap hm = encode({8.0, 8.0}, 17, 17, 1.0, 2.0);
  CHECK_THROWS_AS(inject_noise(hm, {static_cast<NoiseKind>(17), 0.1, 0, 0, 0, 0, 0}), DomainError);
  CHECK_THROWS_AS(inject_noise(hm, {NoiseKind::WhiteGaussian, -0.1, 0, 0, 0, 0, 0}), DomainError);
}
