#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "daec/heatmap.hpp"

namespace daec {

enum class NoiseKind { None, WhiteGaussian, GhostGaussian, Ramp };

// Additive perturbation h(x) applied on top of an encoded heatmap.
//  WhiteGaussian: i.i.d. N(0, amplitude²) per pixel (random error).
//  GhostGaussian: amplitude × unit-peak Gaussian(σ) centered at argmax + offset (biased error).
//  Ramp:          amplitude × (gx·x + gy·y) / max(W, H) (biased error).
// The result is clamped at 0 from below.
struct NoiseSpec {
  NoiseKind kind = NoiseKind::None;
  double amplitude = 0.0;
  double offset_x = 0.0;
  double offset_y = 0.0;
  double gradient_x = 0.0;
  double gradient_y = 0.0;
  std::uint64_t seed = 0;
};

Heatmap inject_noise(const Heatmap& hm, const NoiseSpec& spec);

std::string_view to_string(NoiseKind kind);
std::optional<NoiseKind> parse_noise_kind(std::string_view name);

}  // namespace daec
