#include "daec/noise.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "daec/errors.hpp"

namespace daec {

Heatmap inject_noise(const Heatmap& hm, const NoiseSpec& spec) {
  if (spec.kind == NoiseKind::None) return hm;
  if (!(spec.amplitude >= 0.0) || !std::isfinite(spec.amplitude)) {
    throw DomainError("noise amplitude must be a finite value >= 0");
  }

  const int w = hm.width();
  const int h = hm.height();
  std::vector<double> add(hm.size(), 0.0);

  switch (spec.kind) {
    case NoiseKind::WhiteGaussian: {
      std::mt19937_64 rng(spec.seed);
      std::normal_distribution<double> normal(0.0, 1.0);
      for (double& a : add) a = spec.amplitude * normal(rng);
      break;
    }
    case NoiseKind::GhostGaussian: {
      const PixelIndex peak = argmax(hm);
      const double cx = peak.x + spec.offset_x;
      const double cy = peak.y + spec.offset_y;
      const double inv_two_var = 1.0 / (2.0 * hm.sigma() * hm.sigma());
      for (int j = 0; j < h; ++j) {
        for (int i = 0; i < w; ++i) {
          const double d2 = (i - cx) * (i - cx) + (j - cy) * (j - cy);
          add[static_cast<std::size_t>(j) * w + i] = spec.amplitude * std::exp(-d2 * inv_two_var);
        }
      }
      break;
    }
    case NoiseKind::Ramp: {
      const double scale = spec.amplitude / std::max(w, h);
      for (int j = 0; j < h; ++j) {
        for (int i = 0; i < w; ++i) {
          add[static_cast<std::size_t>(j) * w + i] = scale * (spec.gradient_x * i + spec.gradient_y * j);
        }
      }
      break;
    }
    default:
      throw DomainError("unknown noise kind");
  }

  const auto src = hm.values();
  std::vector<float> out(src.size());
  for (std::size_t k = 0; k < src.size(); ++k) {
    out[k] = static_cast<float>(std::max(0.0, static_cast<double>(src[k]) + add[k]));
  }
  return hm.with_values(std::move(out));
}

std::string_view to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::None: return "none";
    case NoiseKind::WhiteGaussian: return "white";
    case NoiseKind::GhostGaussian: return "ghost";
    case NoiseKind::Ramp: return "ramp";
  }
  return "unknown";
}

std::optional<NoiseKind> parse_noise_kind(std::string_view name) {
  for (auto kind : {NoiseKind::None, NoiseKind::WhiteGaussian, NoiseKind::GhostGaussian, NoiseKind::Ramp}) {
    if (to_string(kind) == name) return kind;
  }
  return std::nullopt;
}

}  // namespace daec
