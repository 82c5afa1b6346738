#include "daec/heatmap.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "daec/errors.hpp"

namespace daec {

Coord Coord::to_image(double stride) const {
  if (space == Space::Image) return *this;
  return {x * stride, y * stride, Space::Image};
}

Coord Coord::to_heatmap(double stride) const {
  if (space == Space::Heatmap) return *this;
  return {x / stride, y / stride, Space::Heatmap};
}

Heatmap::Heatmap(int width, int height, double stride, double sigma, std::vector<float> values)
    : width_(width), height_(height), stride_(stride), sigma_(sigma), values_(std::move(values)) {
  if (width < 1 || height < 1) throw DomainError("heatmap dimensions must be positive");
  if (!(stride > 0.0) || !std::isfinite(stride)) throw DomainError("stride must be positive");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw DomainError("sigma must be positive");
  if (values_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw DomainError("heatmap value count " + std::to_string(values_.size()) + " != " +
                      std::to_string(width) + "x" + std::to_string(height));
  }
}

Heatmap Heatmap::with_values(std::vector<float> values) const {
  return Heatmap(width_, height_, stride_, sigma_, std::move(values));
}

Heatmap encode(const Coord& center, int width, int height, double stride, double sigma,
               PeakConvention convention) {
  if (!(sigma > 0.0)) throw DomainError("sigma must be positive");
  if (!(stride > 0.0)) throw DomainError("stride must be positive");
  if (width < 1 || height < 1) throw DomainError("heatmap dimensions must be positive");
  const Coord mu = center.to_heatmap(stride);
  if (!(mu.x >= 0.0 && mu.x <= width - 1 && mu.y >= 0.0 && mu.y <= height - 1)) {
    throw DomainError("center (" + std::to_string(center.x) + ", " + std::to_string(center.y) +
                      ") falls outside the heatmap grid");
  }

  const double inv_two_var = 1.0 / (2.0 * sigma * sigma);
  const double peak =
      convention == PeakConvention::Normalized ? 1.0 / (2.0 * std::numbers::pi * sigma * sigma) : 1.0;

  // exp(-(dx²+dy²)/2σ²) factors into per-axis terms.
  std::vector<double> gx(width), gy(height);
  for (int i = 0; i < width; ++i) gx[i] = std::exp(-(i - mu.x) * (i - mu.x) * inv_two_var);
  for (int j = 0; j < height; ++j) gy[j] = std::exp(-(j - mu.y) * (j - mu.y) * inv_two_var);

  std::vector<float> values(static_cast<std::size_t>(width) * height);
  for (int j = 0; j < height; ++j) {
    for (int i = 0; i < width; ++i) {
      values[static_cast<std::size_t>(j) * width + i] = static_cast<float>(peak * gy[j] * gx[i]);
    }
  }
  return Heatmap(width, height, stride, sigma, std::move(values));
}

std::vector<double> gaussian_kernel(double kernel_sigma) {
  if (!(kernel_sigma > 0.0) || !std::isfinite(kernel_sigma)) {
    throw DomainError("kernel_sigma must be positive");
  }
  const int radius = static_cast<int>(std::ceil(3.0 * kernel_sigma));
  std::vector<double> taps(2 * radius + 1);
  double total = 0.0;
  for (int k = -radius; k <= radius; ++k) {
    taps[k + radius] = std::exp(-(k * k) / (2.0 * kernel_sigma * kernel_sigma));
    total += taps[k + radius];
  }
  for (double& t : taps) t /= total;
  return taps;
}

namespace {

// Reflect-101: -1 -> 1, n -> n-2. Repeats for kernels wider than the axis.
int reflect_index(int i, int n) {
  if (n == 1) return 0;
  const int period = 2 * (n - 1);
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - i;
}

}  // namespace

Heatmap smooth(const Heatmap& hm, double kernel_sigma) {
  const std::vector<double> taps = gaussian_kernel(kernel_sigma);
  const int radius = static_cast<int>(taps.size() / 2);
  const int w = hm.width();
  const int h = hm.height();

  // Column index tables keep the inner loops branch-free.
  std::vector<int> xs(static_cast<std::size_t>(w) + 2 * radius);
  std::vector<int> ys(static_cast<std::size_t>(h) + 2 * radius);
  for (int i = -radius; i < w + radius; ++i) xs[i + radius] = reflect_index(i, w);
  for (int j = -radius; j < h + radius; ++j) ys[j + radius] = reflect_index(j, h);

  std::vector<double> rows(static_cast<std::size_t>(w) * h);
  for (int j = 0; j < h; ++j) {
    for (int i = 0; i < w; ++i) {
      double acc = 0.0;
      for (int k = 0; k <= 2 * radius; ++k) acc += taps[k] * hm.at(xs[i + k], j);
      rows[static_cast<std::size_t>(j) * w + i] = acc;
    }
  }

  std::vector<float> out(static_cast<std::size_t>(w) * h);
  for (int j = 0; j < h; ++j) {
    for (int i = 0; i < w; ++i) {
      double acc = 0.0;
      for (int k = 0; k <= 2 * radius; ++k) {
        acc += taps[k] * rows[static_cast<std::size_t>(ys[j + k]) * w + i];
      }
      out[static_cast<std::size_t>(j) * w + i] = static_cast<float>(acc);
    }
  }
  return hm.with_values(std::move(out));
}

PixelIndex argmax(const Heatmap& hm) {
  const auto values = hm.values();
  std::size_t best = 0;
  float best_value = values[0];
  for (std::size_t k = 1; k < values.size(); ++k) {
    // NaN never compares greater, so it is never selected over a real value.
    if (values[k] > best_value || (std::isnan(best_value) && !std::isnan(values[k]))) {
      best = k;
      best_value = values[k];
    }
  }
  return {static_cast<int>(best % hm.width()), static_cast<int>(best / hm.width())};
}

Heatmap mirror_x(const Heatmap& hm) {
  const int w = hm.width();
  std::vector<float> out(hm.size());
  for (int j = 0; j < hm.height(); ++j) {
    for (int i = 0; i < w; ++i) out[static_cast<std::size_t>(j) * w + i] = hm.at(w - 1 - i, j);
  }
  return hm.with_values(std::move(out));
}

}  // namespace daec
