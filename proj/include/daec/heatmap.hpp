#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace daec {

enum class Space { Heatmap, Image };

// A continuous 2D point tagged with the space it lives in. Image space is
// heatmap space scaled by the output stride.
struct Coord {
  double x = 0.0;
  double y = 0.0;
  Space space = Space::Image;

  Coord to_image(double stride) const;
  Coord to_heatmap(double stride) const;

  friend bool operator==(const Coord&, const Coord&) = default;
};

struct PixelIndex {
  int x = 0;
  int y = 0;

  friend bool operator==(const PixelIndex&, const PixelIndex&) = default;
};

// Row-major H×W activation grid plus the encoding metadata decoders need:
// stride (image pixels per heatmap pixel) and sigma (heatmap pixels).
// Integer coordinates are pixel centers. Values are immutable once built.
class Heatmap {
 public:
  Heatmap(int width, int height, double stride, double sigma, std::vector<float> values);

  int width() const { return width_; }
  int height() const { return height_; }
  double stride() const { return stride_; }
  double sigma() const { return sigma_; }
  std::size_t size() const { return values_.size(); }

  std::span<const float> values() const { return values_; }
  float at(int x, int y) const { return values_[static_cast<std::size_t>(y) * width_ + x]; }
  bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }

  // Same geometry and metadata, new values.
  Heatmap with_values(std::vector<float> values) const;

  friend bool operator==(const Heatmap&, const Heatmap&) = default;

 private:
  int width_;
  int height_;
  double stride_;
  double sigma_;
  std::vector<float> values_;
};

enum class PeakConvention {
  UnitPeak,    // exp(-d²/2σ²), peak value 1
  Normalized,  // includes 1/(2πσ²), integrates to 1
};

// Gaussian heatmap for an image-space center: mean = center / stride,
// covariance σ²I, sampled at pixel centers.
Heatmap encode(const Coord& center, int width, int height, double stride, double sigma,
               PeakConvention convention = PeakConvention::UnitPeak);

// Separable Gaussian blur. Radius ceil(3·kernel_sigma), taps normalized to
// sum 1, reflect-101 borders.
Heatmap smooth(const Heatmap& hm, double kernel_sigma);

// The 1D kernel used by smooth(), length 2·radius+1.
std::vector<double> gaussian_kernel(double kernel_sigma);

// First maximum in row-major order (smallest y, then smallest x).
PixelIndex argmax(const Heatmap& hm);

// Left-right mirror (x -> W-1-x).
Heatmap mirror_x(const Heatmap& hm);

}  // namespace daec
