#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "daec/heatmap.hpp"

namespace daec {

enum class Method { Standard, Shifting, DarkLite, Daec };

// Which corner of the integral window the Δ cut removes.
enum class Pattern { BR, UR, BL, UL };

struct DecoderConfig {
  Method method = Method::Standard;
  int delta = 0;                         // Daec only
  Pattern pattern = Pattern::BR;         // Daec only
  std::optional<double> presmooth;       // kernel sigma applied before decoding, any method
};

// Inclusive pixel bounds in heatmap space.
struct IntegralRegion {
  int x_lo = 0;
  int x_hi = -1;
  int y_lo = 0;
  int y_hi = -1;

  bool empty() const { return x_lo > x_hi || y_lo > y_hi; }
  long area() const { return empty() ? 0 : static_cast<long>(x_hi - x_lo + 1) * (y_hi - y_lo + 1); }

  friend bool operator==(const IntegralRegion&, const IntegralRegion&) = default;
};

// Half-span of the maximal-centered window: ceil(3σ) + 1, so the full
// span is 6σ + 3 for integer σ. Also the largest admissible Δ.
int window_half_span(double sigma);

// Throws DomainError unless -(max(W, H)) <= delta <= window_half_span(σ).
void check_delta(int delta, const Heatmap& hm);

// Window of span 2·half+1 centered on `peak`, Δ applied to the pattern's
// corner on the unclipped bounds, then clipped to the grid.
IntegralRegion build_region(const Heatmap& hm, PixelIndex peak, int delta, Pattern pattern);
IntegralRegion build_region(const Heatmap& hm, int delta, Pattern pattern);

// Intensity-weighted mean over a region, expressed as an offset from `peak`
// in heatmap pixels. Sums are paired symmetrically around the peak so that a
// mirrored heatmap yields an exactly negated offset.
struct WindowedMean {
  PixelIndex peak;
  double dx = 0.0;
  double dy = 0.0;
  double mass = 0.0;

  bool valid() const { return mass > 0.0; }
};

WindowedMean windowed_mean(const Heatmap& hm, PixelIndex peak, const IntegralRegion& region);

Coord decode_standard(const Heatmap& hm);
Coord decode_shifting(const Heatmap& hm);
Coord decode_darklite(const Heatmap& hm);
Coord decode_daec(const Heatmap& hm, const DecoderConfig& config);

enum class DecodeStatus {
  Ok,
  Fallback,  // refinement was not applicable; standard argmax returned
};

struct Decoded {
  Coord coord;
  DecodeStatus status = DecodeStatus::Ok;
};

// Dispatches on config.method, applying config.presmooth first when set.
Decoded decode(const Heatmap& hm, const DecoderConfig& config);

// Documented defaults from COCO-trained models: Δ = σ + 2 on raw heatmaps,
// σ + 1 on smoothed ones. Not a learned value.
int paper_default_delta(double sigma, bool smoothed = false);

std::string_view to_string(Method method);
std::string_view to_string(Pattern pattern);
std::optional<Method> parse_method(std::string_view name);
std::optional<Pattern> parse_pattern(std::string_view name);

// Short human label, e.g. "daec:br:d4" or "darklite+s2".
std::string describe(const DecoderConfig& config);

}  // namespace daec
