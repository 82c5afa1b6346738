#include "daec/decoders.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <vector>

#include "daec/errors.hpp"
#include "daec/metrics.hpp"

namespace daec {

int window_half_span(double sigma) {
  if (!(sigma > 0.0)) throw DomainError("sigma must be positive");
  // The epsilon keeps 3·σ for integral σ from rounding up.
  return static_cast<int>(std::ceil(3.0 * sigma - 1e-9)) + 1;
}

void check_delta(int delta, const Heatmap& hm) {
  const int half = window_half_span(hm.sigma());
  if (delta > half) {
    throw DomainError("delta exceeds window: delta " + std::to_string(delta) + " > " + std::to_string(half) +
                      " (3*sigma+1 for sigma " + format_number(hm.sigma()) + ")");
  }
  const int reach = std::max(hm.width(), hm.height());
  if (delta < -reach) {
    throw DomainError("delta " + std::to_string(delta) + " expands the window beyond the grid reach (-" +
                      std::to_string(reach) + ")");
  }
}

IntegralRegion build_region(const Heatmap& hm, PixelIndex peak, int delta, Pattern pattern) {
  check_delta(delta, hm);
  const int half = window_half_span(hm.sigma());
  IntegralRegion r{peak.x - half, peak.x + half, peak.y - half, peak.y + half};
  switch (pattern) {
    case Pattern::BR:
      r.x_hi -= delta;
      r.y_hi -= delta;
      break;
    case Pattern::UL:
      r.x_lo += delta;
      r.y_lo += delta;
      break;
    case Pattern::BL:
      r.x_lo += delta;
      r.y_hi -= delta;
      break;
    case Pattern::UR:
      r.x_hi -= delta;
      r.y_lo += delta;
      break;
  }
  r.x_lo = std::max(r.x_lo, 0);
  r.y_lo = std::max(r.y_lo, 0);
  r.x_hi = std::min(r.x_hi, hm.width() - 1);
  r.y_hi = std::min(r.y_hi, hm.height() - 1);
  if (r.empty()) throw DomainError("integral region is empty: delta too large for this heatmap");
  return r;
}

IntegralRegion build_region(const Heatmap& hm, int delta, Pattern pattern) {
  return build_region(hm, argmax(hm), delta, pattern);
}

WindowedMean windowed_mean(const Heatmap& hm, PixelIndex peak, const IntegralRegion& region) {
  WindowedMean out{peak};
  if (region.empty()) return out;

  const int kx = std::max(std::abs(region.x_lo - peak.x), std::abs(region.x_hi - peak.x));
  const int ky = std::max(std::abs(region.y_lo - peak.y), std::abs(region.y_hi - peak.y));
  auto value = [&](int dx, int dy) -> double {
    const int x = peak.x + dx;
    const int y = peak.y + dy;
    if (x < region.x_lo || x > region.x_hi || y < region.y_lo || y > region.y_hi) return 0.0;
    return hm.at(x, y);
  };

  // cols[dx + kx] sums over dy; rows[dy + ky] sums over dx. Each sum pairs
  // +k with -k so reversing an axis leaves the pair sums bitwise unchanged.
  std::vector<double> cols(2 * kx + 1), rows(2 * ky + 1);
  for (int dx = -kx; dx <= kx; ++dx) {
    double acc = value(dx, 0);
    for (int k = 1; k <= ky; ++k) acc += value(dx, k) + value(dx, -k);
    cols[dx + kx] = acc;
  }
  for (int dy = -ky; dy <= ky; ++dy) {
    double acc = value(0, dy);
    for (int k = 1; k <= kx; ++k) acc += value(k, dy) + value(-k, dy);
    rows[dy + ky] = acc;
  }

  double mass_x = cols[kx], moment_x = 0.0;
  for (int k = 1; k <= kx; ++k) {
    mass_x += cols[kx + k] + cols[kx - k];
    moment_x += k * (cols[kx + k] - cols[kx - k]);
  }
  double mass_y = rows[ky], moment_y = 0.0;
  for (int k = 1; k <= ky; ++k) {
    mass_y += rows[ky + k] + rows[ky - k];
    moment_y += k * (rows[ky + k] - rows[ky - k]);
  }

  if (!(mass_x > 0.0) || !(mass_y > 0.0)) return out;
  out.mass = mass_x;
  out.dx = moment_x / mass_x;
  out.dy = moment_y / mass_y;
  return out;
}

namespace {

Coord at_pixel(const Heatmap& hm, PixelIndex p, double dx = 0.0, double dy = 0.0) {
  return {(p.x + dx) * hm.stride(), (p.y + dy) * hm.stride(), Space::Image};
}

int sign(int v) { return (v > 0) - (v < 0); }

// Δ validated; zero mass reported through `fallback`.
Coord daec_unsmoothed(const Heatmap& hm, int delta, Pattern pattern, bool& fallback) {
  check_delta(delta, hm);
  const PixelIndex peak = argmax(hm);
  const IntegralRegion region = build_region(hm, peak, delta, pattern);
  const WindowedMean mean = windowed_mean(hm, peak, region);
  fallback = !mean.valid();
  if (fallback) return at_pixel(hm, peak);
  return at_pixel(hm, peak, mean.dx, mean.dy);
}

Coord darklite_impl(const Heatmap& hm, bool& fallback) {
  constexpr double kFloor = 1e-10;
  const PixelIndex m = argmax(hm);
  fallback = true;
  if (m.x < 1 || m.y < 1 || m.x > hm.width() - 2 || m.y > hm.height() - 2) return at_pixel(hm, m);

  auto L = [&](int dx, int dy) { return std::log(std::max<double>(hm.at(m.x + dx, m.y + dy), kFloor)); };
  const double c = L(0, 0);
  const double gx = 0.5 * (L(1, 0) - L(-1, 0));
  const double gy = 0.5 * (L(0, 1) - L(0, -1));
  const double hxx = L(1, 0) - 2.0 * c + L(-1, 0);
  const double hyy = L(0, 1) - 2.0 * c + L(0, -1);
  const double hxy = 0.25 * (L(1, 1) - L(1, -1) - L(-1, 1) + L(-1, -1));

  // Newton step -H⁻¹g, only at a strict local maximum of the log surface.
  const double det = hxx * hyy - hxy * hxy;
  if (!(hxx < 0.0) || !(det > 0.0) || !std::isfinite(det)) return at_pixel(hm, m);
  const double ox = -(hyy * gx - hxy * gy) / det;
  const double oy = -(-hxy * gx + hxx * gy) / det;
  if (!std::isfinite(ox) || !std::isfinite(oy)) return at_pixel(hm, m);

  fallback = false;
  return at_pixel(hm, m, std::clamp(ox, -1.0, 1.0), std::clamp(oy, -1.0, 1.0));
}

}  // namespace

Coord decode_standard(const Heatmap& hm) { return at_pixel(hm, argmax(hm)); }

Coord decode_shifting(const Heatmap& hm) {
  if (hm.size() < 2) throw DomainError("shifting decode needs at least 2 pixels");
  const PixelIndex m = argmax(hm);

  // Fixed neighbor order resolves ties: +x, -x, +y, -y.
  constexpr std::array<PixelIndex, 4> kSteps{{{1, 0}, {-1, 0}, {0, 1}, {0, -1}}};
  std::optional<PixelIndex> best;
  float best_value = 0.0f;
  for (const PixelIndex step : kSteps) {
    const int x = m.x + step.x;
    const int y = m.y + step.y;
    if (!hm.contains(x, y)) continue;
    if (!best || hm.at(x, y) > best_value) {
      best = PixelIndex{x, y};
      best_value = hm.at(x, y);
    }
  }
  if (!best) return at_pixel(hm, m);
  return at_pixel(hm, m, 0.25 * sign(best->x - m.x), 0.25 * sign(best->y - m.y));
}

Coord decode_darklite(const Heatmap& hm) {
  bool fallback = false;
  return darklite_impl(hm, fallback);
}

Coord decode_daec(const Heatmap& hm, const DecoderConfig& config) {
  bool fallback = false;
  if (config.presmooth) {
    return daec_unsmoothed(smooth(hm, *config.presmooth), config.delta, config.pattern, fallback);
  }
  return daec_unsmoothed(hm, config.delta, config.pattern, fallback);
}

Decoded decode(const Heatmap& input, const DecoderConfig& config) {
  if (config.method == Method::Daec) check_delta(config.delta, input);
  std::optional<Heatmap> smoothed;
  if (config.presmooth) smoothed.emplace(smooth(input, *config.presmooth));
  const Heatmap& hm = smoothed ? *smoothed : input;

  bool fallback = false;
  Coord coord;
  switch (config.method) {
    case Method::Standard:
      coord = decode_standard(hm);
      break;
    case Method::Shifting:
      coord = decode_shifting(hm);
      break;
    case Method::DarkLite:
      coord = darklite_impl(hm, fallback);
      break;
    case Method::Daec:
      coord = daec_unsmoothed(hm, config.delta, config.pattern, fallback);
      break;
    default:
      throw DomainError("unknown decoder method");
  }
  return {coord, fallback ? DecodeStatus::Fallback : DecodeStatus::Ok};
}

int paper_default_delta(double sigma, bool smoothed) {
  if (!(sigma > 0.0)) throw DomainError("sigma must be positive");
  return static_cast<int>(std::lround(sigma)) + (smoothed ? 1 : 2);
}

std::string_view to_string(Method method) {
  switch (method) {
    case Method::Standard: return "standard";
    case Method::Shifting: return "shifting";
    case Method::DarkLite: return "darklite";
    case Method::Daec: return "daec";
  }
  return "unknown";
}

std::string_view to_string(Pattern pattern) {
  switch (pattern) {
    case Pattern::BR: return "br";
    case Pattern::UR: return "ur";
    case Pattern::BL: return "bl";
    case Pattern::UL: return "ul";
  }
  return "unknown";
}

std::optional<Method> parse_method(std::string_view name) {
  for (auto m : {Method::Standard, Method::Shifting, Method::DarkLite, Method::Daec}) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

std::optional<Pattern> parse_pattern(std::string_view name) {
  for (auto p : {Pattern::BR, Pattern::UR, Pattern::BL, Pattern::UL}) {
    if (to_string(p) == name) return p;
  }
  return std::nullopt;
}

std::string describe(const DecoderConfig& config) {
  std::string out(to_string(config.method));
  if (config.method == Method::Daec) {
    out += ":" + std::string(to_string(config.pattern)) + ":d" + std::to_string(config.delta);
  }
  if (config.presmooth) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, *config.presmooth);
    out += "+s" + std::string(buf, res.ptr);
  }
  return out;
}

}  // namespace daec
