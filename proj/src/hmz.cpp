#include "daec/hmz.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <string>

#include "daec/errors.hpp"

namespace daec::hmz {

namespace {

constexpr std::uint8_t kMagic[4] = {'H', 'M', 'Z', '1'};
constexpr std::size_t kHeaderBytes = 24;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int shift = 0; shift < 32; shift += 8) out.push_back(static_cast<std::uint8_t>(v >> shift));
}

void put_f32(std::vector<std::uint8_t>& out, float v) { put_u32(out, std::bit_cast<std::uint32_t>(v)); }

std::uint32_t get_u32(std::span<const std::uint8_t> bytes, std::size_t at) {
  std::uint32_t v = 0;
  for (int k = 0; k < 4; ++k) v |= static_cast<std::uint32_t>(bytes[at + k]) << (8 * k);
  return v;
}

float get_f32(std::span<const std::uint8_t> bytes, std::size_t at) {
  return std::bit_cast<float>(get_u32(bytes, at));
}

}  // namespace

std::vector<std::uint8_t> serialize(std::span<const Heatmap> heatmaps) {
  std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
  if (heatmaps.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw ContractError("too many heatmaps for a single .hmz file");
  }
  if (heatmaps.empty()) {
    put_u32(out, 0);
    put_u32(out, 0);
    put_u32(out, 0);
    put_f32(out, 0.0f);
    put_f32(out, 0.0f);
    return out;
  }

  const Heatmap& first = heatmaps.front();
  const float stride = static_cast<float>(first.stride());
  const float sigma = static_cast<float>(first.sigma());
  for (std::size_t n = 0; n < heatmaps.size(); ++n) {
    const Heatmap& hm = heatmaps[n];
    if (hm.width() != first.width() || hm.height() != first.height() ||
        static_cast<float>(hm.stride()) != stride || static_cast<float>(hm.sigma()) != sigma) {
      throw ContractError("heatmap " + std::to_string(n) +
                          " differs in geometry, stride or sigma from heatmap 0");
    }
  }

  out.reserve(kHeaderBytes + heatmaps.size() * first.size() * 4);
  put_u32(out, static_cast<std::uint32_t>(heatmaps.size()));
  put_u32(out, static_cast<std::uint32_t>(first.height()));
  put_u32(out, static_cast<std::uint32_t>(first.width()));
  put_f32(out, stride);
  put_f32(out, sigma);
  for (const Heatmap& hm : heatmaps) {
    for (float v : hm.values()) put_f32(out, v);
  }
  return out;
}

std::vector<Heatmap> deserialize(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kHeaderBytes) throw FormatError("truncated .hmz header");
  for (int k = 0; k < 4; ++k) {
    if (bytes[k] != kMagic[k]) throw FormatError("bad .hmz magic (expected HMZ1)");
  }
  const std::uint64_t count = get_u32(bytes, 4);
  const std::uint64_t height = get_u32(bytes, 8);
  const std::uint64_t width = get_u32(bytes, 12);
  const float stride = get_f32(bytes, 16);
  const float sigma = get_f32(bytes, 20);

  if (count == 0) {
    if (bytes.size() != kHeaderBytes) throw FormatError("trailing bytes after empty .hmz payload");
    return {};
  }
  if (height == 0 || width == 0 || height > std::numeric_limits<int>::max() ||
      width > std::numeric_limits<int>::max()) {
    throw FormatError("invalid .hmz dimensions");
  }
  if (!(stride > 0.0f) || !std::isfinite(stride) || !(sigma > 0.0f) || !std::isfinite(sigma)) {
    throw FormatError("invalid .hmz stride or sigma");
  }
  const std::uint64_t cells = height * width;
  const std::uint64_t payload = kHeaderBytes + count * cells * 4;
  if (bytes.size() != payload) {
    throw FormatError(".hmz size " + std::to_string(bytes.size()) + " does not match header (expected " +
                      std::to_string(payload) + ")");
  }

  std::vector<Heatmap> out;
  out.reserve(count);
  std::size_t at = kHeaderBytes;
  for (std::uint64_t n = 0; n < count; ++n) {
    std::vector<float> values(cells);
    for (float& v : values) {
      v = get_f32(bytes, at);
      at += 4;
    }
    out.emplace_back(static_cast<int>(width), static_cast<int>(height), stride, sigma, std::move(values));
  }
  return out;
}

void write_file(const std::filesystem::path& path, std::span<const Heatmap> heatmaps) {
  const auto bytes = serialize(heatmaps);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError("failed writing " + path.string());
}

std::vector<Heatmap> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize(bytes);
}

}  // namespace daec::hmz
