#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "daec/heatmap.hpp"

namespace daec::hmz {

// .hmz layout, all little-endian:
//   "HMZ1" | u32 count | u32 height | u32 width | f32 stride | f32 sigma |
//   count × height × width f32, heatmap-major, row-major.
// Every heatmap in a file shares geometry, stride and sigma.

std::vector<std::uint8_t> serialize(std::span<const Heatmap> heatmaps);
std::vector<Heatmap> deserialize(std::span<const std::uint8_t> bytes);

void write_file(const std::filesystem::path& path, std::span<const Heatmap> heatmaps);
std::vector<Heatmap> read_file(const std::filesystem::path& path);

}  // namespace daec::hmz
