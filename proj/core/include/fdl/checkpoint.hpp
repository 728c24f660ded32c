#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "fdl/backbone.hpp"

namespace fdl {

/// Checkpoint layout, all integers little-endian:
///
///   "FDLNET1"                      7 bytes
///   layer count L                  u32
///   per layer: in, out, activation u32, u32, u32 (0 = relu, 1 = linear)
///   projection rows q, cols p      u32, u32
///   per layer: weight (row-major), then bias      f64
///   projection (row-major)                        f64
inline constexpr std::string_view kCheckpointMagic = "FDLNET1";

std::vector<std::uint8_t> serialize_params(const NetworkParams& params);
NetworkParams deserialize_params(std::span<const std::uint8_t> bytes);

void save_checkpoint(const NetworkParams& params, const std::filesystem::path& path);
NetworkParams load_checkpoint(const std::filesystem::path& path);

}  // namespace fdl
