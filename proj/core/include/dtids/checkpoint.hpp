#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "dtids/network.hpp"

namespace dtids {

// Binary checkpoint layout (all integers little-endian):
//
//   "DTIDSCKP"                 8-byte magic
//   u32 version                kCheckpointVersion
//   u8  byte order             'L' (parameter data is little-endian)
//   u64 + bytes                architecture spec text (ArchSpec::to_text)
//   u64 + bytes                layer listing, one line per layer
//   u64                        record count
//   per record:
//     u32 + bytes              parameter name
//     u32                      rank
//     u64 x rank               extents
//     f64 x size               values
inline constexpr std::uint32_t kCheckpointVersion = 1;

std::vector<std::uint8_t> serialize_checkpoint(Network& net);
/// Throws FormatError on bad magic, unsupported version, truncation, or
/// records that do not match the rebuilt architecture.
Network deserialize_checkpoint(const std::vector<std::uint8_t>& bytes);

void save_checkpoint(Network& net, const std::filesystem::path& path);
Network load_checkpoint(const std::filesystem::path& path);

}  // namespace dtids
