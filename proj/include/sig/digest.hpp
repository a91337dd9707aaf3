#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>

namespace sig {

inline constexpr std::string_view kDigestAlgorithm = "sha256";

using Sha256 = std::array<std::uint8_t, 32>;

Sha256 sha256(std::span<const std::uint8_t> bytes);
std::string sha256_hex(std::span<const std::uint8_t> bytes);
std::string sha256_file_hex(const std::filesystem::path& path);

/// Per-cell padding seed: the first 8 bytes (big-endian) of
/// SHA-256(be64(global_seed) || cover_id || 0x00 || be32(cell_index)).
std::uint64_t derive_pad_seed(std::uint64_t global_seed, std::string_view cover_id, std::uint32_t cell_index);

}  // namespace sig
