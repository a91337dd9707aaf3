#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sig/image.hpp"
#include "sig/lsb.hpp"

namespace sig {

/// Parameter grid expanded per cover. Cells are enumerated masks-outer,
/// rows-middle, bits-inner.
struct SweepGrid {
    std::vector<ChannelMask> masks;
    std::vector<std::uint32_t> row_options;
    std::vector<std::uint32_t> bit_options;

    /// R,G,B,RG,RB,GB,RGB x {5,10,20} x {1,3,4}: 63 cells.
    static SweepGrid default_grid();

    /// Throws InvalidGrid on empty or duplicated options, or out-of-range values.
    void validate() const;
    std::vector<EmbedParams> cells() const;
    std::uint32_t max_rows() const;

    friend bool operator==(const SweepGrid&, const SweepGrid&) = default;
};

std::size_t grid_size(const SweepGrid& grid);

/// `<stem>_<bits>_<rows>_<maskToken>`.
struct VariantName {
    std::string stem;
    EmbedParams params;

    std::string str() const;
    friend bool operator==(const VariantName&, const VariantName&) = default;
};

/// Throws InvalidStem if the stem is empty or holds '_' or a path separator.
VariantName variant_name(std::string_view stem, const EmbedParams& params);
/// Throws MalformedName naming the offending field (stem, bits, rows, channel).
VariantName parse_variant_name(std::string_view name);

/// Replaces underscores and path separators with '-' so the name parses back.
std::string sanitize_stem(std::string_view raw);

/// Ground truth for one stego variant.
struct ManifestEntry {
    std::string cover_id;
    std::string variant_name;
    EmbedParams params;
    std::uint64_t message_length_bits = 0;
    std::string message_digest;  // sha256 hex of the message bytes
    std::uint64_t pad_seed = 0;
    std::string stego_digest;  // sha256 hex of the file bytes; empty when skipped
    std::string file_path;     // relative to the database root, '/'-separated
    bool skipped = false;
    std::string skip_reason;

    friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

struct SweepOptions {
    /// Identifier mixed into every cell's pad seed; defaults to the stem.
    std::string cover_id;
    std::optional<ImageFormat> format;  // output container; PNG when unset
    /// Record oversize cells as skipped instead of failing the sweep.
    bool skip_oversize = false;
    unsigned jobs = 1;
};

/// Writes one stego file per grid cell to `<out_dir>/<stem>/<variant>.<ext>`
/// and returns one entry per cell in grid order. payload.pad_seed is the
/// global seed; each cell embeds with derive_pad_seed(global, cover_id, cell).
/// Nothing is written if the cover is too short or, without skip_oversize,
/// if any cell cannot hold the message.
std::vector<ManifestEntry> generate_variants(const RasterImage& cover, std::string_view stem, const SweepGrid& grid,
                                             const PayloadSpec& payload, const std::filesystem::path& out_dir,
                                             const SweepOptions& options = {});

}  // namespace sig
