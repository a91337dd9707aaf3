#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sig/corpus.hpp"
#include "sig/image.hpp"
#include "sig/lsb.hpp"

namespace sig {

/// Exhaustive byte-level comparison of a cover/stego pair.
struct DiffReport {
    std::set<std::uint32_t> touched_rows;
    std::uint8_t touched_channels = 0;  // ChannelMask bit layout; 0 when nothing changed
    std::uint64_t changed_byte_count = 0;
    std::uint64_t changed_bit_count = 0;
    std::optional<unsigned> max_bitplane_changed;
    unsigned max_channel_delta = 0;

    bool identical() const noexcept { return changed_byte_count == 0; }
    std::string channels_token() const;  // "" when no channel changed

    friend bool operator==(const DiffReport&, const DiffReport&) = default;
};

/// Throws DimensionMismatch.
DiffReport diff(const RasterImage& cover, const RasterImage& stego);

/// Smallest parameters consistent with the diff: rows = 1 + last touched row,
/// mask = touched channels, bits = 1 + highest changed bit plane. True
/// parameters can only be larger. Throws ImagesIdentical.
EmbedParams infer_params(const RasterImage& cover, const RasterImage& stego);

/// True when every change lies inside the region `declared` allows.
bool region_within(const DiffReport& report, const EmbedParams& declared);

struct CheckResult {
    std::string name;  // digest, dimensions, region, payload, name
    bool passed = false;
    std::string detail;
};

struct Verdict {
    std::string cover_id;
    std::string variant_name;
    bool unverifiable = false;  // the stego file or its cover could not be read
    bool skipped = false;       // manifest entry was a recorded skip
    std::vector<CheckResult> checks;

    bool passed() const;
    std::string summary_line() const;
};

/// Recomputes everything from pixels and file bytes: the file digest, the
/// diff region against the declared params, and the digest of the message
/// prefix extracted with the declared params.
Verdict verify_entry(const RasterImage& cover, const std::filesystem::path& stego_path, const ManifestEntry& entry);

/// Verifies every entry; stego paths resolve against `db_root`. Covers are
/// reloaded from their source paths and checked against their digests.
std::vector<Verdict> verify_manifest(const Manifest& manifest, const std::filesystem::path& db_root,
                                     unsigned jobs = 1);

/// One JSON object per line, same family as the manifest.
void write_verdicts(const std::vector<Verdict>& verdicts, std::ostream& out);

}  // namespace sig
