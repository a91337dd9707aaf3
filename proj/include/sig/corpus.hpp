#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sig/image.hpp"
#include "sig/lsb.hpp"
#include "sig/sweep.hpp"

namespace sig {

inline constexpr std::string_view kManifestSchema = "sig-manifest";
inline constexpr int kManifestVersion = 1;
inline constexpr std::string_view kManifestFileName = "manifest.jsonl";
inline constexpr std::string_view kPadSeedPolicy =
    "sha256(be64(global_seed) || cover_id || 0x00 || be32(cell_index))[0:8] big-endian";

struct CoverRecord {
    std::string id;  // path relative to the ingest root, '/'-separated
    std::string source_path;
    std::string original_name;
    std::string stem;  // sanitized, unique within a corpus
    std::string category;
    std::uint32_t width = 0;
    std::uint32_t height = 0;
    ImageFormat format = ImageFormat::Png;
    std::string cover_digest;  // sha256 hex of the RGB pixel bytes

    friend bool operator==(const CoverRecord&, const CoverRecord&) = default;
};

struct Rejection {
    std::string path;
    std::string reason;
};

/// Category lookup: an explicit mapping keyed by relative path, then by file
/// name; otherwise the first directory below the root; otherwise
/// `default_category`.
struct CategoryRule {
    std::map<std::string, std::string> mapping;
    std::string default_category = "uncategorized";

    std::string category_for(const std::filesystem::path& relative) const;
};

/// Loads every non-hidden regular file below `root` (sorted, recursive).
/// Files that fail to load are appended to `rejections` with the reason.
/// Throws EmptyCorpus when nothing is accepted; `rejections` is filled first.
std::vector<CoverRecord> ingest_covers(const std::filesystem::path& root, const CategoryRule& rule,
                                       std::vector<Rejection>* rejections = nullptr);

/// Record for a single cover file given directly (no ingest root).
CoverRecord make_cover_record(const std::filesystem::path& path, const std::string& category);

void write_rejection_report(const std::vector<Rejection>& rejections, const std::filesystem::path& path);

struct ManifestHeader {
    std::string schema = std::string(kManifestSchema);
    int version = kManifestVersion;
    std::string digest_algorithm = "sha256";
    SweepGrid grid = SweepGrid::default_grid();
    std::uint64_t global_seed = 0;
    std::string pad_seed_policy = std::string(kPadSeedPolicy);

    friend bool operator==(const ManifestHeader&, const ManifestHeader&) = default;
};

struct CoverFailure {
    std::string cover_id;
    std::string error;

    friend bool operator==(const CoverFailure&, const CoverFailure&) = default;
};

/// Line-delimited JSON: one header record, then cover, entry and failure
/// records, one per line.
struct Manifest {
    ManifestHeader header;
    std::vector<CoverRecord> covers;
    std::vector<ManifestEntry> entries;
    std::vector<CoverFailure> failures;

    std::size_t skipped_count() const;
    const CoverRecord* find_cover(std::string_view id) const;

    friend bool operator==(const Manifest&, const Manifest&) = default;
};

void write_manifest(const Manifest& manifest, std::ostream& out);
/// Writes to a sibling temporary file and renames it into place.
void write_manifest(const Manifest& manifest, const std::filesystem::path& path);
/// Throws SchemaMismatch for an unknown schema/version/digest and
/// CorruptManifest for malformed lines or broken invariants.
Manifest read_manifest(std::istream& in);
Manifest read_manifest(const std::filesystem::path& path);

/// Throws CorruptManifest if (cover_id, params) repeats, a variant name does
/// not parse back to its params, or an entry names an unknown cover.
void check_manifest(const Manifest& manifest);

struct BuildOptions {
    unsigned jobs = 1;
    bool skip_oversize = false;
    /// Overrides the per-cover default of keeping the cover's own format.
    std::optional<ImageFormat> format;
};

/// Sweeps every cover into `out_dir` and writes `out_dir/manifest.jsonl`
/// once all files exist. payload.pad_seed is the global seed. Covers that
/// fail are recorded in Manifest::failures; BuildFailed is thrown (and no
/// manifest written) only if every cover fails.
Manifest build_database(const std::vector<CoverRecord>& covers, const SweepGrid& grid, const PayloadSpec& payload,
                        const std::filesystem::path& out_dir, const BuildOptions& options = {});

}  // namespace sig
