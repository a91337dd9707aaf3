#include "sig/sweep.hpp"

#include <algorithm>
#include <charconv>
#include <set>

#include "sig/digest.hpp"
#include "sig/error.hpp"
#include "sig/parallel.hpp"

namespace sig {

namespace fs = std::filesystem;

SweepGrid SweepGrid::default_grid() {
    return SweepGrid{
        {ChannelMask::all().begin(), ChannelMask::all().end()},
        {5, 10, 20},
        {1, 3, 4},
    };
}

void SweepGrid::validate() const {
    if (masks.empty() || row_options.empty() || bit_options.empty()) {
        throw Error(ErrorKind::InvalidGrid, "grid lists must be nonempty");
    }
    std::set<std::uint8_t> seen_masks;
    for (ChannelMask m : masks) {
        if (!seen_masks.insert(m.bits()).second) throw Error(ErrorKind::InvalidGrid, "duplicate mask " + m.token());
    }
    std::set<std::uint32_t> seen_rows(row_options.begin(), row_options.end());
    if (seen_rows.size() != row_options.size()) throw Error(ErrorKind::InvalidGrid, "duplicate row option");
    if (*seen_rows.begin() < 1) throw Error(ErrorKind::InvalidGrid, "row options must be >= 1");
    std::set<std::uint32_t> seen_bits(bit_options.begin(), bit_options.end());
    if (seen_bits.size() != bit_options.size()) throw Error(ErrorKind::InvalidGrid, "duplicate bit option");
    if (*seen_bits.begin() < 1 || *seen_bits.rbegin() > 8) {
        throw Error(ErrorKind::InvalidGrid, "bit options must be in 1..8");
    }
}

std::vector<EmbedParams> SweepGrid::cells() const {
    std::vector<EmbedParams> out;
    out.reserve(grid_size(*this));
    for (ChannelMask m : masks) {
        for (std::uint32_t r : row_options) {
            for (std::uint32_t b : bit_options) out.push_back(EmbedParams{m, r, b});
        }
    }
    return out;
}

std::uint32_t SweepGrid::max_rows() const {
    return row_options.empty() ? 0 : *std::max_element(row_options.begin(), row_options.end());
}

std::size_t grid_size(const SweepGrid& grid) {
    return grid.masks.size() * grid.row_options.size() * grid.bit_options.size();
}

std::string VariantName::str() const {
    return stem + "_" + std::to_string(params.bits) + "_" + std::to_string(params.rows) + "_" + params.mask.token();
}

namespace {

bool stem_ok(std::string_view stem) {
    return !stem.empty() && stem.find_first_of(std::string_view("_/\\\0", 4)) == std::string_view::npos;
}

[[noreturn]] void malformed(std::string_view name, std::string_view field, std::string_view why) {
    throw Error(ErrorKind::MalformedName,
                std::string(field) + " field of '" + std::string(name) + "': " + std::string(why));
}

// Canonical decimal only: no sign, no leading zeros.
std::optional<std::uint32_t> parse_decimal(std::string_view s) {
    if (s.empty() || (s.size() > 1 && s.front() == '0')) return std::nullopt;
    std::uint32_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

}  // namespace

VariantName variant_name(std::string_view stem, const EmbedParams& params) {
    if (!stem_ok(stem)) {
        throw Error(ErrorKind::InvalidStem, "stem '" + std::string(stem) + "' is empty or contains '_' or a path separator");
    }
    params.validate();
    return VariantName{std::string(stem), params};
}

VariantName parse_variant_name(std::string_view name) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const std::size_t us = name.find('_', start);
        parts.push_back(name.substr(start, us - start));
        if (us == std::string_view::npos) break;
        start = us + 1;
    }
    if (parts.size() > 4) malformed(name, "stem", "stem must not contain '_'");
    if (parts.size() < 4) malformed(name, "name", "expected stem_bits_rows_channels");
    if (!stem_ok(parts[0])) malformed(name, "stem", "empty or contains a path separator");

    const auto bits = parse_decimal(parts[1]);
    if (!bits || *bits < 1 || *bits > 8) malformed(name, "bits", "expected an integer in 1..8");
    const auto rows = parse_decimal(parts[2]);
    if (!rows || *rows < 1) malformed(name, "rows", "expected a positive integer");
    const auto mask = ChannelMask::from_token(parts[3]);
    if (!mask) malformed(name, "channel", "expected one of R, G, B, RG, RB, GB, RGB");

    return VariantName{std::string(parts[0]), EmbedParams{*mask, *rows, *bits}};
}

std::string sanitize_stem(std::string_view raw) {
    std::string out(raw);
    for (char& c : out) {
        if (c == '_' || c == '/' || c == '\\' || c == '\0') c = '-';
    }
    if (out.empty()) out = "cover";
    return out;
}

std::vector<ManifestEntry> generate_variants(const RasterImage& cover, std::string_view stem, const SweepGrid& grid,
                                             const PayloadSpec& payload, const fs::path& out_dir,
                                             const SweepOptions& options) {
    grid.validate();
    if (!stem_ok(stem)) {
        throw Error(ErrorKind::InvalidStem, "stem '" + std::string(stem) + "' is empty or contains '_' or a path separator");
    }
    if (cover.height() < grid.max_rows()) {
        throw Error(ErrorKind::CoverTooShort, std::string(stem) + ": height " + std::to_string(cover.height()) +
                                                  " < " + std::to_string(grid.max_rows()) + " rows");
    }

    const std::vector<EmbedParams> cells = grid.cells();
    std::vector<bool> oversize(cells.size(), false);
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const std::uint64_t cap = capacity_bits(cover.width(), cells[i]);
        if (payload.message_bits() > cap) {
            if (!options.skip_oversize) {
                throw Error(ErrorKind::PayloadTooLarge,
                            std::string(stem) + " cell " + cells[i].describe() + ": message needs " +
                                std::to_string(payload.message_bits()) + " bits, region holds " + std::to_string(cap));
            }
            oversize[i] = true;
        }
    }

    const ImageFormat format = options.format.value_or(ImageFormat::Png);
    const std::string cover_id = options.cover_id.empty() ? std::string(stem) : options.cover_id;
    const std::string message_digest = sha256_hex(payload.message);
    const fs::path dir = out_dir / std::string(stem);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorKind::IoError, "cannot create " + dir.string() + ": " + ec.message());

    std::vector<ManifestEntry> entries(cells.size());
    parallel_for(cells.size(), options.jobs, [&](std::size_t i) {
        const EmbedParams& params = cells[i];
        ManifestEntry& e = entries[i];
        const std::string name = variant_name(stem, params).str();
        const std::string file = name + "." + std::string(format_extension(format));
        e.cover_id = cover_id;
        e.variant_name = name;
        e.params = params;
        e.message_length_bits = payload.message_bits();
        e.message_digest = message_digest;
        e.pad_seed = derive_pad_seed(payload.pad_seed, cover_id, static_cast<std::uint32_t>(i));
        if (oversize[i]) {
            e.skipped = true;
            e.skip_reason = "PayloadTooLarge: region holds " + std::to_string(capacity_bits(cover.width(), params)) +
                            " bits";
            return;
        }
        e.file_path = std::string(stem) + "/" + file;
        const RasterImage stego = embed(cover, params, PayloadSpec{payload.message, e.pad_seed});
        const std::vector<std::uint8_t> bytes = encode_image(stego, format);
        write_file(dir / file, bytes);
        e.stego_digest = sha256_hex(bytes);
    });
    return entries;
}

}  // namespace sig
