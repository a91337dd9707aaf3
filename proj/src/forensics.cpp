#include "sig/forensics.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <ostream>

#include <json.hpp>

#include "sig/digest.hpp"
#include "sig/error.hpp"
#include "sig/parallel.hpp"

namespace sig {

namespace fs = std::filesystem;

std::string DiffReport::channels_token() const {
    return touched_channels ? ChannelMask::from_bits(touched_channels).token() : std::string();
}

DiffReport diff(const RasterImage& cover, const RasterImage& stego) {
    if (cover.width() != stego.width() || cover.height() != stego.height()) {
        throw Error(ErrorKind::DimensionMismatch,
                    std::to_string(cover.width()) + "x" + std::to_string(cover.height()) + " vs " +
                        std::to_string(stego.width()) + "x" + std::to_string(stego.height()));
    }
    DiffReport r;
    const auto a = cover.data();
    const auto b = stego.data();
    const std::size_t row_bytes = std::size_t{cover.width()} * 3;
    unsigned high_bit = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const auto x = static_cast<std::uint8_t>(a[i] ^ b[i]);
        if (!x) continue;
        ++r.changed_byte_count;
        r.changed_bit_count += static_cast<unsigned>(std::popcount(x));
        r.touched_rows.insert(static_cast<std::uint32_t>(i / row_bytes));
        r.touched_channels = static_cast<std::uint8_t>(r.touched_channels | (1u << (i % 3)));
        high_bit = std::max(high_bit, static_cast<unsigned>(std::bit_width(x)));
        const unsigned delta = a[i] > b[i] ? a[i] - b[i] : b[i] - a[i];
        r.max_channel_delta = std::max(r.max_channel_delta, delta);
    }
    if (high_bit) r.max_bitplane_changed = high_bit - 1;
    return r;
}

EmbedParams infer_params(const RasterImage& cover, const RasterImage& stego) {
    const DiffReport r = diff(cover, stego);
    if (r.identical()) throw Error(ErrorKind::ImagesIdentical, "cover and stego pixels are identical");
    return EmbedParams{ChannelMask::from_bits(r.touched_channels), *r.touched_rows.rbegin() + 1,
                       *r.max_bitplane_changed + 1};
}

bool region_within(const DiffReport& r, const EmbedParams& declared) {
    if (r.identical()) return true;
    const std::uint8_t allowed = declared.mask.bits();
    return *r.touched_rows.rbegin() < declared.rows && (r.touched_channels & ~allowed) == 0 &&
           *r.max_bitplane_changed < declared.bits && r.max_channel_delta < (1u << declared.bits);
}

bool Verdict::passed() const {
    if (unverifiable) return false;
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

std::string Verdict::summary_line() const {
    if (skipped) return "SKIP " + variant_name;
    std::string line = (passed() ? "PASS " : (unverifiable ? "UNVERIFIABLE " : "FAIL ")) + variant_name;
    std::string sep = ": ";
    for (const CheckResult& c : checks) {
        if (!c.passed) {
            line += sep + c.name + " (" + c.detail + ")";
            sep = "; ";
        }
    }
    return line;
}

Verdict verify_entry(const RasterImage& cover, const fs::path& stego_path, const ManifestEntry& entry) {
    Verdict v;
    v.cover_id = entry.cover_id;
    v.variant_name = entry.variant_name;
    if (entry.skipped) {
        v.skipped = true;
        return v;
    }

    {
        CheckResult c{"name", true, ""};
        try {
            if (parse_variant_name(entry.variant_name).params != entry.params) {
                c.passed = false;
                c.detail = "variant name disagrees with declared params";
            }
        } catch (const Error& e) {
            c.passed = false;
            c.detail = e.what();
        }
        v.checks.push_back(c);
    }

    std::vector<std::uint8_t> bytes;
    std::optional<RasterImage> stego;
    try {
        bytes = read_file(stego_path);
        stego.emplace(decode_image(bytes));
    } catch (const Error& e) {
        // Readable but undecodable bytes are evidence of tampering, not a gap in evidence.
        v.unverifiable = bytes.empty();
        v.checks.push_back({"load", false, e.what()});
        if (!bytes.empty()) {
            const std::string got = sha256_hex(bytes);
            v.checks.push_back({"digest", got == entry.stego_digest, got == entry.stego_digest ? "" : "file digest " + got});
        }
        return v;
    }

    const std::string got = sha256_hex(bytes);
    v.checks.push_back({"digest", got == entry.stego_digest,
                        got == entry.stego_digest ? "" : "expected " + entry.stego_digest + ", file has " + got});

    if (stego->width() != cover.width() || stego->height() != cover.height()) {
        v.checks.push_back({"dimensions", false, "stego size differs from cover"});
        return v;
    }
    v.checks.push_back({"dimensions", true, ""});

    const DiffReport r = diff(cover, *stego);
    {
        CheckResult c{"region", region_within(r, entry.params), ""};
        if (!c.passed) {
            c.detail = "changes reach rows<=" + std::to_string(*r.touched_rows.rbegin() + 1) + " channels=" +
                       r.channels_token() + " bitplane=" + std::to_string(*r.max_bitplane_changed) +
                       ", declared " + entry.params.describe();
        }
        v.checks.push_back(c);
    }

    {
        CheckResult c{"payload", false, ""};
        try {
            if (entry.message_length_bits % 8 != 0) {
                c.detail = "message_length_bits is not a whole number of bytes";
            } else {
                const std::string extracted =
                    sha256_hex(extract(*stego, entry.params, entry.message_length_bits).to_bytes());
                c.passed = extracted == entry.message_digest;
                if (!c.passed) c.detail = "extracted message digest " + extracted;
            }
        } catch (const Error& e) {
            c.detail = e.what();
        }
        v.checks.push_back(c);
    }
    return v;
}

std::vector<Verdict> verify_manifest(const Manifest& manifest, const fs::path& db_root, unsigned jobs) {
    // Load each referenced cover once.
    std::map<std::string, std::size_t> cover_index;
    for (std::size_t i = 0; i < manifest.covers.size(); ++i) cover_index[manifest.covers[i].id] = i;
    std::vector<std::optional<RasterImage>> covers(manifest.covers.size());
    std::vector<std::string> cover_errors(manifest.covers.size());
    parallel_for(manifest.covers.size(), jobs, [&](std::size_t i) {
        const CoverRecord& rec = manifest.covers[i];
        try {
            RasterImage img = load_image(rec.source_path);
            if (sha256_hex(img.data()) != rec.cover_digest) {
                cover_errors[i] = "cover pixels no longer match cover_digest";
            } else {
                covers[i].emplace(std::move(img));
            }
        } catch (const Error& e) {
            cover_errors[i] = e.what();
        }
    });

    std::vector<Verdict> verdicts(manifest.entries.size());
    parallel_for(manifest.entries.size(), jobs, [&](std::size_t i) {
        const ManifestEntry& e = manifest.entries[i];
        const auto it = cover_index.find(e.cover_id);
        if (!e.skipped && (it == cover_index.end() || !covers[it->second])) {
            Verdict& v = verdicts[i];
            v.cover_id = e.cover_id;
            v.variant_name = e.variant_name;
            v.unverifiable = true;
            v.checks.push_back(
                {"cover", false, it == cover_index.end() ? "unknown cover id" : cover_errors[it->second]});
            return;
        }
        if (e.skipped) {
            verdicts[i].cover_id = e.cover_id;
            verdicts[i].variant_name = e.variant_name;
            verdicts[i].skipped = true;
            return;
        }
        verdicts[i] = verify_entry(*covers[it->second], db_root / fs::path(e.file_path), e);
    });
    return verdicts;
}

void write_verdicts(const std::vector<Verdict>& verdicts, std::ostream& out) {
    using json = nlohmann::ordered_json;
    for (const Verdict& v : verdicts) {
        json checks = json::array();
        for (const CheckResult& c : v.checks) {
            checks.push_back(json{{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
        }
        out << json{{"record", "verdict"},
                    {"cover_id", v.cover_id},
                    {"variant_name", v.variant_name},
                    {"status", v.skipped ? "skipped" : (v.passed() ? "pass" : (v.unverifiable ? "unverifiable" : "fail"))},
                    {"checks", checks}}
                   .dump()
            << '\n';
    }
}

}  // namespace sig
