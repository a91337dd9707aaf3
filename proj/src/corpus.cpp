#include "sig/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "sig/digest.hpp"
#include "sig/error.hpp"
#include "sig/parallel.hpp"

namespace sig {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::string CategoryRule::category_for(const fs::path& relative) const {
    if (auto it = mapping.find(relative.generic_string()); it != mapping.end()) return it->second;
    if (auto it = mapping.find(relative.filename().string()); it != mapping.end()) return it->second;
    if (relative.has_parent_path()) return relative.begin()->string();
    return default_category;
}

namespace {

bool hidden(const fs::path& relative) {
    return std::any_of(relative.begin(), relative.end(),
                       [](const fs::path& part) { return !part.empty() && part.string().front() == '.'; });
}

CoverRecord record_for(const fs::path& path, const RasterImage& img, const LoadReport& report) {
    CoverRecord rec;
    rec.source_path = fs::absolute(path).lexically_normal().generic_string();
    rec.original_name = path.filename().string();
    rec.stem = sanitize_stem(path.stem().string());
    rec.width = img.width();
    rec.height = img.height();
    rec.format = report.format;
    rec.cover_digest = sha256_hex(img.data());
    return rec;
}

}  // namespace

std::vector<CoverRecord> ingest_covers(const fs::path& root, const CategoryRule& rule,
                                       std::vector<Rejection>* rejections) {
    std::error_code ec;
    if (!fs::is_directory(root, ec)) throw Error(ErrorKind::IoError, "not a directory: " + root.string());

    std::vector<fs::path> files;
    for (fs::recursive_directory_iterator it(root, ec), end; !ec && it != end; it.increment(ec)) {
        const fs::path rel = it->path().lexically_relative(root);
        if (hidden(rel)) {
            if (it->is_directory()) it.disable_recursion_pending();
            continue;
        }
        if (it->is_regular_file()) files.push_back(it->path());
    }
    if (ec) throw Error(ErrorKind::IoError, "cannot scan " + root.string() + ": " + ec.message());
    std::sort(files.begin(), files.end());

    std::vector<CoverRecord> records;
    std::set<std::string> stems;
    for (const fs::path& file : files) {
        const fs::path rel = file.lexically_relative(root);
        LoadReport report;
        std::optional<RasterImage> img;
        try {
            img.emplace(load_image(file, &report));
        } catch (const Error& e) {
            if (rejections) rejections->push_back({rel.generic_string(), e.what()});
            continue;
        }
        CoverRecord rec = record_for(file, *img, report);
        rec.id = rel.generic_string();
        rec.category = rule.category_for(rel);
        std::string stem = rec.stem;
        for (int n = 2; !stems.insert(stem).second; ++n) stem = rec.stem + "-" + std::to_string(n);
        rec.stem = stem;
        records.push_back(std::move(rec));
    }
    if (records.empty()) {
        throw Error(ErrorKind::EmptyCorpus, "no usable cover images under " + root.string() + " (" +
                                                std::to_string(files.size()) + " file(s) rejected)");
    }
    return records;
}

CoverRecord make_cover_record(const fs::path& path, const std::string& category) {
    LoadReport report;
    const RasterImage img = load_image(path, &report);
    CoverRecord rec = record_for(path, img, report);
    rec.id = path.filename().generic_string();
    rec.category = category;
    return rec;
}

void write_rejection_report(const std::vector<Rejection>& rejections, const fs::path& path) {
    std::ostringstream out;
    for (const Rejection& r : rejections) out << r.path << '\t' << r.reason << '\n';
    const std::string text = out.str();
    write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::size_t Manifest::skipped_count() const {
    return static_cast<std::size_t>(
        std::count_if(entries.begin(), entries.end(), [](const ManifestEntry& e) { return e.skipped; }));
}

const CoverRecord* Manifest::find_cover(std::string_view id) const {
    for (const CoverRecord& c : covers) {
        if (c.id == id) return &c;
    }
    return nullptr;
}

// ---- serialization ----

namespace {

[[noreturn]] void corrupt(std::size_t line, const std::string& why) {
    throw Error(ErrorKind::CorruptManifest, "line " + std::to_string(line) + ": " + why);
}

std::uint64_t parse_u64(const std::string& s, std::size_t line, const char* field) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
        corrupt(line, std::string(field) + " is not an unsigned 64-bit decimal");
    }
    return v;
}

json grid_to_json(const SweepGrid& g) {
    json masks = json::array();
    for (ChannelMask m : g.masks) masks.push_back(m.token());
    return json{{"masks", masks}, {"rows", g.row_options}, {"bits", g.bit_options}};
}

ChannelMask mask_from(const std::string& token, std::size_t line) {
    auto m = ChannelMask::from_token(token);
    if (!m) corrupt(line, "invalid channel token '" + token + "'");
    return *m;
}

SweepGrid grid_from_json(const json& j, std::size_t line) {
    SweepGrid g;
    for (const auto& t : j.at("masks")) g.masks.push_back(mask_from(t.get<std::string>(), line));
    g.row_options = j.at("rows").get<std::vector<std::uint32_t>>();
    g.bit_options = j.at("bits").get<std::vector<std::uint32_t>>();
    try {
        g.validate();
    } catch (const Error& e) {
        corrupt(line, e.what());
    }
    return g;
}

json header_to_json(const ManifestHeader& h) {
    return json{{"record", "header"},
                {"schema", h.schema},
                {"version", h.version},
                {"digest_algorithm", h.digest_algorithm},
                {"grid", grid_to_json(h.grid)},
                {"global_seed", std::to_string(h.global_seed)},
                {"pad_seed_policy", h.pad_seed_policy}};
}

json cover_to_json(const CoverRecord& c) {
    return json{{"record", "cover"},
                {"id", c.id},
                {"source_path", c.source_path},
                {"original_name", c.original_name},
                {"stem", c.stem},
                {"category", c.category},
                {"width", c.width},
                {"height", c.height},
                {"format", std::string(format_extension(c.format))},
                {"cover_digest", c.cover_digest}};
}

json entry_to_json(const ManifestEntry& e) {
    return json{{"record", "entry"},
                {"cover_id", e.cover_id},
                {"variant_name", e.variant_name},
                {"channels", e.params.mask.token()},
                {"rows", e.params.rows},
                {"bits", e.params.bits},
                {"message_length_bits", e.message_length_bits},
                {"message_digest", e.message_digest},
                {"pad_seed", std::to_string(e.pad_seed)},
                {"stego_digest", e.stego_digest},
                {"file_path", e.file_path},
                {"skipped", e.skipped},
                {"skip_reason", e.skip_reason}};
}

}  // namespace

void write_manifest(const Manifest& manifest, std::ostream& out) {
    out << header_to_json(manifest.header).dump() << '\n';
    for (const CoverRecord& c : manifest.covers) out << cover_to_json(c).dump() << '\n';
    for (const ManifestEntry& e : manifest.entries) out << entry_to_json(e).dump() << '\n';
    for (const CoverFailure& f : manifest.failures) {
        out << json{{"record", "failure"}, {"cover_id", f.cover_id}, {"error", f.error}}.dump() << '\n';
    }
}

void write_manifest(const Manifest& manifest, const fs::path& path) {
    std::ostringstream buf;
    write_manifest(manifest, buf);
    const std::string text = buf.str();
    fs::path tmp = path;
    tmp += ".tmp";
    write_file(tmp, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) throw Error(ErrorKind::IoError, "cannot move manifest into place at " + path.string() + ": " + ec.message());
}

Manifest read_manifest(std::istream& in) {
    Manifest m;
    std::string text;
    std::size_t line = 0;
    bool have_header = false;
    while (std::getline(in, text)) {
        ++line;
        if (text.empty()) continue;
        json j;
        try {
            j = json::parse(text);
        } catch (const json::exception& e) {
            corrupt(line, std::string("invalid JSON: ") + e.what());
        }
        try {
            const std::string record = j.at("record").get<std::string>();
            if (!have_header) {
                if (record != "header") corrupt(line, "first record must be the header");
                ManifestHeader& h = m.header;
                h.schema = j.at("schema").get<std::string>();
                h.version = j.at("version").get<int>();
                h.digest_algorithm = j.at("digest_algorithm").get<std::string>();
                if (h.schema != kManifestSchema || h.version != kManifestVersion) {
                    throw Error(ErrorKind::SchemaMismatch, "manifest is " + h.schema + " v" + std::to_string(h.version) +
                                                               ", expected " + std::string(kManifestSchema) + " v" +
                                                               std::to_string(kManifestVersion));
                }
                if (h.digest_algorithm != kDigestAlgorithm) {
                    throw Error(ErrorKind::SchemaMismatch, "unsupported digest algorithm " + h.digest_algorithm);
                }
                h.grid = grid_from_json(j.at("grid"), line);
                h.global_seed = parse_u64(j.at("global_seed").get<std::string>(), line, "global_seed");
                h.pad_seed_policy = j.at("pad_seed_policy").get<std::string>();
                have_header = true;
            } else if (record == "cover") {
                CoverRecord c;
                c.id = j.at("id").get<std::string>();
                c.source_path = j.at("source_path").get<std::string>();
                c.original_name = j.at("original_name").get<std::string>();
                c.stem = j.at("stem").get<std::string>();
                c.category = j.at("category").get<std::string>();
                c.width = j.at("width").get<std::uint32_t>();
                c.height = j.at("height").get<std::uint32_t>();
                const auto fmt = parse_format(j.at("format").get<std::string>());
                if (!fmt) corrupt(line, "unknown cover format");
                c.format = *fmt;
                c.cover_digest = j.at("cover_digest").get<std::string>();
                m.covers.push_back(std::move(c));
            } else if (record == "entry") {
                ManifestEntry e;
                e.cover_id = j.at("cover_id").get<std::string>();
                e.variant_name = j.at("variant_name").get<std::string>();
                e.params.mask = mask_from(j.at("channels").get<std::string>(), line);
                e.params.rows = j.at("rows").get<std::uint32_t>();
                e.params.bits = j.at("bits").get<std::uint32_t>();
                e.message_length_bits = j.at("message_length_bits").get<std::uint64_t>();
                e.message_digest = j.at("message_digest").get<std::string>();
                e.pad_seed = parse_u64(j.at("pad_seed").get<std::string>(), line, "pad_seed");
                e.stego_digest = j.at("stego_digest").get<std::string>();
                e.file_path = j.at("file_path").get<std::string>();
                e.skipped = j.at("skipped").get<bool>();
                e.skip_reason = j.at("skip_reason").get<std::string>();
                m.entries.push_back(std::move(e));
            } else if (record == "failure") {
                m.failures.push_back({j.at("cover_id").get<std::string>(), j.at("error").get<std::string>()});
            } else {
                corrupt(line, "unknown record type '" + record + "'");
            }
        } catch (const json::exception& e) {
            corrupt(line, std::string("bad field: ") + e.what());
        }
    }
    if (!have_header) throw Error(ErrorKind::CorruptManifest, "missing header record");
    check_manifest(m);
    return m;
}

Manifest read_manifest(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::IoError, "cannot open manifest " + path.string());
    return read_manifest(in);
}

void check_manifest(const Manifest& manifest) {
    std::set<std::string> cover_ids;
    for (const CoverRecord& c : manifest.covers) {
        if (!cover_ids.insert(c.id).second) throw Error(ErrorKind::CorruptManifest, "duplicate cover id " + c.id);
    }
    std::set<std::tuple<std::string, std::uint8_t, std::uint32_t, std::uint32_t>> seen;
    for (const ManifestEntry& e : manifest.entries) {
        if (!cover_ids.count(e.cover_id)) {
            throw Error(ErrorKind::CorruptManifest, e.variant_name + ": unknown cover id " + e.cover_id);
        }
        if (!seen.emplace(e.cover_id, e.params.mask.bits(), e.params.rows, e.params.bits).second) {
            throw Error(ErrorKind::CorruptManifest,
                        "duplicate entry for cover " + e.cover_id + " with " + e.params.describe());
        }
        VariantName parsed;
        try {
            parsed = parse_variant_name(e.variant_name);
        } catch (const Error& err) {
            throw Error(ErrorKind::CorruptManifest, err.what());
        }
        if (parsed.params != e.params) {
            throw Error(ErrorKind::CorruptManifest,
                        e.variant_name + " does not match declared params " + e.params.describe());
        }
    }
}

// ---- database build ----

Manifest build_database(const std::vector<CoverRecord>& covers, const SweepGrid& grid, const PayloadSpec& payload,
                        const fs::path& out_dir, const BuildOptions& options) {
    grid.validate();
    if (covers.empty()) throw Error(ErrorKind::EmptyCorpus, "no covers to build from");
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw Error(ErrorKind::IoError, "cannot create " + out_dir.string() + ": " + ec.message());

    // A lone cover gets the thread budget across its grid cells instead.
    const unsigned outer_jobs = covers.size() > 1 ? options.jobs : 1;
    const unsigned inner_jobs = covers.size() > 1 ? 1 : options.jobs;

    std::vector<std::vector<ManifestEntry>> per_cover(covers.size());
    std::vector<std::optional<std::string>> errors(covers.size());
    parallel_for(covers.size(), outer_jobs, [&](std::size_t i) {
        const CoverRecord& rec = covers[i];
        try {
            const RasterImage img = load_image(rec.source_path);
            if (sha256_hex(img.data()) != rec.cover_digest) {
                throw Error(ErrorKind::CorruptFile, rec.source_path + ": pixels changed since ingest");
            }
            SweepOptions sweep_opts;
            sweep_opts.cover_id = rec.id;
            sweep_opts.format = options.format.value_or(rec.format);
            sweep_opts.skip_oversize = options.skip_oversize;
            sweep_opts.jobs = inner_jobs;
            try {
                per_cover[i] = generate_variants(img, rec.stem, grid, payload, out_dir, sweep_opts);
            } catch (const Error& e) {
                if (e.kind() == ErrorKind::IoError) {
                    std::error_code rm_ec;
                    fs::remove_all(out_dir / rec.stem, rm_ec);
                }
                throw;
            }
        } catch (const Error& e) {
            errors[i] = e.what();
        }
    });

    Manifest m;
    m.header.grid = grid;
    m.header.global_seed = payload.pad_seed;
    m.covers = covers;
    for (std::size_t i = 0; i < covers.size(); ++i) {
        if (errors[i]) {
            m.failures.push_back({covers[i].id, *errors[i]});
        } else {
            m.entries.insert(m.entries.end(), per_cover[i].begin(), per_cover[i].end());
        }
    }
    if (m.failures.size() == covers.size()) {
        throw Error(ErrorKind::BuildFailed, "every cover failed; first: " + m.failures.front().cover_id + ": " +
                                                m.failures.front().error);
    }
    check_manifest(m);
    write_manifest(m, out_dir / std::string(kManifestFileName));
    return m;
}

}  // namespace sig
