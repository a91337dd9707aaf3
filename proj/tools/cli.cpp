#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <thread>

#include "sig/corpus.hpp"
#include "sig/digest.hpp"
#include "sig/error.hpp"
#include "sig/forensics.hpp"
#include "sig/image.hpp"
#include "sig/lsb.hpp"
#include "sig/sweep.hpp"

namespace sig::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParamFlags {
    std::string channels;
    std::uint32_t rows = 0;
    std::uint32_t bits = 0;

    EmbedParams params() const { return EmbedParams{*ChannelMask::from_token(channels), rows, bits}; }
};

struct MessageFlags {
    std::string file;
    std::string text;
    bool has_text = false;

    std::vector<std::uint8_t> load() const {
        if (!file.empty()) return read_file(file);
        return {text.begin(), text.end()};
    }
};

struct GridFlags {
    std::vector<std::string> channels;
    std::vector<std::uint32_t> rows;
    std::vector<std::uint32_t> bits;

    SweepGrid grid() const {
        SweepGrid g = SweepGrid::default_grid();
        if (!channels.empty()) {
            g.masks.clear();
            for (const auto& t : channels) g.masks.push_back(*ChannelMask::from_token(t));
        }
        if (!rows.empty()) g.row_options = rows;
        if (!bits.empty()) g.bit_options = bits;
        try {
            g.validate();
        } catch (const Error& e) {
            throw UsageError(std::string("--grid-*: ") + e.detail());
        }
        return g;
    }
};

const CLI::Validator kMaskToken(
    [](std::string& s) -> std::string {
        if (ChannelMask::from_token(s)) return {};
        return "invalid channel mask '" + s + "' (expected R, G, B, RG, RB, GB or RGB)";
    },
    "MASK");

const CLI::Validator kImageFormat(
    [](std::string& s) -> std::string { return parse_format(s) ? std::string() : "expected bmp or png, got '" + s + "'"; },
    "FORMAT");

void add_param_flags(CLI::App* cmd, ParamFlags& p) {
    cmd->add_option("--channels", p.channels, "Channel mask: R, G, B, RG, RB, GB or RGB")->required()->check(kMaskToken);
    cmd->add_option("--rows", p.rows, "Number of leading rows to modify")->required()->check(CLI::Range(1u, 1u << 30));
    cmd->add_option("--bits", p.bits, "Low bits replaced per channel byte")->required()->check(CLI::Range(1u, 8u));
}

void add_message_flags(CLI::App* cmd, MessageFlags& m) {
    auto* file = cmd->add_option("--message", m.file, "File holding the secret message bytes");
    auto* text = cmd->add_option("--message-text", m.text, "Secret message given inline");
    file->excludes(text);
}

void add_grid_flags(CLI::App* cmd, GridFlags& g) {
    cmd->add_option("--grid-channels", g.channels, "Comma-separated masks (default R,G,B,RG,RB,GB,RGB)")
        ->delimiter(',')
        ->check(kMaskToken);
    cmd->add_option("--grid-rows", g.rows, "Comma-separated row counts (default 5,10,20)")
        ->delimiter(',')
        ->check(CLI::Range(1u, 1u << 30));
    cmd->add_option("--grid-bits", g.bits, "Comma-separated bit depths (default 1,3,4)")
        ->delimiter(',')
        ->check(CLI::Range(1u, 8u));
}

std::optional<ImageFormat> env_format() {
    const char* env = std::getenv("SIG_OUT_FORMAT");
    if (!env || !*env) return std::nullopt;
    auto f = parse_format(env);
    if (!f) throw UsageError(std::string("SIG_OUT_FORMAT: expected bmp or png, got '") + env + "'");
    return f;
}

std::optional<ImageFormat> flag_or_env_format(const std::string& flag) {
    if (!flag.empty()) return parse_format(flag);
    return env_format();
}

unsigned resolve_jobs(unsigned jobs) {
    if (jobs == 0) return std::max(1u, std::thread::hardware_concurrency());
    return jobs;
}

void warn_load(std::ostream& err, const fs::path& path, const LoadReport& report) {
    for (const auto& w : report.warnings) err << "warning: " << path.string() << ": " << w << '\n';
}

void report_build(const Manifest& m, const fs::path& manifest_path, std::ostream& out, std::ostream& err) {
    for (const CoverFailure& f : m.failures) err << "error: cover " << f.cover_id << ": " << f.error << '\n';
    const std::size_t skipped = m.skipped_count();
    err << (m.entries.size() - skipped) << " stego images written";
    if (skipped) err << ", " << skipped << " cells skipped";
    err << '\n';
    out << manifest_path.string() << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Stego-image generator: parameterized RGB LSB embedding and ground-truth corpora", "sig"};
    app.require_subcommand(1);

    // embed
    ParamFlags embed_p;
    MessageFlags embed_m;
    std::string embed_cover, embed_out, embed_format;
    std::uint64_t embed_seed = 0;
    auto* embed_cmd = app.add_subcommand("embed", "Hide a message in one cover image");
    embed_cmd->add_option("--cover", embed_cover, "Cover image (BMP or PNG)")->required();
    embed_cmd->add_option("--out", embed_out, "Stego image to write")->required();
    add_param_flags(embed_cmd, embed_p);
    add_message_flags(embed_cmd, embed_m);
    embed_cmd->add_option("--seed", embed_seed, "Padding seed")->capture_default_str();
    embed_cmd->add_option("--format", embed_format, "Output format: bmp or png")->check(kImageFormat);

    // extract
    ParamFlags extract_p;
    std::string extract_stego, extract_out;
    std::optional<std::uint64_t> extract_bytes, extract_bits;
    auto* extract_cmd = app.add_subcommand("extract", "Read embedded bits back out of a stego image");
    extract_cmd->add_option("--stego", extract_stego, "Stego image")->required();
    add_param_flags(extract_cmd, extract_p);
    auto* len_bytes = extract_cmd->add_option("--length-bytes", extract_bytes, "Message length in bytes");
    auto* len_bits = extract_cmd->add_option("--length-bits", extract_bits, "Message length in bits");
    len_bytes->excludes(len_bits);
    extract_cmd->add_option("--out", extract_out, "Output file (default: standard output)");

    // sweep
    MessageFlags sweep_m;
    GridFlags sweep_g;
    std::string sweep_cover, sweep_out, sweep_format, sweep_category = "uncategorized";
    std::uint64_t sweep_seed = 0;
    bool sweep_skip = false;
    unsigned sweep_jobs = 1;
    auto* sweep_cmd = app.add_subcommand("sweep", "Generate every grid variant of one cover plus a manifest");
    sweep_cmd->add_option("--cover", sweep_cover, "Cover image")->required();
    sweep_cmd->add_option("--out", sweep_out, "Database directory")->required();
    sweep_cmd->add_option("--seed", sweep_seed, "Global padding seed")->required();
    sweep_cmd->add_option("--category", sweep_category, "Category label")->capture_default_str();
    add_message_flags(sweep_cmd, sweep_m);
    add_grid_flags(sweep_cmd, sweep_g);
    sweep_cmd->add_flag("--skip-oversize", sweep_skip, "Record cells too small for the message as skipped");
    sweep_cmd->add_option("--format", sweep_format, "Output format (default: same as cover)")->check(kImageFormat);
    sweep_cmd->add_option("--jobs", sweep_jobs, "Worker threads (0 = all cores)")->capture_default_str();

    // build-db
    MessageFlags build_m;
    GridFlags build_g;
    std::string build_covers, build_out, build_format, build_category_map;
    std::uint64_t build_seed = 0;
    bool build_skip = false;
    unsigned build_jobs = 1;
    auto* build_cmd = app.add_subcommand("build-db", "Sweep every cover under a directory into a database");
    build_cmd->add_option("--covers", build_covers, "Root directory of categorized covers")->required();
    build_cmd->add_option("--out", build_out, "Database directory")->required();
    build_cmd->add_option("--seed", build_seed, "Global padding seed")->required();
    build_cmd->add_option("--category-map", build_category_map,
                          "JSON object mapping relative paths or file names to categories");
    add_message_flags(build_cmd, build_m);
    add_grid_flags(build_cmd, build_g);
    build_cmd->add_flag("--skip-oversize", build_skip, "Record cells too small for the message as skipped");
    build_cmd->add_option("--format", build_format, "Output format (default: same as each cover)")->check(kImageFormat);
    build_cmd->add_option("--jobs", build_jobs, "Worker threads (0 = all cores)")->capture_default_str();

    // diff
    std::string diff_cover, diff_stego;
    auto* diff_cmd = app.add_subcommand("diff", "Compare a cover/stego pair and estimate embedding parameters");
    diff_cmd->add_option("--cover", diff_cover, "Cover image")->required();
    diff_cmd->add_option("--stego", diff_stego, "Stego image")->required();

    // verify
    std::string verify_manifest_path, verify_report;
    unsigned verify_jobs = 1;
    auto* verify_cmd = app.add_subcommand("verify", "Re-check every manifest entry against the files on disk");
    verify_cmd->add_option("--manifest", verify_manifest_path, "manifest.jsonl of a database")->required();
    verify_cmd->add_option("--report", verify_report, "Write verdict records (JSON lines) here");
    verify_cmd->add_option("--jobs", verify_jobs, "Worker threads (0 = all cores)")->capture_default_str();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*embed_cmd) {
            LoadReport report;
            const RasterImage cover = load_image(embed_cover, &report);
            warn_load(err, embed_cover, report);
            std::optional<ImageFormat> fmt = embed_format.empty() ? std::nullopt : parse_format(embed_format);
            if (!fmt) fmt = parse_format(fs::path(embed_out).extension().string());
            if (!fmt) fmt = env_format();
            const EmbedParams params = embed_p.params();
            const PayloadSpec payload{embed_m.load(), embed_seed};
            const RasterImage stego = embed(cover, params, payload);
            save_image(stego, embed_out, fmt.value_or(report.format));
            out << json{{"stego", embed_out},
                        {"channels", params.mask.token()},
                        {"rows", params.rows},
                        {"bits", params.bits},
                        {"capacity_bits", capacity_bits(cover.width(), params)},
                        {"message_length_bits", payload.message_bits()},
                        {"message_digest", sha256_hex(payload.message)},
                        {"pad_seed", std::to_string(payload.pad_seed)}}
                       .dump()
                << '\n';
            return kOk;
        }

        if (*extract_cmd) {
            LoadReport report;
            const RasterImage stego = load_image(extract_stego, &report);
            warn_load(err, extract_stego, report);
            const EmbedParams params = extract_p.params();
            std::uint64_t n_bits = capacity_bits(stego.width(), params);
            if (extract_bytes) n_bits = *extract_bytes * 8;
            if (extract_bits) n_bits = *extract_bits;
            const std::vector<std::uint8_t> bytes = extract(stego, params, n_bits).to_bytes();
            if (extract_out.empty()) {
                out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
            } else {
                write_file(extract_out, bytes);
            }
            return kOk;
        }

        if (*sweep_cmd) {
            const SweepGrid grid = sweep_g.grid();
            const auto fmt = flag_or_env_format(sweep_format);
            const CoverRecord rec = make_cover_record(sweep_cover, sweep_category);
            BuildOptions opts;
            opts.jobs = resolve_jobs(sweep_jobs);
            opts.skip_oversize = sweep_skip;
            opts.format = fmt;
            const Manifest m = build_database({rec}, grid, PayloadSpec{sweep_m.load(), sweep_seed}, sweep_out, opts);
            report_build(m, fs::path(sweep_out) / std::string(kManifestFileName), out, err);
            return kOk;
        }

        if (*build_cmd) {
            const SweepGrid grid = build_g.grid();
            const auto fmt = flag_or_env_format(build_format);
            CategoryRule rule;
            if (!build_category_map.empty()) {
                const auto raw = read_file(build_category_map);
                try {
                    const auto j = json::parse(raw.begin(), raw.end());
                    rule.mapping = j.get<std::map<std::string, std::string>>();
                } catch (const json::exception& e) {
                    throw UsageError("--category-map: expected a JSON object of strings: " + std::string(e.what()));
                }
            }
            const std::vector<std::uint8_t> message = build_m.load();
            std::vector<Rejection> rejections;
            std::error_code ec;
            fs::create_directories(build_out, ec);
            std::vector<CoverRecord> covers;
            try {
                covers = ingest_covers(build_covers, rule, &rejections);
            } catch (const Error&) {
                if (!ec) write_rejection_report(rejections, fs::path(build_out) / "rejections.txt");
                for (const auto& r : rejections) err << "rejected: " << r.path << ": " << r.reason << '\n';
                throw;
            }
            write_rejection_report(rejections, fs::path(build_out) / "rejections.txt");
            for (const auto& r : rejections) err << "rejected: " << r.path << ": " << r.reason << '\n';
            BuildOptions opts;
            opts.jobs = resolve_jobs(build_jobs);
            opts.skip_oversize = build_skip;
            opts.format = fmt;
            const Manifest m = build_database(covers, grid, PayloadSpec{message, build_seed}, build_out, opts);
            report_build(m, fs::path(build_out) / std::string(kManifestFileName), out, err);
            return kOk;
        }

        if (*diff_cmd) {
            const RasterImage cover = load_image(diff_cover);
            const RasterImage stego = load_image(diff_stego);
            const DiffReport r = diff(cover, stego);
            json j{{"identical", r.identical()},
                   {"touched_rows", r.touched_rows},
                   {"touched_channels", r.channels_token()},
                   {"changed_byte_count", r.changed_byte_count},
                   {"changed_bit_count", r.changed_bit_count},
                   {"max_bitplane_changed", r.max_bitplane_changed ? json(*r.max_bitplane_changed) : json(nullptr)},
                   {"max_channel_delta", r.max_channel_delta}};
            if (!r.identical()) {
                const EmbedParams est = infer_params(cover, stego);
                j["inferred"] = json{{"channels", est.mask.token()}, {"rows", est.rows}, {"bits", est.bits}};
            }
            out << j.dump() << '\n';
            return kOk;
        }

        if (*verify_cmd) {
            const fs::path manifest_path(verify_manifest_path);
            const Manifest m = read_manifest(manifest_path);
            const auto verdicts = verify_manifest(m, manifest_path.parent_path(), resolve_jobs(verify_jobs));
            std::size_t failed = 0;
            for (const Verdict& v : verdicts) {
                out << v.summary_line() << '\n';
                if (!v.passed()) ++failed;
            }
            if (!verify_report.empty()) {
                std::ofstream rep(verify_report);
                if (!rep) throw Error(ErrorKind::IoError, "cannot open " + verify_report);
                write_verdicts(verdicts, rep);
            }
            err << (verdicts.size() - failed) << " of " << verdicts.size() << " entries verified";
            if (!m.failures.empty()) err << "; manifest records " << m.failures.size() << " failed cover(s)";
            err << '\n';
            return failed ? kVerifyFailed : kOk;
        }
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return kInternal;
    }
    return kUsage;
}

}  // namespace sig::cli
