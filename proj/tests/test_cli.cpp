#include <doctest.h>

#include <cstdlib>
#include <sstream>

#include "cli.hpp"
#include "sig/corpus.hpp"
#include "sig/error.hpp"
#include "support.hpp"

using namespace sig;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result sig_run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("embed then extract recovers the message file") {
    test::TempDir dir("cli-embed");
    std::mt19937_64 rng(1);
    save_image(test::random_image(rng, 40, 12), dir / "c.png", ImageFormat::Png);
    const auto msg = test::random_bytes(rng, 57);
    write_file(dir / "m.bin", msg);

    const std::string cover = (dir / "c.png").string();
    const std::string stego = (dir / "s.png").string();
    const std::string got = (dir / "got.bin").string();
    auto r = sig_run({"embed", "--cover", cover, "--channels", "RG", "--rows", "5", "--bits", "3", "--message",
                      (dir / "m.bin").string(), "--out", stego});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    CHECK(r.out.find("\"message_length_bits\":456") != std::string::npos);

    r = sig_run({"extract", "--stego", stego, "--channels", "RG", "--rows", "5", "--bits", "3", "--length-bytes",
                 std::to_string(msg.size()), "--out", got});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    CHECK(read_file(got) == msg);

    // Identical flags produce identical bytes.
    const std::string stego2 = (dir / "s2.png").string();
    sig_run({"embed", "--cover", cover, "--channels", "RG", "--rows", "5", "--bits", "3", "--message",
             (dir / "m.bin").string(), "--out", stego2});
    CHECK(read_file(stego) == read_file(stego2));
}

TEST_CASE("extract to stdout and message-text") {
    test::TempDir dir("cli-text");
    save_image(RasterImage(16, 4), dir / "c.bmp", ImageFormat::Bmp);
    auto r = sig_run({"embed", "--cover", (dir / "c.bmp").string(), "--channels", "B", "--rows", "4", "--bits", "2",
                      "--message-text", "hello", "--out", (dir / "s.bmp").string()});
    REQUIRE(r.code == 0);
    LoadReport rep;
    load_image(dir / "s.bmp", &rep);
    CHECK(rep.format == ImageFormat::Bmp);
    r = sig_run({"extract", "--stego", (dir / "s.bmp").string(), "--channels", "B", "--rows", "4", "--bits", "2",
                 "--length-bits", "40"});
    CHECK(r.code == 0);
    CHECK(r.out == "hello");
}

TEST_CASE("usage errors exit 2 and name the flag") {
    auto r = sig_run({"embed", "--cover", "c.png", "--channels", "XZ", "--rows", "5", "--bits", "1", "--out", "s.png"});
    CHECK(r.code == cli::kUsage);
    CHECK(r.err.find("--channels") != std::string::npos);

    r = sig_run({"embed", "--cover", "c.png", "--channels", "R", "--rows", "5", "--bits", "9", "--out", "s.png"});
    CHECK(r.code == cli::kUsage);
    CHECK(r.err.find("--bits") != std::string::npos);

    CHECK(sig_run({}).code == cli::kUsage);
    CHECK(sig_run({"frobnicate"}).code == cli::kUsage);
    CHECK(sig_run({"sweep", "--cover", "c.png", "--out", "db"}).code == cli::kUsage);  // --seed is required
    CHECK(sig_run({"embed", "--cover", "c", "--channels", "R", "--rows", "1", "--bits", "1", "--out", "s",
                   "--message", "a", "--message-text", "b"})
              .code == cli::kUsage);
    CHECK(sig_run({"--help"}).code == 0);
}

TEST_CASE("input errors exit 3") {
    test::TempDir dir("cli-err");
    write_file(dir / "photo.jpg", std::vector<std::uint8_t>{0xFF, 0xD8, 0xFF, 0xE0});
    auto r = sig_run({"embed", "--cover", (dir / "photo.jpg").string(), "--channels", "R", "--rows", "1", "--bits",
                      "1", "--out", (dir / "s.png").string()});
    CHECK(r.code == cli::kInputError);
    CHECK(r.err.find("UnsupportedFormat") != std::string::npos);
    CHECK_FALSE(fs::exists(dir / "s.png"));

    save_image(RasterImage(4, 4), dir / "c.png", ImageFormat::Png);
    r = sig_run({"embed", "--cover", (dir / "c.png").string(), "--channels", "R", "--rows", "5", "--bits", "1",
                 "--out", (dir / "s.png").string()});
    CHECK(r.code == cli::kInputError);
    CHECK(r.err.find("RowsExceedHeight") != std::string::npos);
}

TEST_CASE("sweep writes 63 files and a manifest") {
    test::TempDir dir("cli-sweep");
    std::mt19937_64 rng(2);
    save_image(test::random_image(rng, 32, 32), dir / "lotus.bmp", ImageFormat::Bmp);
    auto r = sig_run({"sweep", "--cover", (dir / "lotus.bmp").string(), "--out", (dir / "db").string(), "--seed", "1",
                      "--category", "Flora"});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    const Manifest m = read_manifest(dir / "db/manifest.jsonl");
    CHECK(m.entries.size() == 63);
    CHECK(m.covers.at(0).category == "Flora");
    CHECK(fs::exists(dir / "db/lotus/lotus_1_5_RGB.bmp"));
    std::size_t files = 0;
    for (const auto& f : fs::directory_iterator(dir / "db/lotus")) files += f.is_regular_file();
    CHECK(files == 63);

    r = sig_run({"verify", "--manifest", (dir / "db/manifest.jsonl").string(), "--report",
                 (dir / "verdicts.jsonl").string()});
    CHECK(r.code == 0);
    CHECK(r.out.find("PASS lotus_4_20_RGB") != std::string::npos);
    CHECK(fs::exists(dir / "verdicts.jsonl"));

    test::flip_bit(dir / "db/lotus/lotus_3_10_GB.bmp", 100, 0);
    r = sig_run({"verify", "--manifest", (dir / "db/manifest.jsonl").string()});
    CHECK(r.code == cli::kVerifyFailed);
    CHECK(r.out.find("FAIL lotus_3_10_GB") != std::string::npos);
}

TEST_CASE("grid overrides and SIG_OUT_FORMAT") {
    test::TempDir dir("cli-grid");
    save_image(RasterImage(8, 8), dir / "c.bmp", ImageFormat::Bmp);
    ::setenv("SIG_OUT_FORMAT", "png", 1);
    auto r = sig_run({"sweep", "--cover", (dir / "c.bmp").string(), "--out", (dir / "db").string(), "--seed", "3",
                      "--grid-channels", "R,GB", "--grid-rows", "2,4", "--grid-bits", "1"});
    ::unsetenv("SIG_OUT_FORMAT");
    REQUIRE_MESSAGE(r.code == 0, r.err);
    const Manifest m = read_manifest(dir / "db/manifest.jsonl");
    CHECK(m.entries.size() == 4);
    CHECK(fs::exists(dir / "db/c/c_1_4_GB.png"));

    r = sig_run({"sweep", "--cover", (dir / "c.bmp").string(), "--out", (dir / "db2").string(), "--seed", "3",
                 "--grid-rows", "2,2"});
    CHECK(r.code == cli::kUsage);

    ::setenv("SIG_OUT_FORMAT", "gif", 1);
    r = sig_run({"sweep", "--cover", (dir / "c.bmp").string(), "--out", (dir / "db3").string(), "--seed", "3",
                 "--grid-rows", "2"});
    ::unsetenv("SIG_OUT_FORMAT");
    CHECK(r.code == cli::kUsage);
    CHECK_FALSE(fs::exists(dir / "db3"));
}

TEST_CASE("build-db with a rejected file and a category map") {
    test::TempDir dir("cli-db");
    std::mt19937_64 rng(3);
    fs::create_directories(dir / "covers/flora");
    save_image(test::random_image(rng, 24, 24), dir / "covers/flora/lotus.png", ImageFormat::Png);
    save_image(test::random_image(rng, 24, 24), dir / "covers/baby.png", ImageFormat::Png);
    write_file(dir / "covers/sea.jpg", std::vector<std::uint8_t>{0xFF, 0xD8, 0xFF, 0xE0});
    const std::string map = R"({"baby.png": "People"})";
    write_file(dir / "map.json", std::vector<std::uint8_t>(map.begin(), map.end()));

    auto r = sig_run({"build-db", "--covers", (dir / "covers").string(), "--out", (dir / "db").string(), "--seed",
                      "9", "--category-map", (dir / "map.json").string(), "--jobs", "4"});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    const Manifest m = read_manifest(dir / "db/manifest.jsonl");
    CHECK(m.entries.size() == 126);
    CHECK(m.covers[0].category == "People");
    CHECK(m.covers[1].category == "flora");
    const auto rej = read_file(dir / "db/rejections.txt");
    CHECK(std::string(rej.begin(), rej.end()).rfind("sea.jpg\t", 0) == 0);
    CHECK(r.err.find("rejected: sea.jpg") != std::string::npos);
}

TEST_CASE("build-db on a JPEG-only directory") {
    test::TempDir dir("cli-empty");
    fs::create_directories(dir / "covers");
    write_file(dir / "covers/x.jpg", std::vector<std::uint8_t>{0xFF, 0xD8, 0xFF, 0xE0});
    auto r = sig_run({"build-db", "--covers", (dir / "covers").string(), "--out", (dir / "db").string(), "--seed",
                      "1"});
    CHECK(r.code == cli::kInputError);
    CHECK(r.err.find("EmptyCorpus") != std::string::npos);
    CHECK_FALSE(fs::exists(dir / "db/manifest.jsonl"));
    CHECK(fs::exists(dir / "db/rejections.txt"));
}

TEST_CASE("diff reports the inferred parameters") {
    test::TempDir dir("cli-diff");
    std::mt19937_64 rng(4);
    const RasterImage cover = test::random_image(rng, 64, 16);
    save_image(cover, dir / "c.png", ImageFormat::Png);
    save_image(embed(cover, {*ChannelMask::from_token("RB"), 10, 4}, {{}, 5}), dir / "s.png", ImageFormat::Png);
    auto r = sig_run({"diff", "--cover", (dir / "c.png").string(), "--stego", (dir / "s.png").string()});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("\"inferred\":{\"channels\":\"RB\",\"rows\":10,\"bits\":4}") != std::string::npos);

    r = sig_run({"diff", "--cover", (dir / "c.png").string(), "--stego", (dir / "c.png").string()});
    CHECK(r.code == 0);
    CHECK(r.out.find("\"identical\":true") != std::string::npos);
}

}
