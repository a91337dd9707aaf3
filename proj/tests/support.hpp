// Shared fixtures and independent oracles for the test binaries.
#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "sig/image.hpp"
#include "sig/lsb.hpp"

namespace sig::test {

inline RasterImage random_image(std::mt19937_64& rng, std::uint32_t w, std::uint32_t h) {
    std::vector<std::uint8_t> data(std::size_t{w} * h * 3);
    std::uniform_int_distribution<int> byte(0, 255);
    for (auto& b : data) b = static_cast<std::uint8_t>(byte(rng));
    return RasterImage(w, h, std::move(data));
}

inline std::vector<std::uint8_t> random_bytes(std::mt19937_64& rng, std::size_t n) {
    std::vector<std::uint8_t> out(n);
    std::uniform_int_distribution<int> byte(0, 255);
    for (auto& b : out) b = static_cast<std::uint8_t>(byte(rng));
    return out;
}

inline EmbedParams random_params(std::mt19937_64& rng, std::uint32_t height) {
    const auto& masks = ChannelMask::all();
    EmbedParams p;
    p.mask = masks[std::uniform_int_distribution<std::size_t>(0, masks.size() - 1)(rng)];
    p.rows = std::uniform_int_distribution<std::uint32_t>(1, height)(rng);
    p.bits = std::uniform_int_distribution<std::uint32_t>(1, 8)(rng);
    return p;
}

/// Counts writable bit slots by walking every (row, col, channel, bit) of
/// the image and asking whether the region definition admits it.
inline std::uint64_t brute_force_capacity(std::uint32_t width, std::uint32_t height, const EmbedParams& p) {
    std::uint64_t n = 0;
    for (std::uint32_t r = 0; r < height; ++r)
        for (std::uint32_t c = 0; c < width; ++c)
            for (Channel ch : kChannels)
                for (std::uint32_t bit = 0; bit < 8; ++bit)
                    if (r < p.rows && p.mask.contains(ch) && bit < p.bits) ++n;
    return n;
}

/// Reference embedder: maps each stream position straight to its
/// (row, col, channel, bit) by index arithmetic instead of walking the region.
inline RasterImage reference_embed(const RasterImage& cover, const EmbedParams& p, const BitStream& stream) {
    std::vector<Channel> selected;
    for (Channel ch : kChannels)
        if (p.mask.contains(ch)) selected.push_back(ch);
    RasterImage out = cover;
    for (std::size_t s = 0; s < stream.size(); ++s) {
        const std::size_t slot = s / p.bits;
        const unsigned bit = static_cast<unsigned>(s % p.bits);
        const std::size_t pixel = slot / selected.size();
        const Channel ch = selected[slot % selected.size()];
        const PixelCoord at{static_cast<std::uint32_t>(pixel / cover.width()),
                            static_cast<std::uint32_t>(pixel % cover.width())};
        std::uint8_t v = out.channel_byte(at, ch);
        v = static_cast<std::uint8_t>((v & ~(1u << bit)) | (stream[s] << bit));
        out.set_channel_byte(at, ch, v);
    }
    return out;
}

/// Removes the directory tree on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() /
                ("sig-" + tag + "-" + std::to_string(rd()) + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

private:
    std::filesystem::path path_;
};

inline void flip_bit(const std::filesystem::path& file, std::size_t byte_index, unsigned bit) {
    auto bytes = read_file(file);
    bytes.at(byte_index) = static_cast<std::uint8_t>(bytes[byte_index] ^ (1u << bit));
    write_file(file, bytes);
}

}  // namespace sig::test
