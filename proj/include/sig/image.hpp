#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sig {

enum class Channel : std::uint8_t { R = 0, G = 1, B = 2 };

inline constexpr Channel kChannels[] = {Channel::R, Channel::G, Channel::B};

char channel_letter(Channel ch) noexcept;

struct PixelCoord {
    std::uint32_t row = 0;
    std::uint32_t col = 0;
};

/// Decoded 8-bit RGB raster. Pixel bytes are row-major, three bytes per pixel
/// in R, G, B order; the byte vector always holds exactly width*height*3 bytes.
class RasterImage {
public:
    /// Zero-filled image. Throws InvalidParams on a zero dimension.
    RasterImage(std::uint32_t width, std::uint32_t height);
    /// Takes ownership of `data`; throws InvalidParams if the size is wrong.
    RasterImage(std::uint32_t width, std::uint32_t height, std::vector<std::uint8_t> data);

    std::uint32_t width() const noexcept { return width_; }
    std::uint32_t height() const noexcept { return height_; }

    std::span<const std::uint8_t> data() const noexcept { return data_; }
    std::span<std::uint8_t> data() noexcept { return data_; }

    std::size_t offset(PixelCoord at, Channel ch) const;

    /// Throws OutOfBounds when `at` lies outside the image.
    std::uint8_t channel_byte(PixelCoord at, Channel ch) const;
    void set_channel_byte(PixelCoord at, Channel ch, std::uint8_t value);

    friend bool operator==(const RasterImage&, const RasterImage&) = default;

private:
    std::uint32_t width_;
    std::uint32_t height_;
    std::vector<std::uint8_t> data_;
};

enum class ImageFormat { Bmp, Png };

std::string_view format_extension(ImageFormat f) noexcept;  // "bmp" / "png"
/// Accepts "bmp"/"png" case-insensitively, with or without a leading dot.
std::optional<ImageFormat> parse_format(std::string_view text);

struct LoadReport {
    ImageFormat format = ImageFormat::Png;
    // Non-empty when the stored pixels were normalized (palette/gray expanded, alpha dropped).
    std::vector<std::string> warnings;
};

/// Decodes a lossless raster file. Lossy or unrecognized containers raise
/// UnsupportedFormat, damaged files CorruptFile, and 16-bit or otherwise
/// non-8-bit channel data UnsupportedDepth.
RasterImage load_image(const std::filesystem::path& path, LoadReport* report = nullptr);
RasterImage decode_image(std::span<const std::uint8_t> bytes, LoadReport* report = nullptr);

void save_image(const RasterImage& img, const std::filesystem::path& path, ImageFormat format);
std::vector<std::uint8_t> encode_image(const RasterImage& img, ImageFormat format);

// Container codecs. decode_* expect the full file contents.
RasterImage decode_bmp(std::span<const std::uint8_t> bytes, std::vector<std::string>& warnings);
std::vector<std::uint8_t> encode_bmp(const RasterImage& img);
RasterImage decode_png(std::span<const std::uint8_t> bytes, std::vector<std::string>& warnings);
std::vector<std::uint8_t> encode_png(const RasterImage& img);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace sig
