#include "sig/image.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iterator>

#include "sig/error.hpp"

namespace sig {

char channel_letter(Channel ch) noexcept {
    switch (ch) {
        case Channel::R: return 'R';
        case Channel::G: return 'G';
        case Channel::B: return 'B';
    }
    return '?';
}

RasterImage::RasterImage(std::uint32_t width, std::uint32_t height)
    : width_(width), height_(height) {
    if (width == 0 || height == 0) {
        throw Error(ErrorKind::InvalidParams, "image dimensions must be positive");
    }
    data_.assign(static_cast<std::size_t>(width) * height * 3, 0);
}

RasterImage::RasterImage(std::uint32_t width, std::uint32_t height, std::vector<std::uint8_t> data)
    : width_(width), height_(height), data_(std::move(data)) {
    if (width == 0 || height == 0) {
        throw Error(ErrorKind::InvalidParams, "image dimensions must be positive");
    }
    if (data_.size() != static_cast<std::size_t>(width) * height * 3) {
        throw Error(ErrorKind::InvalidParams,
                    "pixel buffer holds " + std::to_string(data_.size()) + " bytes, expected " +
                        std::to_string(static_cast<std::size_t>(width) * height * 3));
    }
}

std::size_t RasterImage::offset(PixelCoord at, Channel ch) const {
    if (at.row >= height_ || at.col >= width_) {
        throw Error(ErrorKind::OutOfBounds, "pixel (" + std::to_string(at.row) + ", " +
                                                std::to_string(at.col) + ") outside " +
                                                std::to_string(width_) + "x" + std::to_string(height_));
    }
    return (static_cast<std::size_t>(at.row) * width_ + at.col) * 3 + static_cast<std::size_t>(ch);
}

std::uint8_t RasterImage::channel_byte(PixelCoord at, Channel ch) const { return data_[offset(at, ch)]; }

void RasterImage::set_channel_byte(PixelCoord at, Channel ch, std::uint8_t value) {
    data_[offset(at, ch)] = value;
}

std::string_view format_extension(ImageFormat f) noexcept { return f == ImageFormat::Bmp ? "bmp" : "png"; }

std::optional<ImageFormat> parse_format(std::string_view text) {
    if (!text.empty() && text.front() == '.') text.remove_prefix(1);
    std::string lower(text);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "bmp" || lower == "dib") return ImageFormat::Bmp;
    if (lower == "png") return ImageFormat::Png;
    return std::nullopt;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw Error(ErrorKind::IoError, "read failed: " + path.string());
    return bytes;
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::IoError, "cannot open for writing: " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    out.close();
    if (!out) throw Error(ErrorKind::IoError, "write failed: " + path.string());
}

namespace {

bool starts_with(std::span<const std::uint8_t> bytes, std::initializer_list<std::uint8_t> magic) {
    return bytes.size() >= magic.size() && std::equal(magic.begin(), magic.end(), bytes.begin());
}

// Names a recognized container we refuse, or returns nullptr.
const char* refused_container(std::span<const std::uint8_t> b) {
    if (starts_with(b, {0xFF, 0xD8, 0xFF})) return "JPEG (lossy)";
    if (starts_with(b, {'R', 'I', 'F', 'F'}) && b.size() >= 12 && b[8] == 'W' && b[9] == 'E' && b[10] == 'B' &&
        b[11] == 'P')
        return "WebP";
    if (starts_with(b, {0x00, 0x00, 0x00, 0x0C, 'j', 'P', ' ', ' '}) || starts_with(b, {0xFF, 0x4F, 0xFF, 0x51}))
        return "JPEG 2000";
    if (starts_with(b, {'G', 'I', 'F', '8'})) return "GIF";
    if (starts_with(b, {'I', 'I', 0x2A, 0x00}) || starts_with(b, {'M', 'M', 0x00, 0x2A})) return "TIFF";
    return nullptr;
}

}  // namespace

RasterImage decode_image(std::span<const std::uint8_t> bytes, LoadReport* report) {
    std::vector<std::string> warnings;
    ImageFormat format;
    std::optional<RasterImage> img;
    if (starts_with(bytes, {0x89, 'P', 'N', 'G', 0x0D, 0x0A, 0x1A, 0x0A})) {
        format = ImageFormat::Png;
        img.emplace(decode_png(bytes, warnings));
    } else if (starts_with(bytes, {'B', 'M'})) {
        format = ImageFormat::Bmp;
        img.emplace(decode_bmp(bytes, warnings));
    } else if (const char* what = refused_container(bytes)) {
        throw Error(ErrorKind::UnsupportedFormat,
                    std::string(what) + " input; only BMP and PNG rasters keep LSB data intact");
    } else if (bytes.empty()) {
        throw Error(ErrorKind::CorruptFile, "empty file");
    } else {
        throw Error(ErrorKind::UnsupportedFormat, "unrecognized image container");
    }
    if (report) {
        report->format = format;
        report->warnings = std::move(warnings);
    }
    return std::move(*img);
}

RasterImage load_image(const std::filesystem::path& path, LoadReport* report) {
    const auto bytes = read_file(path);
    try {
        return decode_image(bytes, report);
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::IoError) throw;
        throw Error(e.kind(), path.string() + ": " + e.detail());
    }
}

std::vector<std::uint8_t> encode_image(const RasterImage& img, ImageFormat format) {
    return format == ImageFormat::Bmp ? encode_bmp(img) : encode_png(img);
}

void save_image(const RasterImage& img, const std::filesystem::path& path, ImageFormat format) {
    write_file(path, encode_image(img, format));
}

}  // namespace sig
