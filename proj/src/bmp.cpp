// Windows bitmap codec. Reads uncompressed 1/4/8-bit palette, 24-bit and
// 32-bit (BI_RGB or 8-bit BI_BITFIELDS) files; writes 24-bit bottom-up BI_RGB.
#include <bit>

#include "sig/error.hpp"
#include "sig/image.hpp"

namespace sig {

namespace {

constexpr std::uint32_t kBiRgb = 0;
constexpr std::uint32_t kBiRle8 = 1;
constexpr std::uint32_t kBiRle4 = 2;
constexpr std::uint32_t kBiBitfields = 3;
constexpr std::uint32_t kBiJpeg = 4;
constexpr std::uint32_t kBiPng = 5;
constexpr std::uint32_t kBiAlphaBitfields = 6;

constexpr std::uint64_t kMaxPixels = std::uint64_t{1} << 30;

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> b) : b_(b) {}

    void need(std::size_t off, std::size_t n) const {
        if (off > b_.size() || n > b_.size() - off) throw Error(ErrorKind::CorruptFile, "truncated BMP");
    }
    std::uint16_t u16(std::size_t off) const {
        need(off, 2);
        return static_cast<std::uint16_t>(b_[off] | (b_[off + 1] << 8));
    }
    std::uint32_t u32(std::size_t off) const {
        need(off, 4);
        return static_cast<std::uint32_t>(b_[off]) | (static_cast<std::uint32_t>(b_[off + 1]) << 8) |
               (static_cast<std::uint32_t>(b_[off + 2]) << 16) | (static_cast<std::uint32_t>(b_[off + 3]) << 24);
    }
    std::int32_t i32(std::size_t off) const { return static_cast<std::int32_t>(u32(off)); }

private:
    std::span<const std::uint8_t> b_;
};

struct Rgb {
    std::uint8_t r, g, b;
};

// Extracts an 8-bit field described by a contiguous bit mask.
struct MaskField {
    std::uint32_t mask = 0;
    int shift = 0;

    static MaskField from(std::uint32_t mask) {
        MaskField f{mask, 0};
        if (mask == 0) throw Error(ErrorKind::UnsupportedDepth, "BMP bitfield mask is empty");
        f.shift = std::countr_zero(mask);
        if ((mask >> f.shift) != 0xFF) {
            throw Error(ErrorKind::UnsupportedDepth, "BMP bitfield mask is not an 8-bit channel");
        }
        return f;
    }
    std::uint8_t get(std::uint32_t px) const { return static_cast<std::uint8_t>((px & mask) >> shift); }
};

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

}  // namespace

RasterImage decode_bmp(std::span<const std::uint8_t> bytes, std::vector<std::string>& warnings) {
    Reader rd(bytes);
    rd.need(0, 18);
    if (bytes[0] != 'B' || bytes[1] != 'M') throw Error(ErrorKind::CorruptFile, "missing BM signature");
    const std::uint32_t pixel_offset = rd.u32(10);
    const std::uint32_t dib_size = rd.u32(14);

    std::int64_t width = 0;
    std::int64_t height = 0;
    std::uint16_t bpp = 0;
    std::uint32_t compression = kBiRgb;
    std::uint32_t colors_used = 0;
    std::size_t palette_entry = 4;
    std::uint32_t masks[4] = {0, 0, 0, 0};  // r, g, b, a

    if (dib_size == 12) {
        width = rd.u16(18);
        height = static_cast<std::int16_t>(rd.u16(20));
        bpp = rd.u16(24);
        palette_entry = 3;
    } else if (dib_size >= 40) {
        width = rd.i32(18);
        height = rd.i32(22);
        bpp = rd.u16(28);
        compression = rd.u32(30);
        colors_used = rd.u32(46);
        if (compression == kBiBitfields || compression == kBiAlphaBitfields) {
            // Masks live in the header for V2+ and directly after it for the 40-byte variant.
            const std::size_t mask_at = 54;
            masks[0] = rd.u32(mask_at);
            masks[1] = rd.u32(mask_at + 4);
            masks[2] = rd.u32(mask_at + 8);
            if (dib_size >= 56 || compression == kBiAlphaBitfields) masks[3] = rd.u32(mask_at + 12);
        } else if (dib_size >= 56) {
            masks[3] = rd.u32(66);
        }
    } else {
        throw Error(ErrorKind::CorruptFile, "unknown BMP header size " + std::to_string(dib_size));
    }

    if (compression == kBiRle4 || compression == kBiRle8) {
        throw Error(ErrorKind::UnsupportedFormat, "RLE-compressed BMP");
    }
    if (compression == kBiJpeg || compression == kBiPng) {
        throw Error(ErrorKind::UnsupportedFormat, "BMP with embedded JPEG/PNG stream");
    }
    if (compression != kBiRgb && compression != kBiBitfields && compression != kBiAlphaBitfields) {
        throw Error(ErrorKind::CorruptFile, "unknown BMP compression " + std::to_string(compression));
    }
    if (width <= 0 || height == 0) throw Error(ErrorKind::CorruptFile, "invalid BMP dimensions");

    const bool top_down = height < 0;
    if (top_down) height = -height;
    if (static_cast<std::uint64_t>(width) * static_cast<std::uint64_t>(height) > kMaxPixels) {
        throw Error(ErrorKind::CorruptFile, "BMP dimensions too large");
    }

    switch (bpp) {
        case 1:
        case 4:
        case 8:
        case 24:
        case 32: break;
        default: throw Error(ErrorKind::UnsupportedDepth, std::to_string(bpp) + "-bit BMP");
    }
    if ((compression == kBiBitfields || compression == kBiAlphaBitfields) && bpp != 32) {
        throw Error(ErrorKind::UnsupportedDepth, std::to_string(bpp) + "-bit BITFIELDS BMP");
    }

    std::vector<Rgb> palette;
    if (bpp <= 8) {
        std::size_t count = colors_used ? colors_used : (std::size_t{1} << bpp);
        if (count > 256) throw Error(ErrorKind::CorruptFile, "BMP palette too large");
        const std::size_t palette_at = 14 + dib_size;
        rd.need(palette_at, count * palette_entry);
        palette.reserve(count);
        for (std::size_t i = 0; i < count; ++i) {
            const std::size_t at = palette_at + i * palette_entry;
            palette.push_back(Rgb{bytes[at + 2], bytes[at + 1], bytes[at]});
        }
        warnings.push_back(std::to_string(bpp) + "-bit palette image expanded to RGB");
    }

    MaskField fr, fg, fb;
    if (bpp == 32) {
        if (compression == kBiRgb) {
            fr = MaskField::from(0x00FF0000u);
            fg = MaskField::from(0x0000FF00u);
            fb = MaskField::from(0x000000FFu);
            warnings.push_back("32-bit BMP: fourth byte per pixel dropped");
        } else {
            fr = MaskField::from(masks[0]);
            fg = MaskField::from(masks[1]);
            fb = MaskField::from(masks[2]);
            if (masks[3] != 0) warnings.push_back("alpha channel dropped");
        }
    }

    const auto w = static_cast<std::uint32_t>(width);
    const auto h = static_cast<std::uint32_t>(height);
    const std::size_t stride = ((static_cast<std::size_t>(w) * bpp + 31) / 32) * 4;
    rd.need(pixel_offset, stride * h);

    RasterImage img(w, h);
    auto out = img.data();
    for (std::uint32_t y = 0; y < h; ++y) {
        const std::uint32_t src_row = top_down ? y : h - 1 - y;
        const std::uint8_t* row = bytes.data() + pixel_offset + stride * src_row;
        std::uint8_t* dst = out.data() + static_cast<std::size_t>(y) * w * 3;
        for (std::uint32_t x = 0; x < w; ++x, dst += 3) {
            if (bpp == 24) {
                dst[0] = row[x * 3 + 2];
                dst[1] = row[x * 3 + 1];
                dst[2] = row[x * 3];
            } else if (bpp == 32) {
                const std::uint8_t* p = row + static_cast<std::size_t>(x) * 4;
                const std::uint32_t px = static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
                                         (static_cast<std::uint32_t>(p[2]) << 16) |
                                         (static_cast<std::uint32_t>(p[3]) << 24);
                dst[0] = fr.get(px);
                dst[1] = fg.get(px);
                dst[2] = fb.get(px);
            } else {
                const std::size_t bit = static_cast<std::size_t>(x) * bpp;
                const std::uint8_t byte = row[bit / 8];
                const unsigned idx = (byte >> (8 - bpp - bit % 8)) & ((1u << bpp) - 1);
                if (idx >= palette.size()) throw Error(ErrorKind::CorruptFile, "BMP palette index out of range");
                dst[0] = palette[idx].r;
                dst[1] = palette[idx].g;
                dst[2] = palette[idx].b;
            }
        }
    }
    return img;
}

std::vector<std::uint8_t> encode_bmp(const RasterImage& img) {
    const std::uint32_t w = img.width();
    const std::uint32_t h = img.height();
    const std::size_t stride = ((static_cast<std::size_t>(w) * 3 + 3) / 4) * 4;
    const std::size_t image_size = stride * h;
    if (image_size + 54 > 0xFFFFFFFFu) throw Error(ErrorKind::InvalidParams, "image too large for BMP");

    std::vector<std::uint8_t> out;
    out.reserve(54 + image_size);
    out.push_back('B');
    out.push_back('M');
    put_u32(out, static_cast<std::uint32_t>(54 + image_size));
    put_u32(out, 0);
    put_u32(out, 54);
    put_u32(out, 40);
    put_u32(out, w);
    put_u32(out, h);
    put_u16(out, 1);
    put_u16(out, 24);
    put_u32(out, kBiRgb);
    put_u32(out, static_cast<std::uint32_t>(image_size));
    put_u32(out, 2835);  // 72 dpi
    put_u32(out, 2835);
    put_u32(out, 0);
    put_u32(out, 0);

    const auto data = img.data();
    for (std::uint32_t y = h; y-- > 0;) {
        const std::uint8_t* src = data.data() + static_cast<std::size_t>(y) * w * 3;
        for (std::uint32_t x = 0; x < w; ++x, src += 3) {
            out.push_back(src[2]);
            out.push_back(src[1]);
            out.push_back(src[0]);
        }
        out.insert(out.end(), stride - static_cast<std::size_t>(w) * 3, 0);
    }
    return out;
}

}  // namespace sig
