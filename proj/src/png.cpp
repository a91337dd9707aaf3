// PNG codec on top of libpng. libpng reports errors through longjmp, so all
// state touched after setjmp lives behind a pointer created before it.
#include <png.h>

#include <csetjmp>
#include <cstring>
#include <memory>

#include "sig/error.hpp"
#include "sig/image.hpp"

namespace sig {

namespace {

struct ReadState {
    std::span<const std::uint8_t> input;
    std::size_t pos = 0;
    std::uint32_t width = 0;
    std::uint32_t height = 0;
    std::vector<std::uint8_t> pixels;
    std::vector<png_bytep> rows;
    std::vector<std::string> warnings;
    ErrorKind fail_kind = ErrorKind::CorruptFile;
    std::string message;
};

struct WriteState {
    std::vector<std::uint8_t> output;
    std::vector<png_bytep> rows;
    std::string message;
};

void on_error(png_structp png, png_const_charp msg) {
    auto* text = static_cast<std::string*>(png_get_error_ptr(png));
    if (text && text->empty()) *text = msg ? msg : "libpng error";
    png_longjmp(png, 1);
}

void on_warning(png_structp, png_const_charp) {}

void read_bytes(png_structp png, png_bytep out, png_size_t n) {
    auto* st = static_cast<ReadState*>(png_get_io_ptr(png));
    if (n > st->input.size() - st->pos) png_error(png, "unexpected end of PNG data");
    std::memcpy(out, st->input.data() + st->pos, n);
    st->pos += n;
}

void write_bytes(png_structp png, png_bytep data, png_size_t n) {
    auto* st = static_cast<WriteState*>(png_get_io_ptr(png));
    st->output.insert(st->output.end(), data, data + n);
}

void flush_noop(png_structp) {}

// Returns false when libpng longjmp'd; st->message holds the reason.
bool run_decode(ReadState* st) {
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &st->message, on_error, on_warning);
    if (!png) {
        st->message = "png_create_read_struct failed";
        return false;
    }
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        st->message = "png_create_info_struct failed";
        return false;
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        return false;
    }
    png_set_read_fn(png, st, read_bytes);
    png_read_info(png, info);

    png_uint_32 w = 0, h = 0;
    int depth = 0, color = 0, interlace = 0;
    png_get_IHDR(png, info, &w, &h, &depth, &color, &interlace, nullptr, nullptr);
    if (depth == 16) {
        st->fail_kind = ErrorKind::UnsupportedDepth;
        st->message = "16-bit PNG channels";
        png_destroy_read_struct(&png, &info, nullptr);
        return false;
    }
    if (static_cast<std::uint64_t>(w) * h > (std::uint64_t{1} << 30)) {
        st->message = "PNG dimensions too large";
        png_destroy_read_struct(&png, &info, nullptr);
        return false;
    }

    if (color == PNG_COLOR_TYPE_PALETTE) {
        png_set_palette_to_rgb(png);
        st->warnings.push_back("palette image expanded to RGB");
    }
    if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA) {
        if (depth < 8) png_set_expand_gray_1_2_4_to_8(png);
        png_set_gray_to_rgb(png);
        st->warnings.push_back("grayscale image expanded to RGB");
    }
    if (color & PNG_COLOR_MASK_ALPHA) {
        png_set_strip_alpha(png);
        st->warnings.push_back("alpha channel dropped");
    } else if (png_get_valid(png, info, PNG_INFO_tRNS)) {
        st->warnings.push_back("tRNS transparency ignored");
    }
    if (interlace != PNG_INTERLACE_NONE) png_set_interlace_handling(png);
    png_read_update_info(png, info);

    if (png_get_rowbytes(png, info) != static_cast<png_size_t>(w) * 3) {
        st->fail_kind = ErrorKind::UnsupportedDepth;
        st->message = "PNG does not convert to 8-bit RGB";
        png_destroy_read_struct(&png, &info, nullptr);
        return false;
    }

    st->width = w;
    st->height = h;
    st->pixels.resize(static_cast<std::size_t>(w) * h * 3);
    st->rows.resize(h);
    for (png_uint_32 y = 0; y < h; ++y) st->rows[y] = st->pixels.data() + static_cast<std::size_t>(y) * w * 3;
    png_read_image(png, st->rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return true;
}

bool run_encode(const RasterImage* img, WriteState* st) {
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &st->message, on_error, on_warning);
    if (!png) {
        st->message = "png_create_write_struct failed";
        return false;
    }
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        st->message = "png_create_info_struct failed";
        return false;
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        return false;
    }
    png_set_write_fn(png, st, write_bytes, flush_noop);
    png_set_IHDR(png, info, img->width(), img->height(), 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_write_image(png, st->rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    return true;
}

}  // namespace

RasterImage decode_png(std::span<const std::uint8_t> bytes, std::vector<std::string>& warnings) {
    auto st = std::make_unique<ReadState>();
    st->input = bytes;
    if (!run_decode(st.get())) throw Error(st->fail_kind, "PNG: " + st->message);
    warnings.insert(warnings.end(), st->warnings.begin(), st->warnings.end());
    return RasterImage(st->width, st->height, std::move(st->pixels));
}

std::vector<std::uint8_t> encode_png(const RasterImage& img) {
    auto st = std::make_unique<WriteState>();
    // libpng takes non-const row pointers but only reads through them when writing.
    auto* base = const_cast<std::uint8_t*>(img.data().data());
    st->rows.resize(img.height());
    for (std::uint32_t y = 0; y < img.height(); ++y) {
        st->rows[y] = base + static_cast<std::size_t>(y) * img.width() * 3;
    }
    if (!run_encode(&img, st.get())) throw Error(ErrorKind::IoError, "PNG encode failed: " + st->message);
    return std::move(st->output);
}

}  // namespace sig
