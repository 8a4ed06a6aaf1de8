#pragma once

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include <png.h>

#include "errors.hpp"
#include "image.hpp"

namespace ssimsched {

namespace detail {

struct CFile {
    std::FILE* f = nullptr;
    explicit CFile(std::FILE* fp) : f(fp) {}
    ~CFile() {
        if (f) std::fclose(f);
    }
    CFile(const CFile&) = delete;
    CFile& operator=(const CFile&) = delete;
};

}  // namespace detail

// Accepts 8/16-bit PNG, color types gray/RGB/RGBA; samples scaled to [0,1].
inline ImageBuffer load_png(const std::filesystem::path& path) {
    detail::CFile file(std::fopen(path.string().c_str(), "rb"));
    if (!file.f) throw IoError("load_png: cannot open " + path.string());

    unsigned char sig[8];
    if (std::fread(sig, 1, 8, file.f) != 8 || png_sig_cmp(sig, 0, 8))
        throw FormatError("load_png: not a PNG file: " + path.string());

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw IoError("load_png: libpng init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw IoError("load_png: libpng init failed");
    }

    std::vector<unsigned char> bytes;
    std::vector<png_bytep> rows;

    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw FormatError("load_png: corrupt PNG: " + path.string());
    }

    png_init_io(png, file.f);
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);

    png_uint_32 w = png_get_image_width(png, info);
    png_uint_32 h = png_get_image_height(png, info);
    int bit_depth = png_get_bit_depth(png, info);
    int color_type = png_get_color_type(png, info);

    if (bit_depth != 8 && bit_depth != 16) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw FormatError("load_png: unsupported bit depth");
    }
    int channels;
    switch (color_type) {
        case PNG_COLOR_TYPE_GRAY: channels = 1; break;
        case PNG_COLOR_TYPE_RGB: channels = 3; break;
        case PNG_COLOR_TYPE_RGB_ALPHA: channels = 4; break;
        default:
            png_destroy_read_struct(&png, &info, nullptr);
            throw FormatError("load_png: unsupported color type");
    }

    png_set_interlace_handling(png);
    png_read_update_info(png, info);

    std::size_t row_bytes = png_get_rowbytes(png, info);
    bytes.resize(row_bytes * h);
    rows.resize(h);
    for (png_uint_32 y = 0; y < h; ++y) rows[y] = bytes.data() + row_bytes * y;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    ImageBuffer img(static_cast<int>(w), static_cast<int>(h), channels);
    std::size_t n = img.size();
    if (bit_depth == 8) {
        for (std::size_t i = 0; i < n; ++i) img.data[i] = bytes[i] / 255.0;
    } else {
        // network byte order, two bytes per sample
        for (std::size_t i = 0; i < n; ++i) {
            unsigned v = (static_cast<unsigned>(bytes[2 * i]) << 8) | bytes[2 * i + 1];
            img.data[i] = v / 65535.0;
        }
    }
    return img;
}

// Writes an 8-bit PNG, sample v = round(255 * s).
inline void save_png(const ImageBuffer& img, const std::filesystem::path& path) {
    if (img.channels != 1 && img.channels != 3 && img.channels != 4)
        throw FormatError("save_png: channels must be 1, 3 or 4");

    detail::CFile file(std::fopen(path.string().c_str(), "wb"));
    if (!file.f) throw IoError("save_png: cannot open " + path.string());

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw IoError("save_png: libpng init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw IoError("save_png: libpng init failed");
    }

    std::vector<unsigned char> bytes(img.size());
    std::vector<png_bytep> rows(static_cast<std::size_t>(img.height));

    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("save_png: write failed: " + path.string());
    }

    for (std::size_t i = 0; i < img.size(); ++i) {
        double v = img.data[i];
        v = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
        bytes[i] = static_cast<unsigned char>(std::lround(255.0 * v));
    }
    std::size_t row_bytes = static_cast<std::size_t>(img.width) * img.channels;
    for (int y = 0; y < img.height; ++y) rows[y] = bytes.data() + row_bytes * y;

    int color_type = img.channels == 1   ? PNG_COLOR_TYPE_GRAY
                     : img.channels == 3 ? PNG_COLOR_TYPE_RGB
                                         : PNG_COLOR_TYPE_RGB_ALPHA;

    png_init_io(png, file.f);
    png_set_IHDR(png, info, img.width, img.height, 8, color_type, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

}  // namespace ssimsched
