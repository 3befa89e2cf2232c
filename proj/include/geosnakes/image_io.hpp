#pragma once

#include <png.h>

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "geosnakes/field.hpp"
#include "geosnakes/levelset.hpp"

namespace geosnakes {

inline void write_pgm(const std::string& path, const ScalarField& f) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "P5\n" << f.width << " " << f.height << "\n255\n";
    std::vector<unsigned char> row(f.width);
    for (int y = 0; y < f.height; ++y) {
        for (int x = 0; x < f.width; ++x) {
            const double v = std::clamp(f.at(x, y), 0.0, 255.0);
            row[x] = static_cast<unsigned char>(v + 0.5);
        }
        out.write(reinterpret_cast<const char*>(row.data()), row.size());
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

namespace detail {

inline int pgm_next_int(std::istream& in) {
    // Skips whitespace and '#' comments per the PNM header grammar.
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {}
        } else if (!std::isspace(c)) {
            in.unget();
            break;
        }
    }
    int value;
    if (!(in >> value)) throw std::runtime_error("malformed PGM header");
    return value;
}

}  // namespace detail

inline ScalarField read_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    char magic[2];
    in.read(magic, 2);
    if (!in || magic[0] != 'P' || magic[1] != '5')
        throw std::runtime_error("not a P5 PGM file: " + path);
    const int w = detail::pgm_next_int(in);
    const int h = detail::pgm_next_int(in);
    const int maxval = detail::pgm_next_int(in);
    if (w < 1 || h < 1 || maxval < 1 || maxval > 255)
        throw std::runtime_error("unsupported PGM header in " + path);
    in.get();  // single whitespace after maxval
    std::vector<unsigned char> raw(static_cast<std::size_t>(w) * h);
    in.read(reinterpret_cast<char*>(raw.data()), raw.size());
    if (!in) throw std::runtime_error("truncated PGM data in " + path);
    ScalarField f(w, h);
    for (std::size_t i = 0; i < raw.size(); ++i) f.values[i] = raw[i];
    return f;
}

namespace detail {

struct PngReadCloser {
    png_structp png = nullptr;
    png_infop info = nullptr;
    std::FILE* fp = nullptr;
    ~PngReadCloser() {
        if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
        if (fp) std::fclose(fp);
    }
};

struct PngWriteCloser {
    png_structp png = nullptr;
    png_infop info = nullptr;
    std::FILE* fp = nullptr;
    ~PngWriteCloser() {
        if (png) png_destroy_write_struct(&png, info ? &info : nullptr);
        if (fp) std::fclose(fp);
    }
};

}  // namespace detail

// Reads an 8-bit PNG as a grayscale field; color inputs are converted by
// luminance with weights (0.299, 0.587, 0.114).
inline ScalarField read_png(const std::string& path) {
    detail::PngReadCloser c;
    c.fp = std::fopen(path.c_str(), "rb");
    if (!c.fp) throw std::runtime_error("cannot open: " + path);
    c.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!c.png) throw std::runtime_error("png init failed");
    c.info = png_create_info_struct(c.png);
    if (!c.info) throw std::runtime_error("png init failed");
    if (setjmp(png_jmpbuf(c.png))) throw std::runtime_error("failed to decode PNG: " + path);

    png_init_io(c.png, c.fp);
    png_read_info(c.png, c.info);
    png_set_expand(c.png);
    png_set_strip_16(c.png);
    png_set_strip_alpha(c.png);
    png_read_update_info(c.png, c.info);

    const int w = static_cast<int>(png_get_image_width(c.png, c.info));
    const int h = static_cast<int>(png_get_image_height(c.png, c.info));
    const int channels = png_get_channels(c.png, c.info);
    if (channels != 1 && channels != 3)
        throw std::runtime_error("unsupported PNG channel layout in " + path);

    std::vector<unsigned char> data(static_cast<std::size_t>(w) * h * channels);
    std::vector<png_bytep> rows(h);
    for (int y = 0; y < h; ++y) rows[y] = data.data() + static_cast<std::size_t>(y) * w * channels;
    png_read_image(c.png, rows.data());
    png_read_end(c.png, nullptr);

    ScalarField f(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const unsigned char* px = data.data() + (static_cast<std::size_t>(y) * w + x) * channels;
            f.at(x, y) = channels == 1 ? px[0] : 0.299 * px[0] + 0.587 * px[1] + 0.114 * px[2];
        }
    return f;
}

namespace detail {

inline void write_png_bytes(const std::string& path, const std::vector<unsigned char>& data, int w,
                            int h, int channels) {
    detail::PngWriteCloser c;
    c.fp = std::fopen(path.c_str(), "wb");
    if (!c.fp) throw std::runtime_error("cannot open for writing: " + path);
    c.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!c.png) throw std::runtime_error("png init failed");
    c.info = png_create_info_struct(c.png);
    if (!c.info) throw std::runtime_error("png init failed");
    if (setjmp(png_jmpbuf(c.png))) throw std::runtime_error("failed to encode PNG: " + path);

    png_init_io(c.png, c.fp);
    png_set_IHDR(c.png, c.info, w, h, 8,
                 channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(c.png, c.info);
    std::vector<png_bytep> rows(h);
    for (int y = 0; y < h; ++y)
        rows[y] = const_cast<png_bytep>(data.data() + static_cast<std::size_t>(y) * w * channels);
    png_write_image(c.png, rows.data());
    png_write_end(c.png, nullptr);
}

}  // namespace detail

inline void write_png_gray(const std::string& path, const ScalarField& f) {
    std::vector<unsigned char> data(f.size());
    for (std::size_t i = 0; i < f.size(); ++i)
        data[i] = static_cast<unsigned char>(std::clamp(f.values[i], 0.0, 255.0) + 0.5);
    detail::write_png_bytes(path, data, f.width, f.height, 1);
}

// Grayscale base with the contours drawn in a fixed color at 1 px width.
inline void write_contour_overlay_png(const std::string& path, const ScalarField& image,
                                      const std::vector<Contour>& contours,
                                      unsigned char r = 230, unsigned char g = 40,
                                      unsigned char b = 40) {
    const int w = image.width, h = image.height;
    const ScalarField base = rescale(image, 0.0, 255.0);
    std::vector<unsigned char> rgb(static_cast<std::size_t>(w) * h * 3);
    for (std::size_t i = 0; i < base.size(); ++i) {
        const unsigned char v = static_cast<unsigned char>(std::clamp(base.values[i], 0.0, 255.0) + 0.5);
        rgb[3 * i] = rgb[3 * i + 1] = rgb[3 * i + 2] = v;
    }
    auto plot = [&](double x, double y) {
        const int xi = static_cast<int>(x + 0.5), yi = static_cast<int>(y + 0.5);
        if (xi < 0 || xi >= w || yi < 0 || yi >= h) return;
        const std::size_t i = (static_cast<std::size_t>(yi) * w + xi) * 3;
        rgb[i] = r;
        rgb[i + 1] = g;
        rgb[i + 2] = b;
    };
    for (const Contour& c : contours) {
        const std::size_t n = c.points.size();
        if (n == 0) continue;
        const std::size_t last = c.closed ? n : n - 1;
        for (std::size_t i = 0; i < last; ++i) {
            const Vec2& a = c.points[i];
            const Vec2& q = c.points[(i + 1) % n];
            const double len = std::hypot(q.x - a.x, q.y - a.y);
            const int steps = std::max(1, static_cast<int>(len * 4.0));
            for (int s = 0; s <= steps; ++s) {
                const double t = static_cast<double>(s) / steps;
                plot(a.x + t * (q.x - a.x), a.y + t * (q.y - a.y));
            }
        }
    }
    detail::write_png_bytes(path, rgb, w, h, 3);
}

// Reads PGM or PNG based on the file's magic bytes.
inline ScalarField read_image(const std::string& path) {
    std::ifstream probe(path, std::ios::binary);
    if (!probe) throw std::runtime_error("cannot open: " + path);
    unsigned char magic[2] = {0, 0};
    probe.read(reinterpret_cast<char*>(magic), 2);
    probe.close();
    if (magic[0] == 'P' && magic[1] == '5') return read_pgm(path);
    if (magic[0] == 0x89 && magic[1] == 'P') return read_png(path);
    throw std::runtime_error("unrecognized image format: " + path);
}

// Plain-text polyline serialization: one contour per block, `x y` per line,
// blank-line separated.
inline std::string contours_to_text(const std::vector<Contour>& contours) {
    std::string out;
    char line[64];
    bool first = true;
    for (const Contour& c : contours) {
        if (!first) out += "\n";
        first = false;
        for (const Vec2& p : c.points) {
            std::snprintf(line, sizeof(line), "%.4f %.4f\n", p.x, p.y);
            out += line;
        }
    }
    return out;
}

}  // namespace geosnakes
