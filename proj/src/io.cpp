#include "rflow/io.hpp"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <memory>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace rflow {

namespace {

constexpr float kFloMagic = 202021.25f;

void put_u32_le(std::ostream& out, std::uint32_t v) {
    const char bytes[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                           static_cast<char>((v >> 16) & 0xff),
                           static_cast<char>((v >> 24) & 0xff)};
    out.write(bytes, 4);
}

void put_f32_le(std::ostream& out, float v) { put_u32_le(out, std::bit_cast<std::uint32_t>(v)); }

bool get_u32_le(std::istream& in, std::uint32_t* v) {
    unsigned char bytes[4];
    if (!in.read(reinterpret_cast<char*>(bytes), 4)) return false;
    *v = static_cast<std::uint32_t>(bytes[0]) | (static_cast<std::uint32_t>(bytes[1]) << 8) |
         (static_cast<std::uint32_t>(bytes[2]) << 16) |
         (static_cast<std::uint32_t>(bytes[3]) << 24);
    return true;
}

bool get_f32_le(std::istream& in, float* v) {
    std::uint32_t bits;
    if (!get_u32_le(in, &bits)) return false;
    *v = std::bit_cast<float>(bits);
    return true;
}

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

[[noreturn]] void fail(const std::string& what, const std::string& path) {
    throw std::runtime_error(what + ": " + path);
}

}  // namespace

Image8 read_png(const std::string& path) {
    FilePtr file(std::fopen(path.c_str(), "rb"));
    if (!file) fail("cannot open PNG", path);

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) fail("libpng init failed", path);
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        fail("libpng init failed", path);
    }
    Image8 image;
    std::vector<png_bytep> row_ptrs;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail("PNG decode error", path);
    }
    png_init_io(png, file.get());
    png_read_info(png, info);

    const png_uint_32 width = png_get_image_width(png, info);
    const png_uint_32 height = png_get_image_height(png, info);
    const int color_type = png_get_color_type(png, info);
    const int bit_depth = png_get_bit_depth(png, info);

    if (bit_depth == 16) png_set_strip_16(png);
    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (color_type & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
    png_read_update_info(png, info);

    const int channels = png_get_channels(png, info);
    if (channels != 1 && channels != 3) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail("unsupported PNG channel count", path);
    }

    image = Image8(static_cast<int>(width), static_cast<int>(height), channels);
    row_ptrs.resize(height);
    for (png_uint_32 i = 0; i < height; ++i) {
        row_ptrs[i] = image.data.data() + static_cast<std::size_t>(i) * width * channels;
    }
    png_read_image(png, row_ptrs.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return image;
}

Image8 read_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("cannot open PGM", path);

    std::string magic;
    in >> magic;
    if (magic != "P5" && magic != "P2") fail("not a PGM file", path);

    auto next_token = [&in]() {
        std::string tok;
        while (in >> tok) {
            if (tok[0] == '#') {
                std::string rest;
                std::getline(in, rest);
                continue;
            }
            return tok;
        }
        return std::string();
    };

    const std::string ws = next_token();
    const std::string hs = next_token();
    const std::string ms = next_token();
    if (ws.empty() || hs.empty() || ms.empty()) fail("truncated PGM header", path);
    const int width = std::stoi(ws);
    const int height = std::stoi(hs);
    const int maxval = std::stoi(ms);
    if (width <= 0 || height <= 0) fail("bad PGM dimensions", path);
    if (maxval <= 0 || maxval > 255) fail("unsupported PGM maxval", path);

    Image8 image(width, height, 1);
    if (magic == "P5") {
        in.get();  // single whitespace after maxval
        in.read(reinterpret_cast<char*>(image.data.data()),
                static_cast<std::streamsize>(image.byte_count()));
        if (in.gcount() != static_cast<std::streamsize>(image.byte_count())) {
            fail("truncated PGM payload", path);
        }
    } else {
        for (std::size_t p = 0; p < image.byte_count(); ++p) {
            int v;
            if (!(in >> v) || v < 0 || v > maxval) fail("bad PGM sample", path);
            image.data[p] = static_cast<std::uint8_t>(v);
        }
    }
    return image;
}

void write_png(const Image8& image, const std::string& path) {
    if (image.channels != 1 && image.channels != 3) {
        throw std::invalid_argument("write_png expects 1 or 3 channels");
    }
    FilePtr file(std::fopen(path.c_str(), "wb"));
    if (!file) fail("cannot open for writing", path);

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) fail("libpng init failed", path);
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        fail("libpng init failed", path);
    }
    std::vector<png_bytep> row_ptrs(image.height);
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        fail("PNG encode error", path);
    }
    png_init_io(png, file.get());
    png_set_IHDR(png, info, image.width, image.height, 8,
                 image.channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int i = 0; i < image.height; ++i) {
        row_ptrs[i] = const_cast<png_bytep>(image.data.data() +
                                            static_cast<std::size_t>(i) * image.width *
                                                image.channels);
    }
    png_write_image(png, row_ptrs.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

void write_png(const Frame& frame, const std::string& path) {
    Image8 image(frame.width, frame.height, 1);
    const std::size_t n = frame.pixel_count();
    for (std::size_t p = 0; p < n; ++p) {
        const double clamped = std::clamp(static_cast<double>(frame.data[p]), 0.0, 255.0);
        image.data[p] = static_cast<std::uint8_t>(std::round(clamped));  // half away from zero
    }
    write_png(image, path);
}

void write_pgm(const Image8& image, const std::string& path) {
    if (image.channels != 1) throw std::invalid_argument("write_pgm expects 1 channel");
    std::ofstream out(path, std::ios::binary);
    if (!out) fail("cannot open for writing", path);
    out << "P5\n" << image.width << " " << image.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(image.data.data()),
              static_cast<std::streamsize>(image.byte_count()));
    if (!out) fail("pgm write failed", path);
}

LoadedFrame load_frame(const std::string& path) {
    const auto dot = path.find_last_of('.');
    const std::string ext = dot == std::string::npos ? "" : path.substr(dot);

    Image8 image;
    if (ext == ".pgm" || ext == ".PGM") {
        image = read_pgm(path);
    } else {
        image = read_png(path);
    }
    LoadedFrame loaded;
    if (image.channels == 3) {
        loaded.frame = to_grayscale(image);
        loaded.was_color = true;
    } else {
        loaded.frame = Frame(image.width, image.height);
        const std::size_t n = loaded.frame.pixel_count();
        for (std::size_t p = 0; p < n; ++p) {
            loaded.frame.data[p] = static_cast<float>(image.data[p]);
        }
    }
    return loaded;
}

void write_flo(const FlowField& flow, std::ostream& out) {
    put_f32_le(out, kFloMagic);
    put_u32_le(out, static_cast<std::uint32_t>(flow.width));
    put_u32_le(out, static_cast<std::uint32_t>(flow.height));
    const std::size_t n = flow.pixel_count();
    for (std::size_t p = 0; p < n; ++p) {
        put_f32_le(out, flow.u[p]);
        put_f32_le(out, flow.v[p]);
    }
    if (!out) throw std::runtime_error("flo write failed");
}

void write_flo(const FlowField& flow, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail("cannot open for writing", path);
    write_flo(flow, out);
}

FlowField read_flo(std::istream& in) {
    float magic;
    if (!get_f32_le(in, &magic)) throw std::runtime_error("flo: truncated header");
    if (magic != kFloMagic) throw std::runtime_error("flo: bad magic");
    std::uint32_t wu, hu;
    if (!get_u32_le(in, &wu) || !get_u32_le(in, &hu)) {
        throw std::runtime_error("flo: truncated header");
    }
    const int width = static_cast<std::int32_t>(wu);
    const int height = static_cast<std::int32_t>(hu);
    if (width <= 0 || height <= 0) throw std::runtime_error("flo: non-positive dimensions");

    FlowField flow(width, height);
    const std::size_t n = flow.pixel_count();
    for (std::size_t p = 0; p < n; ++p) {
        if (!get_f32_le(in, &flow.u[p]) || !get_f32_le(in, &flow.v[p])) {
            throw std::runtime_error("flo: truncated payload");
        }
    }
    return flow;
}

FlowField read_flo(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("cannot open flo", path);
    return read_flo(in);
}

}  // namespace rflow
