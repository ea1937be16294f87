#include "ispforge/image_io.hpp"

#include <png.h>

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <vector>

#include <json.hpp>

#include "ispforge/errors.hpp"

namespace ispforge {

namespace {

static_assert(std::endian::native == std::endian::little,
              "native raw container assumes a little-endian host");

constexpr std::uint32_t kContainerVersion = 1;

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

void write_u32(std::ofstream& out, std::uint32_t v) {
    out.write(reinterpret_cast<const char*>(&v), 4);
}

void write_plane(const char* magic, int width, int height, const float* data,
                 const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path);
    out.write(magic, 4);
    write_u32(out, kContainerVersion);
    write_u32(out, static_cast<std::uint32_t>(width));
    write_u32(out, static_cast<std::uint32_t>(height));
    out.write(reinterpret_cast<const char*>(data),
              static_cast<std::streamsize>(sizeof(float)) * width * height);
    if (!out) throw IoError("write failed: " + path);
}

struct PlaneFile {
    int width = 0;
    int height = 0;
    std::vector<float> data;
};

PlaneFile read_plane(const char* magic, const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path);

    auto fail_at = [&path](std::size_t offset, const std::string& what) -> IoError {
        return IoError(path + ": " + what + " at byte offset " + std::to_string(offset));
    };

    char got_magic[4];
    if (!in.read(got_magic, 4)) throw fail_at(0, "truncated header (magic)");
    if (std::memcmp(got_magic, magic, 4) != 0)
        throw fail_at(0, std::string("bad magic, expected \"") + magic + "\"");

    std::uint32_t version = 0, w = 0, h = 0;
    if (!in.read(reinterpret_cast<char*>(&version), 4)) throw fail_at(4, "truncated header (version)");
    if (version != kContainerVersion)
        throw fail_at(4, "unsupported container version " + std::to_string(version));
    if (!in.read(reinterpret_cast<char*>(&w), 4)) throw fail_at(8, "truncated header (width)");
    if (!in.read(reinterpret_cast<char*>(&h), 4)) throw fail_at(12, "truncated header (height)");
    if (w == 0 || h == 0 || w > (1u << 20) || h > (1u << 20))
        throw fail_at(8, "implausible dimensions " + std::to_string(w) + "x" + std::to_string(h));

    PlaneFile out;
    out.width = static_cast<int>(w);
    out.height = static_cast<int>(h);
    out.data.resize(static_cast<std::size_t>(w) * h);
    in.read(reinterpret_cast<char*>(out.data.data()),
            static_cast<std::streamsize>(sizeof(float)) * w * h);
    if (static_cast<std::size_t>(in.gcount()) != sizeof(float) * out.data.size())
        throw fail_at(16 + static_cast<std::size_t>(in.gcount()), "truncated payload");
    return out;
}

[[noreturn]] void png_error_handler(png_structp png, png_const_charp msg) {
    throw IoError(std::string("png: ") + msg +
                  (png_get_error_ptr(png)
                       ? " (" + *static_cast<const std::string*>(png_get_error_ptr(png)) + ")"
                       : ""));
}

void png_warning_handler(png_structp, png_const_charp) {}

} // namespace

void save_png(const ImageRGB& img, const std::string& path) {
    validate(img);
    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) throw IoError("cannot open for writing: " + path);

    std::string ctx = path;
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &ctx, png_error_handler,
                                              png_warning_handler);
    if (!png) throw IoError("png: failed to allocate write struct");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw IoError("png: failed to allocate info struct");
    }

    try {
        png_init_io(png, fp.get());
        png_set_IHDR(png, info, img.width, img.height, 8, PNG_COLOR_TYPE_RGB,
                     PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
        png_write_info(png, info);

        std::vector<png_byte> row(static_cast<std::size_t>(img.width) * 3);
        for (int y = 0; y < img.height; ++y) {
            for (int x = 0; x < img.width; ++x)
                for (int c = 0; c < 3; ++c) {
                    const float v = img.at(c, y, x);
                    row[x * 3 + c] = static_cast<png_byte>(std::lround(v * 255.0f));
                }
            png_write_row(png, row.data());
        }
        png_write_end(png, nullptr);
    } catch (...) {
        png_destroy_write_struct(&png, &info);
        throw;
    }
    png_destroy_write_struct(&png, &info);
}

ImageRGB load_png(const std::string& path) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) throw IoError("cannot open: " + path);

    png_byte header[8];
    if (std::fread(header, 1, 8, fp.get()) != 8 || png_sig_cmp(header, 0, 8) != 0)
        throw IoError(path + ": not a PNG file (bad signature at byte offset 0)");
    std::rewind(fp.get());

    std::string ctx = path;
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &ctx, png_error_handler,
                                             png_warning_handler);
    if (!png) throw IoError("png: failed to allocate read struct");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw IoError("png: failed to allocate info struct");
    }

    ImageRGB img;
    try {
        png_init_io(png, fp.get());
        png_read_info(png, info);

        const int bit_depth = png_get_bit_depth(png, info);
        const int color_type = png_get_color_type(png, info);
        if (bit_depth == 16)
            throw IoError(path + ": unsupported bit depth 16 (expected 8-bit RGB)");
        if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
        if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA)
            png_set_gray_to_rgb(png);
        if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
        png_set_strip_alpha(png);
        png_read_update_info(png, info);

        const int w = static_cast<int>(png_get_image_width(png, info));
        const int h = static_cast<int>(png_get_image_height(png, info));
        img = ImageRGB(w, h);
        std::vector<png_byte> row(png_get_rowbytes(png, info));
        for (int y = 0; y < h; ++y) {
            png_read_row(png, row.data(), nullptr);
            for (int x = 0; x < w; ++x)
                for (int c = 0; c < 3; ++c)
                    img.at(c, y, x) = static_cast<float>(row[x * 3 + c]) / 255.0f;
        }
        png_read_end(png, nullptr);
    } catch (...) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw;
    }
    png_destroy_read_struct(&png, &info, nullptr);
    validate(img);
    return img;
}

void save_raw(const BayerRaw& raw, const std::string& path) {
    validate(raw);
    write_plane("BRAW", raw.width, raw.height, raw.data.data(), path);
}

BayerRaw load_raw(const std::string& path) {
    PlaneFile plane = read_plane("BRAW", path);
    BayerRaw raw;
    raw.width = plane.width;
    raw.height = plane.height;
    raw.data = std::move(plane.data);
    validate(raw);
    return raw;
}

void save_depth(const DepthMap& depth, const std::string& path) {
    write_plane("DPTH", depth.width, depth.height, depth.values.data(), path);
}

DepthMap load_depth(const std::string& path) {
    PlaneFile plane = read_plane("DPTH", path);
    DepthMap depth;
    depth.width = plane.width;
    depth.height = plane.height;
    depth.values = std::move(plane.data);
    for (float v : depth.values)
        if (!std::isfinite(v) || v < 0.0f)
            throw IoError(path + ": depth values must be finite and non-negative");
    return depth;
}

void save_detections(const DetectionSet& det, const std::string& path) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& b : det.boxes)
        arr.push_back({{"x", b.x}, {"y", b.y}, {"w", b.w}, {"h", b.h}, {"cls", b.cls}, {"score", b.score}});
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << arr.dump(2) << "\n";
}

DetectionSet load_detections(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open: " + path);
    nlohmann::json arr;
    try {
        in >> arr;
    } catch (const nlohmann::json::exception& e) {
        throw IoError(path + ": invalid detection JSON: " + e.what());
    }
    if (!arr.is_array()) throw IoError(path + ": detection file must be a JSON array");
    DetectionSet det;
    for (const auto& item : arr) {
        DetectionBox b;
        b.x = item.at("x").get<double>();
        b.y = item.at("y").get<double>();
        b.w = item.at("w").get<double>();
        b.h = item.at("h").get<double>();
        b.cls = item.at("cls").get<int>();
        b.score = item.at("score").get<double>();
        if (b.w <= 0.0 || b.h <= 0.0) throw IoError(path + ": detection box with non-positive size");
        det.boxes.push_back(b);
    }
    return det;
}

} // namespace ispforge
