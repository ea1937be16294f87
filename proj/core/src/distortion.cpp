#include "ispforge/distortion.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "ispforge/errors.hpp"

namespace ispforge {

const char* to_string(DistortionKind kind) {
    switch (kind) {
        case DistortionKind::GaussianNoise: return "gaussian-noise";
        case DistortionKind::GaussianBlur: return "gaussian-blur";
        case DistortionKind::JpegSim: return "jpeg-sim";
        case DistortionKind::DownUpResize: return "down-up-resize";
        case DistortionKind::BrightnessJitter: return "brightness-jitter";
    }
    throw InvalidInput("unknown distortion kind");
}

DistortionKind distortion_kind_from_string(const std::string& name) {
    if (name == "gaussian-noise") return DistortionKind::GaussianNoise;
    if (name == "gaussian-blur") return DistortionKind::GaussianBlur;
    if (name == "jpeg-sim") return DistortionKind::JpegSim;
    if (name == "down-up-resize") return DistortionKind::DownUpResize;
    if (name == "brightness-jitter") return DistortionKind::BrightnessJitter;
    throw InvalidInput("unknown distortion kind: " + name);
}

DistortionSpec DistortionSpec::sample(DistortionKind kind, Severity severity, Rng& rng) {
    DistortionSpec spec;
    spec.kind = kind;
    spec.severity = severity;
    spec.seed = rng.next_u64();
    const bool high = severity == Severity::High;
    switch (kind) {
        case DistortionKind::GaussianNoise:
            spec.sigma = high ? rng.uniform(0.03, 0.08) : rng.uniform(0.01, 0.03);
            break;
        case DistortionKind::GaussianBlur:
            spec.sigma = high ? rng.uniform(1.0, 2.0) : rng.uniform(0.5, 1.0);
            break;
        case DistortionKind::JpegSim:
            spec.quality = high ? rng.uniform(25.0, 60.0) : rng.uniform(60.0, 85.0);
            break;
        case DistortionKind::DownUpResize:
            break;
        case DistortionKind::BrightnessJitter: {
            const double mag = high ? rng.uniform(0.15, 0.35) : rng.uniform(0.05, 0.15);
            spec.offset = rng.uniform() < 0.5 ? -mag : mag;
            break;
        }
    }
    return spec;
}

namespace {

void validate_spec(const DistortionSpec& spec) {
    switch (spec.kind) {
        case DistortionKind::GaussianNoise:
            if (spec.sigma < 0.0 || spec.sigma > 0.5)
                throw InvalidInput("gaussian-noise: sigma outside [0, 0.5]");
            break;
        case DistortionKind::GaussianBlur:
            if (spec.sigma <= 0.0 || spec.sigma > 4.0)
                throw InvalidInput("gaussian-blur: sigma outside (0, 4]");
            break;
        case DistortionKind::JpegSim:
            if (spec.quality < 1.0 || spec.quality > 100.0)
                throw InvalidInput("jpeg-sim: quality outside [1, 100]");
            break;
        case DistortionKind::DownUpResize:
            break;
        case DistortionKind::BrightnessJitter:
            if (spec.offset < -0.5 || spec.offset > 0.5)
                throw InvalidInput("brightness-jitter: offset outside [-0.5, 0.5]");
            break;
        default:
            throw InvalidInput("unknown distortion kind");
    }
}

std::vector<double> gaussian_kernel(double sigma) {
    const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
    std::vector<double> k(2 * radius + 1);
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        const double v = std::exp(-0.5 * (i * i) / (sigma * sigma));
        k[i + radius] = v;
        sum += v;
    }
    for (auto& v : k) v /= sum;
    return k;
}

// Standard luminance quantization table.
constexpr int kJpegQuant[64] = {
    16, 11, 10, 16, 24,  40,  51,  61,  12, 12, 14, 19, 26,  58,  60,  55,
    14, 13, 16, 24, 40,  57,  69,  56,  14, 17, 22, 29, 51,  87,  80,  62,
    18, 22, 37, 56, 68,  109, 103, 77,  24, 35, 55, 64, 81,  104, 113, 92,
    49, 64, 78, 87, 103, 121, 120, 101, 72, 92, 95, 98, 112, 100, 103, 99};

void dct8_tables(double basis[8][8]) {
    for (int u = 0; u < 8; ++u) {
        const double cu = u == 0 ? std::sqrt(1.0 / 8.0) : std::sqrt(2.0 / 8.0);
        for (int x = 0; x < 8; ++x)
            basis[u][x] = cu * std::cos((2 * x + 1) * u * 3.14159265358979323846 / 16.0);
    }
}

} // namespace

ImageRGB add_gaussian_noise(const ImageRGB& img, double sigma, std::uint64_t seed) {
    ImageRGB out = img;
    if (sigma > 0.0) {
        Rng rng(seed);
        for (auto& v : out.data) v = static_cast<float>(v + rng.normal(0.0, sigma));
    }
    out.clamp01();
    return out;
}

ImageRGB gaussian_blur(const ImageRGB& img, double sigma) {
    const auto k = gaussian_kernel(sigma);
    const int radius = static_cast<int>(k.size() / 2);
    const int w = img.width, h = img.height;
    ImageRGB tmp(w, h), out(w, h);
    for (int c = 0; c < 3; ++c) {
        // Horizontal pass.
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                double acc = 0.0;
                for (int i = -radius; i <= radius; ++i)
                    acc += k[i + radius] * img.at(c, y, mirror_index(x + i, w));
                tmp.at(c, y, x) = static_cast<float>(acc);
            }
        // Vertical pass.
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                double acc = 0.0;
                for (int i = -radius; i <= radius; ++i)
                    acc += k[i + radius] * tmp.at(c, mirror_index(y + i, h), x);
                out.at(c, y, x) = static_cast<float>(acc);
            }
    }
    out.clamp01();
    return out;
}

ImageRGB jpeg_simulate(const ImageRGB& img, double quality) {
    // libjpeg-style scaling of the base table.
    const double q = std::min(100.0, std::max(1.0, quality));
    const double scale = q < 50.0 ? 5000.0 / q : 200.0 - 2.0 * q;
    double quant[64];
    for (int i = 0; i < 64; ++i)
        quant[i] = std::min(255.0, std::max(1.0, std::floor((kJpegQuant[i] * scale + 50.0) / 100.0)));

    double basis[8][8];
    dct8_tables(basis);

    const int w = img.width, h = img.height;
    const int bw = (w + 7) / 8, bh = (h + 7) / 8;
    ImageRGB out(w, h);
    double block[8][8], coef[8][8], tmp[8][8];
    for (int c = 0; c < 3; ++c) {
        for (int by = 0; by < bh; ++by) {
            for (int bx = 0; bx < bw; ++bx) {
                // Gather a mirror-padded 8x8 block scaled to [-128, 127].
                for (int y = 0; y < 8; ++y)
                    for (int x = 0; x < 8; ++x)
                        block[y][x] =
                            img.at(c, mirror_index(by * 8 + y, h), mirror_index(bx * 8 + x, w)) * 255.0 - 128.0;
                // 2D DCT-II (rows then columns).
                for (int y = 0; y < 8; ++y)
                    for (int u = 0; u < 8; ++u) {
                        double acc = 0.0;
                        for (int x = 0; x < 8; ++x) acc += block[y][x] * basis[u][x];
                        tmp[y][u] = acc;
                    }
                for (int u = 0; u < 8; ++u)
                    for (int v = 0; v < 8; ++v) {
                        double acc = 0.0;
                        for (int y = 0; y < 8; ++y) acc += tmp[y][u] * basis[v][y];
                        coef[v][u] = acc;
                    }
                // Quantize / dequantize.
                for (int v = 0; v < 8; ++v)
                    for (int u = 0; u < 8; ++u) {
                        const double qv = quant[v * 8 + u];
                        coef[v][u] = std::round(coef[v][u] / qv) * qv;
                    }
                // Inverse DCT.
                for (int v = 0; v < 8; ++v)
                    for (int x = 0; x < 8; ++x) {
                        double acc = 0.0;
                        for (int u = 0; u < 8; ++u) acc += coef[v][u] * basis[u][x];
                        tmp[v][x] = acc;
                    }
                for (int x = 0; x < 8; ++x)
                    for (int y = 0; y < 8; ++y) {
                        double acc = 0.0;
                        for (int v = 0; v < 8; ++v) acc += tmp[v][x] * basis[v][y];
                        block[y][x] = acc;
                    }
                for (int y = 0; y < 8; ++y)
                    for (int x = 0; x < 8; ++x) {
                        const int iy = by * 8 + y, ix = bx * 8 + x;
                        if (iy < h && ix < w)
                            out.at(c, iy, ix) = static_cast<float>((block[y][x] + 128.0) / 255.0);
                    }
            }
        }
    }
    out.clamp01();
    return out;
}

ImageRGB resize_bilinear(const ImageRGB& img, int out_w, int out_h) {
    if (out_w < 1 || out_h < 1) throw InvalidInput("resize_bilinear: output size must be positive");
    ImageRGB out(out_w, out_h);
    const double sx = static_cast<double>(img.width) / out_w;
    const double sy = static_cast<double>(img.height) / out_h;
    for (int c = 0; c < 3; ++c)
        for (int y = 0; y < out_h; ++y) {
            const double fy = (y + 0.5) * sy - 0.5;
            const int y0 = static_cast<int>(std::floor(fy));
            const double wy = fy - y0;
            for (int x = 0; x < out_w; ++x) {
                const double fx = (x + 0.5) * sx - 0.5;
                const int x0 = static_cast<int>(std::floor(fx));
                const double wx = fx - x0;
                const double v00 = img.at(c, mirror_index(y0, img.height), mirror_index(x0, img.width));
                const double v01 = img.at(c, mirror_index(y0, img.height), mirror_index(x0 + 1, img.width));
                const double v10 = img.at(c, mirror_index(y0 + 1, img.height), mirror_index(x0, img.width));
                const double v11 = img.at(c, mirror_index(y0 + 1, img.height), mirror_index(x0 + 1, img.width));
                out.at(c, y, x) = static_cast<float>((1 - wy) * ((1 - wx) * v00 + wx * v01) +
                                                     wy * ((1 - wx) * v10 + wx * v11));
            }
        }
    out.clamp01();
    return out;
}

ImageRGB down_up_resize(const ImageRGB& img) {
    const int w2 = std::max(4, (img.width + 1) / 2);
    const int h2 = std::max(4, (img.height + 1) / 2);
    return resize_bilinear(resize_bilinear(img, w2, h2), img.width, img.height);
}

ImageRGB brightness_offset(const ImageRGB& img, double offset) {
    ImageRGB out = img;
    for (auto& v : out.data) v = static_cast<float>(v + offset);
    out.clamp01();
    return out;
}

ImageRGB distort(const ImageRGB& img, const DistortionSpec& spec) {
    validate(img);
    validate_spec(spec);
    switch (spec.kind) {
        case DistortionKind::GaussianNoise: return add_gaussian_noise(img, spec.sigma, spec.seed);
        case DistortionKind::GaussianBlur: return gaussian_blur(img, spec.sigma);
        case DistortionKind::JpegSim: return jpeg_simulate(img, spec.quality);
        case DistortionKind::DownUpResize: return down_up_resize(img);
        case DistortionKind::BrightnessJitter: return brightness_offset(img, spec.offset);
    }
    throw InvalidInput("unknown distortion kind");
}

} // namespace ispforge
