#include "ispforge/tools_traditional.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "ispforge/errors.hpp"
#include "ispforge/features.hpp"

namespace ispforge {

namespace {

constexpr int kBins = 256;

std::array<double, kBins> luminance_histogram(const GrayImage& y) {
    std::array<double, kBins> hist{};
    for (float v : y.data) {
        const int b = std::min(kBins - 1, static_cast<int>(v * kBins));
        hist[b] += 1.0;
    }
    return hist;
}

/// Rescale RGB by a per-pixel luminance ratio, preserving chromaticity.
ImageRGB remap_luminance(const ImageRGB& img, const GrayImage& y_old,
                         const std::vector<float>& y_new) {
    ImageRGB out(img.width, img.height);
    const std::size_t n = img.pixel_count();
    for (std::size_t i = 0; i < n; ++i) {
        const float y = y_old.data[i];
        const float ratio = y > 1e-6f ? y_new[i] / y : 0.0f;
        for (int c = 0; c < 3; ++c)
            out.data[i + c * n] = y > 1e-6f ? img.data[i + c * n] * ratio : y_new[i];
    }
    out.clamp01();
    return out;
}

} // namespace

ImageRGB apply_brightness(const ImageRGB& img, double offset) {
    validate(img);
    if (offset < -1.0 || offset > 1.0) throw InvalidInput("apply_brightness: offset outside [-1,1]");
    ImageRGB out = img;
    for (auto& v : out.data) v = static_cast<float>(v + offset);
    out.clamp01();
    return out;
}

ImageRGB apply_gamma(const ImageRGB& img, double gamma) {
    validate(img);
    if (gamma <= 0.0 || gamma > 8.0) throw InvalidInput("apply_gamma: gamma outside (0,8]");
    ImageRGB out = img;
    for (auto& v : out.data) v = static_cast<float>(std::pow(static_cast<double>(v), gamma));
    out.clamp01();
    return out;
}

ImageRGB hist_equalize(const ImageRGB& img) {
    validate(img);
    const GrayImage y = to_gray(img);
    const auto hist = luminance_histogram(y);
    const double total = static_cast<double>(y.data.size());

    // CDF including the value's own bin: a two-level 50/50 image maps its
    // levels to 0.5 and 1.0.
    std::array<double, kBins> cdf{};
    double run = 0.0;
    for (int b = 0; b < kBins; ++b) {
        run += hist[b];
        cdf[b] = run / total;
    }

    std::vector<float> y_new(y.data.size());
    for (std::size_t i = 0; i < y.data.size(); ++i) {
        const int b = std::min(kBins - 1, static_cast<int>(y.data[i] * kBins));
        y_new[i] = static_cast<float>(cdf[b]);
    }
    return remap_luminance(img, y, y_new);
}

ImageRGB clahe(const ImageRGB& img, int tiles, double clip_limit) {
    validate(img);
    if (tiles < 1 || tiles > 64) throw InvalidInput("clahe: tiles outside [1,64]");
    if (clip_limit < 1.0) throw InvalidInput("clahe: clip limit must be >= 1");
    const GrayImage y = to_gray(img);
    const int w = img.width, h = img.height;
    const int tx = std::min(tiles, w), ty = std::min(tiles, h);

    // Per-tile clipped histograms. Excess above clip is redistributed
    // uniformly until (up to a few passes) no bin exceeds the limit.
    std::vector<std::array<double, kBins>> tile_hist(static_cast<std::size_t>(tx) * ty);
    std::vector<double> tile_total(static_cast<std::size_t>(tx) * ty, 0.0);
    auto tile_x0 = [&](int t) { return static_cast<int>(static_cast<std::int64_t>(t) * w / tx); };
    auto tile_y0 = [&](int t) { return static_cast<int>(static_cast<std::int64_t>(t) * h / ty); };

    for (int tj = 0; tj < ty; ++tj)
        for (int ti = 0; ti < tx; ++ti) {
            auto& hist = tile_hist[static_cast<std::size_t>(tj) * tx + ti];
            hist.fill(0.0);
            double count = 0.0;
            for (int yy = tile_y0(tj); yy < tile_y0(tj + 1); ++yy)
                for (int xx = tile_x0(ti); xx < tile_x0(ti + 1); ++xx) {
                    const int b = std::min(kBins - 1, static_cast<int>(y.at(yy, xx) * kBins));
                    hist[b] += 1.0;
                    count += 1.0;
                }
            tile_total[static_cast<std::size_t>(tj) * tx + ti] = count;

            const double clip = clip_limit * count / kBins;
            for (int pass = 0; pass < 16; ++pass) {
                double excess = 0.0;
                for (auto& v : hist)
                    if (v > clip) {
                        excess += v - clip;
                        v = clip;
                    }
                if (excess <= count * 1e-12) break;
                const double share = excess / kBins;
                for (auto& v : hist) v += share;
            }
        }

    // Continuous (piecewise-linear) CDF per tile so that a uniform histogram
    // maps values onto themselves.
    auto tile_map = [&](int ti, int tj, float v) -> double {
        const auto& hist = tile_hist[static_cast<std::size_t>(tj) * tx + ti];
        const double total = tile_total[static_cast<std::size_t>(tj) * tx + ti];
        const double pos = std::min(static_cast<double>(kBins), static_cast<double>(v) * kBins);
        const int b = std::min(kBins - 1, static_cast<int>(pos));
        double below = 0.0;
        for (int i = 0; i < b; ++i) below += hist[i];
        const double frac = pos - b;
        return (below + frac * hist[b]) / total;
    };

    // Bilinear interpolation between the four nearest tile mappings.
    std::vector<float> y_new(y.data.size());
    for (int yy = 0; yy < h; ++yy) {
        const double fy = (static_cast<double>(yy) + 0.5) * ty / h - 0.5;
        const int j0 = std::clamp(static_cast<int>(std::floor(fy)), 0, ty - 1);
        const int j1 = std::min(j0 + 1, ty - 1);
        const double wy = std::clamp(fy - j0, 0.0, 1.0);
        for (int xx = 0; xx < w; ++xx) {
            const double fx = (static_cast<double>(xx) + 0.5) * tx / w - 0.5;
            const int i0 = std::clamp(static_cast<int>(std::floor(fx)), 0, tx - 1);
            const int i1 = std::min(i0 + 1, tx - 1);
            const double wx = std::clamp(fx - i0, 0.0, 1.0);
            const float v = y.at(yy, xx);
            const double m00 = tile_map(i0, j0, v);
            const double m01 = tile_map(i1, j0, v);
            const double m10 = tile_map(i0, j1, v);
            const double m11 = tile_map(i1, j1, v);
            y_new[static_cast<std::size_t>(yy) * w + xx] = static_cast<float>(
                (1 - wy) * ((1 - wx) * m00 + wx * m01) + wy * ((1 - wx) * m10 + wx * m11));
        }
    }
    return remap_luminance(img, y, y_new);
}

void rgb_to_hsv(float r, float g, float b, float& h, float& s, float& v) {
    const float mx = std::max({r, g, b});
    const float mn = std::min({r, g, b});
    const float d = mx - mn;
    v = mx;
    s = mx > 0.0f ? d / mx : 0.0f;
    if (d <= 0.0f) {
        h = 0.0f;
        return;
    }
    if (mx == r)
        h = 60.0f * std::fmod((g - b) / d, 6.0f);
    else if (mx == g)
        h = 60.0f * ((b - r) / d + 2.0f);
    else
        h = 60.0f * ((r - g) / d + 4.0f);
    if (h < 0.0f) h += 360.0f;
}

void hsv_to_rgb(float h, float s, float v, float& r, float& g, float& b) {
    const float c = v * s;
    const float hp = h / 60.0f;
    const float x = c * (1.0f - std::abs(std::fmod(hp, 2.0f) - 1.0f));
    float r1 = 0, g1 = 0, b1 = 0;
    if (hp < 1) {
        r1 = c; g1 = x;
    } else if (hp < 2) {
        r1 = x; g1 = c;
    } else if (hp < 3) {
        g1 = c; b1 = x;
    } else if (hp < 4) {
        g1 = x; b1 = c;
    } else if (hp < 5) {
        r1 = x; b1 = c;
    } else {
        r1 = c; b1 = x;
    }
    const float m = v - c;
    r = r1 + m;
    g = g1 + m;
    b = b1 + m;
}

ImageRGB hue_shift(const ImageRGB& img, double degrees) {
    validate(img);
    ImageRGB out(img.width, img.height);
    const std::size_t n = img.pixel_count();
    for (std::size_t i = 0; i < n; ++i) {
        float h, s, v;
        rgb_to_hsv(img.data[i], img.data[i + n], img.data[i + 2 * n], h, s, v);
        h = static_cast<float>(std::fmod(h + degrees + 360.0, 360.0));
        hsv_to_rgb(h, s, v, out.data[i], out.data[i + n], out.data[i + 2 * n]);
    }
    out.clamp01();
    return out;
}

ImageRGB saturation_scale(const ImageRGB& img, double factor) {
    validate(img);
    if (factor < 0.0 || factor > 4.0) throw InvalidInput("saturation_scale: factor outside [0,4]");
    ImageRGB out(img.width, img.height);
    const std::size_t n = img.pixel_count();
    for (std::size_t i = 0; i < n; ++i) {
        float h, s, v;
        rgb_to_hsv(img.data[i], img.data[i + n], img.data[i + 2 * n], h, s, v);
        s = std::min(1.0f, static_cast<float>(s * factor));
        hsv_to_rgb(h, s, v, out.data[i], out.data[i + n], out.data[i + 2 * n]);
    }
    out.clamp01();
    return out;
}

ImageRGB grayworld_wb(const ImageRGB& img) {
    validate(img);
    const std::size_t n = img.pixel_count();
    double mean[3] = {0, 0, 0};
    for (int c = 0; c < 3; ++c) {
        const float* p = img.plane(c);
        for (std::size_t i = 0; i < n; ++i) mean[c] += p[i];
        mean[c] /= static_cast<double>(n);
    }
    const double target = (mean[0] + mean[1] + mean[2]) / 3.0;
    ImageRGB out = img;
    for (int c = 0; c < 3; ++c) {
        if (mean[c] < 1e-4) continue;
        const float gain = static_cast<float>(target / mean[c]);
        float* p = out.plane(c);
        for (std::size_t i = 0; i < n; ++i) p[i] *= gain;
    }
    out.clamp01();
    return out;
}

namespace {

ImageRGB convolve_fixed(const ImageRGB& img, const std::vector<double>& kernel, int radius) {
    const int w = img.width, h = img.height;
    const int k = 2 * radius + 1;
    ImageRGB out(w, h);
    for (int c = 0; c < 3; ++c)
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                double acc = 0.0;
                for (int dy = -radius; dy <= radius; ++dy)
                    for (int dx = -radius; dx <= radius; ++dx)
                        acc += kernel[static_cast<std::size_t>(dy + radius) * k + (dx + radius)] *
                               img.at(c, mirror_index(y + dy, h), mirror_index(x + dx, w));
                out.at(c, y, x) = static_cast<float>(acc);
            }
    out.clamp01();
    return out;
}

std::vector<double> gaussian_kernel_2d(int radius, double sigma) {
    const int k = 2 * radius + 1;
    std::vector<double> kernel(static_cast<std::size_t>(k) * k);
    double sum = 0.0;
    for (int dy = -radius; dy <= radius; ++dy)
        for (int dx = -radius; dx <= radius; ++dx) {
            const double v = std::exp(-0.5 * (dx * dx + dy * dy) / (sigma * sigma));
            kernel[static_cast<std::size_t>(dy + radius) * k + (dx + radius)] = v;
            sum += v;
        }
    for (auto& v : kernel) v /= sum;
    return kernel;
}

} // namespace

ImageRGB gaussian_filter(const ImageRGB& img) {
    validate(img);
    return convolve_fixed(img, gaussian_kernel_2d(2, 1.0), 2);
}

ImageRGB box_filter(const ImageRGB& img) {
    validate(img);
    return convolve_fixed(img, std::vector<double>(9, 1.0 / 9.0), 1);
}

ImageRGB bilateral_filter(const ImageRGB& img) {
    validate(img);
    constexpr int kRadius = 2;
    constexpr double kSigmaS = 2.0;
    constexpr double kSigmaR = 0.1;
    const int w = img.width, h = img.height;
    double spatial[5][5];
    for (int dy = -kRadius; dy <= kRadius; ++dy)
        for (int dx = -kRadius; dx <= kRadius; ++dx)
            spatial[dy + kRadius][dx + kRadius] =
                std::exp(-0.5 * (dx * dx + dy * dy) / (kSigmaS * kSigmaS));

    ImageRGB out(w, h);
    for (int c = 0; c < 3; ++c)
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                const double center = img.at(c, y, x);
                double acc = 0.0, norm = 0.0;
                for (int dy = -kRadius; dy <= kRadius; ++dy)
                    for (int dx = -kRadius; dx <= kRadius; ++dx) {
                        const double v = img.at(c, mirror_index(y + dy, h), mirror_index(x + dx, w));
                        const double dr = v - center;
                        const double wgt = spatial[dy + kRadius][dx + kRadius] *
                                           std::exp(-0.5 * dr * dr / (kSigmaR * kSigmaR));
                        acc += wgt * v;
                        norm += wgt;
                    }
                out.at(c, y, x) = static_cast<float>(acc / norm);
            }
    out.clamp01();
    return out;
}

ImageRGB sharpen(const ImageRGB& img) {
    validate(img);
    const ImageRGB blurred = convolve_fixed(img, gaussian_kernel_2d(2, 1.0), 2);
    ImageRGB out = img;
    for (std::size_t i = 0; i < out.data.size(); ++i)
        out.data[i] = img.data[i] + 0.5f * (img.data[i] - blurred.data[i]);
    out.clamp01();
    return out;
}

ImageRGB stop_tool(const ImageRGB& img) {
    validate(img);
    return img;
}

} // namespace ispforge
