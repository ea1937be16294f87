#include "ispforge/raw_pipeline.hpp"

#include <cmath>

#include "ispforge/errors.hpp"
#include "ispforge/rng.hpp"

namespace ispforge {

ColorMatrix ColorMatrix::inverse() const {
    const auto& a = m;
    const double det = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
                       a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
                       a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
    if (std::abs(det) < 1e-12) throw InvalidInput("ColorMatrix: singular matrix has no inverse");
    const double inv_det = 1.0 / det;
    ColorMatrix out;
    out.m[0][0] = (a[1][1] * a[2][2] - a[1][2] * a[2][1]) * inv_det;
    out.m[0][1] = (a[0][2] * a[2][1] - a[0][1] * a[2][2]) * inv_det;
    out.m[0][2] = (a[0][1] * a[1][2] - a[0][2] * a[1][1]) * inv_det;
    out.m[1][0] = (a[1][2] * a[2][0] - a[1][0] * a[2][2]) * inv_det;
    out.m[1][1] = (a[0][0] * a[2][2] - a[0][2] * a[2][0]) * inv_det;
    out.m[1][2] = (a[0][2] * a[1][0] - a[0][0] * a[1][2]) * inv_det;
    out.m[2][0] = (a[1][0] * a[2][1] - a[1][1] * a[2][0]) * inv_det;
    out.m[2][1] = (a[0][1] * a[2][0] - a[0][0] * a[2][1]) * inv_det;
    out.m[2][2] = (a[0][0] * a[1][1] - a[0][1] * a[1][0]) * inv_det;
    return out;
}

bool ColorMatrix::is_identity() const {
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (m[i][j] != (i == j ? 1.0 : 0.0)) return false;
    return true;
}

double srgb_to_linear(double v) {
    if (v <= 0.04045) return v / 12.92;
    return std::pow((v + 0.055) / 1.055, 2.4);
}

double linear_to_srgb(double v) {
    if (v <= 0.0031308) return v * 12.92;
    return 1.055 * std::pow(v, 1.0 / 2.4) - 0.055;
}

ImageRGB demosaic_bilinear(const BayerRaw& raw) {
    validate(raw);
    const int w = raw.width;
    const int h = raw.height;
    ImageRGB out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const int native = BayerRaw::channel_at(y, x);
            for (int c = 0; c < 3; ++c) {
                if (c == native) {
                    out.at(c, y, x) = raw.at(y, x);
                    continue;
                }
                // Average same-channel sites in the mirrored 3x3 neighborhood.
                double sum = 0.0;
                int count = 0;
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        const int sy = mirror_index(y + dy, h);
                        const int sx = mirror_index(x + dx, w);
                        if (BayerRaw::channel_at(y + dy, x + dx) == c) {
                            sum += raw.at(sy, sx);
                            ++count;
                        }
                    }
                }
                out.at(c, y, x) = count > 0 ? static_cast<float>(sum / count) : 0.0f;
            }
        }
    }
    out.clamp01();
    return out;
}

BayerRaw rgb_to_raw(const ImageRGB& img, double noise_sigma, std::uint64_t seed,
                    const ColorMatrix& ccm) {
    validate(img);
    if (noise_sigma < 0.0) throw InvalidInput("rgb_to_raw: noise_sigma must be >= 0");
    if ((img.width & 1) != 0 || (img.height & 1) != 0)
        throw InvalidInput("rgb_to_raw: image dimensions must be even for RGGB mosaicing");

    const ColorMatrix inv = ccm.inverse();
    const int w = img.width;
    const int h = img.height;
    BayerRaw raw(w, h);
    Rng rng(seed);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double r = srgb_to_linear(img.at(0, y, x));
            const double g = srgb_to_linear(img.at(1, y, x));
            const double b = srgb_to_linear(img.at(2, y, x));
            const int c = BayerRaw::channel_at(y, x);
            double v = inv.m[c][0] * r + inv.m[c][1] * g + inv.m[c][2] * b;
            if (noise_sigma > 0.0) v += rng.normal(0.0, noise_sigma);
            raw.at(y, x) = static_cast<float>(std::min(1.0, std::max(0.0, v)));
        }
    }
    return raw;
}

ImageRGB apply_forward_correction(const ImageRGB& linear_img, const ColorMatrix& ccm) {
    validate(linear_img);
    ImageRGB out(linear_img.width, linear_img.height);
    const std::size_t n = linear_img.pixel_count();
    for (std::size_t i = 0; i < n; ++i) {
        const double r = linear_img.data[i];
        const double g = linear_img.data[i + n];
        const double b = linear_img.data[i + 2 * n];
        for (int c = 0; c < 3; ++c) {
            const double v = ccm.m[c][0] * r + ccm.m[c][1] * g + ccm.m[c][2] * b;
            out.data[i + c * n] = static_cast<float>(linear_to_srgb(std::min(1.0, std::max(0.0, v))));
        }
    }
    out.clamp01();
    return out;
}

} // namespace ispforge
