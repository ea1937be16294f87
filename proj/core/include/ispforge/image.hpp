#pragma once

#include <cstddef>
#include <vector>

namespace ispforge {

/// Planar RGB image, values in [0,1]. Layout: channel-major, row-major within
/// a channel (data[c*w*h + y*w + x]). Minimum size 8x8.
struct ImageRGB {
    int width = 0;
    int height = 0;
    std::vector<float> data;

    ImageRGB() = default;
    ImageRGB(int w, int h) : width(w), height(h), data(static_cast<std::size_t>(3) * w * h, 0.0f) {}

    static ImageRGB constant(int w, int h, float r, float g, float b);

    float& at(int c, int y, int x) { return data[plane_offset(c) + static_cast<std::size_t>(y) * width + x]; }
    float at(int c, int y, int x) const { return data[plane_offset(c) + static_cast<std::size_t>(y) * width + x]; }

    float* plane(int c) { return data.data() + plane_offset(c); }
    const float* plane(int c) const { return data.data() + plane_offset(c); }

    std::size_t plane_offset(int c) const { return static_cast<std::size_t>(c) * width * height; }
    std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }

    void clamp01();
};

/// Single-channel gray plane (luminance, gradients, Bayer helpers).
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<float> data;

    GrayImage() = default;
    GrayImage(int w, int h) : width(w), height(h), data(static_cast<std::size_t>(w) * h, 0.0f) {}

    float& at(int y, int x) { return data[static_cast<std::size_t>(y) * width + x]; }
    float at(int y, int x) const { return data[static_cast<std::size_t>(y) * width + x]; }
};

/// Mosaiced sensor image, fixed RGGB layout, even dimensions, values in [0,1].
/// Channel at site (x,y): R when (even row, even col), G on the two mixed
/// parities, B when (odd row, odd col).
struct BayerRaw {
    int width = 0;
    int height = 0;
    std::vector<float> data;

    BayerRaw() = default;
    BayerRaw(int w, int h) : width(w), height(h), data(static_cast<std::size_t>(w) * h, 0.0f) {}

    float& at(int y, int x) { return data[static_cast<std::size_t>(y) * width + x]; }
    float at(int y, int x) const { return data[static_cast<std::size_t>(y) * width + x]; }

    /// 0 = R, 1 = G, 2 = B at the given site.
    static int channel_at(int y, int x) {
        const bool odd_row = (y & 1) != 0;
        const bool odd_col = (x & 1) != 0;
        if (!odd_row && !odd_col) return 0;
        if (odd_row && odd_col) return 2;
        return 1;
    }
};

/// Throws InvalidInput unless the image satisfies its type invariants
/// (dimensions, finiteness, value range).
void validate(const ImageRGB& img);
void validate(const BayerRaw& raw);

/// Mirror (reflect-without-repeat) index into [0, n): -1 -> 1, n -> n-2.
inline int mirror_index(int i, int n) {
    if (n == 1) return 0;
    const int period = 2 * (n - 1);
    int m = i % period;
    if (m < 0) m += period;
    return m < n ? m : period - m;
}

} // namespace ispforge
