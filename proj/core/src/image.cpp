#include "ispforge/image.hpp"

#include <algorithm>
#include <cmath>

#include "ispforge/errors.hpp"

namespace ispforge {

ImageRGB ImageRGB::constant(int w, int h, float r, float g, float b) {
    ImageRGB img(w, h);
    const std::size_t n = img.pixel_count();
    std::fill_n(img.plane(0), n, r);
    std::fill_n(img.plane(1), n, g);
    std::fill_n(img.plane(2), n, b);
    return img;
}

void ImageRGB::clamp01() {
    for (auto& v : data) v = std::min(1.0f, std::max(0.0f, v));
}

void validate(const ImageRGB& img) {
    if (img.width < 8 || img.height < 8)
        throw InvalidInput("ImageRGB: dimensions must be at least 8x8, got " +
                           std::to_string(img.width) + "x" + std::to_string(img.height));
    if (img.data.size() != static_cast<std::size_t>(3) * img.width * img.height)
        throw InvalidInput("ImageRGB: data size does not match 3*width*height");
    for (float v : img.data) {
        if (!std::isfinite(v) || v < 0.0f || v > 1.0f)
            throw InvalidInput("ImageRGB: sample outside [0,1] or non-finite");
    }
}

void validate(const BayerRaw& raw) {
    if (raw.width < 2 || raw.height < 2 || (raw.width & 1) != 0 || (raw.height & 1) != 0)
        throw InvalidInput("BayerRaw: dimensions must be even and positive, got " +
                           std::to_string(raw.width) + "x" + std::to_string(raw.height));
    if (raw.data.size() != static_cast<std::size_t>(raw.width) * raw.height)
        throw InvalidInput("BayerRaw: data size does not match width*height");
    for (float v : raw.data) {
        if (!std::isfinite(v) || v < 0.0f || v > 1.0f)
            throw InvalidInput("BayerRaw: sample outside [0,1] or non-finite");
    }
}

} // namespace ispforge
