#pragma once

#include <array>

#include "ispforge/image.hpp"

namespace ispforge {

/// Fixed 3x3 color-correction matrix applied in the linear domain
/// (rows should sum to 1 so neutral grays stay neutral). Default identity.
struct ColorMatrix {
    std::array<std::array<double, 3>, 3> m{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};

    static ColorMatrix identity() { return ColorMatrix{}; }
    ColorMatrix inverse() const;
    bool is_identity() const;
};

/// sRGB transfer curve (with the linear toe segment).
double srgb_to_linear(double v);
double linear_to_srgb(double v);

/// Bilinear demosaic of an RGGB mosaic. Measured channels are kept exactly;
/// each missing channel is the average of the same-channel sites in the
/// mirrored 3x3 neighborhood.
ImageRGB demosaic_bilinear(const BayerRaw& raw);

/// Synthesizes a mosaic from a processed RGB image: inverse sRGB gamma,
/// inverse color matrix, RGGB sampling, then zero-mean Gaussian read noise of
/// std noise_sigma in the linear domain, clamped to [0,1]. Deterministic per
/// seed. Odd image dimensions are rejected.
BayerRaw rgb_to_raw(const ImageRGB& img, double noise_sigma, std::uint64_t seed,
                    const ColorMatrix& ccm = ColorMatrix::identity());

/// Forward finishing for round trips: color matrix then sRGB encoding,
/// in place, clamped.
ImageRGB apply_forward_correction(const ImageRGB& linear_img, const ColorMatrix& ccm);

} // namespace ispforge
