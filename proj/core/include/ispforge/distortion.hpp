#pragma once

#include <cstdint>
#include <string>

#include "ispforge/image.hpp"
#include "ispforge/rng.hpp"

namespace ispforge {

enum class DistortionKind {
    GaussianNoise,
    GaussianBlur,
    JpegSim,
    DownUpResize,
    BrightnessJitter,
};

enum class Severity { Low, High };

const char* to_string(DistortionKind kind);
DistortionKind distortion_kind_from_string(const std::string& name);

/// One concrete degradation. `sigma` is used by noise/blur, `quality` by the
/// JPEG simulator, `offset` by brightness jitter; the other fields are
/// ignored per kind. Same (spec, image) pair reproduces identical output.
struct DistortionSpec {
    DistortionKind kind = DistortionKind::GaussianNoise;
    Severity severity = Severity::Low;
    double sigma = 0.02;
    double quality = 75.0;
    double offset = 0.0;
    std::uint64_t seed = 0;

    /// Draws parameters uniformly from the severity band:
    ///   noise sigma   [0.01,0.03] low / [0.03,0.08] high
    ///   blur sigma    [0.5,1.0]         / [1.0,2.0]
    ///   jpeg quality  [60,85]           / [25,60]
    ///   brightness    +-[0.05,0.15]     / +-[0.15,0.35]
    static DistortionSpec sample(DistortionKind kind, Severity severity, Rng& rng);
};

/// Applies exactly one distortion; pure and deterministic per spec.seed.
ImageRGB distort(const ImageRGB& img, const DistortionSpec& spec);

/// Individual primitives (exposed so tests can pin oracles against them).
ImageRGB add_gaussian_noise(const ImageRGB& img, double sigma, std::uint64_t seed);
ImageRGB gaussian_blur(const ImageRGB& img, double sigma);
ImageRGB jpeg_simulate(const ImageRGB& img, double quality);
ImageRGB down_up_resize(const ImageRGB& img);
ImageRGB brightness_offset(const ImageRGB& img, double offset);

/// Bilinear resample to an arbitrary size (half-pixel centers, mirrored taps).
ImageRGB resize_bilinear(const ImageRGB& img, int out_w, int out_h);

} // namespace ispforge
