#pragma once

#include "ispforge/image.hpp"

namespace ispforge {

/// Traditional ISP tools. All of them are pure ImageRGB -> ImageRGB
/// transforms with mirror-padded borders and clamped output.

/// Additive per-sample offset.
ImageRGB apply_brightness(const ImageRGB& img, double offset);

/// Per-sample power curve v^gamma.
ImageRGB apply_gamma(const ImageRGB& img, double gamma);

/// Luminance-preserving histogram equalization: 256-bin CDF remap of the
/// luminance channel, RGB rescaled by the luminance ratio.
ImageRGB hist_equalize(const ImageRGB& img);

/// Contrast-limited adaptive histogram equalization on luminance.
/// tiles x tiles grid, clip limit as a multiple of the mean bin height,
/// clipped excess redistributed uniformly, bilinear blending between
/// neighboring tile mappings.
ImageRGB clahe(const ImageRGB& img, int tiles = 8, double clip_limit = 2.0);

/// HSV hue rotation (degrees, modulo 360).
ImageRGB hue_shift(const ImageRGB& img, double degrees);

/// HSV saturation multiplier, clamped to [0,1]; V untouched.
ImageRGB saturation_scale(const ImageRGB& img, double factor);

/// Gray-world white balance: each channel scaled by (mean of channel means) /
/// (channel mean); channels with mean < 1e-4 are left unscaled.
ImageRGB grayworld_wb(const ImageRGB& img);

/// Fixed-kernel smoothing / sharpening family.
ImageRGB gaussian_filter(const ImageRGB& img); // 5x5, sigma 1.0
ImageRGB box_filter(const ImageRGB& img);      // 3x3
ImageRGB bilateral_filter(const ImageRGB& img); // 5x5, sigma_s 2.0, sigma_r 0.1
ImageRGB sharpen(const ImageRGB& img); // unsharp mask, amount 0.5 over the 5x5 Gaussian

/// The STOP / do-nothing tool.
ImageRGB stop_tool(const ImageRGB& img);

/// RGB <-> HSV helpers (H in degrees [0,360), S and V in [0,1]).
void rgb_to_hsv(float r, float g, float b, float& h, float& s, float& v);
void hsv_to_rgb(float h, float s, float v, float& r, float& g, float& b);

} // namespace ispforge
