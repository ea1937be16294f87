#pragma once

#include <string>

#include "ispforge/image.hpp"
#include "ispforge/task_data.hpp"

namespace ispforge {

/// 8-bit RGB PNG interchange. Quantization error on save/load is at most
/// 1/255 per sample.
void save_png(const ImageRGB& img, const std::string& path);
ImageRGB load_png(const std::string& path);

/// Native raw container ("BRAW"): magic, u32 version, u32 width, u32 height,
/// then width*height little-endian f32 samples, row-major. Lossless.
void save_raw(const BayerRaw& raw, const std::string& path);
BayerRaw load_raw(const std::string& path);

/// Depth variant of the native container ("DPTH" magic). Invalid sites are
/// stored as 0.
void save_depth(const DepthMap& depth, const std::string& path);
DepthMap load_depth(const std::string& path);

/// Detection interchange: JSON array of {x, y, w, h, cls, score}.
void save_detections(const DetectionSet& det, const std::string& path);
DetectionSet load_detections(const std::string& path);

} // namespace ispforge
