#pragma once

#include <cstdint>
#include <vector>

namespace ispforge {

/// Axis-aligned box in pixel coordinates.
struct DetectionBox {
    double x = 0.0;
    double y = 0.0;
    double w = 0.0;
    double h = 0.0;
    int cls = 0;
    double score = 1.0;

    double area() const { return w * h; }
};

/// A set of detections for one image.
struct DetectionSet {
    std::vector<DetectionBox> boxes;

    bool empty() const { return boxes.empty(); }
    std::size_t size() const { return boxes.size(); }
};

/// Dense depth map in meters. Invalid sites carry value 0 (mask() == false);
/// valid sites are positive and finite.
struct DepthMap {
    int width = 0;
    int height = 0;
    std::vector<float> values;

    DepthMap() = default;
    DepthMap(int w, int h) : width(w), height(h), values(static_cast<std::size_t>(w) * h, 0.0f) {}

    float& at(int y, int x) { return values[static_cast<std::size_t>(y) * width + x]; }
    float at(int y, int x) const { return values[static_cast<std::size_t>(y) * width + x]; }
    bool valid(int y, int x) const { return at(y, x) > 0.0f; }
};

double box_iou(const DetectionBox& a, const DetectionBox& b);

} // namespace ispforge
