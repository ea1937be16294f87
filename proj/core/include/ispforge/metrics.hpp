#pragma once

#include <array>
#include <string>

#include "ispforge/image.hpp"
#include "ispforge/task_data.hpp"

namespace ispforge {

enum class MetricKind { PSNR, Color, Intensity, PR, SOPR, DepthRMSE, DepthDelta1 };

const char* to_string(MetricKind kind);
MetricKind metric_kind_from_string(const std::string& name);

/// Step-reward configuration: reward = scale * (M(I_t+1) - M(I_t)).
///
/// Every metric here is oriented so that larger means better (color/intensity
/// return negated distances), so `scale` is normally positive.
struct RewardSpec {
    MetricKind metric = MetricKind::PSNR;
    double scale = 1.0;

    std::array<double, 3> rgb_target{0.5, 0.5, 0.5};
    double gray_target = 0.5;

    double w_p = 0.5;
    double w_r = 0.5;
    double w_so = 2.0;
    /// Small-object cutoff as a fraction of image area.
    double small_area_fraction = 0.01;
    double iou_threshold = 0.5;

    void validate() const;
};

/// 10*log10(1/MSE) over all samples of both images, capped at 100 dB.
double psnr(const ImageRGB& img, const ImageRGB& ref);

/// Mean local SSIM on the gray conversion: 11x11 Gaussian window (sigma 1.5),
/// stabilizers C1 = 0.01^2 and C2 = 0.03^2, averaged over positions where the
/// full window fits. Requires min(width, height) >= 11.
double ssim(const ImageRGB& img, const ImageRGB& ref);

/// Negative mean absolute deviation from a constant RGB / gray target
/// (0 is best, more negative is farther).
double color_metric(const ImageRGB& img, const std::array<double, 3>& rgb_target);
double intensity_metric(const ImageRGB& img, double gray_target);

struct PrecisionRecall {
    double precision = 1.0;
    double recall = 1.0;
};

/// Greedy matching in descending score order; a prediction matches the
/// unmatched same-class GT box with the highest IoU >= iou_threshold.
/// Conventions: (1,1) when both sets are empty, (1,0) for empty predictions
/// against nonempty GT, (0,1) for predictions against empty GT.
PrecisionRecall precision_recall(const DetectionSet& pred, const DetectionSet& gt,
                                 double iou_threshold);

/// PR   = sum over the n GT objects of (w_p*Pr + w_r*Re)  = n*(w_p*Pr + w_r*Re).
/// SOPR = same sum with factor w_so on GT objects smaller than area_threshold.
double pr_metric(const DetectionSet& pred, const DetectionSet& gt, double w_p, double w_r,
                 double iou_threshold);
double sopr_metric(const DetectionSet& pred, const DetectionSet& gt, double w_p, double w_r,
                   double w_so, double area_threshold, double iou_threshold);

/// Computed over the intersection of validity masks (must be nonempty).
double depth_rmse(const DepthMap& d, const DepthMap& d_gt);
double depth_delta1(const DepthMap& d, const DepthMap& d_gt);

/// reward = spec.scale * (m_cur - m_prev).
double step_reward(double m_prev, double m_cur, const RewardSpec& spec);

} // namespace ispforge
