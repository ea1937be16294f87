#include "ispforge/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "ispforge/errors.hpp"
#include "ispforge/features.hpp"

namespace ispforge {

const char* to_string(MetricKind kind) {
    switch (kind) {
        case MetricKind::PSNR: return "psnr";
        case MetricKind::Color: return "color";
        case MetricKind::Intensity: return "intensity";
        case MetricKind::PR: return "pr";
        case MetricKind::SOPR: return "sopr";
        case MetricKind::DepthRMSE: return "depth-rmse";
        case MetricKind::DepthDelta1: return "depth-delta1";
    }
    throw InvalidInput("unknown metric kind");
}

MetricKind metric_kind_from_string(const std::string& name) {
    if (name == "psnr") return MetricKind::PSNR;
    if (name == "color") return MetricKind::Color;
    if (name == "intensity") return MetricKind::Intensity;
    if (name == "pr") return MetricKind::PR;
    if (name == "sopr") return MetricKind::SOPR;
    if (name == "depth-rmse") return MetricKind::DepthRMSE;
    if (name == "depth-delta1") return MetricKind::DepthDelta1;
    throw InvalidInput("unknown metric kind: " + name);
}

void RewardSpec::validate() const {
    if (!std::isfinite(scale) || scale == 0.0)
        throw InvalidInput("RewardSpec: scale must be finite and nonzero");
    for (double c : rgb_target)
        if (c < 0.0 || c > 1.0) throw InvalidInput("RewardSpec: rgb_target outside [0,1]");
    if (gray_target < 0.0 || gray_target > 1.0)
        throw InvalidInput("RewardSpec: gray_target outside [0,1]");
    if (w_p < 0.0 || w_r < 0.0 || w_so < 0.0)
        throw InvalidInput("RewardSpec: weights must be nonnegative");
    if (iou_threshold <= 0.0 || iou_threshold >= 1.0)
        throw InvalidInput("RewardSpec: iou_threshold must lie in (0,1)");
    if (small_area_fraction < 0.0 || small_area_fraction > 1.0)
        throw InvalidInput("RewardSpec: small_area_fraction outside [0,1]");
}

namespace {

void require_same_size(const ImageRGB& a, const ImageRGB& b, const char* who) {
    if (a.width != b.width || a.height != b.height)
        throw InvalidInput(std::string(who) + ": dimension mismatch");
}

constexpr double kPsnrCap = 100.0;

} // namespace

double psnr(const ImageRGB& img, const ImageRGB& ref) {
    require_same_size(img, ref, "psnr");
    double se = 0.0;
    for (std::size_t i = 0; i < img.data.size(); ++i) {
        const double d = static_cast<double>(img.data[i]) - static_cast<double>(ref.data[i]);
        se += d * d;
    }
    const double mse = se / static_cast<double>(img.data.size());
    if (mse <= 0.0) return kPsnrCap;
    return std::min(kPsnrCap, 10.0 * std::log10(1.0 / mse));
}

double ssim(const ImageRGB& img, const ImageRGB& ref) {
    require_same_size(img, ref, "ssim");
    constexpr int kWin = 11;
    if (img.width < kWin || img.height < kWin)
        throw InvalidInput("ssim: image smaller than the 11x11 window");

    const GrayImage gx = to_gray(img);
    const GrayImage gy = to_gray(ref);

    // Normalized 11x11 Gaussian window, sigma = 1.5, built separably.
    double k1d[kWin];
    double sum = 0.0;
    for (int i = 0; i < kWin; ++i) {
        const double d = i - (kWin - 1) / 2.0;
        k1d[i] = std::exp(-0.5 * d * d / (1.5 * 1.5));
        sum += k1d[i];
    }
    for (auto& v : k1d) v /= sum;

    const int w = img.width, h = img.height;
    const int ow = w - kWin + 1, oh = h - kWin + 1;

    // Separable weighted moments over valid positions.
    auto filter_valid = [&](const std::vector<double>& src) {
        std::vector<double> tmp(static_cast<std::size_t>(h) * ow);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < ow; ++x) {
                double acc = 0.0;
                for (int i = 0; i < kWin; ++i) acc += k1d[i] * src[static_cast<std::size_t>(y) * w + x + i];
                tmp[static_cast<std::size_t>(y) * ow + x] = acc;
            }
        std::vector<double> out(static_cast<std::size_t>(oh) * ow);
        for (int y = 0; y < oh; ++y)
            for (int x = 0; x < ow; ++x) {
                double acc = 0.0;
                for (int i = 0; i < kWin; ++i) acc += k1d[i] * tmp[static_cast<std::size_t>(y + i) * ow + x];
                out[static_cast<std::size_t>(y) * ow + x] = acc;
            }
        return out;
    };

    const std::size_t n = static_cast<std::size_t>(w) * h;
    std::vector<double> x(n), y(n), xx(n), yy(n), xy(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = gx.data[i];
        y[i] = gy.data[i];
        xx[i] = x[i] * x[i];
        yy[i] = y[i] * y[i];
        xy[i] = x[i] * y[i];
    }
    const auto mu_x = filter_valid(x);
    const auto mu_y = filter_valid(y);
    const auto m_xx = filter_valid(xx);
    const auto m_yy = filter_valid(yy);
    const auto m_xy = filter_valid(xy);

    constexpr double c1 = 0.01 * 0.01;
    constexpr double c2 = 0.03 * 0.03;
    double total = 0.0;
    for (std::size_t i = 0; i < mu_x.size(); ++i) {
        const double var_x = m_xx[i] - mu_x[i] * mu_x[i];
        const double var_y = m_yy[i] - mu_y[i] * mu_y[i];
        const double cov = m_xy[i] - mu_x[i] * mu_y[i];
        const double num = (2.0 * mu_x[i] * mu_y[i] + c1) * (2.0 * cov + c2);
        const double den = (mu_x[i] * mu_x[i] + mu_y[i] * mu_y[i] + c1) * (var_x + var_y + c2);
        total += num / den;
    }
    return total / static_cast<double>(mu_x.size());
}

double color_metric(const ImageRGB& img, const std::array<double, 3>& rgb_target) {
    for (double c : rgb_target)
        if (c < 0.0 || c > 1.0) throw InvalidInput("color_metric: target outside [0,1]");
    const std::size_t n = img.pixel_count();
    double acc = 0.0;
    for (int c = 0; c < 3; ++c) {
        const float* p = img.plane(c);
        for (std::size_t i = 0; i < n; ++i) acc += std::abs(p[i] - rgb_target[c]);
    }
    return -acc / static_cast<double>(3 * n);
}

double intensity_metric(const ImageRGB& img, double gray_target) {
    if (gray_target < 0.0 || gray_target > 1.0)
        throw InvalidInput("intensity_metric: target outside [0,1]");
    const GrayImage g = to_gray(img);
    double acc = 0.0;
    for (double v : g.data) acc += std::abs(v - gray_target);
    return -acc / static_cast<double>(g.data.size());
}

double box_iou(const DetectionBox& a, const DetectionBox& b) {
    const double x1 = std::max(a.x, b.x);
    const double y1 = std::max(a.y, b.y);
    const double x2 = std::min(a.x + a.w, b.x + b.w);
    const double y2 = std::min(a.y + a.h, b.y + b.h);
    const double inter = std::max(0.0, x2 - x1) * std::max(0.0, y2 - y1);
    const double uni = a.area() + b.area() - inter;
    return uni > 0.0 ? inter / uni : 0.0;
}

PrecisionRecall precision_recall(const DetectionSet& pred, const DetectionSet& gt,
                                 double iou_threshold) {
    if (iou_threshold <= 0.0 || iou_threshold >= 1.0)
        throw InvalidInput("precision_recall: iou_threshold must lie in (0,1)");
    if (pred.empty() && gt.empty()) return {1.0, 1.0};
    if (pred.empty()) return {1.0, 0.0};
    if (gt.empty()) return {0.0, 1.0};

    std::vector<std::size_t> order(pred.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return pred.boxes[a].score > pred.boxes[b].score;
    });

    std::vector<bool> gt_used(gt.size(), false);
    int tp = 0;
    for (std::size_t pi : order) {
        const auto& p = pred.boxes[pi];
        double best_iou = iou_threshold;
        int best_gt = -1;
        for (std::size_t gi = 0; gi < gt.size(); ++gi) {
            if (gt_used[gi] || gt.boxes[gi].cls != p.cls) continue;
            const double iou = box_iou(p, gt.boxes[gi]);
            if (iou >= best_iou && (best_gt < 0 || iou > best_iou)) {
                best_iou = iou;
                best_gt = static_cast<int>(gi);
            }
        }
        if (best_gt >= 0) {
            gt_used[best_gt] = true;
            ++tp;
        }
    }
    const double pr = static_cast<double>(tp) / static_cast<double>(pred.size());
    const double re = static_cast<double>(tp) / static_cast<double>(gt.size());
    return {pr, re};
}

double pr_metric(const DetectionSet& pred, const DetectionSet& gt, double w_p, double w_r,
                 double iou_threshold) {
    if (w_p < 0.0 || w_r < 0.0) throw InvalidInput("pr_metric: weights must be nonnegative");
    const PrecisionRecall pr = precision_recall(pred, gt, iou_threshold);
    return static_cast<double>(gt.size()) * (w_p * pr.precision + w_r * pr.recall);
}

double sopr_metric(const DetectionSet& pred, const DetectionSet& gt, double w_p, double w_r,
                   double w_so, double area_threshold, double iou_threshold) {
    if (w_p < 0.0 || w_r < 0.0 || w_so < 0.0)
        throw InvalidInput("sopr_metric: weights must be nonnegative");
    const PrecisionRecall pr = precision_recall(pred, gt, iou_threshold);
    const double term = w_p * pr.precision + w_r * pr.recall;
    double total = 0.0;
    for (const auto& g : gt.boxes) total += (g.area() < area_threshold ? w_so : 1.0) * term;
    return total;
}

namespace {

void require_depth_compatible(const DepthMap& d, const DepthMap& d_gt, const char* who) {
    if (d.width != d_gt.width || d.height != d_gt.height)
        throw InvalidInput(std::string(who) + ": dimension mismatch");
}

} // namespace

double depth_rmse(const DepthMap& d, const DepthMap& d_gt) {
    require_depth_compatible(d, d_gt, "depth_rmse");
    double se = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < d.values.size(); ++i) {
        if (d.values[i] > 0.0f && d_gt.values[i] > 0.0f) {
            const double diff = static_cast<double>(d.values[i]) - static_cast<double>(d_gt.values[i]);
            se += diff * diff;
            ++n;
        }
    }
    if (n == 0) throw InvalidInput("depth_rmse: empty valid intersection");
    return std::sqrt(se / static_cast<double>(n));
}

double depth_delta1(const DepthMap& d, const DepthMap& d_gt) {
    require_depth_compatible(d, d_gt, "depth_delta1");
    std::size_t n = 0, ok = 0;
    for (std::size_t i = 0; i < d.values.size(); ++i) {
        if (d.values[i] > 0.0f && d_gt.values[i] > 0.0f) {
            const double a = d.values[i], b = d_gt.values[i];
            if (std::max(a / b, b / a) < 1.25) ++ok;
            ++n;
        }
    }
    if (n == 0) throw InvalidInput("depth_delta1: empty valid intersection");
    return static_cast<double>(ok) / static_cast<double>(n);
}

double step_reward(double m_prev, double m_cur, const RewardSpec& spec) {
    spec.validate();
    if (!std::isfinite(m_prev) || !std::isfinite(m_cur))
        throw InvalidInput("step_reward: metric values must be finite");
    return spec.scale * (m_cur - m_prev);
}

} // namespace ispforge
