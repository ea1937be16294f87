#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ispforge/image.hpp"
#include "ispforge/nn/tensor.hpp"

namespace ispforge {

/// Agent state vector [f_i | f_g | f_s]: multi-scale intensity histograms,
/// multi-scale gradient histograms, and the frozen-random semantic features.
struct FeatureVector {
    std::vector<float> values;
    int intensity_len = 0;
    int gradient_len = 0;
    int semantic_len = 0;

    int size() const { return static_cast<int>(values.size()); }
};

/// Deterministic extractor configuration. The semantic branch is a frozen
/// randomly-initialized conv stack (3->8->16->32 channels, stride 2 each)
/// followed by per-quadrant average pooling (4 * 32 = 128 values); its
/// parameters are generated once from `seed` and never trained.
struct ExtractorConfig {
    std::vector<int> grids{1, 2, 4};
    int bins = 32;
    std::uint64_t seed = 7;
    bool use_intensity = true;
    bool use_gradient = true;
    bool use_semantic = true;

    int histogram_length() const;
    int semantic_length() const { return use_semantic ? 128 : 0; }
    int feature_length() const;

    /// Canonical single-line description; hashed into agent checkpoints.
    std::string canonical_string() const;
    std::uint64_t config_hash() const;

    void validate() const;
};

/// ITU-R BT.601 luma: 0.299 R + 0.587 G + 0.114 B.
GrayImage to_gray(const ImageRGB& img);

/// Normalized Sobel gradient magnitude: sqrt(Gx^2 + Gy^2) / (4*sqrt(2)),
/// mirror borders, output in [0,1].
GrayImage sobel_magnitude(const GrayImage& gray);

/// Per-cell normalized histograms over nested grids, concatenated coarse to
/// fine, cells in row-major order. Values binned over [0,1].
std::vector<float> multiscale_histogram(const GrayImage& channel, const std::vector<int>& grids,
                                        int bins);

/// Holds the generated semantic-branch weights so repeated extraction does
/// not rebuild them. Thread-safe for concurrent extract() calls.
class FeatureExtractor {
public:
    explicit FeatureExtractor(ExtractorConfig config);

    const ExtractorConfig& config() const { return config_; }

    FeatureVector extract(const ImageRGB& img) const;

    /// The raw semantic feature map of the frozen conv stack (final layer,
    /// post-ReLU), exposed for the feature-reconstruction loss used in tool
    /// training.
    nn::Tensor semantic_map(const nn::Tensor& batch_nchw) const;
    const nn::ParamSet& semantic_params() const { return semantic_params_; }

private:
    ExtractorConfig config_;
    nn::ParamSet semantic_params_;
};

} // namespace ispforge
