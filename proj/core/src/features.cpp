#include "ispforge/features.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ispforge/errors.hpp"
#include "ispforge/hash.hpp"
#include "ispforge/nn/autodiff.hpp"

namespace ispforge {

std::string hash_hex(std::uint64_t h) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[i] = digits[h & 0xf];
        h >>= 4;
    }
    return out;
}

int ExtractorConfig::histogram_length() const {
    int cells = 0;
    for (int g : grids) cells += g * g;
    return cells * bins;
}

int ExtractorConfig::feature_length() const {
    return (use_intensity ? histogram_length() : 0) + (use_gradient ? histogram_length() : 0) +
           semantic_length();
}

std::string ExtractorConfig::canonical_string() const {
    std::ostringstream os;
    os << "grids=";
    for (std::size_t i = 0; i < grids.size(); ++i) os << (i ? "," : "") << grids[i];
    os << ";bins=" << bins << ";seed=" << seed << ";branches=" << (use_intensity ? "i" : "")
       << (use_gradient ? "g" : "") << (use_semantic ? "s" : "") << ";semantic=conv3x3(3-8-16-32)s2+quadpool";
    return os.str();
}

std::uint64_t ExtractorConfig::config_hash() const { return fnv1a64(canonical_string()); }

void ExtractorConfig::validate() const {
    if (grids.empty()) throw InvalidInput("ExtractorConfig: at least one grid required");
    for (int g : grids)
        if (g < 1 || g > 64) throw InvalidInput("ExtractorConfig: grid size outside [1,64]");
    if (bins < 2 || bins > 256) throw InvalidInput("ExtractorConfig: bins outside [2,256]");
    if (!use_intensity && !use_gradient && !use_semantic)
        throw InvalidInput("ExtractorConfig: all branches disabled");
}

GrayImage to_gray(const ImageRGB& img) {
    GrayImage out(img.width, img.height);
    const std::size_t n = img.pixel_count();
    const float* r = img.plane(0);
    const float* g = img.plane(1);
    const float* b = img.plane(2);
    for (std::size_t i = 0; i < n; ++i)
        out.data[i] = 0.299f * r[i] + 0.587f * g[i] + 0.114f * b[i];
    return out;
}

GrayImage sobel_magnitude(const GrayImage& gray) {
    const int w = gray.width, h = gray.height;
    GrayImage out(w, h);
    constexpr double kNorm = 1.0 / 5.65685424949238; // 4*sqrt(2)
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            auto v = [&](int dy, int dx) {
                return static_cast<double>(gray.at(mirror_index(y + dy, h), mirror_index(x + dx, w)));
            };
            const double gx = (v(-1, 1) + 2 * v(0, 1) + v(1, 1)) - (v(-1, -1) + 2 * v(0, -1) + v(1, -1));
            const double gy = (v(1, -1) + 2 * v(1, 0) + v(1, 1)) - (v(-1, -1) + 2 * v(-1, 0) + v(-1, 1));
            out.at(y, x) = static_cast<float>(std::min(1.0, std::sqrt(gx * gx + gy * gy) * kNorm));
        }
    return out;
}

std::vector<float> multiscale_histogram(const GrayImage& channel, const std::vector<int>& grids,
                                        int bins) {
    const int w = channel.width, h = channel.height;
    std::vector<float> out;
    for (int g : grids) {
        if (g > w || g > h)
            throw InvalidInput("multiscale_histogram: image smaller than the " + std::to_string(g) +
                               "x" + std::to_string(g) + " grid");
        for (int cy = 0; cy < g; ++cy) {
            const int y0 = static_cast<int>(static_cast<std::int64_t>(cy) * h / g);
            const int y1 = static_cast<int>(static_cast<std::int64_t>(cy + 1) * h / g);
            for (int cx = 0; cx < g; ++cx) {
                const int x0 = static_cast<int>(static_cast<std::int64_t>(cx) * w / g);
                const int x1 = static_cast<int>(static_cast<std::int64_t>(cx + 1) * w / g);
                std::vector<float> hist(bins, 0.0f);
                const float count = static_cast<float>((y1 - y0) * (x1 - x0));
                for (int y = y0; y < y1; ++y)
                    for (int x = x0; x < x1; ++x) {
                        const int b = std::min(bins - 1, static_cast<int>(channel.at(y, x) * bins));
                        hist[b] += 1.0f;
                    }
                for (auto& v : hist) v /= count;
                out.insert(out.end(), hist.begin(), hist.end());
            }
        }
    }
    return out;
}

FeatureExtractor::FeatureExtractor(ExtractorConfig config) : config_(std::move(config)) {
    config_.validate();
    // Frozen random conv stack; parameters depend only on the seed.
    Rng rng(config_.seed);
    const int chans[4] = {3, 8, 16, 32};
    for (int layer = 0; layer < 3; ++layer) {
        const int in_c = chans[layer], out_c = chans[layer + 1];
        auto& w = semantic_params_.add("sem" + std::to_string(layer) + ".weight",
                                       nn::Shape{out_c, in_c, 3, 3});
        nn::kaiming_uniform_fill(w, in_c * 9, rng);
        semantic_params_.add("sem" + std::to_string(layer) + ".bias", nn::Shape{out_c, 1, 1, 1});
    }
}

nn::Tensor FeatureExtractor::semantic_map(const nn::Tensor& batch_nchw) const {
    nn::Tape tape; // no gradients flow to the frozen weights
    auto x = nn::make_leaf<float>(batch_nchw, false);
    for (int layer = 0; layer < 3; ++layer) {
        const std::string p = "sem" + std::to_string(layer);
        auto w = nn::make_frozen<float>(semantic_params_.entry(p + ".weight"));
        auto b = nn::make_frozen<float>(semantic_params_.entry(p + ".bias"));
        x = nn::conv2d(tape, x, w, b, 2, nn::PadMode::Mirror);
        x = nn::relu(tape, x);
    }
    return x->value();
}

FeatureVector FeatureExtractor::extract(const ImageRGB& img) const {
    validate(img);
    const int finest = *std::max_element(config_.grids.begin(), config_.grids.end());
    if (img.width < finest || img.height < finest)
        throw InvalidInput("extract: image smaller than the finest histogram grid");

    FeatureVector fv;
    const GrayImage gray = to_gray(img);

    if (config_.use_intensity) {
        auto f_i = multiscale_histogram(gray, config_.grids, config_.bins);
        fv.intensity_len = static_cast<int>(f_i.size());
        fv.values.insert(fv.values.end(), f_i.begin(), f_i.end());
    }
    if (config_.use_gradient) {
        auto f_g = multiscale_histogram(sobel_magnitude(gray), config_.grids, config_.bins);
        fv.gradient_len = static_cast<int>(f_g.size());
        fv.values.insert(fv.values.end(), f_g.begin(), f_g.end());
    }
    if (config_.use_semantic) {
        nn::Tensor input(nn::Shape{1, 3, img.height, img.width});
        std::copy(img.data.begin(), img.data.end(), input.data.begin());
        const nn::Tensor fm = semantic_map(input);

        // Quadrant-average pooling: 4 spatial quadrants x 32 channels = 128.
        const int fh = fm.shape.h, fw = fm.shape.w;
        const int ys[3] = {0, fh / 2, fh};
        const int xs[3] = {0, fw / 2, fw};
        for (int qy = 0; qy < 2; ++qy)
            for (int qx = 0; qx < 2; ++qx) {
                const int y0 = qy == 0 ? 0 : ys[1], y1 = qy == 0 ? std::max(1, ys[1]) : fh;
                const int x0 = qx == 0 ? 0 : xs[1], x1 = qx == 0 ? std::max(1, xs[1]) : fw;
                for (int c = 0; c < fm.shape.c; ++c) {
                    double acc = 0.0;
                    int cnt = 0;
                    for (int y = std::min(y0, fh - 1); y < std::max(y1, std::min(y0, fh - 1) + 1); ++y)
                        for (int x = std::min(x0, fw - 1); x < std::max(x1, std::min(x0, fw - 1) + 1);
                             ++x) {
                            acc += fm.at(0, c, y, x);
                            ++cnt;
                        }
                    fv.values.push_back(static_cast<float>(acc / cnt));
                }
            }
        fv.semantic_len = 128;
    }
    return fv;
}

} // namespace ispforge
