#pragma once

#include <cstdint>
#include <unordered_map>

#include "ispforge/nn/tensor.hpp"

namespace ispforge::nn {

/// Standard Adam with bias correction, one optimizer instance per ParamSet.
/// Consumes the accumulated gradients and leaves them untouched (callers zero
/// them at the start of the next step).
template <typename T>
class AdamT {
public:
    explicit AdamT(double lr = 3e-4, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
        : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

    double learning_rate() const { return lr_; }

    void step(ParamSetT<T>& params) {
        ++t_;
        const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
        const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
        for (auto& e : params.entries()) {
            Moments& mom = state_[e.name];
            if (mom.m.size() != e.value.size()) {
                mom.m = TensorT<T>(e.value.shape);
                mom.v = TensorT<T>(e.value.shape);
            }
            for (std::size_t i = 0; i < e.value.size(); ++i) {
                const double g = static_cast<double>(e.grad.data[i]);
                const double m = beta1_ * mom.m.data[i] + (1.0 - beta1_) * g;
                const double v = beta2_ * mom.v.data[i] + (1.0 - beta2_) * g * g;
                mom.m.data[i] = static_cast<T>(m);
                mom.v.data[i] = static_cast<T>(v);
                const double m_hat = m / bc1;
                const double v_hat = v / bc2;
                e.value.data[i] -= static_cast<T>(lr_ * m_hat / (std::sqrt(v_hat) + eps_));
            }
        }
    }

private:
    struct Moments {
        TensorT<T> m;
        TensorT<T> v;
    };

    double lr_, beta1_, beta2_, eps_;
    std::int64_t t_ = 0;
    std::unordered_map<std::string, Moments> state_;
};

using Adam = AdamT<float>;

} // namespace ispforge::nn
