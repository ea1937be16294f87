#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <vector>

#include "ispforge/nn/tensor.hpp"

namespace ispforge::nn {

/// A node in the computation: a value plus (when gradients are required) a
/// matching gradient accumulator. Parameters alias external storage inside a
/// ParamSetT so backward writes straight into the optimizer's buffers.
template <typename T>
class VarT {
public:
    static std::shared_ptr<VarT> owned(TensorT<T> value, bool requires_grad) {
        auto v = std::make_shared<VarT>();
        v->owned_value_ = std::move(value);
        v->value_ = &v->owned_value_;
        v->requires_grad_ = requires_grad;
        if (requires_grad) {
            v->owned_grad_ = TensorT<T>(v->owned_value_.shape);
            v->grad_ = &v->owned_grad_;
        }
        return v;
    }

    static std::shared_ptr<VarT> external(TensorT<T>* value, TensorT<T>* grad) {
        auto v = std::make_shared<VarT>();
        v->value_ = value;
        v->grad_ = grad;
        v->requires_grad_ = grad != nullptr;
        return v;
    }

    const TensorT<T>& value() const { return *value_; }
    TensorT<T>& grad() { return *grad_; }
    bool requires_grad() const { return requires_grad_; }
    const Shape& shape() const { return value_->shape; }

private:
    TensorT<T> owned_value_;
    TensorT<T> owned_grad_;
    TensorT<T>* value_ = nullptr;
    TensorT<T>* grad_ = nullptr;
    bool requires_grad_ = false;
};

template <typename T>
using VarPtrT = std::shared_ptr<VarT<T>>;

/// Records one forward evaluation; backward() replays the recorded steps in
/// reverse order (recording order is topological, so each node's gradient is
/// complete before it is propagated), exactly once per evaluation.
template <typename T>
class TapeT {
public:
    void record(std::function<void()> step) { steps_.push_back(std::move(step)); }

    /// Seeds d(loss)/d(loss) = 1 and accumulates gradients into every
    /// recorded requires-grad node. `loss` must be scalar.
    void backward(const VarPtrT<T>& loss) {
        if (consumed_) throw InvalidInput("Tape: backward already ran; build a new tape");
        if (loss->shape().count() != 1) throw InvalidInput("Tape: loss must be scalar");
        if (!loss->requires_grad()) throw InvalidInput("Tape: loss does not require gradients");
        loss->grad().data[0] = T(1);
        for (auto it = steps_.rbegin(); it != steps_.rend(); ++it) (*it)();
        consumed_ = true;
    }

    void clear() {
        steps_.clear();
        consumed_ = false;
    }

    std::size_t size() const { return steps_.size(); }

private:
    std::vector<std::function<void()>> steps_;
    bool consumed_ = false;
};

using Var = VarPtrT<float>;
using Tape = TapeT<float>;

enum class PadMode { Zero, Mirror };

template <typename T>
VarPtrT<T> make_leaf(TensorT<T> value, bool requires_grad = false) {
    return VarT<T>::owned(std::move(value), requires_grad);
}

template <typename T>
VarPtrT<T> make_param(typename ParamSetT<T>::Entry& entry) {
    return VarT<T>::external(&entry.value, &entry.grad);
}

template <typename T>
VarPtrT<T> make_frozen(const typename ParamSetT<T>::Entry& entry) {
    return VarT<T>::external(const_cast<TensorT<T>*>(&entry.value), nullptr);
}

namespace detail {

inline int pad_index(int i, int n, PadMode mode) {
    if (i >= 0 && i < n) return i;
    if (mode == PadMode::Zero) return -1;
    if (n == 1) return 0;
    const int period = 2 * (n - 1);
    int m = i % period;
    if (m < 0) m += period;
    return m < n ? m : period - m;
}

/// Source index per (output position, kernel tap); -1 marks a zero-pad tap.
inline std::vector<int> conv_index_table(int out, int in, int k, int stride, int pad, PadMode mode) {
    std::vector<int> table(static_cast<std::size_t>(out) * k);
    for (int o = 0; o < out; ++o)
        for (int t = 0; t < k; ++t) table[static_cast<std::size_t>(o) * k + t] = pad_index(o * stride + t - pad, in, mode);
    return table;
}

} // namespace detail

/// 2-D cross-correlation with odd kernels, "same"-style padding of (k-1)/2,
/// and the given stride. x: (N,C,H,W), w: (OC,C,KH,KW), b: (OC,1,1,1).
template <typename T>
VarPtrT<T> conv2d(TapeT<T>& tape, VarPtrT<T> x, VarPtrT<T> w, VarPtrT<T> b, int stride = 1,
                  PadMode pad = PadMode::Mirror) {
    const Shape xs = x->shape();
    const Shape ws = w->shape();
    if (ws.c != xs.c)
        throw InvalidInput("conv2d: weight channels " + std::to_string(ws.c) +
                           " do not match input channels " + std::to_string(xs.c));
    if (ws.h % 2 == 0 || ws.w % 2 == 0) throw InvalidInput("conv2d: kernel sides must be odd");
    if (b->shape().count() != static_cast<std::size_t>(ws.n))
        throw InvalidInput("conv2d: bias size does not match output channels");
    if (stride < 1) throw InvalidInput("conv2d: stride must be >= 1");

    const int kh = ws.h, kw = ws.w;
    const int ph = (kh - 1) / 2, pw = (kw - 1) / 2;
    const int oh = (xs.h + 2 * ph - kh) / stride + 1;
    const int ow = (xs.w + 2 * pw - kw) / stride + 1;
    const Shape os{xs.n, ws.n, oh, ow};

    const auto iy_tab = detail::conv_index_table(oh, xs.h, kh, stride, ph, pad);
    const auto ix_tab = detail::conv_index_table(ow, xs.w, kw, stride, pw, pad);

    TensorT<T> out(os);
    const TensorT<T>& xv = x->value();
    const TensorT<T>& wv = w->value();
    const TensorT<T>& bv = b->value();
    for (int n = 0; n < xs.n; ++n)
        for (int oc = 0; oc < ws.n; ++oc)
            for (int oy = 0; oy < oh; ++oy)
                for (int ox = 0; ox < ow; ++ox) {
                    T acc = bv.data[oc];
                    for (int ic = 0; ic < xs.c; ++ic)
                        for (int ky = 0; ky < kh; ++ky) {
                            const int iy = iy_tab[static_cast<std::size_t>(oy) * kh + ky];
                            if (iy < 0) continue;
                            const T* xrow = &xv.data[((static_cast<std::size_t>(n) * xs.c + ic) * xs.h + iy) * xs.w];
                            const T* wrow = &wv.data[((static_cast<std::size_t>(oc) * ws.c + ic) * kh + ky) * kw];
                            for (int kx = 0; kx < kw; ++kx) {
                                const int ix = ix_tab[static_cast<std::size_t>(ox) * kw + kx];
                                if (ix < 0) continue;
                                acc += wrow[kx] * xrow[ix];
                            }
                        }
                    out.at(n, oc, oy, ox) = acc;
                }
    out.check_finite("conv2d");

    const bool requires = x->requires_grad() || w->requires_grad() || b->requires_grad();
    auto result = VarT<T>::owned(std::move(out), requires);
    if (requires) {
        tape.record([x, w, b, result, iy_tab, ix_tab, stride, xs, ws, os]() {
            const TensorT<T>& g = result->grad();
            const TensorT<T>& xv = x->value();
            const TensorT<T>& wv = w->value();
            const int kh = ws.h, kw = ws.w;
            const bool need_dx = x->requires_grad();
            const bool need_dw = w->requires_grad();
            const bool need_db = b->requires_grad();
            for (int n = 0; n < xs.n; ++n)
                for (int oc = 0; oc < ws.n; ++oc)
                    for (int oy = 0; oy < os.h; ++oy)
                        for (int ox = 0; ox < os.w; ++ox) {
                            const T go = g.at(n, oc, oy, ox);
                            if (go == T(0)) continue;
                            if (need_db) b->grad().data[oc] += go;
                            for (int ic = 0; ic < xs.c; ++ic)
                                for (int ky = 0; ky < kh; ++ky) {
                                    const int iy = iy_tab[static_cast<std::size_t>(oy) * kh + ky];
                                    if (iy < 0) continue;
                                    for (int kx = 0; kx < kw; ++kx) {
                                        const int ix = ix_tab[static_cast<std::size_t>(ox) * kw + kx];
                                        if (ix < 0) continue;
                                        if (need_dw)
                                            w->grad().at(oc, ic, ky, kx) += go * xv.at(n, ic, iy, ix);
                                        if (need_dx)
                                            x->grad().at(n, ic, iy, ix) += go * wv.at(oc, ic, ky, kx);
                                    }
                                }
                        }
        });
    }
    return result;
}

/// Fully connected layer. x: (N,D), w: (M,D), b: (M) -> (N,M).
template <typename T>
VarPtrT<T> linear(TapeT<T>& tape, VarPtrT<T> x, VarPtrT<T> w, VarPtrT<T> b) {
    const Shape xs = x->shape();
    const Shape ws = w->shape();
    if (xs.h != 1 || xs.w != 1 || ws.h != 1 || ws.w != 1)
        throw InvalidInput("linear: expects flat (N,D) input and (M,D) weight");
    if (ws.c != xs.c)
        throw InvalidInput("linear: weight input dim " + std::to_string(ws.c) +
                           " does not match feature dim " + std::to_string(xs.c));
    if (b->shape().count() != static_cast<std::size_t>(ws.n))
        throw InvalidInput("linear: bias size does not match output dim");

    const int N = xs.n, D = xs.c, M = ws.n;
    TensorT<T> out(Shape{N, M, 1, 1});
    const T* xd = x->value().data.data();
    const T* wd = w->value().data.data();
    const T* bd = b->value().data.data();
    for (int n = 0; n < N; ++n)
        for (int m = 0; m < M; ++m) {
            T acc = bd[m];
            const T* xr = xd + static_cast<std::size_t>(n) * D;
            const T* wr = wd + static_cast<std::size_t>(m) * D;
            for (int d = 0; d < D; ++d) acc += xr[d] * wr[d];
            out.data[static_cast<std::size_t>(n) * M + m] = acc;
        }
    out.check_finite("linear");

    const bool requires = x->requires_grad() || w->requires_grad() || b->requires_grad();
    auto result = VarT<T>::owned(std::move(out), requires);
    if (requires) {
        tape.record([x, w, b, result, N, D, M]() {
            const T* g = result->grad().data.data();
            const T* xd = x->value().data.data();
            const T* wd = w->value().data.data();
            for (int n = 0; n < N; ++n)
                for (int m = 0; m < M; ++m) {
                    const T go = g[static_cast<std::size_t>(n) * M + m];
                    if (go == T(0)) continue;
                    if (b->requires_grad()) b->grad().data[m] += go;
                    if (w->requires_grad()) {
                        T* dw = w->grad().data.data() + static_cast<std::size_t>(m) * D;
                        const T* xr = xd + static_cast<std::size_t>(n) * D;
                        for (int d = 0; d < D; ++d) dw[d] += go * xr[d];
                    }
                    if (x->requires_grad()) {
                        T* dx = x->grad().data.data() + static_cast<std::size_t>(n) * D;
                        const T* wr = wd + static_cast<std::size_t>(m) * D;
                        for (int d = 0; d < D; ++d) dx[d] += go * wr[d];
                    }
                }
        });
    }
    return result;
}

template <typename T>
VarPtrT<T> relu(TapeT<T>& tape, VarPtrT<T> x) {
    TensorT<T> out = x->value();
    for (auto& v : out.data) v = std::max(T(0), v);
    auto result = VarT<T>::owned(std::move(out), x->requires_grad());
    if (x->requires_grad()) {
        tape.record([x, result]() {
            const auto& g = result->grad().data;
            const auto& xv = x->value().data;
            auto& dx = x->grad().data;
            for (std::size_t i = 0; i < g.size(); ++i)
                if (xv[i] > T(0)) dx[i] += g[i];
        });
    }
    return result;
}

/// Clamp to [0,1] with pass-through subgradient inside the closed interval.
template <typename T>
VarPtrT<T> clamp01(TapeT<T>& tape, VarPtrT<T> x) {
    TensorT<T> out = x->value();
    for (auto& v : out.data) v = std::min(T(1), std::max(T(0), v));
    auto result = VarT<T>::owned(std::move(out), x->requires_grad());
    if (x->requires_grad()) {
        tape.record([x, result]() {
            const auto& g = result->grad().data;
            const auto& xv = x->value().data;
            auto& dx = x->grad().data;
            for (std::size_t i = 0; i < g.size(); ++i)
                if (xv[i] >= T(0) && xv[i] <= T(1)) dx[i] += g[i];
        });
    }
    return result;
}

namespace detail {

template <typename T>
void require_rows(const Shape& s, const char* who) {
    if (s.h != 1 || s.w != 1) throw InvalidInput(std::string(who) + ": expects a flat (N,C) tensor");
}

} // namespace detail

/// Row-wise softmax over the channel axis of an (N,C) tensor, stabilized by
/// max subtraction.
template <typename T>
VarPtrT<T> softmax(TapeT<T>& tape, VarPtrT<T> x) {
    detail::require_rows<T>(x->shape(), "softmax");
    const int N = x->shape().n, C = x->shape().c;
    TensorT<T> out(x->shape());
    for (int n = 0; n < N; ++n) {
        const T* row = x->value().data.data() + static_cast<std::size_t>(n) * C;
        T* orow = out.data.data() + static_cast<std::size_t>(n) * C;
        const T mx = *std::max_element(row, row + C);
        T sum = T(0);
        for (int c = 0; c < C; ++c) {
            orow[c] = std::exp(row[c] - mx);
            sum += orow[c];
        }
        for (int c = 0; c < C; ++c) orow[c] /= sum;
    }
    auto result = VarT<T>::owned(std::move(out), x->requires_grad());
    if (x->requires_grad()) {
        tape.record([x, result, N, C]() {
            const auto& p = result->value().data;
            const auto& g = result->grad().data;
            auto& dx = x->grad().data;
            for (int n = 0; n < N; ++n) {
                const std::size_t off = static_cast<std::size_t>(n) * C;
                T dot = T(0);
                for (int c = 0; c < C; ++c) dot += g[off + c] * p[off + c];
                for (int c = 0; c < C; ++c) dx[off + c] += p[off + c] * (g[off + c] - dot);
            }
        });
    }
    return result;
}

template <typename T>
VarPtrT<T> log_softmax(TapeT<T>& tape, VarPtrT<T> x) {
    detail::require_rows<T>(x->shape(), "log_softmax");
    const int N = x->shape().n, C = x->shape().c;
    TensorT<T> out(x->shape());
    for (int n = 0; n < N; ++n) {
        const T* row = x->value().data.data() + static_cast<std::size_t>(n) * C;
        T* orow = out.data.data() + static_cast<std::size_t>(n) * C;
        const T mx = *std::max_element(row, row + C);
        T sum = T(0);
        for (int c = 0; c < C; ++c) sum += std::exp(row[c] - mx);
        const T lse = mx + std::log(sum);
        for (int c = 0; c < C; ++c) orow[c] = row[c] - lse;
    }
    auto result = VarT<T>::owned(std::move(out), x->requires_grad());
    if (x->requires_grad()) {
        tape.record([x, result, N, C]() {
            const auto& lp = result->value().data;
            const auto& g = result->grad().data;
            auto& dx = x->grad().data;
            for (int n = 0; n < N; ++n) {
                const std::size_t off = static_cast<std::size_t>(n) * C;
                T gsum = T(0);
                for (int c = 0; c < C; ++c) gsum += g[off + c];
                for (int c = 0; c < C; ++c) dx[off + c] += g[off + c] - std::exp(lp[off + c]) * gsum;
            }
        });
    }
    return result;
}

namespace detail {

template <typename T>
void require_same_shape(const VarPtrT<T>& a, const VarPtrT<T>& b, const char* who) {
    if (!(a->shape() == b->shape()))
        throw InvalidInput(std::string(who) + ": shape mismatch " + a->shape().str() + " vs " +
                           b->shape().str());
}

} // namespace detail

/// alpha*a + beta*b, elementwise.
template <typename T>
VarPtrT<T> add_scaled(TapeT<T>& tape, VarPtrT<T> a, VarPtrT<T> b, T alpha, T beta) {
    detail::require_same_shape(a, b, "add_scaled");
    TensorT<T> out(a->shape());
    for (std::size_t i = 0; i < out.size(); ++i)
        out.data[i] = alpha * a->value().data[i] + beta * b->value().data[i];
    const bool requires = a->requires_grad() || b->requires_grad();
    auto result = VarT<T>::owned(std::move(out), requires);
    if (requires) {
        tape.record([a, b, result, alpha, beta]() {
            const auto& g = result->grad().data;
            if (a->requires_grad()) {
                auto& da = a->grad().data;
                for (std::size_t i = 0; i < g.size(); ++i) da[i] += alpha * g[i];
            }
            if (b->requires_grad()) {
                auto& db = b->grad().data;
                for (std::size_t i = 0; i < g.size(); ++i) db[i] += beta * g[i];
            }
        });
    }
    return result;
}

template <typename T>
VarPtrT<T> add(TapeT<T>& tape, VarPtrT<T> a, VarPtrT<T> b) {
    return add_scaled(tape, std::move(a), std::move(b), T(1), T(1));
}

template <typename T>
VarPtrT<T> sub(TapeT<T>& tape, VarPtrT<T> a, VarPtrT<T> b) {
    return add_scaled(tape, std::move(a), std::move(b), T(1), T(-1));
}

template <typename T>
VarPtrT<T> mul(TapeT<T>& tape, VarPtrT<T> a, VarPtrT<T> b) {
    detail::require_same_shape(a, b, "mul");
    TensorT<T> out(a->shape());
    for (std::size_t i = 0; i < out.size(); ++i)
        out.data[i] = a->value().data[i] * b->value().data[i];
    const bool requires = a->requires_grad() || b->requires_grad();
    auto result = VarT<T>::owned(std::move(out), requires);
    if (requires) {
        tape.record([a, b, result]() {
            const auto& g = result->grad().data;
            if (a->requires_grad()) {
                auto& da = a->grad().data;
                const auto& bv = b->value().data;
                for (std::size_t i = 0; i < g.size(); ++i) da[i] += g[i] * bv[i];
            }
            if (b->requires_grad()) {
                auto& db = b->grad().data;
                const auto& av = a->value().data;
                for (std::size_t i = 0; i < g.size(); ++i) db[i] += g[i] * av[i];
            }
        });
    }
    return result;
}

template <typename T>
VarPtrT<T> scale(TapeT<T>& tape, VarPtrT<T> a, T k) {
    TensorT<T> out = a->value();
    for (auto& v : out.data) v *= k;
    auto result = VarT<T>::owned(std::move(out), a->requires_grad());
    if (a->requires_grad()) {
        tape.record([a, result, k]() {
            const auto& g = result->grad().data;
            auto& da = a->grad().data;
            for (std::size_t i = 0; i < g.size(); ++i) da[i] += k * g[i];
        });
    }
    return result;
}

/// Per-row sum of an (N,C) tensor -> (N).
template <typename T>
VarPtrT<T> sum_rows(TapeT<T>& tape, VarPtrT<T> x) {
    detail::require_rows<T>(x->shape(), "sum_rows");
    const int N = x->shape().n, C = x->shape().c;
    TensorT<T> out(Shape{N, 1, 1, 1});
    for (int n = 0; n < N; ++n) {
        T acc = T(0);
        for (int c = 0; c < C; ++c) acc += x->value().data[static_cast<std::size_t>(n) * C + c];
        out.data[n] = acc;
    }
    auto result = VarT<T>::owned(std::move(out), x->requires_grad());
    if (x->requires_grad()) {
        tape.record([x, result, N, C]() {
            const auto& g = result->grad().data;
            auto& dx = x->grad().data;
            for (int n = 0; n < N; ++n)
                for (int c = 0; c < C; ++c) dx[static_cast<std::size_t>(n) * C + c] += g[n];
        });
    }
    return result;
}

/// Select one channel per row of an (N,C) tensor -> (N).
template <typename T>
VarPtrT<T> gather_rows(TapeT<T>& tape, VarPtrT<T> x, std::vector<int> idx) {
    detail::require_rows<T>(x->shape(), "gather_rows");
    const int N = x->shape().n, C = x->shape().c;
    if (static_cast<int>(idx.size()) != N) throw InvalidInput("gather_rows: one index per row required");
    for (int i : idx)
        if (i < 0 || i >= C) throw InvalidInput("gather_rows: index out of range");
    TensorT<T> out(Shape{N, 1, 1, 1});
    for (int n = 0; n < N; ++n) out.data[n] = x->value().data[static_cast<std::size_t>(n) * C + idx[n]];
    auto result = VarT<T>::owned(std::move(out), x->requires_grad());
    if (x->requires_grad()) {
        tape.record([x, result, idx, C]() {
            const auto& g = result->grad().data;
            auto& dx = x->grad().data;
            for (std::size_t n = 0; n < g.size(); ++n) dx[n * C + idx[n]] += g[n];
        });
    }
    return result;
}

/// Mean over every element -> scalar.
template <typename T>
VarPtrT<T> mean_all(TapeT<T>& tape, VarPtrT<T> x) {
    const std::size_t count = x->shape().count();
    TensorT<T> out(Shape{1, 1, 1, 1});
    T acc = T(0);
    for (T v : x->value().data) acc += v;
    out.data[0] = acc / static_cast<T>(count);
    auto result = VarT<T>::owned(std::move(out), x->requires_grad());
    if (x->requires_grad()) {
        tape.record([x, result, count]() {
            const T g = result->grad().data[0] / static_cast<T>(count);
            for (auto& d : x->grad().data) d += g;
        });
    }
    return result;
}

/// Mean absolute error -> scalar. Subgradient sign(a-b) (0 at ties).
template <typename T>
VarPtrT<T> l1_loss(TapeT<T>& tape, VarPtrT<T> a, VarPtrT<T> b) {
    detail::require_same_shape(a, b, "l1_loss");
    const std::size_t count = a->shape().count();
    TensorT<T> out(Shape{1, 1, 1, 1});
    T acc = T(0);
    for (std::size_t i = 0; i < count; ++i)
        acc += std::abs(a->value().data[i] - b->value().data[i]);
    out.data[0] = acc / static_cast<T>(count);
    const bool requires = a->requires_grad() || b->requires_grad();
    auto result = VarT<T>::owned(std::move(out), requires);
    if (requires) {
        tape.record([a, b, result, count]() {
            const T g = result->grad().data[0] / static_cast<T>(count);
            for (std::size_t i = 0; i < count; ++i) {
                const T d = a->value().data[i] - b->value().data[i];
                const T s = d > T(0) ? T(1) : (d < T(0) ? T(-1) : T(0));
                if (a->requires_grad()) a->grad().data[i] += g * s;
                if (b->requires_grad()) b->grad().data[i] -= g * s;
            }
        });
    }
    return result;
}

/// Mean squared error -> scalar.
template <typename T>
VarPtrT<T> mse_loss(TapeT<T>& tape, VarPtrT<T> a, VarPtrT<T> b) {
    detail::require_same_shape(a, b, "mse_loss");
    const std::size_t count = a->shape().count();
    TensorT<T> out(Shape{1, 1, 1, 1});
    T acc = T(0);
    for (std::size_t i = 0; i < count; ++i) {
        const T d = a->value().data[i] - b->value().data[i];
        acc += d * d;
    }
    out.data[0] = acc / static_cast<T>(count);
    const bool requires = a->requires_grad() || b->requires_grad();
    auto result = VarT<T>::owned(std::move(out), requires);
    if (requires) {
        tape.record([a, b, result, count]() {
            const T g = result->grad().data[0] * T(2) / static_cast<T>(count);
            for (std::size_t i = 0; i < count; ++i) {
                const T d = a->value().data[i] - b->value().data[i];
                if (a->requires_grad()) a->grad().data[i] += g * d;
                if (b->requires_grad()) b->grad().data[i] -= g * d;
            }
        });
    }
    return result;
}

} // namespace ispforge::nn
