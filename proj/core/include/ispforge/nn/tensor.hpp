#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <string>
#include <unordered_map>
#include <vector>

#include "ispforge/errors.hpp"
#include "ispforge/rng.hpp"

namespace ispforge::nn {

/// Dense 4-D shape (batch, channels, height, width). Unused trailing dims
/// stay 1, so vectors are (n, c, 1, 1).
struct Shape {
    int n = 1;
    int c = 1;
    int h = 1;
    int w = 1;

    std::size_t count() const {
        return static_cast<std::size_t>(n) * c * static_cast<std::size_t>(h) * w;
    }
    bool operator==(const Shape&) const = default;

    std::string str() const {
        return "(" + std::to_string(n) + "," + std::to_string(c) + "," + std::to_string(h) + "," +
               std::to_string(w) + ")";
    }
};

template <typename T>
struct TensorT {
    Shape shape;
    std::vector<T> data;

    TensorT() = default;
    explicit TensorT(Shape s) : shape(s), data(s.count(), T(0)) {}
    TensorT(Shape s, T fill) : shape(s), data(s.count(), fill) {}

    std::size_t size() const { return data.size(); }

    T& at(int n, int c, int y, int x) {
        return data[((static_cast<std::size_t>(n) * shape.c + c) * shape.h + y) * shape.w + x];
    }
    T at(int n, int c, int y, int x) const {
        return data[((static_cast<std::size_t>(n) * shape.c + c) * shape.h + y) * shape.w + x];
    }

    void fill(T v) { std::fill(data.begin(), data.end(), v); }

    void check_finite(const char* who) const {
#ifndef NDEBUG
        for (T v : data) assert(std::isfinite(static_cast<double>(v)) && who);
#else
        (void)who;
#endif
    }
};

using Tensor = TensorT<float>;

/// Named parameter tensors with paired gradient accumulators. Iteration is
/// insertion-ordered so serialization layout is stable.
template <typename T>
class ParamSetT {
public:
    struct Entry {
        std::string name;
        TensorT<T> value;
        TensorT<T> grad;
    };

    TensorT<T>& add(const std::string& name, Shape shape) {
        if (index_.count(name)) throw InvalidInput("ParamSet: duplicate parameter name " + name);
        index_[name] = entries_.size();
        entries_.push_back(Entry{name, TensorT<T>(shape), TensorT<T>(shape)});
        return entries_.back().value;
    }

    bool has(const std::string& name) const { return index_.count(name) != 0; }

    Entry& entry(const std::string& name) {
        auto it = index_.find(name);
        if (it == index_.end()) throw InvalidInput("ParamSet: unknown parameter " + name);
        return entries_[it->second];
    }
    const Entry& entry(const std::string& name) const {
        auto it = index_.find(name);
        if (it == index_.end()) throw InvalidInput("ParamSet: unknown parameter " + name);
        return entries_[it->second];
    }

    TensorT<T>& value(const std::string& name) { return entry(name).value; }
    const TensorT<T>& value(const std::string& name) const { return entry(name).value; }
    TensorT<T>& grad(const std::string& name) { return entry(name).grad; }

    std::vector<Entry>& entries() { return entries_; }
    const std::vector<Entry>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }

    void zero_grads() {
        for (auto& e : entries_) e.grad.fill(T(0));
    }

    /// Element count across all parameters.
    std::size_t scalar_count() const {
        std::size_t total = 0;
        for (const auto& e : entries_) total += e.value.size();
        return total;
    }

private:
    std::vector<Entry> entries_;
    std::unordered_map<std::string, std::size_t> index_;
};

using ParamSet = ParamSetT<float>;

/// Kaiming-uniform fill for ReLU stacks: U(-b, b) with b = sqrt(6 / fan_in).
template <typename T>
void kaiming_uniform_fill(TensorT<T>& t, int fan_in, Rng& rng) {
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
    for (auto& v : t.data) v = static_cast<T>(rng.uniform(-bound, bound));
}

} // namespace ispforge::nn
