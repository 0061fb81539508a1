#ifndef RACER_TENSOR_HPP_
#define RACER_TENSOR_HPP_

#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace racer {

// Dense row-major tensor. Scalar is float in production paths; tests
// instantiate double where finite-difference oracles need the headroom.
template <typename S>
struct TensorT {
    std::vector<int> shape;
    std::vector<S> data;

    TensorT() = default;

    explicit TensorT(std::vector<int> dims) : shape(std::move(dims)) {
        data.assign(static_cast<std::size_t>(checked_size(shape)), S(0));
    }

    TensorT(std::vector<int> dims, std::vector<S> values)
        : shape(std::move(dims)), data(std::move(values)) {
        if (static_cast<int64_t>(data.size()) != checked_size(shape))
            throw std::invalid_argument("tensor: data length does not match shape");
    }

    static int64_t checked_size(const std::vector<int>& dims) {
        if (dims.empty()) throw std::invalid_argument("tensor: empty shape");
        int64_t n = 1;
        for (int d : dims) {
            if (d <= 0) throw std::invalid_argument("tensor: non-positive dim");
            n *= d;
        }
        return n;
    }

    int64_t size() const { return static_cast<int64_t>(data.size()); }
    S* ptr() { return data.data(); }
    const S* ptr() const { return data.data(); }
    S& operator[](std::size_t i) { return data[i]; }
    const S& operator[](std::size_t i) const { return data[i]; }

    void fill(S v) { std::fill(data.begin(), data.end(), v); }

    template <typename T>
    TensorT<T> cast() const {
        TensorT<T> out;
        out.shape = shape;
        out.data.resize(data.size());
        for (std::size_t i = 0; i < data.size(); ++i) out.data[i] = static_cast<T>(data[i]);
        return out;
    }
};

using Tensor = TensorT<float>;

}  // namespace racer

#endif  // RACER_TENSOR_HPP_
