#pragma once

#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <string>
#include <vector>

#include "cinekit/common.hpp"

namespace ck {

/// Dense row-major double tensor. Shapes are small vectors of extents; all
/// indexing helpers are bounds-checked only in debug-style entry points, the
/// flat accessors are not.
class Tensor {
public:
    Tensor() = default;

    explicit Tensor(std::vector<int> shape, double fill = 0.0) : shape_(std::move(shape)) {
        std::int64_t n = 1;
        for (int d : shape_) {
            check_arg(d > 0, "tensor extents must be positive");
            n *= d;
        }
        data_.assign(static_cast<std::size_t>(n), fill);
    }

    static Tensor from_data(std::vector<int> shape, std::vector<double> data) {
        Tensor t;
        t.shape_ = std::move(shape);
        std::int64_t n = 1;
        for (int d : t.shape_) {
            check_arg(d > 0, "tensor extents must be positive");
            n *= d;
        }
        check_arg(static_cast<std::int64_t>(data.size()) == n,
                  "tensor data length does not match shape");
        t.data_ = std::move(data);
        return t;
    }

    const std::vector<int>& shape() const { return shape_; }
    int rank() const { return static_cast<int>(shape_.size()); }
    int dim(int i) const { return shape_.at(static_cast<std::size_t>(i)); }
    std::int64_t size() const { return static_cast<std::int64_t>(data_.size()); }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    double& operator[](std::int64_t i) { return data_[static_cast<std::size_t>(i)]; }
    double operator[](std::int64_t i) const { return data_[static_cast<std::size_t>(i)]; }

    /// Checked multi-index access; intended for tests and setup code.
    double& at(std::initializer_list<int> idx) {
        return data_[static_cast<std::size_t>(flat_index(idx))];
    }
    double at(std::initializer_list<int> idx) const {
        return data_[static_cast<std::size_t>(flat_index(idx))];
    }

    void fill(double v) { std::fill(data_.begin(), data_.end(), v); }

    bool same_shape(const Tensor& o) const { return shape_ == o.shape_; }

    static std::string shape_str(const std::vector<int>& s) {
        std::string out = "(";
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (i) out += ",";
            out += std::to_string(s[i]);
        }
        out += ")";
        return out;
    }

private:
    std::int64_t flat_index(std::initializer_list<int> idx) const {
        check_arg(static_cast<int>(idx.size()) == rank(), "index rank mismatch");
        std::int64_t flat = 0;
        int axis = 0;
        for (int i : idx) {
            check_arg(i >= 0 && i < shape_[static_cast<std::size_t>(axis)],
                      "tensor index out of range");
            flat = flat * shape_[static_cast<std::size_t>(axis)] + i;
            ++axis;
        }
        return flat;
    }

    std::vector<int> shape_;
    std::vector<double> data_;
};

inline void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
    check_arg(a.same_shape(b), std::string(op) + ": shape mismatch " +
                                   Tensor::shape_str(a.shape()) + " vs " +
                                   Tensor::shape_str(b.shape()));
}

}  // namespace ck
