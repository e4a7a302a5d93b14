#ifndef DELJET_TENSOR_HPP
#define DELJET_TENSOR_HPP

#include <cstddef>
#include <numeric>
#include <vector>

#include "deljet/errors.hpp"

namespace deljet {

// Dense row-major tensor of doubles. Shape is a list of extents; the
// buffer length always equals the product of the extents.
struct Tensor {
    std::vector<std::size_t> shape;
    std::vector<double> v;

    Tensor() = default;
    explicit Tensor(std::vector<std::size_t> s) : shape(std::move(s)), v(count(shape), 0.0) {}
    Tensor(std::vector<std::size_t> s, std::vector<double> data)
        : shape(std::move(s)), v(std::move(data)) {
        if (v.size() != count(shape)) throw ShapeMismatch("tensor buffer does not match shape");
    }

    static std::size_t count(const std::vector<std::size_t>& s) {
        std::size_t n = 1;
        for (auto e : s) n *= e;
        return n;
    }

    std::size_t size() const { return v.size(); }
    double* data() { return v.data(); }
    const double* data() const { return v.data(); }

    bool same_shape(const Tensor& o) const { return shape == o.shape; }
};

// Row-major matrix, the workhorse container for feature tables.
struct Matrix {
    std::size_t rows = 0, cols = 0;
    std::vector<double> v;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), v(r * c, 0.0) {}
    Matrix(std::size_t r, std::size_t c, std::vector<double> data)
        : rows(r), cols(c), v(std::move(data)) {
        if (v.size() != r * c) throw ShapeMismatch("matrix buffer does not match dimensions");
    }

    double& at(std::size_t r, std::size_t c) { return v[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return v[r * cols + c]; }
    double* row(std::size_t r) { return v.data() + r * cols; }
    const double* row(std::size_t r) const { return v.data() + r * cols; }
};

}  // namespace deljet

#endif
