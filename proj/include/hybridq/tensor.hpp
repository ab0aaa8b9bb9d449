#pragma once

#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace hybridq {

// Row-major n-dimensional real array. All arithmetic is double precision.
struct Tensor {
    std::vector<std::size_t> shape;
    std::vector<double> data;

    Tensor() = default;
    explicit Tensor(std::vector<std::size_t> dims, double fill = 0.0)
        : shape(std::move(dims)), data(count(shape), fill) {}
    Tensor(std::vector<std::size_t> dims, std::vector<double> values)
        : shape(std::move(dims)), data(std::move(values)) {
        if (data.size() != count(shape))
            throw std::invalid_argument("Tensor: data length does not match shape");
    }

    static std::size_t count(const std::vector<std::size_t>& dims) {
        std::size_t n = 1;
        for (std::size_t d : dims) n *= d;
        return n;
    }

    std::size_t numel() const { return data.size(); }
    std::size_t dim(std::size_t i) const { return shape.at(i); }

    double& operator[](std::size_t i) { return data[i]; }
    double operator[](std::size_t i) const { return data[i]; }

    // [C,H,W] indexing for image-like tensors.
    double& at3(std::size_t c, std::size_t h, std::size_t w) {
        return data[(c * shape[1] + h) * shape[2] + w];
    }
    double at3(std::size_t c, std::size_t h, std::size_t w) const {
        return data[(c * shape[1] + h) * shape[2] + w];
    }

    bool same_shape(const Tensor& other) const { return shape == other.shape; }

    void require_shape(const std::vector<std::size_t>& dims, const char* what) const {
        if (shape != dims)
            throw std::invalid_argument(std::string(what) + ": unexpected tensor shape");
    }
};

}  // namespace hybridq
