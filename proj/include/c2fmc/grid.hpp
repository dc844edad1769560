#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace c2f {

using cplx = std::complex<double>;

struct Shape {
    int height = 0;
    int width = 0;

    std::size_t size() const { return static_cast<std::size_t>(height) * static_cast<std::size_t>(width); }
    bool operator==(const Shape &) const = default;
};

std::string to_string(const Shape &s);

// Throws std::invalid_argument naming `what` when the shapes differ.
void require_same_shape(const Shape &a, const Shape &b, const char *what);

struct ImageDomain {};
struct FrequencyDomain {};

// Row-major H x W complex array. The tag keeps image-domain and k-space
// arrays from being mixed up; fft2c/ifft2c are the only conversions.
template <class Domain>
class ComplexGrid {
  public:
    ComplexGrid() = default;
    explicit ComplexGrid(Shape s, cplx fill = {0.0, 0.0})
        : shape_(s), data_(s.size(), fill) {
        if (s.height <= 0 || s.width <= 0) {
            throw std::invalid_argument("grid dimensions must be positive, got " + to_string(s));
        }
    }
    ComplexGrid(Shape s, std::vector<cplx> values) : shape_(s), data_(std::move(values)) {
        if (s.height <= 0 || s.width <= 0) {
            throw std::invalid_argument("grid dimensions must be positive, got " + to_string(s));
        }
        if (data_.size() != s.size()) {
            throw std::invalid_argument("grid data length does not match " + to_string(s));
        }
    }

    Shape shape() const { return shape_; }
    int height() const { return shape_.height; }
    int width() const { return shape_.width; }
    std::size_t size() const { return data_.size(); }

    cplx &operator()(int r, int c) { return data_[static_cast<std::size_t>(r) * shape_.width + c]; }
    const cplx &operator()(int r, int c) const { return data_[static_cast<std::size_t>(r) * shape_.width + c]; }
    cplx &operator[](std::size_t i) { return data_[i]; }
    const cplx &operator[](std::size_t i) const { return data_[i]; }

    std::span<cplx> values() { return data_; }
    std::span<const cplx> values() const { return data_; }

    ComplexGrid &operator+=(const ComplexGrid &o) {
        require_same_shape(shape_, o.shape_, "grid +=");
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
        return *this;
    }
    ComplexGrid &operator-=(const ComplexGrid &o) {
        require_same_shape(shape_, o.shape_, "grid -=");
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
        return *this;
    }
    ComplexGrid &operator*=(cplx s) {
        for (auto &v : data_) v *= s;
        return *this;
    }
    // a += s * b
    ComplexGrid &add_scaled(const ComplexGrid &o, cplx s) {
        require_same_shape(shape_, o.shape_, "grid add_scaled");
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += s * o.data_[i];
        return *this;
    }

    friend ComplexGrid operator+(ComplexGrid a, const ComplexGrid &b) { return a += b; }
    friend ComplexGrid operator-(ComplexGrid a, const ComplexGrid &b) { return a -= b; }
    friend ComplexGrid operator*(cplx s, ComplexGrid a) { return a *= s; }

  private:
    Shape shape_;
    std::vector<cplx> data_;
};

using ComplexImage = ComplexGrid<ImageDomain>;
using KSpaceGrid = ComplexGrid<FrequencyDomain>;

// Row-major H x W real array (frequency weights, spectra, field components).
class RealGrid {
  public:
    RealGrid() = default;
    explicit RealGrid(Shape s, double fill = 0.0);
    RealGrid(Shape s, std::vector<double> values);

    Shape shape() const { return shape_; }
    int height() const { return shape_.height; }
    int width() const { return shape_.width; }
    std::size_t size() const { return data_.size(); }

    double &operator()(int r, int c) { return data_[static_cast<std::size_t>(r) * shape_.width + c]; }
    double operator()(int r, int c) const { return data_[static_cast<std::size_t>(r) * shape_.width + c]; }
    double &operator[](std::size_t i) { return data_[i]; }
    double operator[](std::size_t i) const { return data_[i]; }

    std::span<double> values() { return data_; }
    std::span<const double> values() const { return data_; }

    double min() const;
    double max() const;

  private:
    Shape shape_;
    std::vector<double> data_;
};

template <class D>
double squared_norm(const ComplexGrid<D> &a) {
    double s = 0.0;
    for (const auto &v : a.values()) s += std::norm(v);
    return s;
}

template <class D>
double norm(const ComplexGrid<D> &a) {
    return std::sqrt(squared_norm(a));
}

// <a, b> = sum conj(a) * b
template <class D>
cplx inner(const ComplexGrid<D> &a, const ComplexGrid<D> &b) {
    require_same_shape(a.shape(), b.shape(), "inner product");
    cplx s{0.0, 0.0};
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

template <class D>
bool all_finite(const ComplexGrid<D> &a) {
    for (const auto &v : a.values()) {
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    }
    return true;
}

bool all_finite(const RealGrid &a);

// Elementwise product with a real weight grid.
template <class D>
ComplexGrid<D> weighted(ComplexGrid<D> a, const RealGrid &w) {
    require_same_shape(a.shape(), w.shape(), "weighted");
    for (std::size_t i = 0; i < a.size(); ++i) a[i] *= w[i];
    return a;
}

// Index of the DC / rotation centre for a dimension of length n.
constexpr int center_index(int n) { return n / 2; }

}  // namespace c2f
