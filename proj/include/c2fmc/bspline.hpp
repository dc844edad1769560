#pragma once

#include "c2fmc/warp.hpp"

#include <vector>

namespace c2f {

// Uniform cubic B-spline basis along one axis. Control knots sit at k*spacing
// for k = -1 .. ceil((n-1)/spacing)+1, which covers every sample with four
// active functions.
class BsplineBasis {
  public:
    BsplineBasis(int n, int spacing);

    int samples() const { return n_; }
    int controls() const { return m_; }
    double operator()(int i, int k) const { return b_[static_cast<std::size_t>(i) * m_ + k]; }

  private:
    int n_;
    int m_;
    std::vector<double> b_;
};

double cubic_bspline(double x);

// Tensor-product control grid for both field components. Coefficients are
// stored component-major (row component first), each block rows x cols.
class BsplineField {
  public:
    BsplineField(Shape shape, int spacing);

    Shape shape() const { return shape_; }
    std::size_t n_params() const { return 2 * rows_.controls() * cols_.controls(); }

    DisplacementField evaluate(const std::vector<double> &coeffs) const;
    // Transpose of evaluate: dense gradient pulled back to control points.
    std::vector<double> pullback(const DisplacementField &dense) const;

  private:
    Shape shape_;
    BsplineBasis rows_;
    BsplineBasis cols_;
};

}  // namespace c2f
