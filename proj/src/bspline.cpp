#include "c2fmc/bspline.hpp"

#include <cmath>

namespace c2f {

double cubic_bspline(double x) {
    const double a = std::abs(x);
    if (a < 1.0) return 2.0 / 3.0 - a * a + 0.5 * a * a * a;
    if (a < 2.0) {
        const double b = 2.0 - a;
        return b * b * b / 6.0;
    }
    return 0.0;
}

BsplineBasis::BsplineBasis(int n, int spacing) : n_(n) {
    if (n < 1) throw std::invalid_argument("B-spline basis needs at least one sample");
    if (spacing < 2) throw std::invalid_argument("B-spline spacing must be at least 2");
    const int kmax = (n - 1 + spacing - 1) / spacing + 1;
    m_ = kmax + 2;
    b_.assign(static_cast<std::size_t>(n) * m_, 0.0);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < m_; ++j) {
            const int k = j - 1;
            b_[static_cast<std::size_t>(i) * m_ + j] = cubic_bspline(static_cast<double>(i) / spacing - k);
        }
    }
}

BsplineField::BsplineField(Shape shape, int spacing)
    : shape_(shape), rows_(shape.height, spacing), cols_(shape.width, spacing) {}

DisplacementField BsplineField::evaluate(const std::vector<double> &coeffs) const {
    if (coeffs.size() != n_params()) throw std::invalid_argument("B-spline coefficient count mismatch");
    const int mr = rows_.controls();
    const int mc = cols_.controls();
    const int h = shape_.height;
    const int w = shape_.width;
    DisplacementField u(shape_);
    std::vector<double> tmp(static_cast<std::size_t>(mr) * w);
    for (int comp = 0; comp < 2; ++comp) {
        const double *c = coeffs.data() + static_cast<std::size_t>(comp) * mr * mc;
        RealGrid &out = comp == 0 ? u.row : u.col;
        // tmp = C * Bc^T
        for (int a = 0; a < mr; ++a) {
            for (int j = 0; j < w; ++j) {
                double s = 0.0;
                for (int b = 0; b < mc; ++b) s += c[a * mc + b] * cols_(j, b);
                tmp[static_cast<std::size_t>(a) * w + j] = s;
            }
        }
        for (int i = 0; i < h; ++i) {
            for (int j = 0; j < w; ++j) {
                double s = 0.0;
                for (int a = 0; a < mr; ++a) s += rows_(i, a) * tmp[static_cast<std::size_t>(a) * w + j];
                out(i, j) = s;
            }
        }
    }
    return u;
}

std::vector<double> BsplineField::pullback(const DisplacementField &dense) const {
    require_same_shape(shape_, dense.shape(), "B-spline pullback");
    const int mr = rows_.controls();
    const int mc = cols_.controls();
    const int h = shape_.height;
    const int w = shape_.width;
    std::vector<double> out(n_params(), 0.0);
    std::vector<double> tmp(static_cast<std::size_t>(mr) * w);
    for (int comp = 0; comp < 2; ++comp) {
        const RealGrid &g = comp == 0 ? dense.row : dense.col;
        // tmp = Br^T * G
        for (int a = 0; a < mr; ++a) {
            for (int j = 0; j < w; ++j) {
                double s = 0.0;
                for (int i = 0; i < h; ++i) s += rows_(i, a) * g(i, j);
                tmp[static_cast<std::size_t>(a) * w + j] = s;
            }
        }
        double *c = out.data() + static_cast<std::size_t>(comp) * mr * mc;
        for (int a = 0; a < mr; ++a) {
            for (int b = 0; b < mc; ++b) {
                double s = 0.0;
                for (int j = 0; j < w; ++j) s += tmp[static_cast<std::size_t>(a) * w + j] * cols_(j, b);
                c[a * mc + b] = s;
            }
        }
    }
    return out;
}

}  // namespace c2f
