#pragma once

#include "c2fmc/grid.hpp"
#include "c2fmc/rng.hpp"

#include <cmath>
#include <numbers>

namespace testing {

using namespace c2f;

inline ComplexImage random_image(Shape s, Rng &rng) { return complex_noise<ImageDomain>(s, rng); }
inline KSpaceGrid random_kspace(Shape s, Rng &rng) { return complex_noise<FrequencyDomain>(s, rng); }

template <class D>
double max_abs_diff(const ComplexGrid<D> &a, const ComplexGrid<D> &b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

template <class D>
double rel_diff(const ComplexGrid<D> &a, const ComplexGrid<D> &b) {
    return norm(a - b) / std::max(norm(b), 1e-300);
}

// Direct O(N^2) centred unitary DFT, independent of FFTW.
inline KSpaceGrid naive_dft(const ComplexImage &x) {
    const int h = x.height();
    const int w = x.width();
    const int ch = h / 2;
    const int cw = w / 2;
    KSpaceGrid out(x.shape());
    for (int kr = 0; kr < h; ++kr) {
        for (int kc = 0; kc < w; ++kc) {
            cplx s{};
            for (int r = 0; r < h; ++r) {
                for (int c = 0; c < w; ++c) {
                    const double ph = -2.0 * std::numbers::pi *
                                      (static_cast<double>((kr - ch) * (r - ch)) / h +
                                       static_cast<double>((kc - cw) * (c - cw)) / w);
                    s += x(r, c) * std::polar(1.0, ph);
                }
            }
            out(kr, kc) = s / std::sqrt(static_cast<double>(h * w));
        }
    }
    return out;
}

}  // namespace testing
