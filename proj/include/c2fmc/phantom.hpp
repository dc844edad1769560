#pragma once

#include "c2fmc/grid.hpp"
#include "c2fmc/rng.hpp"

namespace c2f {

// Random piecewise-smooth test object: an elliptical "head" of constant
// intensity carrying a slow sinusoidal modulation, with 4 to 7 rotated
// inner ellipses of random intensity. Real-valued, zero outside the head.
ComplexImage random_phantom(Shape shape, Rng &rng);

// 1 where |x| > 1e-6, else 0.
RealGrid support_of(const ComplexImage &x);

}  // namespace c2f
