#pragma once

#include "c2fmc/grid.hpp"

namespace c2f {

// Centered, unitary 2D DFT. DC sits at (H/2, W/2) (integer division) in
// k-space and the spatial origin at the same index in image space.
// Both throw std::invalid_argument on non-finite input.
KSpaceGrid fft2c(const ComplexImage &img);
ComplexImage ifft2c(const KSpaceGrid &grid);

}  // namespace c2f
