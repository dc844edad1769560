#pragma once

#include "c2fmc/forward.hpp"
#include "c2fmc/grid.hpp"
#include "c2fmc/warp.hpp"

#include <complex>
#include <filesystem>
#include <vector>

namespace c2f {

// Complex single-precision tensor in column-major order (first dimension
// fastest), as stored in a .hdr/.cfl pair.
struct CflArray {
    std::vector<long> dims;
    std::vector<std::complex<float>> data;

    std::size_t expected_size() const;
};

// Writes "<stem>.hdr" and "<stem>.cfl". Both files are written to temporaries
// first and renamed into place.
void cfl_write(const std::filesystem::path &stem, const CflArray &array);
CflArray cfl_read(const std::filesystem::path &stem);
bool cfl_exists(const std::filesystem::path &stem);

// Layout helpers. Images are (H, W); multi-coil data (H, W, coils); fields
// (H, W, 2) with row then column component; real grids use a zero imaginary
// part.
CflArray to_cfl(const ComplexImage &img);
ComplexImage image_from_cfl(const CflArray &a);
CflArray to_cfl(const RealGrid &g);
RealGrid real_from_cfl(const CflArray &a);
CflArray to_cfl(const MultiCoilKSpace &y);
MultiCoilKSpace kspace_from_cfl(const CflArray &a);
CflArray to_cfl(const DisplacementField &u);
DisplacementField field_from_cfl(const CflArray &a);
CflArray to_cfl(const SensitivityMaps &maps);
SensitivityMaps maps_from_cfl(const CflArray &a);

}  // namespace c2f
