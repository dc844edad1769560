#pragma once

#include "c2fmc/grid.hpp"
#include "c2fmc/rng.hpp"
#include "c2fmc/warp.hpp"

#include <cstdint>
#include <vector>

namespace c2f {

// Binary k-space sampling indicator with at least one sampled location.
class SamplingMask {
  public:
    SamplingMask() = default;
    SamplingMask(Shape s, std::vector<std::uint8_t> keep);
    static SamplingMask full(Shape s);

    Shape shape() const { return shape_; }
    bool sampled(std::size_t i) const { return keep_[i] != 0; }
    bool sampled(int r, int c) const { return keep_[static_cast<std::size_t>(r) * shape_.width + c] != 0; }
    std::size_t count() const;
    // Ratio of grid size to sampled count.
    double acceleration() const { return static_cast<double>(shape_.size()) / static_cast<double>(count()); }
    const std::vector<std::uint8_t> &keep() const { return keep_; }
    RealGrid as_real() const;

    template <class D>
    void apply(ComplexGrid<D> &g) const {
        require_same_shape(shape_, g.shape(), "mask apply");
        for (std::size_t i = 0; i < keep_.size(); ++i) {
            if (keep_[i] == 0) g[i] = cplx{};
        }
    }

  private:
    Shape shape_;
    std::vector<std::uint8_t> keep_;
};

// Coil sensitivities, constant across motion states. Root-sum-of-squares
// must not exceed 1 + 1e-6 anywhere.
class SensitivityMaps {
  public:
    SensitivityMaps() = default;
    explicit SensitivityMaps(std::vector<ComplexImage> coils);

    std::size_t n_coils() const { return coils_.size(); }
    Shape shape() const { return coils_.front().shape(); }
    const ComplexImage &operator[](std::size_t i) const { return coils_[i]; }
    const std::vector<ComplexImage> &coils() const { return coils_; }

  private:
    std::vector<ComplexImage> coils_;
};

// Per-coil k-space for one motion state; zero wherever the mask is zero.
struct MultiCoilKSpace {
    std::vector<KSpaceGrid> coils;

    std::size_t n_coils() const { return coils.size(); }
    double squared_norm() const;
};

class MotionProblem {
  public:
    MotionProblem() = default;
    MotionProblem(std::vector<SamplingMask> masks, std::vector<MultiCoilKSpace> measurements, SensitivityMaps maps,
                  double sigma_meas = 0.0);

    std::size_t n_states() const { return masks_.size(); }
    Shape shape() const { return maps_.shape(); }
    std::size_t n_coils() const { return maps_.n_coils(); }
    const SamplingMask &mask(std::size_t state) const { return masks_.at(state); }
    const MultiCoilKSpace &measurements(std::size_t state) const { return measurements_.at(state); }
    const SensitivityMaps &maps() const { return maps_; }
    double sigma_meas() const { return sigma_meas_; }
    const std::vector<SamplingMask> &masks() const { return masks_; }

  private:
    std::vector<SamplingMask> masks_;
    std::vector<MultiCoilKSpace> measurements_;
    SensitivityMaps maps_;
    double sigma_meas_ = 0.0;
};

// M F S_i warp(x, field) for every coil of `state`.
MultiCoilKSpace apply_forward(const ComplexImage &x, const DisplacementField &field, std::size_t state,
                              const MotionProblem &prob);
// Same operator without the warp.
MultiCoilKSpace apply_forward(const ComplexImage &x, const SamplingMask &mask, const SensitivityMaps &maps);

// sum_i conj(S_i) F^-1 M y_i. The warp adjoint is applied separately.
ComplexImage apply_adjoint(const MultiCoilKSpace &y, std::size_t state, const MotionProblem &prob);
ComplexImage apply_adjoint(const MultiCoilKSpace &y, const SamplingMask &mask, const SensitivityMaps &maps);

// Per-state forward of x plus circular complex Gaussian noise with standard
// deviation sigma_meas on sampled locations. fields[0] must be zero.
MotionProblem simulate_measurements(const ComplexImage &x, const std::vector<DisplacementField> &fields,
                                    const std::vector<SamplingMask> &masks, const SensitivityMaps &maps,
                                    double sigma_meas, Rng &rng);

// Smooth Gaussian-blob coil profiles centred at equally spaced angles around
// the field of view, each with a constant phase, normalised to unit RSS.
SensitivityMaps make_coil_profiles(Shape shape, std::size_t n_coils);

}  // namespace c2f
