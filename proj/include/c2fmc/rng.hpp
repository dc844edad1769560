#pragma once

#include "c2fmc/grid.hpp"

#include <cstdint>
#include <random>

namespace c2f {

// The single source of randomness for a run. Every generator in the library
// takes an Rng& so that one seed reproduces a whole run.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }
    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
    // Unit-variance circular complex Gaussian: real and imaginary parts N(0, 1/2).
    cplx complex_normal() {
        constexpr double s = 0.70710678118654752440;
        const double re = normal();
        const double im = normal();
        return {s * re, s * im};
    }
    std::uint64_t below(std::uint64_t n) { return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(engine_); }

    std::mt19937_64 &engine() { return engine_; }

  private:
    std::mt19937_64 engine_;
};

template <class D>
ComplexGrid<D> complex_noise(Shape s, Rng &rng) {
    ComplexGrid<D> out(s);
    for (auto &v : out.values()) v = rng.complex_normal();
    return out;
}

}  // namespace c2f
