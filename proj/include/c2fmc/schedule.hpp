#pragma once

#include "c2fmc/grid.hpp"
#include "c2fmc/rng.hpp"

#include <vector>

namespace c2f {

struct ScheduleConfig {
    int T = 100;
    double a_clamp = 0.9;
    double sigma_max = 80.0;
    double sigma_min = 0.002;
};

// Per-timestep inverted Gaussian shell H_t and scalar noise level. The
// effective noise shaping at step t is G_t = sigma_noise(t) * H_t, applied
// diagonally in centred k-space.
class ShellSchedule {
  public:
    ShellSchedule() = default;
    // Explicit tables indexed by t = 0..T (length T + 1 each).
    ShellSchedule(std::vector<double> amplitude, std::vector<double> sigma_shell, std::vector<double> sigma_noise,
                  double a_clamp);

    // a_t = min(1.1 t / T, a_clamp), sigma_shell = 5 exp(5 t / T), and a
    // geometric noise level from sigma_min at t = 0 to sigma_max at t = T.
    static ShellSchedule from_config(const ScheduleConfig &cfg);

    int T() const { return static_cast<int>(amplitude_.size()) - 1; }
    double a_clamp() const { return a_clamp_; }
    double amplitude(int t) const { return amplitude_.at(checked(t)); }
    double sigma_shell(int t) const { return sigma_shell_.at(checked(t)); }
    double sigma_noise(int t) const { return sigma_noise_.at(checked(t)); }

  private:
    int checked(int t) const;

    std::vector<double> amplitude_;
    std::vector<double> sigma_shell_;
    std::vector<double> sigma_noise_;
    double a_clamp_ = 0.9;
};

// H_t on a grid of the given shape, centred at (H/2, W/2).
RealGrid shell(const ShellSchedule &sched, int t, Shape shape);

// G_t = sigma_noise(t) * H_t.
RealGrid effective_weights(const ShellSchedule &sched, int t, Shape shape);

// x0 + ifft2c(G_t * fft2c(z)) with z unit complex Gaussian.
ComplexImage corrupt(const ComplexImage &x0, const ShellSchedule &sched, int t, Rng &rng);

}  // namespace c2f
