#pragma once

#include "c2fmc/grid.hpp"
#include "c2fmc/schedule.hpp"

#include <memory>
#include <vector>

namespace c2f {

// Per-frequency prior variance of a zero-mean stationary Gaussian image
// model, in centred k-space layout.
class PowerSpectrum {
  public:
    PowerSpectrum() = default;
    explicit PowerSpectrum(RealGrid p);

    const RealGrid &grid() const { return p_; }
    Shape shape() const { return p_.shape(); }

  private:
    RealGrid p_;
};

// Mean of |fft2c(x)|^2 over the corpus, floored at 1e-8 of its maximum. An
// all-zero corpus yields a spectrum equal to the floor everywhere.
PowerSpectrum estimate_spectrum(const std::vector<ComplexImage> &corpus);

// Approximates E[x0 | x_t] under the schedule's noise model. A network
// backend would implement the same three calls.
class Denoiser {
  public:
    explicit Denoiser(ShellSchedule sched) : sched_(std::move(sched)) {}
    virtual ~Denoiser() = default;

    virtual ComplexImage denoise(const ComplexImage &x, int t) const = 0;
    // v^H times the Jacobian of denoise at x.
    virtual ComplexImage vjp(const ComplexImage &x, int t, const ComplexImage &v) const = 0;
    // Typical per-frequency gain of the Jacobian. Used only to scale guidance
    // and defaults to one everywhere.
    virtual RealGrid frequency_gain(int t, Shape shape) const;

    const ShellSchedule &schedule() const { return sched_; }

  private:
    ShellSchedule sched_;
};

enum class DenoiserKind { wiener, empirical };

// Exact posterior mean for prior N(0, F^-1 diag(P) F) observed through noise
// with covariance F^-1 diag(G_t^2) F: gain P / (P + G_t^2) per frequency.
class WienerDenoiser final : public Denoiser {
  public:
    WienerDenoiser(PowerSpectrum spectrum, ShellSchedule sched, DenoiserKind kind = DenoiserKind::wiener);

    ComplexImage denoise(const ComplexImage &x, int t) const override;
    ComplexImage vjp(const ComplexImage &x, int t, const ComplexImage &v) const override;
    RealGrid frequency_gain(int t, Shape shape) const override;

    const PowerSpectrum &spectrum() const { return spectrum_; }
    DenoiserKind kind() const { return kind_; }

  private:
    ComplexImage apply_gain(const ComplexImage &x, int t) const;

    PowerSpectrum spectrum_;
    DenoiserKind kind_;
};

}  // namespace c2f
