#pragma once

#include "c2fmc/denoiser.hpp"
#include "c2fmc/forward.hpp"
#include "c2fmc/sampler.hpp"
#include "c2fmc/warp.hpp"

#include <optional>
#include <vector>

namespace c2f {

struct RegistrationConfig {
    int grid_spacing = 32;
    int bspline_iters = 50;  // per continuation level
    int pixel_iters = 100;
    // Regularisation weight. When unset it is lambda_factor * ||y||^2 / (H W).
    std::optional<double> lambda;
    double lambda_factor = 0.03;
    double bspline_step = 0.5;
    double pixel_step = 0.5;
    double tolerance = 1e-6;
    // Coarse-to-fine k-space continuation for the B-spline stage. Each level
    // s > 0 weights the residual by exp(-r^2 / (4 s^2)) with r the distance
    // from DC in bins; 0 means unweighted.
    std::vector<double> levels = {2.0, 4.0, 8.0, 16.0, 0.0};
    // Fit the B-spline increment on top of the previous estimate instead of
    // from zero when update_motion is given earlier fields.
    bool warm_start = true;
    // With earlier fields available, guide the template completion with every
    // state through those fields instead of with state 0 alone.
    bool all_state_template = false;
    // update_motion keeps the identity for a state whose estimated field
    // averages less than this many pixels over the template support. Sub-pixel
    // fields fitted to an imperfect template blur the forward model more than
    // they correct it. 0 disables the test.
    double min_motion_px = 0.0;

    void validate() const;
    double lambda_for(const MultiCoilKSpace &y) const;
};

struct RegistrationLoss {
    double value = 0.0;
    double data = 0.0;
    DisplacementField gradient;
};

// ||W (y - A warp(xbar, u))||^2 + lambda * grad_energy(u) and its gradient in
// u. A null weight means W = 1.
RegistrationLoss registration_loss(const DisplacementField &u, const ComplexImage &xbar, const MultiCoilKSpace &y,
                                   std::size_t state, const MotionProblem &prob, double lambda,
                                   const RealGrid *kweight = nullptr);

// exp(-r^2 / (4 s^2)) around DC; all ones for s = 0.
RealGrid continuation_weight(Shape shape, double s);

struct FitResult {
    DisplacementField field;
    std::vector<double> losses;
};

// Cubic B-spline fit of a field increment on top of `base` (zero if null).
FitResult fit_bspline(const ComplexImage &xbar, const MultiCoilKSpace &y, std::size_t state, const MotionProblem &prob,
                      const RegistrationConfig &cfg, const DisplacementField *base = nullptr);

// Dense per-pixel descent started at u0.
FitResult refine_pixelwise(const DisplacementField &u0, const ComplexImage &xbar, const MultiCoilKSpace &y,
                           std::size_t state, const MotionProblem &prob, const RegistrationConfig &cfg);

// Both stages back to back.
DisplacementField register_state(const ComplexImage &xbar, const MultiCoilKSpace &y, std::size_t state,
                                 const MotionProblem &prob, const RegistrationConfig &cfg,
                                 const DisplacementField *base = nullptr);

struct MotionUpdate {
    std::vector<DisplacementField> fields;
    ComplexImage clean;  // completed estimate used as the registration template
};

// Finishes the reverse process from x_t guided by state 0 alone, then
// registers every other state against the result. State 0 stays zero.
MotionUpdate update_motion(const ComplexImage &x_t, const MotionProblem &prob, int t, const Denoiser &d,
                           const RegistrationConfig &cfg, double gamma, GuidanceMode mode,
                           const std::vector<DisplacementField> *previous = nullptr);

}  // namespace c2f
