#pragma once

#include "c2fmc/denoiser.hpp"
#include "c2fmc/forward.hpp"
#include "c2fmc/rng.hpp"
#include "c2fmc/warp.hpp"

#include <optional>
#include <vector>

namespace c2f {

enum class GuidanceMode {
    // gamma_t = gamma for every step.
    constant,
    // gamma_t = gamma / (max_k (G_t - G_{t-1}) G_t W_t * kappa), with W_t the
    // denoiser's frequency gain and kappa = max(1, largest warp_compression of
    // the used fields). Keeps the guidance step a fixed fraction of the
    // largest stable step as the schedule and the fields change.
    normalized,
};

struct GuidanceSpec {
    std::vector<DisplacementField> fields;  // one per state of the problem
    std::vector<std::size_t> states;        // states whose data term is used
    double gamma = 0.6;
    GuidanceMode mode = GuidanceMode::normalized;
    // Treat the denoiser Jacobian as identity in the gradient chain.
    bool frozen_denoiser = false;

    // Guidance with zero fields for every state of `prob`.
    static GuidanceSpec all_states(const MotionProblem &prob, double gamma,
                                   GuidanceMode mode = GuidanceMode::normalized);
};

double guidance_weight(const GuidanceSpec &spec, const Denoiser &d, int t, Shape shape);

// (G_t^2)^-1 applied in frequency to denoise(x, t) - x.
ComplexImage score_estimate(const Denoiser &d, const ComplexImage &x, int t);

struct GuidanceValue {
    double loss = 0.0;  // sum over used states of ||y - A warp(x0)||^2
    ComplexImage gradient;
};
GuidanceValue evaluate_guidance(const GuidanceSpec &spec, const ComplexImage &x0_hat, const MotionProblem &prob);

// Gradient of -sum ||y - A warp(x0)||^2 with respect to x0 (factor 2 included).
ComplexImage guidance_grad(const GuidanceSpec &spec, const ComplexImage &x0_hat, const MotionProblem &prob);

struct StepResult {
    ComplexImage next;    // x_{t-1}
    ComplexImage x0_hat;  // denoiser output at x_t
    double data_loss = 0.0;
};

// One guided reverse step from t to t - 1. Pass null spec/prob for an
// unconditional step.
StepResult c2f_step(const Denoiser &d, const ComplexImage &x_t, int t, const GuidanceSpec *spec = nullptr,
                    const MotionProblem *prob = nullptr);

// x_T drawn from N(0, F^-1 G_T^2 F).
ComplexImage initial_noise(const Denoiser &d, Shape shape, Rng &rng);

struct SampleStart {
    int from_t = -1;                   // -1 means T
    std::optional<ComplexImage> init;  // required when from_t < T
};

// Iterates c2f_step from the start down to t = 0.
ComplexImage sample(const Denoiser &d, Shape shape, Rng &rng, const GuidanceSpec *spec = nullptr,
                    const MotionProblem *prob = nullptr, const SampleStart &start = {});

}  // namespace c2f
