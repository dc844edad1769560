#pragma once

#include "c2fmc/denoiser.hpp"
#include "c2fmc/forward.hpp"
#include "c2fmc/registration.hpp"
#include "c2fmc/sampler.hpp"
#include "c2fmc/schedule.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

namespace c2f {

inline RegistrationConfig pipeline_registration() {
    RegistrationConfig r;
    r.lambda_factor = 1.0;
    r.min_motion_px = 1.0;
    r.warm_start = false;
    return r;
}

struct ReconConfig {
    ScheduleConfig schedule;
    // Raise sigma_max when the prior is too strong for the initial noise to
    // swamp it (see make_denoiser).
    bool auto_sigma_max = true;
    double gamma = 0.6;
    GuidanceMode guidance_mode = GuidanceMode::normalized;
    bool motion_correction = true;
    // Explicit motion-update timesteps. When unset, n_motion_updates steps are
    // spaced uniformly from motion_start * T down towards zero.
    std::optional<std::vector<int>> motion_steps;
    int n_motion_updates = 10;
    double motion_start = 0.6;
    // Templates inside the sampler are denoiser estimates rather than clean
    // images, so the pipeline regularises ten times harder than a standalone
    // registration.
    RegistrationConfig registration = pipeline_registration();
    std::uint64_t seed = 0;

    void validate() const;
};

// round(start * T * (1 - k / n)) for k = 0..n-1, deduplicated, zeros dropped,
// in decreasing order.
std::vector<int> motion_timesteps(int T, int n, double start_fraction);
std::vector<int> resolve_motion_steps(const ReconConfig &cfg, int T);

struct StepTrace {
    int t = 0;
    double data_loss = 0.0;  // sum over states of ||y - A warp(x0_hat)||^2
};

struct ReconResult {
    ComplexImage image;
    std::vector<DisplacementField> fields;
    std::vector<StepTrace> trace;  // one entry per reverse step, t = T..1
    double seconds = 0.0;
};

// Schedule for a given prior. With auto_sigma_max the top noise level is at
// least 3 sqrt(max P) / (1 - a_clamp), so even the most attenuated frequency
// starts with noise well above the prior.
ScheduleConfig schedule_for(const PowerSpectrum &p, const ReconConfig &cfg);
std::unique_ptr<WienerDenoiser> make_denoiser(const PowerSpectrum &p, const ReconConfig &cfg,
                                              DenoiserKind kind = DenoiserKind::empirical);

ReconResult reconstruct(const MotionProblem &prob, const Denoiser &d, const ReconConfig &cfg);

// ||xhat - x|| / ||x||.
double nrmse(const ComplexImage &xhat, const ComplexImage &x);
double magnitude_nrmse(const ComplexImage &xhat, const ComplexImage &x);

// Adjoint of the state's data with zeros at unsampled locations.
ComplexImage zero_filled(const MotionProblem &prob, std::size_t state = 0);

}  // namespace c2f
