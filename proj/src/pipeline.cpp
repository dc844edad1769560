#include "c2fmc/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace c2f {

void ReconConfig::validate() const {
    if (!(gamma >= 0.0)) throw std::invalid_argument("gamma must be non-negative");
    if (n_motion_updates < 0) throw std::invalid_argument("n_motion_updates must be non-negative");
    if (!(motion_start > 0.0 && motion_start <= 1.0)) throw std::invalid_argument("motion_start must lie in (0, 1]");
    registration.validate();
}

std::vector<int> motion_timesteps(int T, int n, double start_fraction) {
    std::vector<int> out;
    for (int k = 0; k < n; ++k) {
        const int t = static_cast<int>(std::lround(start_fraction * T * (1.0 - static_cast<double>(k) / n)));
        if (t >= 1 && t <= T && (out.empty() || t < out.back())) out.push_back(t);
    }
    return out;
}

std::vector<int> resolve_motion_steps(const ReconConfig &cfg, int T) {
    if (!cfg.motion_correction) return {};
    if (!cfg.motion_steps) return motion_timesteps(T, cfg.n_motion_updates, cfg.motion_start);
    std::vector<int> steps = *cfg.motion_steps;
    std::sort(steps.begin(), steps.end(), std::greater<>());
    steps.erase(std::unique(steps.begin(), steps.end()), steps.end());
    for (int t : steps) {
        if (t < 1 || t > T) throw std::invalid_argument("motion-update timestep outside [1, T]");
    }
    return steps;
}

ScheduleConfig schedule_for(const PowerSpectrum &p, const ReconConfig &cfg) {
    ScheduleConfig s = cfg.schedule;
    if (cfg.auto_sigma_max) {
        s.sigma_max = std::max(s.sigma_max, 3.0 * std::sqrt(p.grid().max()) / (1.0 - s.a_clamp));
    }
    return s;
}

std::unique_ptr<WienerDenoiser> make_denoiser(const PowerSpectrum &p, const ReconConfig &cfg, DenoiserKind kind) {
    return std::make_unique<WienerDenoiser>(p, ShellSchedule::from_config(schedule_for(p, cfg)), kind);
}

ReconResult reconstruct(const MotionProblem &prob, const Denoiser &d, const ReconConfig &cfg) {
    cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();
    const int T = d.schedule().T();
    const Shape shape = prob.shape();
    const std::vector<int> updates = resolve_motion_steps(cfg, T);

    Rng rng(cfg.seed);
    ReconResult out;
    out.fields.assign(prob.n_states(), DisplacementField(shape));
    out.trace.reserve(static_cast<std::size_t>(T));

    GuidanceSpec spec;
    spec.gamma = cfg.gamma;
    spec.mode = cfg.guidance_mode;
    for (std::size_t k = 0; k < prob.n_states(); ++k) spec.states.push_back(k);

    ComplexImage x = initial_noise(d, shape, rng);
    std::size_t next_update = 0;
    for (int t = T; t >= 1; --t) {
        if (next_update < updates.size() && updates[next_update] == t) {
            auto upd = update_motion(x, prob, t, d, cfg.registration, cfg.gamma, cfg.guidance_mode, &out.fields);
            out.fields = std::move(upd.fields);
            ++next_update;
        }
        spec.fields = out.fields;
        auto step = c2f_step(d, x, t, &spec, &prob);
        out.trace.push_back({t, step.data_loss});
        x = std::move(step.next);
    }
    out.image = std::move(x);
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

double nrmse(const ComplexImage &xhat, const ComplexImage &x) {
    require_same_shape(xhat.shape(), x.shape(), "nrmse");
    const double ref = norm(x);
    if (!(ref > 0.0)) throw std::invalid_argument("nrmse: reference image is zero");
    return norm(xhat - x) / ref;
}

double magnitude_nrmse(const ComplexImage &xhat, const ComplexImage &x) {
    require_same_shape(xhat.shape(), x.shape(), "magnitude_nrmse");
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = std::abs(xhat[i]) - std::abs(x[i]);
        num += d * d;
        den += std::norm(x[i]);
    }
    if (!(den > 0.0)) throw std::invalid_argument("magnitude_nrmse: reference image is zero");
    return std::sqrt(num / den);
}

ComplexImage zero_filled(const MotionProblem &prob, std::size_t state) {
    return apply_adjoint(prob.measurements(state), state, prob);
}

}  // namespace c2f
