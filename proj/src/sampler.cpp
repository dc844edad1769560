#include "c2fmc/sampler.hpp"

#include "c2fmc/fft.hpp"

#include <algorithm>

namespace c2f {

GuidanceSpec GuidanceSpec::all_states(const MotionProblem &prob, double gamma, GuidanceMode mode) {
    GuidanceSpec spec;
    spec.fields.assign(prob.n_states(), DisplacementField(prob.shape()));
    for (std::size_t k = 0; k < prob.n_states(); ++k) spec.states.push_back(k);
    spec.gamma = gamma;
    spec.mode = mode;
    return spec;
}

double guidance_weight(const GuidanceSpec &spec, const Denoiser &d, int t, Shape shape) {
    if (spec.gamma < 0.0) throw std::invalid_argument("guidance weight must be non-negative");
    if (spec.mode == GuidanceMode::constant || spec.gamma == 0.0) return spec.gamma;
    const RealGrid g = effective_weights(d.schedule(), t, shape);
    const RealGrid g1 = effective_weights(d.schedule(), t - 1, shape);
    const RealGrid w = spec.frozen_denoiser ? RealGrid(shape, 1.0) : d.frequency_gain(t, shape);
    double m = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) m = std::max(m, (g[i] - g1[i]) * g[i] * w[i]);
    if (!(m > 0.0)) return 0.0;
    double kappa = 1.0;
    for (std::size_t tau : spec.states) {
        if (tau < spec.fields.size() && !spec.fields[tau].is_zero()) {
            kappa = std::max(kappa, warp_compression(spec.fields[tau]));
        }
    }
    return spec.gamma / (m * kappa);
}

ComplexImage score_estimate(const Denoiser &d, const ComplexImage &x, int t) {
    ComplexImage diff = d.denoise(x, t);
    diff -= x;
    RealGrid inv = effective_weights(d.schedule(), t, x.shape());
    for (auto &v : inv.values()) v = 1.0 / (v * v);
    return ifft2c(weighted(fft2c(diff), inv));
}

GuidanceValue evaluate_guidance(const GuidanceSpec &spec, const ComplexImage &x0_hat, const MotionProblem &prob) {
    require_same_shape(x0_hat.shape(), prob.shape(), "guidance");
    GuidanceValue out{0.0, ComplexImage(x0_hat.shape())};
    for (std::size_t tau : spec.states) {
        if (tau >= prob.n_states()) throw std::invalid_argument("guidance state index out of range");
        if (tau >= spec.fields.size()) throw std::invalid_argument("guidance is missing a field for a used state");
        const auto &field = spec.fields[tau];
        auto residual = apply_forward(x0_hat, field, tau, prob);
        const auto &y = prob.measurements(tau);
        for (std::size_t c = 0; c < residual.n_coils(); ++c) residual.coils[c] -= y.coils[c];
        out.loss += residual.squared_norm();
        out.gradient.add_scaled(warp_adjoint(apply_adjoint(residual, tau, prob), field), -2.0);
    }
    return out;
}

ComplexImage guidance_grad(const GuidanceSpec &spec, const ComplexImage &x0_hat, const MotionProblem &prob) {
    return evaluate_guidance(spec, x0_hat, prob).gradient;
}

StepResult c2f_step(const Denoiser &d, const ComplexImage &x_t, int t, const GuidanceSpec *spec,
                    const MotionProblem *prob) {
    if (t < 1) throw std::invalid_argument("c2f_step requires t >= 1");
    if ((spec == nullptr) != (prob == nullptr)) throw std::invalid_argument("guidance needs both spec and problem");
    const Shape shape = x_t.shape();
    const RealGrid g = effective_weights(d.schedule(), t, shape);
    const RealGrid g1 = effective_weights(d.schedule(), t - 1, shape);

    StepResult out{ComplexImage(shape), d.denoise(x_t, t), 0.0};
    ComplexImage diff = out.x0_hat;
    diff -= x_t;
    KSpaceGrid s = fft2c(diff);
    for (std::size_t i = 0; i < s.size(); ++i) s[i] /= g[i] * g[i];

    if (spec != nullptr && !spec->states.empty()) {
        const double gamma_t = guidance_weight(*spec, d, t, shape);
        auto gv = evaluate_guidance(*spec, out.x0_hat, *prob);
        out.data_loss = gv.loss;
        if (gamma_t > 0.0) {
            const ComplexImage chained = spec->frozen_denoiser ? gv.gradient : d.vjp(x_t, t, gv.gradient);
            s.add_scaled(fft2c(chained), gamma_t);
        }
    }
    for (std::size_t i = 0; i < s.size(); ++i) s[i] *= (g[i] - g1[i]) * g[i];
    out.next = ifft2c(s);
    out.next += x_t;
    return out;
}

ComplexImage initial_noise(const Denoiser &d, Shape shape, Rng &rng) {
    const RealGrid g = effective_weights(d.schedule(), d.schedule().T(), shape);
    return ifft2c(weighted(fft2c(complex_noise<ImageDomain>(shape, rng)), g));
}

ComplexImage sample(const Denoiser &d, Shape shape, Rng &rng, const GuidanceSpec *spec, const MotionProblem *prob,
                    const SampleStart &start) {
    const int T = d.schedule().T();
    const int from = start.from_t < 0 ? T : start.from_t;
    if (from > T) throw std::invalid_argument("sample: start timestep beyond T");
    ComplexImage x;
    if (start.init) {
        require_same_shape(shape, start.init->shape(), "sample init");
        x = *start.init;
    } else {
        if (from != T) throw std::invalid_argument("sample: an initial image is required when starting below T");
        x = initial_noise(d, shape, rng);
    }
    for (int t = from; t >= 1; --t) x = c2f_step(d, x, t, spec, prob).next;
    return x;
}

}  // namespace c2f
