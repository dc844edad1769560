#include "c2fmc/registration.hpp"

#include "c2fmc/bspline.hpp"
#include "c2fmc/optimize.hpp"

#include <cmath>

namespace c2f {

void RegistrationConfig::validate() const {
    if (grid_spacing < 2) throw std::invalid_argument("grid_spacing must be at least 2");
    if (bspline_iters < 1 || pixel_iters < 1) throw std::invalid_argument("iteration counts must be at least 1");
    if (lambda && !(*lambda >= 0.0)) throw std::invalid_argument("lambda must be non-negative");
    if (!(lambda_factor >= 0.0)) throw std::invalid_argument("lambda_factor must be non-negative");
    if (!(min_motion_px >= 0.0)) throw std::invalid_argument("min_motion_px must be non-negative");
    if (!(bspline_step > 0.0) || !(pixel_step > 0.0)) throw std::invalid_argument("step sizes must be positive");
    if (!(tolerance >= 0.0)) throw std::invalid_argument("tolerance must be non-negative");
    if (levels.empty()) throw std::invalid_argument("at least one continuation level is required");
    for (double s : levels) {
        if (!(s >= 0.0)) throw std::invalid_argument("continuation levels must be non-negative");
    }
}

double RegistrationConfig::lambda_for(const MultiCoilKSpace &y) const {
    if (lambda) return *lambda;
    if (y.coils.empty()) return 0.0;
    return lambda_factor * y.squared_norm() / static_cast<double>(y.coils.front().size());
}

RealGrid continuation_weight(Shape shape, double s) {
    RealGrid w(shape, 1.0);
    if (s <= 0.0) return w;
    const int cr = center_index(shape.height);
    const int cc = center_index(shape.width);
    for (int r = 0; r < shape.height; ++r) {
        for (int c = 0; c < shape.width; ++c) {
            const double d2 = static_cast<double>((r - cr) * (r - cr) + (c - cc) * (c - cc));
            w(r, c) = std::exp(-d2 / (4.0 * s * s));
        }
    }
    return w;
}

RegistrationLoss registration_loss(const DisplacementField &u, const ComplexImage &xbar, const MultiCoilKSpace &y,
                                   std::size_t state, const MotionProblem &prob, double lambda,
                                   const RealGrid *kweight) {
    require_same_shape(u.shape(), xbar.shape(), "registration_loss");
    require_same_shape(xbar.shape(), prob.shape(), "registration_loss problem");
    if (y.n_coils() != prob.n_coils()) throw std::invalid_argument("registration_loss: coil count mismatch");

    const auto jet = warp_with_derivatives(xbar, u);
    auto residual = apply_forward(jet.value, prob.mask(state), prob.maps());
    for (std::size_t c = 0; c < residual.n_coils(); ++c) {
        require_same_shape(residual.coils[c].shape(), y.coils[c].shape(), "registration_loss measurements");
        residual.coils[c] -= y.coils[c];
        prob.mask(state).apply(residual.coils[c]);
    }
    double data = 0.0;
    if (kweight != nullptr) {
        for (auto &coil : residual.coils) {
            for (std::size_t i = 0; i < coil.size(); ++i) {
                const double w = (*kweight)[i];
                data += w * w * std::norm(coil[i]);
                coil[i] *= w * w;
            }
        }
    } else {
        data = residual.squared_norm();
    }
    const ComplexImage back = apply_adjoint(residual, state, prob);

    const FieldEnergy reg = grad_energy(u);
    RegistrationLoss out{data + lambda * reg.energy, data, DisplacementField(u.shape())};
    for (std::size_t i = 0; i < back.size(); ++i) {
        out.gradient.row[i] = 2.0 * (std::conj(jet.d_row[i]) * back[i]).real() + lambda * reg.gradient.row[i];
        out.gradient.col[i] = 2.0 * (std::conj(jet.d_col[i]) * back[i]).real() + lambda * reg.gradient.col[i];
    }
    return out;
}

namespace {

std::vector<double> flatten(const DisplacementField &u) {
    std::vector<double> v(2 * u.row.size());
    std::copy(u.row.values().begin(), u.row.values().end(), v.begin());
    std::copy(u.col.values().begin(), u.col.values().end(), v.begin() + static_cast<std::ptrdiff_t>(u.row.size()));
    return v;
}

DisplacementField unflatten(const std::vector<double> &v, Shape s) {
    DisplacementField u(s);
    const auto n = static_cast<std::ptrdiff_t>(s.size());
    std::copy(v.begin(), v.begin() + n, u.row.values().begin());
    std::copy(v.begin() + n, v.end(), u.col.values().begin());
    return u;
}

double energy_fraction(const MultiCoilKSpace &y, const RealGrid &w) {
    double num = 0.0;
    double den = 0.0;
    for (const auto &coil : y.coils) {
        for (std::size_t i = 0; i < coil.size(); ++i) {
            const double e = std::norm(coil[i]);
            num += w[i] * w[i] * e;
            den += e;
        }
    }
    return den > 0.0 ? num / den : 0.0;
}

}  // namespace

FitResult fit_bspline(const ComplexImage &xbar, const MultiCoilKSpace &y, std::size_t state, const MotionProblem &prob,
                      const RegistrationConfig &cfg, const DisplacementField *base) {
    cfg.validate();
    const Shape shape = xbar.shape();
    const DisplacementField zero(shape);
    const DisplacementField &u0 = base != nullptr ? *base : zero;
    require_same_shape(shape, u0.shape(), "fit_bspline base field");

    const BsplineField spline(shape, cfg.grid_spacing);
    const double lambda = cfg.lambda_for(y);
    std::vector<double> coeffs(spline.n_params(), 0.0);
    FitResult out{DisplacementField(shape), {}};

    for (double level : cfg.levels) {
        const RealGrid w = continuation_weight(shape, level);
        const RealGrid *wp = level > 0.0 ? &w : nullptr;
        // Keep the data/regulariser balance fixed as the weight removes energy.
        const double lam = level > 0.0 ? lambda * energy_fraction(y, w) : lambda;
        const ObjectiveFn fn = [&](const std::vector<double> &c) {
            DisplacementField u = spline.evaluate(c);
            u += u0;
            auto l = registration_loss(u, xbar, y, state, prob, lam, wp);
            return Objective{l.value, spline.pullback(l.gradient)};
        };
        DescentOptions opt;
        opt.max_iters = cfg.bspline_iters;
        opt.initial_step = cfg.bspline_step;
        opt.rms_precondition = true;
        opt.tolerance = cfg.tolerance;
        auto res = descend(std::move(coeffs), fn, opt);
        coeffs = std::move(res.params);
        if (level == 0.0) out.losses = std::move(res.losses);
    }
    out.field = spline.evaluate(coeffs);
    out.field += u0;
    if (out.losses.empty()) out.losses.push_back(registration_loss(out.field, xbar, y, state, prob, lambda).value);
    return out;
}

FitResult refine_pixelwise(const DisplacementField &u0, const ComplexImage &xbar, const MultiCoilKSpace &y,
                           std::size_t state, const MotionProblem &prob, const RegistrationConfig &cfg) {
    cfg.validate();
    if (!all_finite(u0.row) || !all_finite(u0.col)) throw std::invalid_argument("refine_pixelwise: non-finite start");
    const Shape shape = u0.shape();
    const double lambda = cfg.lambda_for(y);
    const ObjectiveFn fn = [&](const std::vector<double> &v) {
        auto l = registration_loss(unflatten(v, shape), xbar, y, state, prob, lambda);
        return Objective{l.value, flatten(l.gradient)};
    };
    DescentOptions opt;
    opt.max_iters = cfg.pixel_iters;
    opt.initial_step = cfg.pixel_step;
    opt.rms_precondition = false;
    opt.tolerance = cfg.tolerance;
    auto res = descend(flatten(u0), fn, opt);
    return {unflatten(res.params, shape), std::move(res.losses)};
}

DisplacementField register_state(const ComplexImage &xbar, const MultiCoilKSpace &y, std::size_t state,
                                 const MotionProblem &prob, const RegistrationConfig &cfg,
                                 const DisplacementField *base) {
    auto coarse = fit_bspline(xbar, y, state, prob, cfg, base);
    return refine_pixelwise(coarse.field, xbar, y, state, prob, cfg).field;
}

MotionUpdate update_motion(const ComplexImage &x_t, const MotionProblem &prob, int t, const Denoiser &d,
                           const RegistrationConfig &cfg, double gamma, GuidanceMode mode,
                           const std::vector<DisplacementField> *previous) {
    cfg.validate();
    const Shape shape = prob.shape();
    require_same_shape(shape, x_t.shape(), "update_motion");
    if (previous != nullptr && previous->size() != prob.n_states()) {
        throw std::invalid_argument("update_motion: previous field count mismatch");
    }

    MotionUpdate out{std::vector<DisplacementField>(prob.n_states(), DisplacementField(shape)), x_t};
    GuidanceSpec spec;
    if (cfg.all_state_template && previous != nullptr) {
        spec = GuidanceSpec::all_states(prob, gamma, mode);
        spec.fields = *previous;
    } else {
        spec.fields.assign(1, DisplacementField(shape));
        spec.states = {0};
        spec.gamma = gamma;
        spec.mode = mode;
    }
    // The completion is a deterministic ODE, so the generator is never drawn.
    Rng unused(0);
    SampleStart start;
    start.from_t = t;
    start.init = x_t;
    out.clean = sample(d, shape, unused, &spec, &prob, start);

    // Pixels holding at least a tenth of the template's peak magnitude.
    RealGrid support(shape);
    double peak = 0.0;
    for (const auto &v : out.clean.values()) peak = std::max(peak, std::abs(v));
    for (std::size_t i = 0; i < support.size(); ++i) support[i] = std::abs(out.clean[i]) >= 0.1 * peak ? 1.0 : 0.0;

    for (std::size_t tau = 1; tau < prob.n_states(); ++tau) {
        const DisplacementField *base = (cfg.warm_start && previous != nullptr) ? &(*previous)[tau] : nullptr;
        out.fields[tau] = register_state(out.clean, prob.measurements(tau), tau, prob, cfg, base);
        if (cfg.min_motion_px > 0.0 && out.fields[tau].mean_endpoint_error(DisplacementField(shape), &support) <
                                           cfg.min_motion_px) {
            out.fields[tau] = DisplacementField(shape);
        }
    }
    return out;
}

}  // namespace c2f
