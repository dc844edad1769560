#include "c2fmc/bspline.hpp"
#include "c2fmc/motion_sim.hpp"
#include "c2fmc/optimize.hpp"
#include "c2fmc/phantom.hpp"
#include "c2fmc/pipeline.hpp"
#include "c2fmc/registration.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace c2f;
using namespace testing;

namespace {

DisplacementField constant_field(Shape s, double dr, double dc) {
    DisplacementField u(s);
    for (auto &v : u.row.values()) v = dr;
    for (auto &v : u.col.values()) v = dc;
    return u;
}

struct Instance {
    ComplexImage x;
    MotionProblem prob;
    RealGrid support;
};

// Two states, fully sampled, noiseless; state 1 moved by `field`.
Instance full_instance(Shape s, const DisplacementField &field, std::size_t coils, std::uint64_t seed) {
    Rng rng(seed);
    auto x = random_phantom(s, rng);
    auto prob = simulate_measurements(x, {DisplacementField(s), field}, {SamplingMask::full(s), SamplingMask::full(s)},
                                      make_coil_profiles(s, coils), 0.0, rng);
    auto support = support_of(x);
    return {std::move(x), std::move(prob), std::move(support)};
}

double mean_translation_error(const DisplacementField &u, double dr, double dc, const RealGrid &where) {
    return u.mean_endpoint_error(constant_field(u.shape(), dr, dc), &where);
}

}  // namespace

TEST_CASE("B-spline basis is a partition of unity and pullback is the transpose") {
    const BsplineBasis b(50, 16);
    CHECK(b.controls() == 7);
    for (int i = 0; i < 50; ++i) {
        double s = 0.0;
        for (int k = 0; k < b.controls(); ++k) s += b(i, k);
        CHECK(s == doctest::Approx(1.0));
    }
    Rng rng(60);
    const Shape shape{20, 24};
    const BsplineField f(shape, 8);
    std::vector<double> c(f.n_params());
    for (auto &v : c) v = rng.normal();
    DisplacementField g(shape);
    for (auto &v : g.row.values()) v = rng.normal();
    for (auto &v : g.col.values()) v = rng.normal();
    const auto bc = f.evaluate(c);
    const auto btg = f.pullback(g);
    double lhs = bc.dot(g), rhs = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) rhs += c[i] * btg[i];
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("descent with backtracking never increases the loss") {
    // Rosenbrock: ill-conditioned but smooth.
    const ObjectiveFn fn = [](const std::vector<double> &p) {
        const double a = 1.0 - p[0];
        const double b = p[1] - p[0] * p[0];
        return Objective{a * a + 100.0 * b * b, {-2.0 * a - 400.0 * p[0] * b, 200.0 * b}};
    };
    for (bool pre : {false, true}) {
        DescentOptions opt;
        opt.max_iters = 500;
        opt.rms_precondition = pre;
        opt.tolerance = 0.0;
        const auto res = descend({-1.2, 1.0}, fn, opt);
        for (std::size_t i = 1; i < res.losses.size(); ++i) CHECK(res.losses[i] <= res.losses[i - 1]);
        CHECK(res.losses.back() < 0.1 * res.losses.front());
    }
}

TEST_CASE("data term vanishes at the simulating field") {
    const Shape s{32, 32};
    Rng rng(61);
    const auto field = random_smooth_field(s, 2.5, 2.0, rng);
    const auto inst = full_instance(s, field, 2, 62);
    const auto l = registration_loss(field, inst.x, inst.prob.measurements(1), 1, inst.prob, 0.0);
    CHECK(l.data <= 1e-20);
}

TEST_CASE("registration gradient matches central finite differences") {
    Rng rng(63);
    for (int trial = 0; trial < 4; ++trial) {
        const Shape s{8, 8};
        const auto x = random_image(s, rng);
        std::vector<std::uint8_t> keep(s.size());
        for (auto &k : keep) k = rng.uniform(0.0, 1.0) < 0.6;
        keep[36] = 1;
        const SamplingMask m(s, keep);
        DisplacementField truth(s), u(s);
        for (auto *g : {&truth.row, &truth.col, &u.row, &u.col}) {
            for (auto &v : g->values()) v = rng.uniform(-1.7, 1.7);
        }
        const auto prob = simulate_measurements(x, {DisplacementField(s), truth}, {m, m},
                                                make_coil_profiles(s, 1 + trial % 3), 0.0, rng);
        const double lambda = 0.3;
        const RealGrid w = continuation_weight(s, trial % 2 ? 2.0 : 0.0);
        const RealGrid *wp = trial % 2 ? &w : nullptr;
        const auto l = registration_loss(u, x, prob.measurements(1), 1, prob, lambda, wp);
        const double h = 1e-6;
        double err = 0.0, ref = 0.0;
        for (int comp = 0; comp < 2; ++comp) {
            for (std::size_t i = 0; i < s.size(); ++i) {
                auto up = u, dn = u;
                (comp ? up.col : up.row)[i] += h;
                (comp ? dn.col : dn.row)[i] -= h;
                const double fd = (registration_loss(up, x, prob.measurements(1), 1, prob, lambda, wp).value -
                                   registration_loss(dn, x, prob.measurements(1), 1, prob, lambda, wp).value) /
                                  (2 * h);
                const double an = (comp ? l.gradient.col : l.gradient.row)[i];
                err += (fd - an) * (fd - an);
                ref += an * an;
            }
        }
        CHECK(std::sqrt(err / ref) <= 1e-4);
    }
}

TEST_CASE("a huge lambda lets the regulariser dominate the gradient") {
    Rng rng(64);
    const Shape s{16, 16};
    const auto inst = full_instance(s, constant_field(s, 1.0, 0.0), 1, 65);
    DisplacementField u(s);
    for (auto &v : u.row.values()) v = rng.uniform(-1.0, 1.0);
    const auto data = registration_loss(u, inst.x, inst.prob.measurements(1), 1, inst.prob, 0.0);
    const auto big = registration_loss(u, inst.x, inst.prob.measurements(1), 1, inst.prob, 1e6);
    auto reg = big.gradient;
    reg.add_scaled(data.gradient, -1.0);
    CHECK(std::sqrt(reg.dot(reg)) > 10.0 * std::sqrt(data.gradient.dot(data.gradient)));
}

TEST_CASE("B-spline fit: aligned input, translation, and a single-patch grid") {
    const Shape s{64, 64};
    RegistrationConfig cfg;
    cfg.grid_spacing = 16;

    const auto aligned = full_instance(s, DisplacementField(s), 1, 66);
    const auto fit0 = fit_bspline(aligned.x, aligned.prob.measurements(1), 1, aligned.prob, cfg);
    CHECK(fit0.field.max_magnitude() <= 0.1);

    const auto moved = full_instance(s, constant_field(s, 2.0, 0.0), 1, 67);
    const auto fit1 = fit_bspline(moved.x, moved.prob.measurements(1), 1, moved.prob, cfg);
    CHECK(mean_translation_error(fit1.field, 2.0, 0.0, moved.support) <= 0.3);

    cfg.grid_spacing = 64;
    const auto fit2 = fit_bspline(moved.x, moved.prob.measurements(1), 1, moved.prob, cfg);
    CHECK(mean_translation_error(fit2.field, 2.0, 0.0, moved.support) <= 0.3);
}

TEST_CASE("pixel-wise refinement: stationarity, monotone loss, warm start") {
    const Shape s{32, 32};
    Rng rng(68);
    const auto field = random_smooth_field(s, 2.0, 2.0, rng);
    const auto inst = full_instance(s, field, 1, 69);
    RegistrationConfig cfg;
    cfg.lambda = 0.0;
    const auto still = refine_pixelwise(field, inst.x, inst.prob.measurements(1), 1, inst.prob, cfg);
    DisplacementField diff = still.field;
    diff.add_scaled(field, -1.0);
    CHECK(diff.max_magnitude() <= 1e-3);

    RegistrationConfig dflt;
    dflt.grid_spacing = 16;
    const auto coarse = fit_bspline(inst.x, inst.prob.measurements(1), 1, inst.prob, dflt);
    const auto fine = refine_pixelwise(coarse.field, inst.x, inst.prob.measurements(1), 1, inst.prob, dflt);
    for (std::size_t i = 1; i < fine.losses.size(); ++i) CHECK(fine.losses[i] <= fine.losses[i - 1]);
    for (std::size_t i = 1; i < coarse.losses.size(); ++i) CHECK(coarse.losses[i] <= coarse.losses[i - 1]);
    const double lam = dflt.lambda_for(inst.prob.measurements(1));
    const double start = registration_loss(coarse.field, inst.x, inst.prob.measurements(1), 1, inst.prob, lam).value;
    CHECK(fine.losses.front() == doctest::Approx(start));
    CHECK(fine.losses.back() <= start);
}

TEST_CASE("update_motion edge cases") {
    const Shape s{32, 32};
    Rng rng(70);
    const auto x = random_phantom(s, rng);
    const WienerDenoiser d(estimate_spectrum({x}), ShellSchedule::from_config({}));
    const auto single = simulate_measurements(x, {DisplacementField(s)}, {SamplingMask::full(s)},
                                              make_coil_profiles(s, 1), 0.0, rng);
    RegistrationConfig cfg;
    const auto one = update_motion(x, single, 10, d, cfg, 0.6, GuidanceMode::normalized);
    REQUIRE(one.fields.size() == 1);
    CHECK(one.fields[0].is_zero());

    // t = 0 skips the completion: the template is the input itself.
    const auto inst = full_instance(s, constant_field(s, 1.0, 0.0), 1, 71);
    const auto zero_t = update_motion(inst.x, inst.prob, 0, d, cfg, 0.6, GuidanceMode::normalized);
    CHECK(max_abs_diff(zero_t.clean, inst.x) == 0.0);
    CHECK(zero_t.fields[0].is_zero());
    CHECK(mean_translation_error(zero_t.fields[1], 1.0, 0.0, inst.support) <= 0.3);
}

TEST_CASE("update_motion recovers a translation from a lightly noised estimate") {
    const Shape s{48, 48};
    Rng crng(72);
    std::vector<ComplexImage> corpus;
    for (int i = 0; i < 50; ++i) corpus.push_back(random_phantom(s, crng));
    ReconConfig rc;
    const auto d = make_denoiser(estimate_spectrum(corpus), rc);
    const auto inst = full_instance(s, constant_field(s, 2.0, -1.5), 2, 73);
    Rng rng(74);
    const int t = 10;
    const auto xt = corrupt(inst.x, d->schedule(), t, rng);
    RegistrationConfig cfg;
    cfg.grid_spacing = 16;
    const auto upd = update_motion(xt, inst.prob, t, *d, cfg, 0.6, GuidanceMode::normalized);
    CHECK(mean_translation_error(upd.fields[1], 2.0, -1.5, inst.support) <= 1.0);
}

TEST_CASE("min_motion_px keeps the identity for small estimated motion") {
    const Shape s{32, 32};
    Rng rng(75);
    const auto x = random_phantom(s, rng);
    const WienerDenoiser d(estimate_spectrum({x}), ShellSchedule::from_config({}));
    RegistrationConfig cfg;
    cfg.min_motion_px = 1.0;

    const auto small = full_instance(s, constant_field(s, 0.5, 0.0), 1, 76);
    CHECK(update_motion(small.x, small.prob, 0, d, cfg, 0.6, GuidanceMode::normalized).fields[1].is_zero());

    const auto large = full_instance(s, constant_field(s, 2.0, 0.0), 1, 76);
    const auto kept = update_motion(large.x, large.prob, 0, d, cfg, 0.6, GuidanceMode::normalized);
    CHECK(mean_translation_error(kept.fields[1], 2.0, 0.0, large.support) <= 0.3);

    cfg.min_motion_px = -1.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("invalid registration settings are rejected") {
    RegistrationConfig cfg;
    cfg.grid_spacing = 1;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.lambda = -1.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.pixel_iters = 0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
