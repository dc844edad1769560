#include "c2fmc/motion_sim.hpp"
#include "c2fmc/phantom.hpp"
#include "c2fmc/pipeline.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace c2f;
using namespace testing;

TEST_CASE("nrmse") {
    const Shape s{1, 2};
    const ComplexImage x(s, std::vector<cplx>{{3.0, 0.0}, {4.0, 0.0}});
    CHECK(nrmse(x, x) == 0.0);
    CHECK(nrmse(ComplexImage(s), x) == doctest::Approx(1.0));
    const ComplexImage y(s, std::vector<cplx>{{3.0, 0.0}, {4.0, 5.0}});
    CHECK(nrmse(y, x) == doctest::Approx(1.0));
    CHECK(magnitude_nrmse(cplx{0.0, 1.0} * x, x) == doctest::Approx(0.0));
    CHECK_THROWS_AS(nrmse(x, ComplexImage(s)), std::invalid_argument);
}

TEST_CASE("motion timesteps") {
    CHECK(motion_timesteps(100, 10, 0.6) == std::vector<int>{60, 54, 48, 42, 36, 30, 24, 18, 12, 6});
    CHECK(motion_timesteps(100, 1, 0.6) == std::vector<int>{60});
    CHECK(motion_timesteps(10, 10, 0.2) == std::vector<int>{2, 1});
    CHECK(motion_timesteps(100, 0, 0.6).empty());
    ReconConfig cfg;
    cfg.motion_steps = std::vector<int>{5, 50, 20};
    CHECK(resolve_motion_steps(cfg, 100) == std::vector<int>{50, 20, 5});
    cfg.motion_steps = std::vector<int>{101};
    CHECK_THROWS_AS(resolve_motion_steps(cfg, 100), std::invalid_argument);
    cfg.motion_steps.reset();
    cfg.motion_correction = false;
    CHECK(resolve_motion_steps(cfg, 100).empty());
}

namespace {

struct Setup {
    ComplexImage x;
    std::unique_ptr<WienerDenoiser> d;
};

Setup phantom_setup(Shape s, std::uint64_t seed, const ReconConfig &cfg) {
    Rng rng(seed);
    std::vector<ComplexImage> corpus;
    for (int i = 0; i < 40; ++i) corpus.push_back(random_phantom(s, rng));
    auto x = random_phantom(s, rng);
    return {std::move(x), make_denoiser(estimate_spectrum(corpus), cfg)};
}

}  // namespace

TEST_CASE("single fully sampled state reconstructs accurately") {
    const Shape s{32, 32};
    ReconConfig cfg;
    cfg.schedule.T = 50;
    auto st = phantom_setup(s, 90, cfg);
    Rng rng(91);
    const auto prob = simulate_measurements(st.x, {DisplacementField(s)}, {SamplingMask::full(s)},
                                            make_coil_profiles(s, 2), 0.0, rng);
    const auto res = reconstruct(prob, *st.d, cfg);
    CHECK(nrmse(res.image, st.x) <= 0.05);
    CHECK(res.trace.size() == 50);
    CHECK(res.trace.front().t == 50);
    CHECK(res.trace.back().t == 1);
    REQUIRE(res.fields.size() == 1);
    CHECK(res.fields[0].is_zero());
}

TEST_CASE("reconstruction is deterministic and keeps fields zero without updates") {
    const Shape s{32, 32};
    ReconConfig cfg;
    cfg.schedule.T = 20;
    cfg.motion_correction = false;
    cfg.seed = 3;
    auto st = phantom_setup(s, 92, cfg);
    Rng rng(93);
    const auto base = variable_density_mask(s, 2.0, 2.0, rng);
    const auto masks = partition_mask(base, 2, AcsMode::disjoint, 0, rng);
    DisplacementField shift(s);
    for (auto &v : shift.row.values()) v = 1.0;
    const auto prob = simulate_measurements(st.x, {DisplacementField(s), shift}, masks, make_coil_profiles(s, 2),
                                            0.0, rng);
    const auto a = reconstruct(prob, *st.d, cfg);
    const auto b = reconstruct(prob, *st.d, cfg);
    CHECK(max_abs_diff(a.image, b.image) == 0.0);
    for (const auto &f : a.fields) CHECK(f.is_zero());
}

TEST_CASE("no true motion yields small estimated fields") {
    const Shape s{48, 48};
    ReconConfig cfg;
    cfg.schedule.T = 40;
    cfg.n_motion_updates = 3;
    cfg.registration.grid_spacing = 16;
    cfg.registration.bspline_iters = 25;
    cfg.registration.pixel_iters = 30;
    auto st = phantom_setup(s, 94, cfg);
    Rng rng(95);
    const auto base = variable_density_mask(s, 2.0, 2.0, rng);
    const auto masks = partition_mask(base, 2, AcsMode::disjoint, 0, rng);
    const auto prob = simulate_measurements(st.x, {DisplacementField(s), DisplacementField(s)}, masks,
                                            make_coil_profiles(s, 4), 0.0, rng);
    const auto res = reconstruct(prob, *st.d, cfg);
    CHECK(res.fields[0].is_zero());
    CHECK(res.fields[1].max_magnitude() <= 0.5);
}

TEST_CASE("invalid reconstruction settings are rejected") {
    ReconConfig cfg;
    cfg.gamma = -1.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.motion_start = 1.5;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.n_motion_updates = -1;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
