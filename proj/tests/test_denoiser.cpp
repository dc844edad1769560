#include "c2fmc/denoiser.hpp"
#include "c2fmc/fft.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace c2f;
using namespace testing;

namespace {

ShellSchedule constant_noise(int T, double sigma) {
    const auto n = static_cast<std::size_t>(T) + 1;
    return ShellSchedule(std::vector<double>(n, 0.0), std::vector<double>(n, 1.0), std::vector<double>(n, sigma), 0.9);
}

RealGrid decaying_spectrum(Shape s, double peak) {
    RealGrid p(s);
    for (int r = 0; r < s.height; ++r) {
        for (int c = 0; c < s.width; ++c) {
            const double d = std::hypot(r - s.height / 2, c - s.width / 2);
            p(r, c) = peak / (1.0 + d * d / 4.0);
        }
    }
    return p;
}

ComplexImage draw_prior(const RealGrid &p, Rng &rng) {
    auto k = complex_noise<FrequencyDomain>(p.shape(), rng);
    for (std::size_t i = 0; i < k.size(); ++i) k[i] *= std::sqrt(p[i]);
    return ifft2c(k);
}

}  // namespace

TEST_CASE("spectrum invariants") {
    CHECK_THROWS_AS(PowerSpectrum(RealGrid(Shape{4, 4})), std::invalid_argument);
    CHECK_THROWS_AS(PowerSpectrum(RealGrid(Shape{4, 4}, -1.0)), std::invalid_argument);
    CHECK_THROWS_AS(estimate_spectrum({}), std::invalid_argument);
}

TEST_CASE("spectrum of a single image") {
    Rng rng(40);
    const auto x = random_image(Shape{8, 8}, rng);
    const auto p = estimate_spectrum({x});
    const auto k = fft2c(x);
    double m = 0.0;
    for (const auto &v : k.values()) m = std::max(m, std::norm(v));
    for (std::size_t i = 0; i < k.size(); ++i) CHECK(p.grid()[i] == doctest::Approx(std::max(std::norm(k[i]), 1e-8 * m)));
}

TEST_CASE("all-zero corpus gives an all-floor spectrum") {
    const auto p = estimate_spectrum({ComplexImage(Shape{4, 4}), ComplexImage(Shape{4, 4})});
    CHECK(p.grid().min() == p.grid().max());
    CHECK(p.grid().min() > 0.0);
}

TEST_CASE("spectrum estimate from a known Gaussian prior") {
    Rng rng(41);
    const Shape s{16, 16};
    const auto truth = decaying_spectrum(s, 9.0);
    std::vector<ComplexImage> corpus;
    for (int i = 0; i < 500; ++i) corpus.push_back(draw_prior(truth, rng));
    const auto est = estimate_spectrum(corpus);
    int within3 = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double se = truth[i] / std::sqrt(500.0);
        const double z = std::abs(est.grid()[i] - truth[i]) / se;
        if (z <= 3.0) ++within3;
        CHECK(z <= 5.0);
    }
    CHECK(within3 >= static_cast<int>(0.98 * s.size()));
}

TEST_CASE("Wiener gain on a single bin") {
    const Shape s{4, 4};
    RealGrid p(s, 4.0);
    p(1, 3) = 0.0;
    const WienerDenoiser d(PowerSpectrum(p), constant_noise(2, 2.0));
    Rng rng(42);
    const auto x = random_image(s, rng);
    const auto kx = fft2c(x);
    const auto out = fft2c(d.denoise(x, 1));
    CHECK(std::abs(out(0, 0) - 0.5 * kx(0, 0)) < 1e-12);
    CHECK(std::abs(out(1, 3)) < 1e-12);
    const auto v = random_image(s, rng);
    const auto kv = fft2c(v);
    const auto jv = fft2c(d.vjp(x, 1, v));
    CHECK(std::abs(jv(2, 2) - 0.5 * kv(2, 2)) < 1e-12);
    CHECK(norm(d.vjp(x, 1, ComplexImage(s))) == 0.0);
}

TEST_CASE("small noise leaves the input nearly unchanged") {
    Rng rng(43);
    const Shape s{16, 16};
    const auto p = decaying_spectrum(s, 4.0);
    const auto sched = ShellSchedule::from_config({});
    const WienerDenoiser d{PowerSpectrum(p), sched};
    const auto x = random_image(s, rng);
    const double bound = std::pow(sched.sigma_noise(0), 2) / p.min();
    CHECK(rel_diff(d.denoise(x, 0), x) <= bound);
}

TEST_CASE("vjp is exact for the linear Wiener map") {
    Rng rng(44);
    const Shape s{12, 12};
    const WienerDenoiser d{PowerSpectrum(decaying_spectrum(s, 50.0)), ShellSchedule::from_config({})};
    const auto x = random_image(s, rng);
    const auto v = random_image(s, rng);
    const auto w = random_image(s, rng);
    const int t = 60;
    const double h = 1e-3;
    auto fd = d.denoise(x + h * v, t) - d.denoise(x, t);
    fd *= 1.0 / h;
    // Hermitian map: the vjp equals the Jacobian-vector product.
    CHECK(rel_diff(fd, d.vjp(x, t, v)) <= 1e-6);
    CHECK(std::abs(inner(d.denoise(v, t), w) - inner(v, d.vjp(x, t, w))) <= 1e-12 * norm(v) * norm(w));
}

TEST_CASE("gains lie in [0, 1]") {
    const Shape s{16, 16};
    const WienerDenoiser d{PowerSpectrum(decaying_spectrum(s, 50.0)), ShellSchedule::from_config({})};
    for (int t = 0; t <= 100; t += 10) {
        const auto g = d.frequency_gain(t, s);
        CHECK(g.min() >= 0.0);
        CHECK(g.max() <= 1.0);
    }
}

TEST_CASE("the Wiener denoiser beats identity and zero in mean squared error") {
    Rng rng(45);
    const Shape s{16, 16};
    const auto p = decaying_spectrum(s, 25.0);
    ScheduleConfig cfg;
    cfg.sigma_max = 20.0;
    const auto sched = ShellSchedule::from_config(cfg);
    const WienerDenoiser d{PowerSpectrum(p), sched};
    double e_d = 0.0, e_id = 0.0, e_zero = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const int t = 1 + static_cast<int>(rng.below(100));
        const auto x0 = draw_prior(p, rng);
        const auto xt = corrupt(x0, sched, t, rng);
        e_d += squared_norm(d.denoise(xt, t) - x0);
        e_id += squared_norm(xt - x0);
        e_zero += squared_norm(x0);
    }
    CHECK(e_d <= e_id);
    CHECK(e_d <= e_zero);
}
