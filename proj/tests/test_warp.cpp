#include "c2fmc/warp.hpp"
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

DisplacementField random_field(Shape s, Rng &rng, double amp) {
    DisplacementField u(s);
    for (auto &v : u.row.values()) v = rng.uniform(-amp, amp);
    for (auto &v : u.col.values()) v = rng.uniform(-amp, amp);
    return u;
}

}  // namespace

TEST_CASE("zero field is the identity bit for bit") {
    Rng rng(20);
    const Shape s{9, 13};
    const auto x = random_image(s, rng);
    const DisplacementField zero(s);
    CHECK(max_abs_diff(warp(x, zero), x) == 0.0);
    CHECK(max_abs_diff(warp_adjoint(x, zero), x) == 0.0);
}

TEST_CASE("half-pixel column shift of a ramp") {
    const Shape s{16, 16};
    ComplexImage ramp(s);
    for (int r = 0; r < 16; ++r) {
        for (int c = 0; c < 16; ++c) ramp(r, c) = static_cast<double>(c);
    }
    const auto out = warp(ramp, constant_field(s, 0.0, 0.5));
    for (int r = 0; r < 16; ++r) {
        for (int c = 0; c + 1 < 16; ++c) CHECK(out(r, c).real() == doctest::Approx(c + 0.5).epsilon(1e-14));
        // The last column blends with the zero boundary: 0.5 * 15 + 0.5 * 0.
        CHECK(out(r, 15).real() == doctest::Approx(7.5));
    }
}

TEST_CASE("integer shift and its adjoint") {
    Rng rng(21);
    const Shape s{6, 5};
    const auto x = random_image(s, rng);
    const auto u = constant_field(s, 1.0, 0.0);
    const auto fwd = warp(x, u);
    const auto adj = warp_adjoint(x, u);
    for (int r = 0; r < 6; ++r) {
        for (int c = 0; c < 5; ++c) {
            CHECK(fwd(r, c) == (r + 1 < 6 ? x(r + 1, c) : cplx{}));
            CHECK(adj(r, c) == (r >= 1 ? x(r - 1, c) : cplx{}));
        }
    }
}

TEST_CASE("warp_adjoint passes the dot-product test") {
    Rng rng(22);
    for (int trial = 0; trial < 20; ++trial) {
        const Shape s{8 + trial, 8 + 2 * trial};
        const auto x = random_image(s, rng);
        const auto v = random_image(s, rng);
        const auto u = random_field(s, rng, 4.0);
        const cplx lhs = inner(warp(x, u), v);
        const cplx rhs = inner(x, warp_adjoint(v, u));
        CHECK(std::abs(lhs - rhs) <= 1e-12 * norm(x) * norm(v));
    }
}

TEST_CASE("warp is linear in the image") {
    Rng rng(23);
    const Shape s{12, 12};
    const auto u = random_field(s, rng, 3.0);
    const auto x = random_image(s, rng);
    const auto y = random_image(s, rng);
    CHECK(rel_diff(warp(2.0 * x + y, u), 2.0 * warp(x, u) + warp(y, u)) < 1e-14);
}

TEST_CASE("warp derivatives match finite differences away from grid lines") {
    Rng rng(24);
    const Shape s{10, 10};
    const auto x = random_image(s, rng);
    DisplacementField u(s);
    for (auto &v : u.row.values()) v = rng.uniform(0.2, 0.8);
    for (auto &v : u.col.values()) v = rng.uniform(-0.8, -0.2);
    const auto jet = warp_with_derivatives(x, u);
    CHECK(max_abs_diff(jet.value, warp(x, u)) < 1e-14);
    const double h = 1e-6;
    auto up = u;
    for (auto &v : up.row.values()) v += h;
    auto dn = u;
    for (auto &v : dn.row.values()) v -= h;
    auto fd = warp(x, up) - warp(x, dn);
    fd *= 1.0 / (2 * h);
    CHECK(rel_diff(jet.d_row, fd) < 1e-7);
}

TEST_CASE("rigid fields") {
    const Shape s{16, 16};
    CHECK(rigid_to_field({0.0, 0.0, 0.0}, s).is_zero());
    const auto t = rigid_to_field({0.0, 3.0, -2.0}, s);
    for (std::size_t i = 0; i < s.size(); ++i) {
        CHECK(t.row[i] == doctest::Approx(3.0));
        CHECK(t.col[i] == doctest::Approx(-2.0));
    }
    // Rotation matrix oracle: [cos -sin; sin cos] applied to (0, 1) relative to
    // the centre (8, 8).
    const auto q = rigid_to_field({90.0, 0.0, 0.0}, s);
    const double th = std::numbers::pi / 2;
    const double pr = std::cos(th) * 0.0 - std::sin(th) * 1.0;
    const double pc = std::sin(th) * 0.0 + std::cos(th) * 1.0;
    CHECK(q.row(8, 9) == doctest::Approx(pr - 0.0).epsilon(1e-12));
    CHECK(std::abs(q.col(8, 9) - (pc - 1.0)) < 1e-12);
    // The pixel one to the right of centre reads from one pixel above it.
    CHECK(8 + q.row(8, 9) == doctest::Approx(7.0));
    CHECK(9 + q.col(8, 9) == doctest::Approx(8.0));
}

TEST_CASE("gradient energy") {
    const Shape s{8, 8};
    const auto flat = constant_field(s, 1.5, -0.5);
    const auto e0 = grad_energy(flat);
    CHECK(e0.energy == 0.0);
    CHECK(e0.gradient.is_zero());

    DisplacementField ramp(s);
    for (int r = 0; r < 8; ++r) {
        for (int c = 0; c < 8; ++c) ramp.row(r, c) = r;
    }
    double brute = 0.0;
    for (int r = 0; r + 1 < 8; ++r) {
        for (int c = 0; c < 8; ++c) brute += std::pow(ramp.row(r + 1, c) - ramp.row(r, c), 2);
    }
    CHECK(grad_energy(ramp).energy == doctest::Approx(brute));
    CHECK(brute == 56.0);

    Rng rng(25);
    const auto u = random_field(s, rng, 2.0);
    const auto e = grad_energy(u);
    const double h = 1e-4;
    double err = 0.0, ref = 0.0;
    for (int comp = 0; comp < 2; ++comp) {
        for (std::size_t i = 0; i < s.size(); ++i) {
            auto up = u;
            auto dn = u;
            (comp == 0 ? up.row : up.col)[i] += h;
            (comp == 0 ? dn.row : dn.col)[i] -= h;
            const double fd = (grad_energy(up).energy - grad_energy(dn).energy) / (2 * h);
            const double an = (comp == 0 ? e.gradient.row : e.gradient.col)[i];
            err += (fd - an) * (fd - an);
            ref += an * an;
        }
    }
    CHECK(std::sqrt(err / ref) <= 1e-6);
}

TEST_CASE("warp compression bounds the operator norm") {
    Rng rng(26);
    const Shape s{16, 16};
    CHECK(warp_compression(DisplacementField(s)) == doctest::Approx(1.0));
    const auto u = random_field(s, rng, 1.5);
    const double kappa = warp_compression(u);
    // Power iteration on warp^H warp.
    ComplexImage v = random_image(s, rng);
    double lam = 0.0;
    for (int it = 0; it < 200; ++it) {
        v = warp_adjoint(warp(v, u), u);
        lam = norm(v);
        v *= 1.0 / lam;
    }
    CHECK(lam <= kappa + 1e-9);
}

TEST_CASE("shape mismatch is an error") {
    CHECK_THROWS_AS(warp(ComplexImage(Shape{4, 4}), DisplacementField(Shape{4, 5})), std::invalid_argument);
    CHECK_THROWS_AS(warp_adjoint(ComplexImage(Shape{4, 4}), DisplacementField(Shape{5, 4})), std::invalid_argument);
}
