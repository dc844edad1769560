#include "c2fmc/phantom.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace c2f {

namespace {

struct Ellipse {
    double cr, cc, ar, ac, theta, value;

    bool contains(double r, double c) const {
        const double dr = r - cr;
        const double dc = c - cc;
        const double u = dr * std::cos(theta) + dc * std::sin(theta);
        const double v = -dr * std::sin(theta) + dc * std::cos(theta);
        return (u / ar) * (u / ar) + (v / ac) * (v / ac) < 1.0;
    }
};

}  // namespace

ComplexImage random_phantom(Shape shape, Rng &rng) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    const double head_r = 0.42 + 0.03 * rng.normal();
    const double head_c = 0.36 + 0.03 * rng.normal();
    const double fr = rng.uniform(1.0, 3.0);
    const double phase = rng.uniform(0.0, 6.0);
    const double fc = rng.uniform(1.0, 3.0);

    std::vector<Ellipse> inner(4 + rng.below(4));
    for (auto &e : inner) {
        e.cr = rng.uniform(-0.2, 0.2);
        e.cc = rng.uniform(-0.2, 0.2);
        e.ar = rng.uniform(0.04, 0.15);
        e.ac = rng.uniform(0.04, 0.15);
        e.theta = rng.uniform(0.0, std::numbers::pi);
        e.value = rng.uniform(0.1, 1.0);
    }

    ComplexImage img(shape);
    for (int i = 0; i < shape.height; ++i) {
        for (int j = 0; j < shape.width; ++j) {
            // Normalised coordinates in [-0.5, 0.5).
            const double r = static_cast<double>(i) / shape.height - 0.5;
            const double c = static_cast<double>(j) / shape.width - 0.5;
            if ((r / head_r) * (r / head_r) + (c / head_c) * (c / head_c) >= 1.0) continue;
            double v = 0.6;
            for (const auto &e : inner) {
                if (e.contains(r, c)) v = e.value;
            }
            v += 0.15 * std::sin(two_pi * (fr * r + phase)) * std::cos(two_pi * fc * c);
            img(i, j) = v;
        }
    }
    return img;
}

RealGrid support_of(const ComplexImage &x) {
    RealGrid s(x.shape());
    for (std::size_t i = 0; i < x.size(); ++i) s[i] = std::abs(x[i]) > 1e-6 ? 1.0 : 0.0;
    return s;
}

}  // namespace c2f
