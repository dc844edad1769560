#include "c2fmc/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace c2f {

namespace {

constexpr double armijo_c = 1e-4;
constexpr double min_step = 1e-8;
constexpr double rms_decay = 0.9;

}  // namespace

DescentResult descend(std::vector<double> params, const ObjectiveFn &fn, const DescentOptions &opt) {
    if (opt.max_iters < 0) throw std::invalid_argument("descend: negative iteration count");
    if (!(opt.initial_step > 0.0)) throw std::invalid_argument("descend: step must be positive");

    Objective cur = fn(params);
    if (cur.gradient.size() != params.size()) throw std::invalid_argument("descend: gradient size mismatch");
    DescentResult out{std::move(params), {cur.value}};

    const std::size_t n = out.params.size();
    std::vector<double> ms;
    std::vector<double> dir(n);
    std::vector<double> trial(n);
    double step = opt.initial_step;

    for (int it = 0; it < opt.max_iters; ++it) {
        const auto &g = cur.gradient;
        if (opt.rms_precondition) {
            if (ms.empty()) {
                ms.resize(n);
                for (std::size_t i = 0; i < n; ++i) ms[i] = g[i] * g[i];
            } else {
                for (std::size_t i = 0; i < n; ++i) ms[i] = rms_decay * ms[i] + (1.0 - rms_decay) * g[i] * g[i];
            }
            double rms_max = 0.0;
            for (double v : ms) rms_max = std::max(rms_max, std::sqrt(v));
            const double eps = 1e-12 * rms_max + 1e-30;
            for (std::size_t i = 0; i < n; ++i) dir[i] = g[i] / (std::sqrt(ms[i]) + eps);
        } else {
            double gmax = 0.0;
            for (double v : g) gmax = std::max(gmax, std::abs(v));
            for (std::size_t i = 0; i < n; ++i) dir[i] = g[i] / (gmax + 1e-30);
        }
        double slope = 0.0;
        for (std::size_t i = 0; i < n; ++i) slope += g[i] * dir[i];

        Objective next;
        for (;;) {
            for (std::size_t i = 0; i < n; ++i) trial[i] = out.params[i] - step * dir[i];
            next = fn(trial);
            if (std::isfinite(next.value) && next.value <= cur.value - armijo_c * step * slope) break;
            step *= 0.5;
            if (step < min_step) return out;
        }
        const double rel = (cur.value - next.value) / std::max(cur.value, 1e-300);
        out.params.swap(trial);
        cur = std::move(next);
        out.losses.push_back(cur.value);
        step *= 1.5;
        if (rel < opt.tolerance) break;
    }
    return out;
}

}  // namespace c2f
