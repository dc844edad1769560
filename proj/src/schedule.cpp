#include "c2fmc/schedule.hpp"

#include "c2fmc/fft.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace c2f {

ShellSchedule::ShellSchedule(std::vector<double> amplitude, std::vector<double> sigma_shell,
                             std::vector<double> sigma_noise, double a_clamp)
    : amplitude_(std::move(amplitude)), sigma_shell_(std::move(sigma_shell)), sigma_noise_(std::move(sigma_noise)),
      a_clamp_(a_clamp) {
    if (amplitude_.size() < 2) throw std::invalid_argument("schedule needs T >= 1");
    if (sigma_shell_.size() != amplitude_.size() || sigma_noise_.size() != amplitude_.size()) {
        throw std::invalid_argument("schedule tables must all have length T + 1");
    }
    if (!(a_clamp_ >= 0.0 && a_clamp_ < 1.0)) throw std::invalid_argument("a_clamp must lie in [0, 1)");
    for (std::size_t t = 0; t < amplitude_.size(); ++t) {
        if (!(amplitude_[t] >= 0.0 && amplitude_[t] <= a_clamp_)) {
            throw std::invalid_argument("amplitude at t=" + std::to_string(t) + " outside [0, a_clamp]");
        }
        if (!(sigma_shell_[t] > 0.0) || !std::isfinite(sigma_shell_[t])) {
            throw std::invalid_argument("shell width must be positive and finite");
        }
        if (!(sigma_noise_[t] >= 0.0) || !std::isfinite(sigma_noise_[t])) {
            throw std::invalid_argument("noise level must be non-negative and finite");
        }
        if (t > 0 && sigma_noise_[t] < sigma_noise_[t - 1]) {
            throw std::invalid_argument("noise level must not increase as t decreases");
        }
    }
}

ShellSchedule ShellSchedule::from_config(const ScheduleConfig &cfg) {
    if (cfg.T < 1) throw std::invalid_argument("T must be at least 1");
    if (!(cfg.sigma_min > 0.0) || !(cfg.sigma_max > 0.0)) throw std::invalid_argument("noise levels must be positive");
    if (cfg.sigma_min > 0.01 * cfg.sigma_max) {
        throw std::invalid_argument("sigma_min must be at most 1% of sigma_max");
    }
    const auto n = static_cast<std::size_t>(cfg.T) + 1;
    std::vector<double> a(n), s(n), sn(n);
    const double ratio = cfg.sigma_max / cfg.sigma_min;
    for (int t = 0; t <= cfg.T; ++t) {
        const double f = static_cast<double>(t) / cfg.T;
        a[t] = std::min(1.1 * f, cfg.a_clamp);
        s[t] = 5.0 * std::exp(5.0 * f);
        sn[t] = t == cfg.T ? cfg.sigma_max : cfg.sigma_min * std::pow(ratio, f);
    }
    return ShellSchedule(std::move(a), std::move(s), std::move(sn), cfg.a_clamp);
}

int ShellSchedule::checked(int t) const {
    if (t < 0 || t > T()) {
        throw std::out_of_range("timestep " + std::to_string(t) + " outside [0, " + std::to_string(T()) + "]");
    }
    return t;
}

RealGrid shell(const ShellSchedule &sched, int t, Shape shape) {
    const double a = sched.amplitude(t);
    const double s = sched.sigma_shell(t);
    const double denom = 2.0 * s * s;
    const int cr = center_index(shape.height);
    const int cc = center_index(shape.width);
    RealGrid h(shape, 1.0);
    if (a == 0.0) return h;
    for (int r = 0; r < shape.height; ++r) {
        for (int c = 0; c < shape.width; ++c) {
            const double d2 = static_cast<double>((r - cr) * (r - cr) + (c - cc) * (c - cc));
            h(r, c) = 1.0 - a * std::exp(-d2 / denom);
        }
    }
    return h;
}

RealGrid effective_weights(const ShellSchedule &sched, int t, Shape shape) {
    RealGrid g = shell(sched, t, shape);
    const double sn = sched.sigma_noise(t);
    for (auto &v : g.values()) v *= sn;
    return g;
}

ComplexImage corrupt(const ComplexImage &x0, const ShellSchedule &sched, int t, Rng &rng) {
    const RealGrid g = effective_weights(sched, t, x0.shape());
    auto z = fft2c(complex_noise<ImageDomain>(x0.shape(), rng));
    ComplexImage out = ifft2c(weighted(std::move(z), g));
    out += x0;
    return out;
}

}  // namespace c2f
