#include "c2fmc/motion_sim.hpp"

#include "c2fmc/fft.hpp"

#include <algorithm>
#include <cmath>

namespace c2f {

DisplacementField random_smooth_field(Shape shape, double max_disp, double damping, Rng &rng) {
    if (!(max_disp >= 0.0)) throw std::invalid_argument("max_disp must be non-negative");
    if (!(damping >= 0.0)) throw std::invalid_argument("damping must be non-negative");
    const int cr = center_index(shape.height);
    const int cc = center_index(shape.width);
    RealGrid damp(shape);
    for (int r = 0; r < shape.height; ++r) {
        for (int c = 0; c < shape.width; ++c) damp(r, c) = std::exp(-damping * std::hypot(r - cr, c - cc));
    }

    DisplacementField u(shape);
    for (RealGrid *comp : {&u.row, &u.col}) {
        ComplexImage z(shape);
        for (auto &v : z.values()) v = rng.normal();
        const ComplexImage smooth = ifft2c(weighted(fft2c(z), damp));
        for (std::size_t i = 0; i < smooth.size(); ++i) (*comp)[i] = smooth[i].real();
    }
    const double m = u.max_magnitude();
    const double scale = (m > 0.0) ? max_disp / m : 0.0;
    for (std::size_t i = 0; i < u.row.size(); ++i) {
        u.row[i] *= scale;
        u.col[i] *= scale;
    }
    return u;
}

RigidParams random_rigid(double range_deg, double range_px, Rng &rng) {
    if (!(range_deg >= 0.0) || !(range_px >= 0.0)) throw std::invalid_argument("rigid ranges must be non-negative");
    auto draw = [&](double range) { return range == 0.0 ? 0.0 : rng.uniform(-range, range); };
    RigidParams p;
    p.theta_deg = draw(range_deg);
    p.d_row = draw(range_px);
    p.d_col = draw(range_px);
    return p;
}

SamplingMask variable_density_mask(Shape shape, double R, double decay, Rng &rng) {
    if (!(R >= 1.0)) throw std::invalid_argument("acceleration must be at least 1");
    if (!(decay >= 0.0)) throw std::invalid_argument("decay must be non-negative");
    const std::size_t n = shape.size();
    if (R == 1.0) return SamplingMask::full(shape);

    const int cr = center_index(shape.height);
    const int cc = center_index(shape.width);
    const double r0 = std::min(shape.height, shape.width) / 16.0;
    std::vector<double> w(n);
    std::vector<std::uint8_t> forced(n, 0);
    std::size_t n_forced = 0;
    for (int r = 0; r < shape.height; ++r) {
        for (int c = 0; c < shape.width; ++c) {
            const std::size_t i = static_cast<std::size_t>(r) * shape.width + c;
            w[i] = std::pow(1.0 + std::hypot(r - cr, c - cc) / r0, -decay);
            if (r >= cr - 4 && r < cr + 4 && c >= cc - 4 && c < cc + 4) {
                forced[i] = 1;
                ++n_forced;
            }
        }
    }
    const double target = static_cast<double>(n) / R - static_cast<double>(n_forced);
    if (target < 0.0) throw std::invalid_argument("acceleration too high for the fully sampled 8x8 centre");

    auto expected = [&](double s) {
        double e = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (!forced[i]) e += std::min(s * w[i], 1.0);
        }
        return e;
    };
    double lo = 0.0;
    double hi = 1.0;
    while (expected(hi) < target && hi < 1e300) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (expected(mid) > target ? hi : lo) = mid;
    }
    const double s = 0.5 * (lo + hi);

    std::vector<std::uint8_t> keep(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const double p = forced[i] ? 1.0 : std::min(s * w[i], 1.0);
        keep[i] = rng.uniform(0.0, 1.0) < p ? 1 : 0;
    }
    return SamplingMask(shape, std::move(keep));
}

std::vector<SamplingMask> partition_mask(const SamplingMask &mask, std::size_t n_states, AcsMode mode,
                                         int acs_width, Rng &rng) {
    if (n_states < 1) throw std::invalid_argument("partition_mask: need at least one state");
    if (mask.count() < n_states) throw std::invalid_argument("partition_mask: fewer samples than states");
    if (n_states == 1) return {mask};

    const Shape shape = mask.shape();
    const int cr = center_index(shape.height);
    const int cc = center_index(shape.width);
    const int half = acs_width / 2;
    auto in_acs = [&](std::size_t i) {
        if (mode != AcsMode::shared || acs_width <= 0) return false;
        const int r = static_cast<int>(i / shape.width);
        const int c = static_cast<int>(i % shape.width);
        return r >= cr - half && r < cr - half + acs_width && c >= cc - half && c < cc - half + acs_width;
    };

    std::vector<std::size_t> pool;
    std::vector<std::uint8_t> shared(shape.size(), 0);
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (!mask.sampled(i)) continue;
        if (in_acs(i)) {
            shared[i] = 1;
        } else {
            pool.push_back(i);
        }
    }
    if (pool.size() < n_states && std::none_of(shared.begin(), shared.end(), [](auto v) { return v != 0; })) {
        throw std::invalid_argument("partition_mask: fewer samples than states");
    }
    std::shuffle(pool.begin(), pool.end(), rng.engine());

    std::vector<std::vector<std::uint8_t>> keeps(n_states, shared);
    for (std::size_t j = 0; j < pool.size(); ++j) keeps[j % n_states][pool[j]] = 1;
    std::vector<SamplingMask> out;
    out.reserve(n_states);
    for (auto &k : keeps) out.emplace_back(shape, std::move(k));
    return out;
}

}  // namespace c2f
