#include "c2fmc/denoiser.hpp"

#include "c2fmc/fft.hpp"

#include <algorithm>

namespace c2f {

PowerSpectrum::PowerSpectrum(RealGrid p) : p_(std::move(p)) {
    if (p_.size() == 0) throw std::invalid_argument("empty power spectrum");
    if (!all_finite(p_)) throw std::invalid_argument("power spectrum has non-finite entries");
    if (p_.min() < 0.0) throw std::invalid_argument("power spectrum has negative entries");
    if (!(p_.max() > 0.0)) throw std::invalid_argument("power spectrum is identically zero");
}

PowerSpectrum estimate_spectrum(const std::vector<ComplexImage> &corpus) {
    if (corpus.empty()) throw std::invalid_argument("estimate_spectrum: empty corpus");
    const Shape s = corpus.front().shape();
    RealGrid p(s);
    for (const auto &img : corpus) {
        require_same_shape(s, img.shape(), "estimate_spectrum corpus");
        const auto k = fft2c(img);
        for (std::size_t i = 0; i < k.size(); ++i) p[i] += std::norm(k[i]);
    }
    const double inv = 1.0 / static_cast<double>(corpus.size());
    for (auto &v : p.values()) v *= inv;
    const double m = p.max();
    // With no energy at all there is no scale to take a fraction of; fall
    // back to the relative floor itself.
    const double floor = m > 0.0 ? 1e-8 * m : 1e-8;
    for (auto &v : p.values()) v = std::max(v, floor);
    return PowerSpectrum(std::move(p));
}

RealGrid Denoiser::frequency_gain(int t, Shape shape) const {
    (void)sched_.amplitude(t);
    return RealGrid(shape, 1.0);
}

WienerDenoiser::WienerDenoiser(PowerSpectrum spectrum, ShellSchedule sched, DenoiserKind kind)
    : Denoiser(std::move(sched)), spectrum_(std::move(spectrum)), kind_(kind) {}

RealGrid WienerDenoiser::frequency_gain(int t, Shape shape) const {
    require_same_shape(spectrum_.shape(), shape, "Wiener gain");
    RealGrid g = effective_weights(schedule(), t, shape);
    const RealGrid &p = spectrum_.grid();
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double denom = p[i] + g[i] * g[i];
        g[i] = denom > 0.0 ? p[i] / denom : 0.0;
    }
    return g;
}

ComplexImage WienerDenoiser::apply_gain(const ComplexImage &x, int t) const {
    return ifft2c(weighted(fft2c(x), frequency_gain(t, x.shape())));
}

ComplexImage WienerDenoiser::denoise(const ComplexImage &x, int t) const { return apply_gain(x, t); }

ComplexImage WienerDenoiser::vjp(const ComplexImage &x, int t, const ComplexImage &v) const {
    require_same_shape(x.shape(), v.shape(), "Wiener vjp");
    // The map is linear, Hermitian and diagonal in frequency, so the vjp is
    // the same filter applied to v.
    return apply_gain(v, t);
}

}  // namespace c2f
