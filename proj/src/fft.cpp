#include "c2fmc/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>

namespace c2f {
namespace {

struct FftwFree {
    void operator()(fftw_complex *p) const { fftw_free(p); }
};
using FftwBuffer = std::unique_ptr<fftw_complex, FftwFree>;

FftwBuffer allocate(std::size_t n) {
    auto *p = static_cast<fftw_complex *>(fftw_malloc(sizeof(fftw_complex) * n));
    if (p == nullptr) throw std::bad_alloc();
    return FftwBuffer(p);
}

// Planning is not thread-safe in FFTW; execution with the new-array API is.
// Plans are created once per (height, width, direction) and kept for the
// process lifetime.
fftw_plan plan_for(int h, int w, int sign) {
    static std::mutex mtx;
    static std::map<std::tuple<int, int, int>, fftw_plan> plans;
    std::lock_guard<std::mutex> lock(mtx);
    auto key = std::make_tuple(h, w, sign);
    auto it = plans.find(key);
    if (it != plans.end()) return it->second;
    auto scratch = allocate(static_cast<std::size_t>(h) * w);
    fftw_plan p = fftw_plan_dft_2d(h, w, scratch.get(), scratch.get(), sign, FFTW_ESTIMATE);
    if (p == nullptr) throw std::runtime_error("fftw planning failed");
    plans.emplace(key, p);
    return p;
}

template <class Out, class In>
Out centered_transform(const In &in, int sign) {
    if (!all_finite(in)) throw std::invalid_argument("fft: non-finite input");
    const int h = in.height();
    const int w = in.width();
    const int ch = center_index(h);
    const int cw = center_index(w);
    auto buf = allocate(in.size());

    for (int r = 0; r < h; ++r) {
        const int rs = (r - ch + h) % h;
        for (int c = 0; c < w; ++c) {
            const int cs = (c - cw + w) % w;
            const cplx v = in(r, c);
            auto &dst = buf.get()[static_cast<std::size_t>(rs) * w + cs];
            dst[0] = v.real();
            dst[1] = v.imag();
        }
    }
    fftw_execute_dft(plan_for(h, w, sign), buf.get(), buf.get());

    const double scale = 1.0 / std::sqrt(static_cast<double>(in.size()));
    Out out(in.shape());
    for (int r = 0; r < h; ++r) {
        const int rs = (r - ch + h) % h;
        for (int c = 0; c < w; ++c) {
            const int cs = (c - cw + w) % w;
            const auto &src = buf.get()[static_cast<std::size_t>(rs) * w + cs];
            out(r, c) = cplx(src[0] * scale, src[1] * scale);
        }
    }
    return out;
}

}  // namespace

KSpaceGrid fft2c(const ComplexImage &img) { return centered_transform<KSpaceGrid>(img, FFTW_FORWARD); }

ComplexImage ifft2c(const KSpaceGrid &grid) { return centered_transform<ComplexImage>(grid, FFTW_BACKWARD); }

}  // namespace c2f
