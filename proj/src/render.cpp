#include "c2fmc/render.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>

namespace c2f {

std::vector<std::uint8_t> render_levels(const ComplexImage &img, RenderMode mode, const ComplexImage *reference) {
    if (!all_finite(img)) throw std::invalid_argument("render: non-finite image");
    std::vector<double> value(img.size());
    double full_scale = 0.0;
    if (mode == RenderMode::magnitude) {
        for (std::size_t i = 0; i < img.size(); ++i) value[i] = std::abs(img[i]);
        full_scale = *std::max_element(value.begin(), value.end());
    } else {
        if (reference == nullptr) throw std::invalid_argument("render: error mode needs a reference image");
        require_same_shape(img.shape(), reference->shape(), "render");
        for (std::size_t i = 0; i < img.size(); ++i) {
            value[i] = 10.0 * std::abs(img[i] - (*reference)[i]);
            full_scale = std::max(full_scale, std::abs((*reference)[i]));
        }
    }
    std::vector<std::uint8_t> out(img.size(), 0);
    if (!(full_scale > 0.0)) return out;
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double v = std::min(value[i], full_scale) / full_scale;
        out[i] = static_cast<std::uint8_t>(std::lround(255.0 * v));
    }
    return out;
}

void render(const ComplexImage &img, const std::filesystem::path &out, RenderMode mode, const ComplexImage *reference) {
    const auto levels = render_levels(img, mode, reference);
    std::filesystem::path tmp = out;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot write " + tmp.string());
        f << "P5\n" << img.width() << ' ' << img.height() << "\n255\n";
        f.write(reinterpret_cast<const char *>(levels.data()), static_cast<std::streamsize>(levels.size()));
        if (!f) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, out);
}

}  // namespace c2f
