#pragma once

#include "c2fmc/grid.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace c2f {

enum class RenderMode { magnitude, error_x10 };

// 8-bit grey levels, row-major. Magnitude mode maps |img| from [0, max|img|]
// to [0, 255]. Error mode maps 10 |img - reference|, clipped at
// max|reference|, onto the same range.
std::vector<std::uint8_t> render_levels(const ComplexImage &img, RenderMode mode,
                                        const ComplexImage *reference = nullptr);

// Binary PGM (P5), written atomically.
void render(const ComplexImage &img, const std::filesystem::path &out, RenderMode mode,
            const ComplexImage *reference = nullptr);

}  // namespace c2f
