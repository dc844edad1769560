#include "c2fmc/grid.hpp"

#include <algorithm>
#include <cmath>

namespace c2f {

std::string to_string(const Shape &s) {
    return std::to_string(s.height) + "x" + std::to_string(s.width);
}

void require_same_shape(const Shape &a, const Shape &b, const char *what) {
    if (!(a == b)) {
        throw std::invalid_argument(std::string(what) + ": shape mismatch " + to_string(a) + " vs " + to_string(b));
    }
}

RealGrid::RealGrid(Shape s, double fill) : shape_(s), data_(s.size(), fill) {
    if (s.height <= 0 || s.width <= 0) {
        throw std::invalid_argument("grid dimensions must be positive, got " + to_string(s));
    }
}

RealGrid::RealGrid(Shape s, std::vector<double> values) : shape_(s), data_(std::move(values)) {
    if (s.height <= 0 || s.width <= 0) {
        throw std::invalid_argument("grid dimensions must be positive, got " + to_string(s));
    }
    if (data_.size() != s.size()) {
        throw std::invalid_argument("grid data length does not match " + to_string(s));
    }
}

double RealGrid::min() const { return *std::min_element(data_.begin(), data_.end()); }
double RealGrid::max() const { return *std::max_element(data_.begin(), data_.end()); }

bool all_finite(const RealGrid &a) {
    return std::all_of(a.values().begin(), a.values().end(), [](double v) { return std::isfinite(v); });
}

}  // namespace c2f
