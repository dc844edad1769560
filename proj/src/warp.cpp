#include "c2fmc/warp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace c2f {

DisplacementField::DisplacementField(RealGrid r, RealGrid c) : row(std::move(r)), col(std::move(c)) {
    require_same_shape(row.shape(), col.shape(), "displacement field components");
}

bool DisplacementField::is_zero() const {
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (row[i] != 0.0 || col[i] != 0.0) return false;
    }
    return true;
}

double DisplacementField::max_magnitude() const {
    double m = 0.0;
    for (std::size_t i = 0; i < row.size(); ++i) m = std::max(m, std::hypot(row[i], col[i]));
    return m;
}

double DisplacementField::mean_endpoint_error(const DisplacementField &other, const RealGrid *where) const {
    require_same_shape(shape(), other.shape(), "endpoint error");
    if (where != nullptr) require_same_shape(shape(), where->shape(), "endpoint error mask");
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (where != nullptr && (*where)[i] == 0.0) continue;
        sum += std::hypot(row[i] - other.row[i], col[i] - other.col[i]);
        ++n;
    }
    return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

DisplacementField &DisplacementField::operator+=(const DisplacementField &o) { return add_scaled(o, 1.0); }

DisplacementField &DisplacementField::add_scaled(const DisplacementField &o, double s) {
    require_same_shape(shape(), o.shape(), "field add");
    for (std::size_t i = 0; i < row.size(); ++i) {
        row[i] += s * o.row[i];
        col[i] += s * o.col[i];
    }
    return *this;
}

double DisplacementField::dot(const DisplacementField &o) const {
    require_same_shape(shape(), o.shape(), "field dot");
    double s = 0.0;
    for (std::size_t i = 0; i < row.size(); ++i) s += row[i] * o.row[i] + col[i] * o.col[i];
    return s;
}

namespace {

struct Stencil {
    int r0, c0;
    double fr, fc;
};

Stencil stencil_at(int r, int c, double ur, double uc) {
    const double pr = r + ur;
    const double pc = c + uc;
    const double fr0 = std::floor(pr);
    const double fc0 = std::floor(pc);
    return {static_cast<int>(fr0), static_cast<int>(fc0), pr - fr0, pc - fc0};
}

void check_inputs(const ComplexImage &x, const DisplacementField &u, const char *what) {
    require_same_shape(x.shape(), u.shape(), what);
    if (!all_finite(u.row) || !all_finite(u.col)) throw std::invalid_argument(std::string(what) + ": non-finite field");
}

}  // namespace

ComplexImage warp(const ComplexImage &x, const DisplacementField &u) {
    check_inputs(x, u, "warp");
    const int h = x.height();
    const int w = x.width();
    auto at = [&](int r, int c) -> cplx { return (r < 0 || r >= h || c < 0 || c >= w) ? cplx{} : x(r, c); };

    ComplexImage out(x.shape());
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            const auto s = stencil_at(r, c, u.row(r, c), u.col(r, c));
            // Skipping zero weights keeps the identity warp bit-exact.
            cplx v = (1.0 - s.fr) * (1.0 - s.fc) * at(s.r0, s.c0);
            if (s.fc != 0.0) v += (1.0 - s.fr) * s.fc * at(s.r0, s.c0 + 1);
            if (s.fr != 0.0) v += s.fr * (1.0 - s.fc) * at(s.r0 + 1, s.c0);
            if (s.fr != 0.0 && s.fc != 0.0) v += s.fr * s.fc * at(s.r0 + 1, s.c0 + 1);
            out(r, c) = v;
        }
    }
    return out;
}

ComplexImage warp_adjoint(const ComplexImage &v, const DisplacementField &u) {
    check_inputs(v, u, "warp_adjoint");
    const int h = v.height();
    const int w = v.width();
    ComplexImage out(v.shape());
    auto scatter = [&](int r, int c, cplx val) {
        if (r >= 0 && r < h && c >= 0 && c < w) out(r, c) += val;
    };
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            const auto s = stencil_at(r, c, u.row(r, c), u.col(r, c));
            const cplx val = v(r, c);
            scatter(s.r0, s.c0, (1.0 - s.fr) * (1.0 - s.fc) * val);
            if (s.fc != 0.0) scatter(s.r0, s.c0 + 1, (1.0 - s.fr) * s.fc * val);
            if (s.fr != 0.0) scatter(s.r0 + 1, s.c0, s.fr * (1.0 - s.fc) * val);
            if (s.fr != 0.0 && s.fc != 0.0) scatter(s.r0 + 1, s.c0 + 1, s.fr * s.fc * val);
        }
    }
    return out;
}

double warp_compression(const DisplacementField &u) {
    const Shape s = u.shape();
    const ComplexImage ones(s, cplx{1.0, 0.0});
    const ComplexImage mass = warp_adjoint(ones, u);
    double m = 0.0;
    for (const auto &v : mass.values()) m = std::max(m, v.real());
    return m;
}

WarpJet warp_with_derivatives(const ComplexImage &x, const DisplacementField &u) {
    check_inputs(x, u, "warp_with_derivatives");
    const int h = x.height();
    const int w = x.width();
    auto at = [&](int r, int c) -> cplx { return (r < 0 || r >= h || c < 0 || c >= w) ? cplx{} : x(r, c); };

    WarpJet jet{ComplexImage(x.shape()), ComplexImage(x.shape()), ComplexImage(x.shape())};
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            const auto s = stencil_at(r, c, u.row(r, c), u.col(r, c));
            const cplx a = at(s.r0, s.c0);
            const cplx b = at(s.r0, s.c0 + 1);
            const cplx d = at(s.r0 + 1, s.c0);
            const cplx e = at(s.r0 + 1, s.c0 + 1);
            jet.value(r, c) = (1.0 - s.fr) * (1.0 - s.fc) * a + (1.0 - s.fr) * s.fc * b + s.fr * (1.0 - s.fc) * d +
                              s.fr * s.fc * e;
            jet.d_row(r, c) = (1.0 - s.fc) * (d - a) + s.fc * (e - b);
            jet.d_col(r, c) = (1.0 - s.fr) * (b - a) + s.fr * (e - d);
        }
    }
    return jet;
}

DisplacementField rigid_to_field(const RigidParams &params, Shape shape) {
    if (shape.height <= 0 || shape.width <= 0) throw std::invalid_argument("rigid_to_field: empty shape");
    const double th = params.theta_deg * std::numbers::pi / 180.0;
    const double ct = std::cos(th);
    const double st = std::sin(th);
    const double cr = center_index(shape.height);
    const double cc = center_index(shape.width);
    DisplacementField u(shape);
    for (int r = 0; r < shape.height; ++r) {
        for (int c = 0; c < shape.width; ++c) {
            const double pr = r - cr;
            const double pc = c - cc;
            u.row(r, c) = ct * pr - st * pc + cr + params.d_row - r;
            u.col(r, c) = st * pr + ct * pc + cc + params.d_col - c;
        }
    }
    return u;
}

FieldEnergy grad_energy(const DisplacementField &u) {
    const Shape s = u.shape();
    FieldEnergy out{0.0, DisplacementField(s)};
    auto accumulate = [&](const RealGrid &comp, RealGrid &grad) {
        for (int r = 0; r < s.height; ++r) {
            for (int c = 0; c < s.width; ++c) {
                if (r + 1 < s.height) {
                    const double d = comp(r + 1, c) - comp(r, c);
                    out.energy += d * d;
                    grad(r + 1, c) += 2.0 * d;
                    grad(r, c) -= 2.0 * d;
                }
                if (c + 1 < s.width) {
                    const double d = comp(r, c + 1) - comp(r, c);
                    out.energy += d * d;
                    grad(r, c + 1) += 2.0 * d;
                    grad(r, c) -= 2.0 * d;
                }
            }
        }
    };
    accumulate(u.row, out.gradient.row);
    accumulate(u.col, out.gradient.col);
    return out;
}

}  // namespace c2f
