#pragma once

#include "c2fmc/grid.hpp"

namespace c2f {

// Per-pixel displacement in pixels. Component `row` moves along the first
// image axis, `col` along the second. Warping is pull-style: the output at
// p reads the input at p + u(p).
class DisplacementField {
  public:
    DisplacementField() = default;
    explicit DisplacementField(Shape s) : row(s), col(s) {}
    DisplacementField(RealGrid r, RealGrid c);

    RealGrid row;
    RealGrid col;

    Shape shape() const { return row.shape(); }
    bool is_zero() const;
    double max_magnitude() const;
    // Mean Euclidean distance to `other`, optionally restricted to pixels where
    // `where` is nonzero.
    double mean_endpoint_error(const DisplacementField &other, const RealGrid *where = nullptr) const;

    DisplacementField &operator+=(const DisplacementField &o);
    DisplacementField &add_scaled(const DisplacementField &o, double s);
    double dot(const DisplacementField &o) const;
};

struct RigidParams {
    double theta_deg = 0.0;
    double d_row = 0.0;
    double d_col = 0.0;
};

ComplexImage warp(const ComplexImage &x, const DisplacementField &u);
ComplexImage warp_adjoint(const ComplexImage &v, const DisplacementField &u);

// Largest total interpolation weight any input pixel receives. Every output
// pixel's weights sum to at most one, so this bounds the squared operator
// norm of warp(., u); it exceeds one where the field compresses the image.
double warp_compression(const DisplacementField &u);

// Warped image together with its derivatives with respect to the row and
// column displacement at every pixel (derivative of the bilinear sample
// position, one-sided at integer positions).
struct WarpJet {
    ComplexImage value;
    ComplexImage d_row;
    ComplexImage d_col;
};
WarpJet warp_with_derivatives(const ComplexImage &x, const DisplacementField &u);

// u(p) = R(theta) (p - centre) + centre + d - p with centre = (H/2, W/2).
// Positive theta rotates from the row axis toward the column axis.
DisplacementField rigid_to_field(const RigidParams &params, Shape shape);

struct FieldEnergy {
    double energy = 0.0;
    DisplacementField gradient;
};
// Sum over both components of squared forward differences along rows and
// columns (no wrap-around) and its exact gradient.
FieldEnergy grad_energy(const DisplacementField &u);

}  // namespace c2f
