#pragma once

#include <span>
#include <vector>

#include "flowcast/geometry.hpp"
#include "flowcast/legendre.hpp"

namespace flowcast {

/// Unit-magnitude planar vector field X(u) = (cos Theta(u), sin Theta(u))
/// with Theta a tensor-Legendre polynomial over canonical coordinates.
/// The polynomial extends smoothly outside [-1,1]^2; no clamping.
struct AngleField {
    int degree = 0;
    std::vector<double> coeffs;  // TensorBasis ordering, size (degree+1)^2

    double theta(Vec2 u) const;
    Vec2 eval(Vec2 u) const;  // unit vector by construction

    static AngleField constant(double angle) { return {0, {angle}}; }
};

struct AngleFitOptions {
    double reg = 1e-3;        // weight of the H1 seminorm penalty
    int budget = 500;         // max accepted ascent iterations
    double grad_tol = 1e-8;
    std::vector<double>* objective_trace = nullptr;  // accepted objective values
};

/// Fits Theta by maximizing sum_i <v_i, X(u_i)> - reg * |grad Theta|^2_{L2}
/// with first-order ascent (analytic gradient, backtracking line search).
/// Initialization: constant angle at the mean velocity direction. Velocities
/// must be unit norm within 1e-6.
AngleField fit_angle_field(std::span<const Vec2> points,
                           std::span<const Vec2> unit_velocities, int degree,
                           const AngleFitOptions& opts = {});

}  // namespace flowcast
