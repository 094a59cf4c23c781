#pragma once

#include <vector>

#include "flowcast/geometry.hpp"

namespace flowcast {

/// Values L_0(x)..L_d(x) by the three-term recurrence.
void legendre_values(double x, int degree, double* out);

/// Values and first derivatives of L_0..L_d.
void legendre_values_derivs(double x, int degree, double* vals, double* derivs);

/// Tensor-product Legendre basis on [-1,1]^2 with per-axis degree d.
/// Entry for the index pair (i,j) is L_i(u.x) * L_j(u.y); the flat ordering is
/// (0,0),(0,1),...,(0,d),(1,0),...,(d,d), i.e. flat = i*(d+1)+j.
class TensorBasis {
public:
    explicit TensorBasis(int degree);

    int degree() const { return degree_; }
    int size() const { return (degree_ + 1) * (degree_ + 1); }
    int flat(int i, int j) const { return i * (degree_ + 1) + j; }

    void eval(Vec2 u, std::vector<double>& out) const;
    /// Basis values plus spatial gradients (dL/dx, dL/dy per entry).
    void eval_grad(Vec2 u, std::vector<double>& vals, std::vector<Vec2>& grads) const;

private:
    int degree_;
};

/// Convenience form of the basis evaluation (allocates).
std::vector<double> legendre_tensor_basis(Vec2 u, int degree);

/// Gauss-Legendre nodes and weights on [-1,1]; exact for polynomials of
/// degree <= 2n-1.
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace flowcast
