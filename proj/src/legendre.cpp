#include "flowcast/legendre.hpp"

#include <cmath>
#include <stdexcept>

namespace flowcast {

void legendre_values(double x, int degree, double* out) {
    out[0] = 1.0;
    if (degree == 0) return;
    out[1] = x;
    for (int n = 1; n < degree; ++n)
        out[n + 1] = ((2 * n + 1) * x * out[n] - n * out[n - 1]) / (n + 1);
}

void legendre_values_derivs(double x, int degree, double* vals, double* derivs) {
    legendre_values(x, degree, vals);
    derivs[0] = 0.0;
    if (degree == 0) return;
    derivs[1] = 1.0;
    // L'_{n+1} = L'_{n-1} + (2n+1) L_n
    for (int n = 1; n < degree; ++n)
        derivs[n + 1] = derivs[n - 1] + (2 * n + 1) * vals[n];
}

TensorBasis::TensorBasis(int degree) : degree_(degree) {
    if (degree < 0) throw std::invalid_argument("TensorBasis: degree must be >= 0");
}

void TensorBasis::eval(Vec2 u, std::vector<double>& out) const {
    const int d = degree_;
    double lx[64], ly[64];
    if (d >= 64) throw std::invalid_argument("TensorBasis: degree too large");
    legendre_values(u.x, d, lx);
    legendre_values(u.y, d, ly);
    out.resize(size());
    for (int i = 0; i <= d; ++i)
        for (int j = 0; j <= d; ++j)
            out[flat(i, j)] = lx[i] * ly[j];
}

void TensorBasis::eval_grad(Vec2 u, std::vector<double>& vals, std::vector<Vec2>& grads) const {
    const int d = degree_;
    double lx[64], ly[64], dx[64], dy[64];
    if (d >= 64) throw std::invalid_argument("TensorBasis: degree too large");
    legendre_values_derivs(u.x, d, lx, dx);
    legendre_values_derivs(u.y, d, ly, dy);
    vals.resize(size());
    grads.resize(size());
    for (int i = 0; i <= d; ++i)
        for (int j = 0; j <= d; ++j) {
            const int f = flat(i, j);
            vals[f] = lx[i] * ly[j];
            grads[f] = {dx[i] * ly[j], lx[i] * dy[j]};
        }
}

std::vector<double> legendre_tensor_basis(Vec2 u, int degree) {
    TensorBasis basis(degree);
    std::vector<double> out;
    basis.eval(u, out);
    return out;
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
    nodes.resize(n);
    weights.resize(n);
    std::vector<double> vals(n + 1), ders(n + 1);
    for (int k = 0; k < (n + 1) / 2; ++k) {
        // Newton from the Chebyshev-node initial guess
        double x = std::cos(3.14159265358979323846 * (k + 0.75) / (n + 0.5));
        for (int it = 0; it < 100; ++it) {
            legendre_values_derivs(x, n, vals.data(), ders.data());
            const double dx = vals[n] / ders[n];
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        legendre_values_derivs(x, n, vals.data(), ders.data());
        const double w = 2.0 / ((1.0 - x * x) * ders[n] * ders[n]);
        nodes[k] = -x;
        nodes[n - 1 - k] = x;
        weights[k] = w;
        weights[n - 1 - k] = w;
    }
    if (n % 2 == 1) {
        legendre_values_derivs(0.0, n, vals.data(), ders.data());
        nodes[n / 2] = 0.0;
        weights[n / 2] = 2.0 / (ders[n] * ders[n]);
    }
}

}  // namespace flowcast
