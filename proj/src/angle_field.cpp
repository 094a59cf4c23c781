#include "flowcast/angle_field.hpp"

#include <cmath>
#include <stdexcept>

namespace flowcast {

double AngleField::theta(Vec2 u) const {
    const int d = degree;
    double lx[64], ly[64];
    legendre_values(u.x, d, lx);
    legendre_values(u.y, d, ly);
    double acc = 0.0;
    for (int i = 0; i <= d; ++i) {
        double row = 0.0;
        for (int j = 0; j <= d; ++j) row += coeffs[i * (d + 1) + j] * ly[j];
        acc += lx[i] * row;
    }
    return acc;
}

Vec2 AngleField::eval(Vec2 u) const {
    const double th = theta(u);
    return {std::cos(th), std::sin(th)};
}

namespace {

/// Gram matrix of the H1 seminorm: G_ab = int_{[-1,1]^2} grad L_a . grad L_b.
/// The integrand is polynomial, so Gauss-Legendre with degree+1 nodes is exact.
std::vector<double> gradient_gram(const TensorBasis& basis) {
    const int nb = basis.size();
    std::vector<double> gram(static_cast<size_t>(nb) * nb, 0.0);
    std::vector<double> nodes, weights;
    gauss_legendre(basis.degree() + 1, nodes, weights);
    std::vector<double> vals;
    std::vector<Vec2> grads;
    for (size_t qi = 0; qi < nodes.size(); ++qi)
        for (size_t qj = 0; qj < nodes.size(); ++qj) {
            basis.eval_grad({nodes[qi], nodes[qj]}, vals, grads);
            const double w = weights[qi] * weights[qj];
            for (int a = 0; a < nb; ++a)
                for (int b = 0; b <= a; ++b) {
                    const double g = w * grads[a].dot(grads[b]);
                    gram[a * nb + b] += g;
                    if (a != b) gram[b * nb + a] += g;
                }
        }
    return gram;
}

}  // namespace

AngleField fit_angle_field(std::span<const Vec2> points,
                           std::span<const Vec2> unit_velocities, int degree,
                           const AngleFitOptions& opts) {
    if (points.empty()) throw std::invalid_argument("fit_angle_field: empty data");
    if (points.size() != unit_velocities.size())
        throw std::invalid_argument("fit_angle_field: list length mismatch");
    for (const Vec2 v : unit_velocities)
        if (std::abs(v.norm() - 1.0) > 1e-6)
            throw std::invalid_argument("fit_angle_field: velocities must be unit norm");

    const TensorBasis basis(degree);
    const int nb = basis.size();
    const size_t n = points.size();

    // basis values at the data points
    std::vector<double> bvals(n * nb);
    {
        std::vector<double> tmp;
        for (size_t i = 0; i < n; ++i) {
            basis.eval(points[i], tmp);
            std::copy(tmp.begin(), tmp.end(), bvals.begin() + i * nb);
        }
    }
    const std::vector<double> gram = gradient_gram(basis);

    // objective: sum_i <v_i, (cos th_i, sin th_i)> - reg * c' G c
    auto objective = [&](const std::vector<double>& c, std::vector<double>* grad) {
        double obj = 0.0;
        if (grad) std::fill(grad->begin(), grad->end(), 0.0);
        for (size_t i = 0; i < n; ++i) {
            const double* b = bvals.data() + i * nb;
            double th = 0.0;
            for (int a = 0; a < nb; ++a) th += c[a] * b[a];
            const double ct = std::cos(th), st = std::sin(th);
            obj += unit_velocities[i].x * ct + unit_velocities[i].y * st;
            if (grad) {
                const double dth = -unit_velocities[i].x * st + unit_velocities[i].y * ct;
                for (int a = 0; a < nb; ++a) (*grad)[a] += dth * b[a];
            }
        }
        double quad = 0.0;
        for (int a = 0; a < nb; ++a) {
            double row = 0.0;
            for (int b = 0; b < nb; ++b) row += gram[a * nb + b] * c[b];
            quad += c[a] * row;
            if (grad) (*grad)[a] -= 2.0 * opts.reg * row;
        }
        return obj - opts.reg * quad;
    };

    // init: constant angle of the mean velocity
    Vec2 mean;
    for (const Vec2 v : unit_velocities) mean += v;
    std::vector<double> c(nb, 0.0);
    c[0] = std::atan2(mean.y, mean.x);

    std::vector<double> grad(nb), trial(nb);
    double obj = objective(c, &grad);
    if (opts.objective_trace) opts.objective_trace->push_back(obj);
    double step = 1.0 / static_cast<double>(n);
    for (int iter = 0; iter < opts.budget; ++iter) {
        double gnorm = 0.0;
        for (double g : grad) gnorm += g * g;
        gnorm = std::sqrt(gnorm);
        if (gnorm < opts.grad_tol) break;

        bool accepted = false;
        for (int bt = 0; bt < 60; ++bt) {
            for (int a = 0; a < nb; ++a) trial[a] = c[a] + step * grad[a];
            const double trial_obj = objective(trial, nullptr);
            if (trial_obj > obj) {
                c = trial;
                obj = objective(c, &grad);
                if (opts.objective_trace) opts.objective_trace->push_back(obj);
                step *= 1.5;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;  // no ascent direction at machine precision
    }

    AngleField field;
    field.degree = degree;
    field.coeffs = std::move(c);
    return field;
}

}  // namespace flowcast
