#include "flowcast/priors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "flowcast/flow.hpp"

namespace flowcast {

double PositionPrior::potential(Vec2 u) const {
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

double PositionPrior::density(Vec2 x_scene, const SceneDomain& scene) const {
    return std::exp(-potential(scene.to_canonical(x_scene)) - log_partition);
}

namespace {

struct QuadGrid {
    int quad_n;
    double cell_weight;               // canonical cell area (2/q)^2
    std::vector<double> basis_vals;   // quad_n^2 x nb, row-major
    std::vector<double> potentials;   // scratch: -V at each node

    QuadGrid(int quad_n, const TensorBasis& basis) : quad_n(quad_n) {
        const int nb = basis.size();
        cell_weight = (2.0 / quad_n) * (2.0 / quad_n);
        basis_vals.resize(static_cast<size_t>(quad_n) * quad_n * nb);
        potentials.resize(static_cast<size_t>(quad_n) * quad_n);
        std::vector<double> tmp;
        for (int i = 0; i < quad_n; ++i)
            for (int j = 0; j < quad_n; ++j) {
                const Vec2 u{-1.0 + (i + 0.5) * 2.0 / quad_n,
                             -1.0 + (j + 0.5) * 2.0 / quad_n};
                basis.eval(u, tmp);
                std::copy(tmp.begin(), tmp.end(),
                          basis_vals.begin() + (static_cast<size_t>(i) * quad_n + j) * nb);
            }
    }

    /// log of the canonical partition function int exp(-V) du (midpoint rule),
    /// and optionally the expectations E[L_a] under the Gibbs density.
    double log_z(const std::vector<double>& c, int nb, std::vector<double>* expectations) {
        const size_t nq = potentials.size();
        double shift = -std::numeric_limits<double>::infinity();
        for (size_t q = 0; q < nq; ++q) {
            const double* b = basis_vals.data() + q * nb;
            double v = 0.0;
            for (int a = 0; a < nb; ++a) v += c[a] * b[a];
            potentials[q] = -v;
            shift = std::max(shift, -v);
        }
        double zsum = 0.0;
        if (expectations) std::fill(expectations->begin(), expectations->end(), 0.0);
        for (size_t q = 0; q < nq; ++q) {
            const double e = std::exp(potentials[q] - shift);
            zsum += e;
            if (expectations) {
                const double* b = basis_vals.data() + q * nb;
                for (int a = 0; a < nb; ++a) (*expectations)[a] += e * b[a];
            }
        }
        if (expectations)
            for (int a = 0; a < nb; ++a) (*expectations)[a] /= zsum;
        return shift + std::log(zsum * cell_weight);
    }
};

}  // namespace

double position_prior_objective(std::span<const Vec2> canonical_points,
                                std::span<const double> coeffs, int degree, double reg,
                                int quad_n) {
    const TensorBasis basis(degree);
    const int nb = basis.size();
    QuadGrid quad(quad_n, basis);
    std::vector<double> c(coeffs.begin(), coeffs.end());
    c[0] = 0.0;
    double data_term = 0.0;
    std::vector<double> tmp;
    for (const Vec2 u : canonical_points) {
        basis.eval(u, tmp);
        double v = 0.0;
        for (int a = 0; a < nb; ++a) v += c[a] * tmp[a];
        data_term -= v;
    }
    double ridge = 0.0;
    for (int a = 0; a < nb; ++a) ridge += c[a] * c[a];
    const double n = static_cast<double>(canonical_points.size());
    return data_term - n * quad.log_z(c, nb, nullptr) - reg * ridge;
}

PositionPrior fit_position_prior(std::span<const Vec2> canonical_points, int degree,
                                 const PriorFitOptions& opts, double scene_area) {
    if (canonical_points.empty())
        throw std::invalid_argument("fit_position_prior: empty data");
    if (opts.quad_n < 8)
        throw std::invalid_argument("fit_position_prior: quad_n must be >= 8");
    for (const Vec2 u : canonical_points)
        if (u.x < -1.0 - 1e-9 || u.x > 1.0 + 1e-9 || u.y < -1.0 - 1e-9 || u.y > 1.0 + 1e-9)
            throw std::invalid_argument("fit_position_prior: point outside [-1,1]^2");

    const TensorBasis basis(degree);
    const int nb = basis.size();
    QuadGrid quad(opts.quad_n, basis);
    const double n = static_cast<double>(canonical_points.size());

    // sufficient statistics: S_a = sum_i L_a(u_i)
    std::vector<double> stats(nb, 0.0);
    {
        std::vector<double> tmp;
        for (const Vec2 u : canonical_points) {
            basis.eval(u, tmp);
            for (int a = 0; a < nb; ++a) stats[a] += tmp[a];
        }
    }

    std::vector<double> c(nb, 0.0), grad(nb, 0.0), expect(nb, 0.0), trial(nb);
    auto eval = [&](const std::vector<double>& cv, std::vector<double>* g) {
        const double lz = quad.log_z(cv, nb, g ? &expect : nullptr);
        double data = 0.0, ridge = 0.0;
        for (int a = 0; a < nb; ++a) {
            data -= cv[a] * stats[a];
            ridge += cv[a] * cv[a];
        }
        if (g) {
            for (int a = 0; a < nb; ++a)
                (*g)[a] = -stats[a] + n * expect[a] - 2.0 * opts.reg * cv[a];
            (*g)[0] = 0.0;  // constant coefficient pinned
        }
        return data - n * lz - opts.reg * ridge;
    };

    double obj = eval(c, &grad);
    double step = 1.0 / n;
    for (int iter = 0; iter < opts.max_iter; ++iter) {
        double gnorm = 0.0;
        for (double g : grad) gnorm += g * g;
        gnorm = std::sqrt(gnorm);
        if (gnorm < opts.grad_tol) break;

        bool accepted = false;
        for (int bt = 0; bt < 80; ++bt) {
            for (int a = 0; a < nb; ++a) trial[a] = c[a] + step * grad[a];
            trial[0] = 0.0;
            const double trial_obj = eval(trial, nullptr);
            if (trial_obj > obj) {
                c = trial;
                obj = eval(c, &grad);
                step *= 1.8;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;
    }

    PositionPrior prior;
    prior.degree = degree;
    prior.coeffs = c;
    prior.quad_n = opts.quad_n;
    // scene-unit partition: Z = (area/4) * Z_canonical
    prior.log_partition = std::log(scene_area / 4.0) + quad.log_z(c, nb, nullptr);
    return prior;
}

NoiseModel NoiseModel::make(double sigma_x, double frame_dt, double kappa) {
    if (!(sigma_x > 0.0)) throw std::invalid_argument("NoiseModel: sigma_x must be > 0");
    if (!(frame_dt > 0.0)) throw std::invalid_argument("NoiseModel: frame_dt must be > 0");
    if (!(kappa >= 0.0)) throw std::invalid_argument("NoiseModel: kappa must be >= 0");
    return {sigma_x, 2.0 * sigma_x / frame_dt, kappa};
}

ModelPriors ModelPriors::make(int n, double s_max) {
    if (n < 0) throw std::invalid_argument("ModelPriors: n must be >= 0");
    if (!(s_max > 0.0)) throw std::invalid_argument("ModelPriors: s_max must be > 0");
    return {n, 1.0 / (n + 1), s_max};
}

double estimate_s_max(std::span<const Trajectory> smoothed) {
    if (smoothed.empty()) throw std::invalid_argument("estimate_s_max: no trajectories");
    double best = 0.0;
    for (const auto& traj : smoothed)
        for (const auto& vs : velocities(traj)) best = std::max(best, vs.v.norm());
    return best;
}

double estimate_sigma_x(std::span<const Trajectory> raw,
                        std::span<const Trajectory> smoothed) {
    if (raw.size() != smoothed.size())
        throw std::invalid_argument("estimate_sigma_x: list length mismatch");
    double sq_sum = 0.0;
    size_t count = 0;
    for (size_t i = 0; i < raw.size(); ++i) {
        if (raw[i].samples.size() != smoothed[i].samples.size())
            throw std::invalid_argument("estimate_sigma_x: sample count mismatch");
        for (size_t j = 0; j < raw[i].samples.size(); ++j) {
            const Vec2 r = raw[i].samples[j].p - smoothed[i].samples[j].p;
            sq_sum += r.x * r.x + r.y * r.y;
            count += 2;
        }
    }
    return count == 0 ? 0.0 : std::sqrt(sq_sum / static_cast<double>(count));
}

namespace {

/// Position along a trajectory at time-from-start tau, linearly interpolated;
/// false when tau is not covered.
bool position_at(const Trajectory& traj, double tau, Vec2* out) {
    const double t0 = traj.samples.front().t;
    const double t = t0 + tau;
    if (t < t0 || t > traj.samples.back().t) return false;
    for (size_t i = 0; i + 1 < traj.samples.size(); ++i) {
        const auto& a = traj.samples[i];
        const auto& b = traj.samples[i + 1];
        if (t <= b.t) {
            const double f = (t - a.t) / (b.t - a.t);
            *out = a.p + f * (b.p - a.p);
            return true;
        }
    }
    *out = traj.samples.back().p;
    return true;
}

}  // namespace

double estimate_kappa(const Clustering& clusters, std::span<const AngleField> fields,
                      std::span<const Trajectory> trajs, std::span<const double> eval_times,
                      const SceneDomain& scene) {
    if (fields.size() != clusters.clusters.size())
        throw std::invalid_argument("estimate_kappa: one field per cluster required");
    for (double t : eval_times)
        if (!(t > 0.0))
            throw std::invalid_argument("estimate_kappa: eval_times must be > 0");

    std::vector<double> sorted_times(eval_times.begin(), eval_times.end());
    std::sort(sorted_times.begin(), sorted_times.end());

    const double step = scene.frame_dt / 4.0;
    double sq_sum = 0.0;
    size_t count = 0;
    for (size_t k = 0; k < clusters.clusters.size(); ++k) {
        const AngleField& field = fields[k];
        for (int idx : clusters.clusters[k]) {
            const Trajectory& traj = trajs[static_cast<size_t>(idx)];
            const auto vel = velocities(traj);
            // constant model speed: mean signed projection onto the field
            double s = 0.0;
            size_t ns = vel.size() - 1;  // last entry duplicates its neighbor
            if (ns == 0) ns = 1;
            for (size_t i = 0; i < ns; ++i)
                s += vel[i].v.dot(field.eval(scene.to_canonical(traj.samples[i].p)));
            s /= static_cast<double>(ns);

            Vec2 synth = traj.samples.front().p;
            double reached = 0.0;
            for (double t : sorted_times) {
                Vec2 truth;
                if (!position_at(traj, t, &truth)) break;
                synth = flow(field, scene, synth, s * (t - reached), step);
                reached = t;
                const Vec2 r = (truth - synth) * (1.0 / std::sqrt(t));
                sq_sum += r.x * r.x + r.y * r.y;
                count += 2;
            }
        }
    }
    if (count == 0)
        throw std::invalid_argument("estimate_kappa: no trajectory covers any eval time");
    return sq_sum / static_cast<double>(count);
}

}  // namespace flowcast
