#pragma once

#include <span>
#include <vector>

#include "flowcast/angle_field.hpp"
#include "flowcast/clustering.hpp"
#include "flowcast/geometry.hpp"
#include "flowcast/trajectory.hpp"

namespace flowcast {

/// Gibbs position density exp(-V(u))/Z over the scene domain, V a tensor
/// Legendre polynomial in canonical coordinates with zero constant term.
/// log_partition normalizes the density against scene-unit integration, so
/// density() integrates to 1 over D.
struct PositionPrior {
    int degree = 0;
    std::vector<double> coeffs;  // TensorBasis ordering; coeffs[0] == 0
    double log_partition = 0.0;
    int quad_n = 0;  // midpoint-rule resolution used for log_partition

    double potential(Vec2 u) const;
    double density(Vec2 x_scene, const SceneDomain& scene) const;
};

struct PriorFitOptions {
    double reg = 1e-3;     // ridge penalty weight
    int quad_n = 64;       // midpoint quadrature resolution per axis
    double grad_tol = 1e-6;
    int max_iter = 20000;
};

/// Penalized maximum likelihood: maximizes
///   -sum_i V(u_i) - N log Z(c) - reg |c|^2
/// with Z evaluated by a quad_n x quad_n midpoint rule. The problem is
/// concave; first-order ascent runs until the gradient norm drops below
/// grad_tol. Points must lie in [-1,1]^2.
PositionPrior fit_position_prior(std::span<const Vec2> canonical_points, int degree,
                                 const PriorFitOptions& opts, double scene_area);

/// The fit objective at a given coefficient vector (test hook; canonical-square
/// partition function, which differs from the fit's by a constant).
double position_prior_objective(std::span<const Vec2> canonical_points,
                                std::span<const double> coeffs, int degree, double reg,
                                int quad_n);

/// Measurement and model noise scales. sigma_v is tied to sigma_x by the
/// finite-difference velocity estimate: sigma_v = 2 sigma_x / frame_dt.
struct NoiseModel {
    double sigma_x = 0.0;  // scene units
    double sigma_v = 0.0;  // scene units / second
    double kappa = 0.0;    // scene units^2 / second

    static NoiseModel make(double sigma_x, double frame_dt, double kappa);
};

/// Uniform model prior over {X_1..X_n, lin} plus the speed-prior support bound.
struct ModelPriors {
    int n = 0;
    double p_model = 0.0;  // Pr(k) = Pr(lin) = 1/(n+1)
    double s_max = 0.0;    // scene units / second

    static ModelPriors make(int n, double s_max);
};

/// Largest finite-difference speed over all samples of all trajectories.
double estimate_s_max(std::span<const Trajectory> smoothed);

/// Pooled per-coordinate standard deviation of raw minus smoothed positions.
double estimate_sigma_x(std::span<const Trajectory> raw,
                        std::span<const Trajectory> smoothed);

/// Model-noise growth rate: for each clustered trajectory, integrates s*X_k
/// from its first sample (s = mean signed projection of the sample velocities
/// onto the field) and pools (x(t) - x_synth(t))/sqrt(t) over agents, axes and
/// eval_times; kappa is the pooled mean square, so Var(x_t - x_check_t) = kappa*t.
/// Trajectories shorter than an eval time contribute only the times they cover.
double estimate_kappa(const Clustering& clusters, std::span<const AngleField> fields,
                      std::span<const Trajectory> trajs, std::span<const double> eval_times,
                      const SceneDomain& scene);

}  // namespace flowcast
