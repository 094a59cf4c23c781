#pragma once

#include <optional>
#include <string>
#include <vector>

#include "flowcast/geometry.hpp"

namespace flowcast {

/// Every tunable default in one place. A config file (JSON) overrides these
/// defaults; CLI flags override the config file.
struct Config {
    // scene
    double frame_dt = 1.0 / 30.0;
    std::optional<Rect> scene_bounds;  // unset: data bounding box + 2% margin

    // ingest
    int smooth_window = 4;

    // clustering
    int min_cluster_size = 3;
    double preference_quantile = 0.5;
    double ap_damping = 0.9;
    int ap_max_iter = 1000;
    int ap_convergence_window = 50;

    // fields
    int field_degree = 5;
    double field_reg = 1e-3;
    int field_fit_budget = 500;
    double flow_step_divisor = 20.0;  // RK4 step = s_max * frame_dt / divisor

    // priors
    int prior_degree = 5;
    double prior_reg = 1e-3;
    int prior_quad_n = 64;
    std::vector<double> kappa_eval_frames = {50.0, 100.0, 200.0};
    double sigma_x_min = 1e-6;                // floor for the estimate, scene units
    std::optional<double> sigma_x_override;   // skip estimation entirely

    // forecast
    int n_x = 4;
    double eps_tol = 0.05;
    int raster_nx = 64;
    int raster_ny = 64;

    // eval
    int eval_samples = 1000;
    std::optional<double> sigma_rw;  // unset: rms training speed * sqrt(frame_dt)

    int threads = 1;

    static Config load(const std::string& path);
    std::string to_json_string() const;  // full echo, 2-space indent
    void apply_json_string(const std::string& text);
};

}  // namespace flowcast
