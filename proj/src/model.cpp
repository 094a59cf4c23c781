#include "flowcast/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "flowcast/rng.hpp"

namespace flowcast {

void TrainedModel::validate() const {
    scene.validate();
    if (fields.size() != position_priors.size())
        throw std::invalid_argument("TrainedModel: field/prior count mismatch");
    if (static_cast<int>(fields.size()) != model_priors.n)
        throw std::invalid_argument("TrainedModel: model_priors.n mismatch");
    if (!(model_priors.s_max > 0.0))
        throw std::invalid_argument("TrainedModel: s_max must be > 0");
}

TrainedModel train_model(const std::vector<Trajectory>& raw, const Config& config,
                         TrainStats* stats) {
    if (raw.size() < 2) throw std::runtime_error("no usable trajectories (need >= 2)");

    TrainedModel model;
    model.train_config = config;

    // scene domain: explicit bounds or padded data bounding box
    if (config.scene_bounds) {
        model.scene = {*config.scene_bounds, config.frame_dt};
    } else {
        Rect box{raw[0].samples[0].p.x, raw[0].samples[0].p.y, raw[0].samples[0].p.x,
                 raw[0].samples[0].p.y};
        for (const auto& traj : raw)
            for (const auto& s : traj.samples) {
                box.xmin = std::min(box.xmin, s.p.x);
                box.ymin = std::min(box.ymin, s.p.y);
                box.xmax = std::max(box.xmax, s.p.x);
                box.ymax = std::max(box.ymax, s.p.y);
            }
        const double mx = std::max(0.02 * box.width(), 1e-9);
        const double my = std::max(0.02 * box.height(), 1e-9);
        model.scene = {{box.xmin - mx, box.ymin - my, box.xmax + mx, box.ymax + my},
                       config.frame_dt};
    }
    model.scene.validate();

    std::vector<Trajectory> smoothed;
    smoothed.reserve(raw.size());
    for (const auto& traj : raw) {
        const int window = std::min<int>(config.smooth_window,
                                         static_cast<int>(traj.samples.size()));
        if (window < config.smooth_window && stats) ++stats->short_window_trajectories;
        smoothed.push_back(smooth(traj, window));
    }

    ClusterOptions copts;
    copts.min_size = config.min_cluster_size;
    copts.preference_quantile = config.preference_quantile;
    copts.ap.damping = config.ap_damping;
    copts.ap.max_iter = config.ap_max_iter;
    copts.ap.convergence_window = config.ap_convergence_window;
    Clustering clustering = cluster_trajectories(smoothed, model.scene, copts);
    if (clustering.n() == 0)
        throw std::runtime_error(
            "clustering produced no clusters (n = 0); lower min_cluster_size or "
            "provide more trajectories");

    // one field + one position prior per cluster
    for (int k = 0; k < clustering.n(); ++k) {
        const auto& members = clustering.clusters[k];
        const Trajectory& exemplar = smoothed[static_cast<size_t>(clustering.exemplars[k])];
        const Vec2 ref = exemplar.samples.back().p - exemplar.samples.front().p;

        std::vector<Vec2> points, dirs, prior_points;
        for (int idx : members) {
            const Trajectory& traj = smoothed[static_cast<size_t>(idx)];
            const Vec2 net = traj.samples.back().p - traj.samples.front().p;
            // orient every member along the exemplar's traversal direction;
            // the per-agent speed sign is recovered at prediction time
            const double flip = net.dot(ref) < 0.0 ? -1.0 : 1.0;
            const auto vel = velocities(traj);
            for (size_t i = 0; i + 1 < vel.size(); ++i) {
                const double speed = vel[i].v.norm();
                if (speed < 1e-12) continue;
                points.push_back(model.scene.to_canonical(traj.samples[i].p));
                dirs.push_back(vel[i].v * (flip / speed));
            }
            for (const auto& s : traj.samples) {
                Vec2 u = model.scene.to_canonical(s.p);
                const Vec2 clamped{std::clamp(u.x, -1.0, 1.0), std::clamp(u.y, -1.0, 1.0)};
                if ((clamped.x != u.x || clamped.y != u.y) && stats)
                    ++stats->clamped_prior_points;
                prior_points.push_back(clamped);
            }
        }
        if (points.empty())
            throw std::runtime_error("cluster " + std::to_string(k) +
                                     " has no usable velocity samples");

        AngleFitOptions fopts;
        fopts.reg = config.field_reg;
        fopts.budget = config.field_fit_budget;
        model.fields.push_back(fit_angle_field(points, dirs, config.field_degree, fopts));

        PriorFitOptions popts;
        popts.reg = config.prior_reg;
        popts.quad_n = config.prior_quad_n;
        model.position_priors.push_back(fit_position_prior(
            prior_points, config.prior_degree, popts, model.scene.bounds.area()));
    }

    const double s_max = estimate_s_max(smoothed);
    if (!(s_max > 0.0))
        throw std::runtime_error("s_max must be > 0 (all trajectories stationary)");
    model.model_priors = ModelPriors::make(clustering.n(), s_max);

    double sigma_x;
    bool floored = false;
    if (config.sigma_x_override) {
        sigma_x = *config.sigma_x_override;
    } else {
        sigma_x = estimate_sigma_x(raw, smoothed);
        if (sigma_x < config.sigma_x_min) {
            sigma_x = config.sigma_x_min;
            floored = true;
        }
    }
    if (stats) stats->sigma_x_floored = floored;

    std::vector<double> eval_times;
    for (double f : config.kappa_eval_frames) eval_times.push_back(f * config.frame_dt);
    const double kappa =
        estimate_kappa(clustering, model.fields, smoothed, eval_times, model.scene);
    model.noise = NoiseModel::make(sigma_x, config.frame_dt, kappa);

    double sq = 0.0;
    size_t count = 0;
    for (const auto& traj : smoothed)
        for (const auto& vs : velocities(traj)) {
            sq += vs.v.norm_sq();
            ++count;
        }
    model.rms_speed = std::sqrt(sq / static_cast<double>(count));

    for (const auto& cluster : clustering.clusters)
        model.cluster_sizes.push_back(static_cast<int>(cluster.size()));
    model.unclassified_count = static_cast<int>(clustering.unclassified.size());
    if (stats) stats->clustering = clustering;

    model.validate();
    return model;
}

HoldoutSplit split_holdout(size_t count, double fraction, int fold, uint64_t seed) {
    if (!(fraction > 0.0 && fraction < 1.0))
        throw std::invalid_argument("split_holdout: fraction must be in (0,1)");
    const int folds = static_cast<int>(std::floor(1.0 / fraction));
    if (fold < 0 || fold >= folds)
        throw std::invalid_argument("split_holdout: fold out of range");
    std::vector<int> order(count);
    for (size_t i = 0; i < count; ++i) order[i] = static_cast<int>(i);
    Rng rng(seed);
    rng.shuffle(order);
    const size_t lo = static_cast<size_t>(std::floor(fraction * fold * count));
    const size_t hi = static_cast<size_t>(std::floor(fraction * (fold + 1) * count));
    HoldoutSplit split;
    for (size_t i = 0; i < count; ++i) {
        if (i >= lo && i < hi)
            split.test_indices.push_back(order[i]);
        else
            split.train_indices.push_back(order[i]);
    }
    std::sort(split.train_indices.begin(), split.train_indices.end());
    std::sort(split.test_indices.begin(), split.test_indices.end());
    return split;
}

}  // namespace flowcast
