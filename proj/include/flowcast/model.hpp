#pragma once

#include <cstdint>
#include <vector>

#include "flowcast/angle_field.hpp"
#include "flowcast/clustering.hpp"
#include "flowcast/config.hpp"
#include "flowcast/geometry.hpp"
#include "flowcast/priors.hpp"
#include "flowcast/trajectory.hpp"

namespace flowcast {

/// Everything the forecaster needs: per-intent unit fields and position
/// priors, the shared noise and model priors, and the scene.
struct TrainedModel {
    SceneDomain scene;
    std::vector<AngleField> fields;
    std::vector<PositionPrior> position_priors;  // aligned with fields
    ModelPriors model_priors;
    NoiseModel noise;
    double rms_speed = 0.0;  // of the smoothed training velocities

    std::vector<int> cluster_sizes;
    int unclassified_count = 0;
    Config train_config;

    void validate() const;
};

struct TrainStats {
    Clustering clustering;
    int clamped_prior_points = 0;  // canonical points nudged into [-1,1]^2
    bool sigma_x_floored = false;
    int short_window_trajectories = 0;  // smoothed with a reduced window
};

/// Full training pipeline: smooth, cluster by endpoint intent, fit one angle
/// field and one position prior per cluster, estimate noise parameters.
TrainedModel train_model(const std::vector<Trajectory>& raw, const Config& config,
                         TrainStats* stats = nullptr);

/// Deterministic seeded holdout split. With two folds of fraction 0.2, fold f
/// tests on shuffled slice [f*0.2, (f+1)*0.2) and trains on the rest.
struct HoldoutSplit {
    std::vector<int> train_indices;
    std::vector<int> test_indices;
};
HoldoutSplit split_holdout(size_t count, double fraction, int fold, uint64_t seed);

}  // namespace flowcast
