#pragma once

#include <array>
#include <vector>

#include "flowcast/geometry.hpp"
#include "flowcast/trajectory.hpp"

namespace flowcast {

/// A trajectory's endpoint pair in canonical coordinates, in both orderings.
struct EndpointEmbedding {
    std::array<double, 4> forward;   // (x_start, y_start, x_end, y_end)
    std::array<double, 4> reversed;  // (x_end, y_end, x_start, y_start)
};

EndpointEmbedding endpoint_embedding(const Trajectory& traj, const SceneDomain& scene);

/// Distance between endpoint pairs irrespective of traversal order:
/// min over A's two orderings of the 4D Euclidean distance to B's forward
/// embedding. Symmetric in A and B.
double endpoint_distance(const Trajectory& a, const Trajectory& b, const SceneDomain& scene);

struct Clustering {
    std::vector<std::vector<int>> clusters;  // S_1..S_n, member indices
    std::vector<int> exemplars;              // one per cluster
    std::vector<int> unclassified;           // S_0
    bool degenerate_fallback = false;        // set when no exemplar emerged

    int n() const { return static_cast<int>(clusters.size()); }
};

struct ApOptions {
    double damping = 0.9;
    int max_iter = 1000;
    int convergence_window = 50;  // stop after this many unchanged iterations
};

/// Affinity propagation (responsibility/availability message passing) on a
/// dense similarity matrix. The diagonal is overwritten with `preference`.
/// Ties are broken deterministically by a tiny index-proportional jitter
/// added to the similarities. If no exemplar emerges, all points become one
/// cluster whose exemplar maximizes the similarity row sum, and the result is
/// flagged.
Clustering affinity_propagation(const std::vector<std::vector<double>>& similarity,
                                double preference, const ApOptions& opts = {});

struct ClusterOptions {
    int min_size = 3;                   // clusters below this merge into S_0
    double preference_quantile = 0.5;   // of off-diagonal similarities
    ApOptions ap;
};

/// Groups trajectories by endpoint intent: similarity = -endpoint_distance^2,
/// preference = the configured quantile of off-diagonal similarities,
/// undersized clusters merged into S_0.
Clustering cluster_trajectories(const std::vector<Trajectory>& trajs,
                                const SceneDomain& scene,
                                const ClusterOptions& opts = {});

}  // namespace flowcast
