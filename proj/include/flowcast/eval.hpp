#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "flowcast/forecast.hpp"
#include "flowcast/geometry.hpp"

namespace flowcast {

/// One scored prediction: a normalized raster plus the agent's true position
/// at the raster's time.
struct EvalCase {
    DensityRaster prediction;
    Vec2 truth;
};

struct RocCurve {
    std::vector<std::pair<double, double>> points;  // (fpr, tpr), sorted by fpr
    double auc = 0.0;
    int dropped_cases = 0;  // truth outside raster bounds
};

/// Occupancy ROC amalgamated over cases: positives are the cells containing a
/// truth point (one per case), negatives all other cells, thresholds the cell
/// values themselves with >= semantics; AUC by the trapezoidal rule.
RocCurve roc_auc(std::span<const EvalCase> cases);

/// Modified Hausdorff distance: max of the two directed mean nearest-neighbor
/// distances.
double mhd(std::span<const Vec2> a, std::span<const Vec2> b);

/// n iid samples from a normalized raster: cell by categorical mass, position
/// uniform within the cell. Deterministic given the seed.
std::vector<Vec2> sample_raster(const DensityRaster& raster, int n, uint64_t seed);

/// Uninformed diffusion baseline: N(x_hat + t v_hat, (sigma_x^2 + sigma_rw^2 t) I)
/// rasterized and normalized.
DensityRaster random_walk_baseline(const Measurement& meas, double t, double sigma_x,
                                   double sigma_rw, const RasterSpec& spec);

struct TimingReport {
    double mean_s_per_frame = 0.0;
    double stddev_s_per_frame = 0.0;
    int frames = 0;
};

/// Wall clock per produced raster frame over reps x measurements predictions.
TimingReport timing_harness(const TrainedModel& model,
                            std::span<const Measurement> measurements,
                            const PredictOptions& opts, int reps);

}  // namespace flowcast
