#include "flowcast/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "flowcast/rng.hpp"

namespace flowcast {

RocCurve roc_auc(std::span<const EvalCase> cases) {
    if (cases.empty()) throw std::invalid_argument("roc_auc: no cases");

    // label every cell of every case
    std::vector<std::pair<double, bool>> cells;  // (mass, is truth cell)
    RocCurve curve;
    for (const EvalCase& c : cases) {
        const int truth_idx = c.prediction.spec.cell_index(c.truth);
        if (truth_idx < 0) {
            ++curve.dropped_cases;
            continue;
        }
        for (size_t i = 0; i < c.prediction.masses.size(); ++i)
            cells.emplace_back(c.prediction.masses[i],
                               static_cast<int>(i) == truth_idx);
    }
    if (cells.empty()) throw std::invalid_argument("roc_auc: all cases dropped");

    std::sort(cells.begin(), cells.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });
    double total_pos = 0.0, total_neg = 0.0;
    for (const auto& [mass, positive] : cells) (positive ? total_pos : total_neg) += 1.0;

    curve.points.emplace_back(0.0, 0.0);
    double tp = 0.0, fp = 0.0;
    size_t i = 0;
    while (i < cells.size()) {
        // all cells sharing a value cross the threshold together (>= semantics)
        const double value = cells[i].first;
        while (i < cells.size() && cells[i].first == value) {
            (cells[i].second ? tp : fp) += 1.0;
            ++i;
        }
        curve.points.emplace_back(fp / total_neg, tp / total_pos);
    }
    if (curve.points.back() != std::make_pair(1.0, 1.0))
        curve.points.emplace_back(1.0, 1.0);

    double auc = 0.0;
    for (size_t p = 1; p < curve.points.size(); ++p) {
        const auto& [x0, y0] = curve.points[p - 1];
        const auto& [x1, y1] = curve.points[p];
        auc += (x1 - x0) * 0.5 * (y0 + y1);
    }
    curve.auc = auc;
    return curve;
}

double mhd(std::span<const Vec2> a, std::span<const Vec2> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("mhd: empty point set");
    auto directed = [](std::span<const Vec2> from, std::span<const Vec2> to) {
        double sum = 0.0;
        for (const Vec2 p : from) {
            double best = std::numeric_limits<double>::infinity();
            for (const Vec2 q : to) best = std::min(best, (p - q).norm());
            sum += best;
        }
        return sum / static_cast<double>(from.size());
    };
    return std::max(directed(a, b), directed(b, a));
}

std::vector<Vec2> sample_raster(const DensityRaster& raster, int n, uint64_t seed) {
    if (n < 1) throw std::invalid_argument("sample_raster: n must be >= 1");
    std::vector<double> cdf(raster.masses.size());
    double acc = 0.0;
    for (size_t i = 0; i < raster.masses.size(); ++i) {
        acc += raster.masses[i];
        cdf[i] = acc;
    }
    if (!(acc > 0.0)) throw std::invalid_argument("sample_raster: zero-mass raster");

    Rng rng(seed);
    const RasterSpec& spec = raster.spec;
    std::vector<Vec2> out;
    out.reserve(static_cast<size_t>(n));
    for (int s = 0; s < n; ++s) {
        const double u = rng.uniform() * acc;
        const size_t cell = static_cast<size_t>(
            std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
        const int ix = static_cast<int>(cell) % spec.nx;
        const int iy = static_cast<int>(cell) / spec.nx;
        const Rect r = spec.cell_rect(ix, iy);
        out.push_back({r.xmin + rng.uniform() * (r.xmax - r.xmin),
                       r.ymin + rng.uniform() * (r.ymax - r.ymin)});
    }
    return out;
}

DensityRaster random_walk_baseline(const Measurement& meas, double t, double sigma_x,
                                   double sigma_rw, const RasterSpec& spec) {
    if (!(t > 0.0)) throw std::invalid_argument("random_walk_baseline: t must be > 0");
    DensityRaster raster;
    raster.spec = spec;
    raster.t = t;
    raster.masses.assign(static_cast<size_t>(spec.cells()), 0.0);
    const double variance = sigma_x * sigma_x + sigma_rw * sigma_rw * t;
    accumulate_gaussian(raster.masses, spec, meas.x_hat + t * meas.v_hat, variance, 1.0);
    const double total = raster.sum();
    if (!(total > 0.0))
        throw std::runtime_error("random_walk_baseline: zero mass over the raster");
    for (double& m : raster.masses) m *= 1.0 / total;
    return raster;
}

TimingReport timing_harness(const TrainedModel& model,
                            std::span<const Measurement> measurements,
                            const PredictOptions& opts, int reps) {
    if (reps < 1) throw std::invalid_argument("timing_harness: reps must be >= 1");
    if (measurements.empty())
        throw std::invalid_argument("timing_harness: no measurements");
    using clock = std::chrono::steady_clock;
    std::vector<double> per_frame;
    per_frame.reserve(static_cast<size_t>(reps) * measurements.size());
    for (int r = 0; r < reps; ++r)
        for (const Measurement& meas : measurements) {
            const auto start = clock::now();
            const auto rasters = predict(model, meas, opts);
            const auto stop = clock::now();
            const double seconds = std::chrono::duration<double>(stop - start).count();
            per_frame.push_back(seconds / static_cast<double>(rasters.size()));
        }
    TimingReport report;
    report.frames = static_cast<int>(per_frame.size()) * opts.n_t;
    double mean = 0.0;
    for (double v : per_frame) mean += v;
    mean /= static_cast<double>(per_frame.size());
    double var = 0.0;
    for (double v : per_frame) var += (v - mean) * (v - mean);
    var /= static_cast<double>(per_frame.size());
    report.mean_s_per_frame = mean;
    report.stddev_s_per_frame = std::sqrt(var);
    return report;
}

}  // namespace flowcast
