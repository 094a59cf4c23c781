#pragma once

#include <span>
#include <vector>

#include "flowcast/flow.hpp"
#include "flowcast/geometry.hpp"
#include "flowcast/model.hpp"

namespace flowcast {

/// Noisy position/velocity reading taken at t = 0.
struct Measurement {
    Vec2 x_hat;  // scene units
    Vec2 v_hat;  // scene units / second
};

/// Regular output raster over the scene. Cell (ix, iy) spans
/// [xmin + ix*cw, xmin + (ix+1)*cw] x [ymin + iy*ch, ...]; masses are stored
/// row-major as masses[iy*nx + ix].
struct RasterSpec {
    Rect bounds;
    int nx = 64;
    int ny = 64;

    int cells() const { return nx * ny; }
    double cell_w() const { return bounds.width() / nx; }
    double cell_h() const { return bounds.height() / ny; }
    Rect cell_rect(int ix, int iy) const;
    Vec2 cell_center(int ix, int iy) const;
    /// Flat index of the cell containing p, or -1 outside the bounds.
    int cell_index(Vec2 p) const;
};

/// Grid spacing, speed partition width and tail tolerance of the run that
/// produced a raster; together they control the approximation error.
struct BoundComponents {
    double dx = 0.0;
    double ds = 0.0;
    double eps_tol = 0.0;
};

struct DensityRaster {
    RasterSpec spec;
    double t = 0.0;
    std::vector<double> masses;
    BoundComponents bound_components;

    double sum() const;
};

/// Isotropic 2D Gaussian density value.
double gaussian2(Vec2 d, double variance);

/// Smallest L such that N(0, sigma_x^2 I) puts mass 1 - eps_tol inside the
/// centered square of side L. Bisection on the closed-form square mass.
double grid_half_width(double sigma_x, double eps_tol);

/// The (2N_x+1)^2 grid x_hat + (L/2N_x)*(i,j), i,j in {-N_x..N_x}, ordered
/// i-major then j. Spacing is L/(2N_x) per axis.
std::vector<Vec2> init_grid(Vec2 x_hat, double L, int n_x);

/// Dirac weight of Eq.-style density product at one grid point:
/// N(x_hat; x0, sigma_x^2) * Pr(x0|k) * Pr(k) * Pr(s) * N(v_hat; s X_k(x0), sigma_v^2)
/// with Pr(s) = 1/(2 s_max). Requires |s| <= s_max.
double weight(const TrainedModel& model, int k, double s, Vec2 x0, const Measurement& meas);

/// All Dirac weights of one horizon step: values[k][m + l][grid index] holds
/// the weight at speed s = s_max * m / l for m in {-l..l}.
struct WeightTensor {
    int l = 0;
    double ds = 0.0;  // speed partition width s_max / l
    std::vector<std::vector<std::vector<double>>> values;

    double at(int k, int m, size_t grid_index) const {
        return values[static_cast<size_t>(k)][static_cast<size_t>(m + l)][grid_index];
    }
};

WeightTensor compute_weight_tensor(const TrainedModel& model, const Measurement& meas,
                                   std::span<const Vec2> grid, int l);

/// Mass of an isotropic Gaussian component over one axis-aligned cell:
/// w * prod_axes (Phi((hi-mu)/sigma) - Phi((lo-mu)/sigma)). Requires variance > 0.
double raster_integrate(Vec2 mean, double variance, double w, const Rect& cell);

/// Accumulates a w-weighted Gaussian atom into the raster cells via the
/// per-axis error-function closed form; variance 0 bins the atom into its
/// containing cell. Tails beyond 9 sigma are dropped (mass < 1e-18 * w).
void accumulate_gaussian(std::vector<double>& masses, const RasterSpec& spec, Vec2 mean,
                         double variance, double w);

/// Rasterizes one weighted Dirac slab: masses += scale * sum_i w[i] * N(atom[i], variance).
void rasterize_slab(std::vector<double>& masses, const RasterSpec& spec,
                    std::span<const Vec2> atoms, std::span<const double> weights,
                    double variance, double scale);

/// Closed-form linear-agent term: Pr(lin)/area(D) times the cell masses of
/// N(x_hat + t v_hat, (sigma_x^2 + t^2 sigma_v^2 + kappa t) I).
std::vector<double> linear_term(const TrainedModel& model, const Measurement& meas,
                                double t, const RasterSpec& spec);

struct PredictOptions {
    int n_t = 20;
    int n_x = 4;
    double eps_tol = 0.05;
    int raster_nx = 64;
    int raster_ny = 64;
    double flow_step_divisor = 20.0;
    int threads = 1;
    /// Raster bounds override (defaults to the scene domain). Tests use an
    /// enlarged raster to measure pre-normalization transported mass.
    std::optional<Rect> raster_bounds;
    bool normalize = true;  // Bayes step; off exposes the joint-density raster
};

/// Algorithm core: for each horizon step l = 1..n_t, extends the unit-speed
/// flow tables by one increment, evaluates the weight tensor on the speed
/// partition {m s_max / l}, rasterizes the resulting Gaussian mixture plus the
/// linear term, and normalizes to a probability raster over the scene.
/// Deterministic: slabs accumulate in fixed (k, then m ascending) order, and
/// the output is bit-identical for any thread count.
std::vector<DensityRaster> predict(const TrainedModel& model, const Measurement& meas,
                                   const PredictOptions& opts = {});

}  // namespace flowcast
