#include "flowcast/forecast.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "flowcast/parallel.hpp"

namespace flowcast {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTailSigmas = 9.0;  // per-atom truncation, residual mass < 1e-18

/// Phi((hi-mu)/sigma) - Phi((lo-mu)/sigma) via erf.
double normal_mass_1d(double lo, double hi, double mu, double sigma) {
    const double inv = 1.0 / (sigma * std::sqrt(2.0));
    return 0.5 * (std::erf((hi - mu) * inv) - std::erf((lo - mu) * inv));
}

/// Per-cell masses along one axis: out[c] = Phi(edge(c+1)) - Phi(edge(c))
/// for cells first..first+count-1 with edge(c) = origin + c*cell.
void axis_masses(double origin, double cell, int first, int count, double mean,
                 double inv_sigma_sqrt2, double* out) {
    double prev = std::erf((origin + first * cell - mean) * inv_sigma_sqrt2);
    for (int c = 0; c < count; ++c) {
        const double next =
            std::erf((origin + (first + c + 1) * cell - mean) * inv_sigma_sqrt2);
        out[c] = 0.5 * (next - prev);
        prev = next;
    }
}

double compensated_sum(std::span<const double> values) {
    double sum = 0.0, comp = 0.0;
    for (double v : values) {
        const double y = v - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return sum;
}

/// Rectangular sub-window of a raster with its own mass buffer.
struct Patch {
    int ix0 = 0, iy0 = 0, nwx = 0, nwy = 0;
    std::vector<double> values;  // nwy rows of nwx

    bool empty() const { return nwx == 0 || nwy == 0; }
};

}  // namespace

Rect RasterSpec::cell_rect(int ix, int iy) const {
    const double cw = cell_w(), ch = cell_h();
    return {bounds.xmin + ix * cw, bounds.ymin + iy * ch, bounds.xmin + (ix + 1) * cw,
            bounds.ymin + (iy + 1) * ch};
}

Vec2 RasterSpec::cell_center(int ix, int iy) const {
    return {bounds.xmin + (ix + 0.5) * cell_w(), bounds.ymin + (iy + 0.5) * cell_h()};
}

int RasterSpec::cell_index(Vec2 p) const {
    const int ix = static_cast<int>(std::floor((p.x - bounds.xmin) / cell_w()));
    const int iy = static_cast<int>(std::floor((p.y - bounds.ymin) / cell_h()));
    if (ix < 0 || ix >= nx || iy < 0 || iy >= ny) return -1;
    return iy * nx + ix;
}

double DensityRaster::sum() const { return compensated_sum(masses); }

double gaussian2(Vec2 d, double variance) {
    return std::exp(-d.norm_sq() / (2.0 * variance)) / (2.0 * kPi * variance);
}

double grid_half_width(double sigma_x, double eps_tol) {
    if (!(sigma_x > 0.0)) throw std::invalid_argument("grid_half_width: sigma_x must be > 0");
    if (!(eps_tol > 0.0 && eps_tol < 1.0))
        throw std::invalid_argument("grid_half_width: eps_tol must be in (0,1)");
    const double target = 1.0 - eps_tol;
    // mass inside the centered square of side L is erf(L / (2 sqrt(2) sigma))^2
    auto square_mass = [&](double L) {
        const double e = std::erf(L / (2.0 * std::sqrt(2.0) * sigma_x));
        return e * e;
    };
    double hi = sigma_x;
    while (square_mass(hi) < target) hi *= 2.0;
    double lo = 0.0;
    while (hi - lo > 1e-10 * hi) {
        const double mid = 0.5 * (lo + hi);
        (square_mass(mid) < target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

std::vector<Vec2> init_grid(Vec2 x_hat, double L, int n_x) {
    if (!(L > 0.0)) throw std::invalid_argument("init_grid: L must be > 0");
    if (n_x < 1) throw std::invalid_argument("init_grid: N_x must be >= 1");
    const double spacing = L / (2.0 * n_x);
    std::vector<Vec2> grid;
    grid.reserve(static_cast<size_t>(2 * n_x + 1) * (2 * n_x + 1));
    for (int i = -n_x; i <= n_x; ++i)
        for (int j = -n_x; j <= n_x; ++j)
            grid.push_back({x_hat.x + spacing * i, x_hat.y + spacing * j});
    return grid;
}

double weight(const TrainedModel& model, int k, double s, Vec2 x0, const Measurement& meas) {
    const double s_max = model.model_priors.s_max;
    if (std::abs(s) > s_max * (1.0 + 1e-9))
        throw std::invalid_argument("weight: |s| exceeds s_max");
    const NoiseModel& noise = model.noise;
    const Vec2 u = model.scene.to_canonical(x0);
    const Vec2 field_v = model.fields[static_cast<size_t>(k)].eval(u);
    const double pos_term = gaussian2(meas.x_hat - x0, noise.sigma_x * noise.sigma_x);
    const double vel_term = gaussian2(meas.v_hat - s * field_v, noise.sigma_v * noise.sigma_v);
    const double prior = model.position_priors[static_cast<size_t>(k)].density(x0, model.scene);
    return pos_term * prior * model.model_priors.p_model * (0.5 / s_max) * vel_term;
}

WeightTensor compute_weight_tensor(const TrainedModel& model, const Measurement& meas,
                                   std::span<const Vec2> grid, int l) {
    if (l < 1) throw std::invalid_argument("compute_weight_tensor: l must be >= 1");
    WeightTensor tensor;
    tensor.l = l;
    tensor.ds = model.model_priors.s_max / l;
    tensor.values.resize(model.fields.size());
    for (size_t k = 0; k < model.fields.size(); ++k) {
        tensor.values[k].resize(static_cast<size_t>(2 * l + 1));
        for (int m = -l; m <= l; ++m) {
            const double s = model.model_priors.s_max * m / l;
            auto& row = tensor.values[k][static_cast<size_t>(m + l)];
            row.reserve(grid.size());
            for (const Vec2 x0 : grid)
                row.push_back(weight(model, static_cast<int>(k), s, x0, meas));
        }
    }
    return tensor;
}

double raster_integrate(Vec2 mean, double variance, double w, const Rect& cell) {
    if (!(variance > 0.0))
        throw std::invalid_argument("raster_integrate: variance must be > 0");
    const double sigma = std::sqrt(variance);
    return w * normal_mass_1d(cell.xmin, cell.xmax, mean.x, sigma) *
           normal_mass_1d(cell.ymin, cell.ymax, mean.y, sigma);
}

namespace {

/// Core accumulation of one atom into a window buffer laid out as `rows` rows
/// of `row_len`, representing raster cells [wx0, wx0+row_len) x [wy0, wy0+rows).
void accumulate_atom(double* buf, int row_len, int wx0, int wy0, int rows,
                     const RasterSpec& spec, Vec2 mean, double variance, double w) {
    if (w == 0.0) return;
    const double cw = spec.cell_w(), ch = spec.cell_h();
    if (variance <= 0.0) {
        const int idx = spec.cell_index(mean);
        if (idx < 0) return;
        const int ix = idx % spec.nx, iy = idx / spec.nx;
        if (ix < wx0 || ix >= wx0 + row_len || iy < wy0 || iy >= wy0 + rows) return;
        buf[static_cast<size_t>(iy - wy0) * row_len + (ix - wx0)] += w;
        return;
    }
    const double sigma = std::sqrt(variance);
    const double reach = kTailSigmas * sigma;
    int ix0 = static_cast<int>(std::floor((mean.x - reach - spec.bounds.xmin) / cw));
    int ix1 = static_cast<int>(std::floor((mean.x + reach - spec.bounds.xmin) / cw));
    int iy0 = static_cast<int>(std::floor((mean.y - reach - spec.bounds.ymin) / ch));
    int iy1 = static_cast<int>(std::floor((mean.y + reach - spec.bounds.ymin) / ch));
    ix0 = std::max(ix0, wx0);
    iy0 = std::max(iy0, wy0);
    ix1 = std::min(ix1, wx0 + row_len - 1);
    iy1 = std::min(iy1, wy0 + rows - 1);
    if (ix0 > ix1 || iy0 > iy1) return;

    const int nwx = ix1 - ix0 + 1, nwy = iy1 - iy0 + 1;
    std::vector<double> wx(static_cast<size_t>(nwx)), wy(static_cast<size_t>(nwy));
    const double inv = 1.0 / (sigma * std::sqrt(2.0));
    axis_masses(spec.bounds.xmin, cw, ix0, nwx, mean.x, inv, wx.data());
    axis_masses(spec.bounds.ymin, ch, iy0, nwy, mean.y, inv, wy.data());
    for (int iy = 0; iy < nwy; ++iy) {
        const double wwy = w * wy[iy];
        double* row = buf + static_cast<size_t>(iy0 + iy - wy0) * row_len + (ix0 - wx0);
        for (int ix = 0; ix < nwx; ++ix) row[ix] += wwy * wx[ix];
    }
}

/// Window of raster cells covered by a set of atoms plus their Gaussian reach.
Patch make_patch(const RasterSpec& spec, std::span<const Vec2> atoms, double variance) {
    if (atoms.empty()) return {};
    double xmin = atoms[0].x, xmax = atoms[0].x, ymin = atoms[0].y, ymax = atoms[0].y;
    for (const Vec2 a : atoms) {
        xmin = std::min(xmin, a.x);
        xmax = std::max(xmax, a.x);
        ymin = std::min(ymin, a.y);
        ymax = std::max(ymax, a.y);
    }
    const double reach = variance > 0.0 ? kTailSigmas * std::sqrt(variance) : 0.0;
    Patch p;
    const int ix0 = std::max(0, static_cast<int>(std::floor((xmin - reach - spec.bounds.xmin) / spec.cell_w())));
    const int ix1 = std::min(spec.nx - 1, static_cast<int>(std::floor((xmax + reach - spec.bounds.xmin) / spec.cell_w())));
    const int iy0 = std::max(0, static_cast<int>(std::floor((ymin - reach - spec.bounds.ymin) / spec.cell_h())));
    const int iy1 = std::min(spec.ny - 1, static_cast<int>(std::floor((ymax + reach - spec.bounds.ymin) / spec.cell_h())));
    if (ix0 > ix1 || iy0 > iy1) return {};
    p.ix0 = ix0;
    p.iy0 = iy0;
    p.nwx = ix1 - ix0 + 1;
    p.nwy = iy1 - iy0 + 1;
    p.values.assign(static_cast<size_t>(p.nwx) * p.nwy, 0.0);
    return p;
}

}  // namespace

void accumulate_gaussian(std::vector<double>& masses, const RasterSpec& spec, Vec2 mean,
                         double variance, double w) {
    accumulate_atom(masses.data(), spec.nx, 0, 0, spec.ny, spec, mean, variance, w);
}

void rasterize_slab(std::vector<double>& masses, const RasterSpec& spec,
                    std::span<const Vec2> atoms, std::span<const double> weights,
                    double variance, double scale) {
    if (atoms.size() != weights.size())
        throw std::invalid_argument("rasterize_slab: atom/weight length mismatch");
    for (size_t i = 0; i < atoms.size(); ++i)
        accumulate_gaussian(masses, spec, atoms[i], variance, scale * weights[i]);
}

std::vector<double> linear_term(const TrainedModel& model, const Measurement& meas,
                                double t, const RasterSpec& spec) {
    if (!(t >= 0.0)) throw std::invalid_argument("linear_term: t must be >= 0");
    const NoiseModel& noise = model.noise;
    const double variance = noise.sigma_x * noise.sigma_x +
                            t * t * noise.sigma_v * noise.sigma_v + noise.kappa * t;
    const Vec2 mean = meas.x_hat + t * meas.v_hat;
    const double w = model.model_priors.p_model / model.scene.bounds.area();
    std::vector<double> masses(static_cast<size_t>(spec.cells()), 0.0);
    accumulate_gaussian(masses, spec, mean, variance, w);
    return masses;
}

std::vector<DensityRaster> predict(const TrainedModel& model, const Measurement& meas,
                                   const PredictOptions& opts) {
    model.validate();
    if (!meas.x_hat.finite() || !meas.v_hat.finite())
        throw std::invalid_argument("predict: non-finite measurement");
    if (opts.n_t < 1) throw std::invalid_argument("predict: N_t must be >= 1");

    const double s_max = model.model_priors.s_max;
    const double dt = model.scene.frame_dt;
    const int n_fields = static_cast<int>(model.fields.size());
    const NoiseModel& noise = model.noise;

    const double L = grid_half_width(noise.sigma_x, opts.eps_tol);
    const std::vector<Vec2> grid = init_grid(meas.x_hat, L, opts.n_x);
    const size_t n_grid = grid.size();
    const double spacing = L / (2.0 * opts.n_x);
    const double cell_area = spacing * spacing;

    const double increment = s_max * dt;  // unit-speed flow seconds per table row
    FlowTable table = make_flow_table(grid, static_cast<size_t>(n_fields), increment,
                                      increment / opts.flow_step_divisor);

    RasterSpec spec;
    spec.bounds = opts.raster_bounds.value_or(model.scene.bounds);
    spec.nx = opts.raster_nx;
    spec.ny = opts.raster_ny;

    // Speed-independent weight factors per (field, grid point). The cached
    // product mirrors weight()'s evaluation order exactly.
    std::vector<double> base(static_cast<size_t>(n_fields) * n_grid);
    std::vector<Vec2> field_dir(static_cast<size_t>(n_fields) * n_grid);
    for (int k = 0; k < n_fields; ++k)
        for (size_t g = 0; g < n_grid; ++g) {
            const Vec2 u = model.scene.to_canonical(grid[g]);
            const double pos_term =
                gaussian2(meas.x_hat - grid[g], noise.sigma_x * noise.sigma_x);
            const double prior =
                model.position_priors[static_cast<size_t>(k)].density(grid[g], model.scene);
            base[k * n_grid + g] =
                pos_term * prior * model.model_priors.p_model * (0.5 / s_max);
            field_dir[k * n_grid + g] = model.fields[static_cast<size_t>(k)].eval(u);
        }

    std::vector<DensityRaster> out;
    out.reserve(static_cast<size_t>(opts.n_t));

    for (int l = 1; l <= opts.n_t; ++l) {
        extend_flow_table(table, model.fields, model.scene, opts.threads);
        const double t = l * dt;
        const double ds = s_max / l;
        const double variance = noise.kappa * t;
        const int n_speeds = 2 * l + 1;

        // One patch per (k, m) slab; merged in fixed (k, m ascending) order so
        // the result is bit-identical for any thread count.
        std::vector<Patch> patches(static_cast<size_t>(n_fields) * n_speeds);
        parallel_for(patches.size(), opts.threads, [&](size_t slab_idx) {
            const int k = static_cast<int>(slab_idx) / n_speeds;
            const int m = static_cast<int>(slab_idx) % n_speeds - l;
            const double s = s_max * m / l;
            const std::span<const Vec2> atoms = table.row(k, m);
            Patch patch = make_patch(spec, atoms, variance);
            if (!patch.empty()) {
                const double sigma_v2 = noise.sigma_v * noise.sigma_v;
                for (size_t g = 0; g < n_grid; ++g) {
                    const double vel_term =
                        gaussian2(meas.v_hat - s * field_dir[k * n_grid + g], sigma_v2);
                    const double w = base[k * n_grid + g] * vel_term;
                    accumulate_atom(patch.values.data(), patch.nwx, patch.ix0, patch.iy0,
                                    patch.nwy, spec, atoms[g], variance,
                                    cell_area * ds * w);
                }
            }
            patches[slab_idx] = std::move(patch);
        });

        DensityRaster raster;
        raster.spec = spec;
        raster.t = t;
        raster.bound_components = {spacing, ds, opts.eps_tol};
        raster.masses.assign(static_cast<size_t>(spec.cells()), 0.0);
        for (const Patch& patch : patches) {
            for (int iy = 0; iy < patch.nwy; ++iy) {
                const double* src = patch.values.data() + static_cast<size_t>(iy) * patch.nwx;
                double* dst =
                    raster.masses.data() + static_cast<size_t>(patch.iy0 + iy) * spec.nx + patch.ix0;
                for (int ix = 0; ix < patch.nwx; ++ix) dst[ix] += src[ix];
            }
        }

        const std::vector<double> lin = linear_term(model, meas, t, spec);
        for (size_t c = 0; c < raster.masses.size(); ++c) raster.masses[c] += lin[c];

        if (opts.normalize) {
            const double total = raster.sum();
            if (!(total > 0.0))
                throw std::runtime_error(
                    "predict: zero total mass before normalization (measurement outside "
                    "the scene?)");
            const double inv = 1.0 / total;
            for (double& m : raster.masses) m *= inv;
        }
        out.push_back(std::move(raster));
    }
    return out;
}

}  // namespace flowcast
