// Acceptance suite: one pass/fail line per criterion, nonzero exit on failure.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdarg>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <vector>

#include "flowcast/eval.hpp"
#include "flowcast/forecast.hpp"
#include "flowcast/model.hpp"
#include "flowcast/model_io.hpp"
#include "flowcast/parallel.hpp"
#include "flowcast/rng.hpp"
#include "flowcast/synth.hpp"

using namespace flowcast;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = 3.14159265358979323846;

int g_failures = 0;
std::vector<std::string> g_notes;

void note(const std::string& text) { g_notes.push_back(text); }

void run_criterion(int number, const std::string& title,
                   const std::function<bool()>& body, double time_limit_s = 0.0) {
    g_notes.clear();
    const auto start = std::chrono::steady_clock::now();
    bool ok = false;
    std::string what;
    try {
        ok = body();
    } catch (const std::exception& e) {
        what = e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (ok && time_limit_s > 0.0 && seconds > time_limit_s) {
        ok = false;
        g_notes.push_back("exceeded the stated runtime limit of " +
                          std::to_string(time_limit_s) + " s");
    }
    std::printf("%s criterion %d: %s (%.2fs)\n", ok ? "PASS" : "FAIL", number,
                title.c_str(), seconds);
    for (const auto& n : g_notes) std::printf("       %s\n", n.c_str());
    if (!what.empty()) std::printf("       exception: %s\n", what.c_str());
    if (!ok) ++g_failures;
    std::fflush(stdout);
}

std::string fmt(const char* f, ...) {
    char buf[256];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

PositionPrior flat_prior(double area) { return {0, {0.0}, std::log(area), 16}; }

TrainedModel toy_model(const SceneDomain& scene, const std::vector<double>& angles,
                       double sigma_x, double kappa, double s_max) {
    TrainedModel model;
    model.scene = scene;
    for (double a : angles) {
        model.fields.push_back(AngleField::constant(a));
        model.position_priors.push_back(flat_prior(scene.bounds.area()));
        model.cluster_sizes.push_back(1);
    }
    model.model_priors = ModelPriors::make(static_cast<int>(angles.size()), s_max);
    model.noise = NoiseModel::make(sigma_x, scene.frame_dt, kappa);
    model.rms_speed = 1.0;
    model.train_config.frame_dt = scene.frame_dt;
    return model;
}

Config synth_config() {
    Config cfg;
    cfg.frame_dt = 0.1;
    cfg.scene_bounds = Rect{0.0, 0.0, 10.0, 10.0};
    return cfg;
}

double angle_diff(double a, double b) {
    double d = std::fmod(a - b, 2.0 * kPi);
    if (d < 0) d += 2.0 * kPi;
    return std::min(d, 2.0 * kPi - d);
}

// --- criterion 1: flow-map speed scaling -----------------------------------

bool criterion_flow_scaling() {
    const SceneDomain scene{{-8.0, -8.0, 8.0, 8.0}, 0.1};
    Rng rng(29);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        AngleField field;
        field.degree = 3;
        field.coeffs.assign(16, 0.0);
        for (double& c : field.coeffs) c = rng.uniform(-0.4, 0.4);
        const Vec2 x0{rng.uniform(-4, 4), rng.uniform(-4, 4)};
        const double s = rng.uniform(-2.0, 2.0);
        const double t = rng.uniform(0.0, 5.0);
        const double step = 0.01;
        Vec2 scaled = x0;
        if (s != 0.0 && t != 0.0)
            scaled = rk4_integrate(
                [&](Vec2 x) { return s * field.eval(scene.to_canonical(x)); }, x0, t,
                step / std::abs(s));
        const Vec2 unit = flow(field, scene, x0, s * t, step);
        worst = std::max(worst, std::max(std::abs(scaled.x - unit.x),
                                         std::abs(scaled.y - unit.y)));
    }
    note(fmt("max discrepancy over 100 cases: %.3e (tolerance 1e-6)", worst));
    return worst < 1e-6;
}

// --- criterion 2: mass conservation under transport -------------------------

bool criterion_mass_conservation() {
    const SceneDomain scene{{-8.0, -8.0, 8.0, 8.0}, 0.1};
    const TrainedModel model = toy_model(scene, {0.5}, 0.05, 0.01, 1.0);
    const Measurement meas{{0.0, 0.0}, {0.7, 0.4}};

    const double L = grid_half_width(model.noise.sigma_x, 0.05);
    const auto grid = init_grid(meas.x_hat, L, 3);
    const double spacing = L / 6.0;
    const double ds = 1.0 / 5.0;  // fixed partition P_5, reused at every horizon
    std::vector<double> speeds;
    for (int m = -5; m <= 5; ++m) speeds.push_back(m * ds);

    std::vector<std::vector<double>> weights(speeds.size());
    std::vector<std::vector<Vec2>> atoms(speeds.size());
    double weight_total = 0.0;
    for (size_t si = 0; si < speeds.size(); ++si) {
        atoms[si].assign(grid.begin(), grid.end());
        for (const Vec2 x0 : grid) {
            weights[si].push_back(weight(model, 0, speeds[si], x0, meas));
            weight_total += weights[si].back();
        }
    }
    weight_total *= spacing * spacing * ds;

    const RasterSpec spec{{-8.0, -8.0, 8.0, 8.0}, 200, 200};
    const double step = scene.frame_dt / 20.0;
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0, worst_rel = 0.0;
    for (int l = 1; l <= 20; ++l) {
        const double t = scene.frame_dt * l;
        for (size_t si = 0; si < speeds.size(); ++si)
            for (Vec2& a : atoms[si])
                a = flow(model.fields[0], scene, a, speeds[si] * scene.frame_dt, step);
        std::vector<double> masses(static_cast<size_t>(spec.cells()), 0.0);
        for (size_t si = 0; si < speeds.size(); ++si)
            rasterize_slab(masses, spec, atoms[si], weights[si], model.noise.kappa * t,
                           spacing * spacing * ds);
        double total = 0.0, comp = 0.0;
        for (double m : masses) {  // compensated sum
            const double y = m - comp;
            const double s2 = total + y;
            comp = (s2 - total) - y;
            total = s2;
        }
        lo = std::min(lo, total);
        hi = std::max(hi, total);
        worst_rel = std::max(worst_rel, std::abs(total - weight_total) / weight_total);
    }
    const double spread = (hi - lo) / lo;
    note(fmt("transported mass spread across l=1..20: %.3e relative (tolerance 1e-9)",
             spread));
    note(fmt("max deviation from the weight total: %.3e relative", worst_rel));
    return spread < 1e-9 && worst_rel < 1e-9;
}

// --- criterion 3: convergence against a brute-force quadrature oracle -------

struct OracleSetup {
    SceneDomain scene{{-6.0, -9.0, 12.0, 9.0}, 1.0};
    double sigma_x = 0.3;
    double kappa = 0.05;
    double s_max = 1.0;
    Measurement meas{{0.0, 0.0}, {0.8, 0.0}};
    int raster_n = 54;
};

/// Dense midpoint quadrature over (x0, s) with the analytic straight-line flow
/// of the constant zero-angle field; everything recomputed from first
/// principles, independent of the forecast module.
std::vector<double> oracle_raster(const OracleSetup& su, double t, int n_half) {
    const double sigma_v = 2.0 * su.sigma_x / su.scene.frame_dt;
    const double area = su.scene.bounds.area();
    // x0 square capturing all but 1e-9 of the position posterior
    const double Lo = grid_half_width(su.sigma_x, 1e-9);
    const int nx0 = 2 * n_half + 1;
    const double dx0 = Lo / (2.0 * n_half);
    const int ns = 2 * n_half + 1;
    const double ds = 2.0 * su.s_max / (ns - 1);

    const RasterSpec spec{su.scene.bounds, su.raster_n, su.raster_n};
    const double cw = spec.cell_w(), ch = spec.cell_h();
    const double var = su.kappa * t;
    const double sigma = std::sqrt(var);
    const double reach = 9.0 * sigma;

    const double p_model = 0.5;  // one field: Pr(k) = Pr(lin) = 1/2
    auto g2 = [](Vec2 d, double s2) {
        return std::exp(-(d.x * d.x + d.y * d.y) / (2.0 * s2)) / (2.0 * kPi * s2);
    };

    std::vector<double> masses(static_cast<size_t>(spec.cells()), 0.0);
    const int threads = resolve_threads(0);
    std::vector<std::vector<double>> partial(static_cast<size_t>(threads));
    // chunk the x0 rows; each worker owns a partial raster
    parallel_for(static_cast<size_t>(threads), threads, [&](size_t worker) {
        auto& buf = partial[worker];
        buf.assign(masses.size(), 0.0);
        std::vector<double> wx, wy;
        for (int ix0 = static_cast<int>(worker); ix0 < nx0; ix0 += threads) {
            const double x0x = su.meas.x_hat.x - Lo / 2 + ix0 * dx0;
            for (int iy0 = 0; iy0 < nx0; ++iy0) {
                const double x0y = su.meas.x_hat.y - Lo / 2 + iy0 * dx0;
                const Vec2 x0{x0x, x0y};
                const double pos_part =
                    g2(su.meas.x_hat - x0, su.sigma_x * su.sigma_x) * (1.0 / area) *
                    p_model * (0.5 / su.s_max);
                for (int is = 0; is < ns; ++is) {
                    const double s = -su.s_max + is * ds;
                    const double w = pos_part * g2(su.meas.v_hat - Vec2{s, 0.0},
                                                   sigma_v * sigma_v) *
                                     dx0 * dx0 * ds;
                    const Vec2 mean{x0.x + s * t, x0.y};  // analytic flow of X = e_x
                    const int cx0 = std::max(
                        0, static_cast<int>(std::floor((mean.x - reach - spec.bounds.xmin) / cw)));
                    const int cx1 = std::min(
                        spec.nx - 1,
                        static_cast<int>(std::floor((mean.x + reach - spec.bounds.xmin) / cw)));
                    const int cy0 = std::max(
                        0, static_cast<int>(std::floor((mean.y - reach - spec.bounds.ymin) / ch)));
                    const int cy1 = std::min(
                        spec.ny - 1,
                        static_cast<int>(std::floor((mean.y + reach - spec.bounds.ymin) / ch)));
                    if (cx0 > cx1 || cy0 > cy1) continue;
                    wx.resize(static_cast<size_t>(cx1 - cx0 + 1));
                    wy.resize(static_cast<size_t>(cy1 - cy0 + 1));
                    const double inv = 1.0 / (sigma * std::sqrt(2.0));
                    double prev = std::erf((spec.bounds.xmin + cx0 * cw - mean.x) * inv);
                    for (int c = cx0; c <= cx1; ++c) {
                        const double next =
                            std::erf((spec.bounds.xmin + (c + 1) * cw - mean.x) * inv);
                        wx[static_cast<size_t>(c - cx0)] = 0.5 * (next - prev);
                        prev = next;
                    }
                    prev = std::erf((spec.bounds.ymin + cy0 * ch - mean.y) * inv);
                    for (int c = cy0; c <= cy1; ++c) {
                        const double next =
                            std::erf((spec.bounds.ymin + (c + 1) * ch - mean.y) * inv);
                        wy[static_cast<size_t>(c - cy0)] = 0.5 * (next - prev);
                        prev = next;
                    }
                    for (int cy = cy0; cy <= cy1; ++cy) {
                        const double wwy = w * wy[static_cast<size_t>(cy - cy0)];
                        double* row = buf.data() + static_cast<size_t>(cy) * spec.nx;
                        for (int cx = cx0; cx <= cx1; ++cx)
                            row[cx] += wwy * wx[static_cast<size_t>(cx - cx0)];
                    }
                }
            }
        }
    });
    for (const auto& buf : partial)
        for (size_t i = 0; i < masses.size(); ++i) masses[i] += buf[i];

    // linear term: same closed form the engine uses (exact on both sides)
    const double lin_var = su.sigma_x * su.sigma_x +
                           t * t * sigma_v * sigma_v + su.kappa * t;
    const double lin_sigma = std::sqrt(lin_var);
    const Vec2 lin_mean = su.meas.x_hat + t * su.meas.v_hat;
    const double lin_w = p_model / area;
    const double inv = 1.0 / (lin_sigma * std::sqrt(2.0));
    for (int cy = 0; cy < spec.ny; ++cy) {
        const double y0 = spec.bounds.ymin + cy * ch;
        const double my = 0.5 * (std::erf((y0 + ch - lin_mean.y) * inv) -
                                 std::erf((y0 - lin_mean.y) * inv));
        for (int cx = 0; cx < spec.nx; ++cx) {
            const double x0e = spec.bounds.xmin + cx * cw;
            const double mx = 0.5 * (std::erf((x0e + cw - lin_mean.x) * inv) -
                                     std::erf((x0e - lin_mean.x) * inv));
            masses[static_cast<size_t>(cy) * spec.nx + cx] += lin_w * mx * my;
        }
    }

    double total = 0.0;
    for (double m : masses) total += m;
    for (double& m : masses) m /= total;
    return masses;
}

bool criterion_convergence() {
    const OracleSetup su;
    const TrainedModel model =
        toy_model(su.scene, {0.0}, su.sigma_x, su.kappa, su.s_max);

    const std::vector<std::pair<int, int>> levels{{2, 2}, {4, 4}, {8, 8}};
    std::vector<double> log_h, log_e;
    for (const auto& [n_x, l] : levels) {
        PredictOptions opts;
        opts.n_t = l;
        opts.n_x = n_x;
        opts.eps_tol = 1e-4;
        opts.raster_nx = su.raster_n;
        opts.raster_ny = su.raster_n;
        opts.threads = resolve_threads(0);
        const auto rasters = predict(model, su.meas, opts);
        const auto& ours = rasters.back().masses;
        const double t = l * su.scene.frame_dt;
        const auto truth = oracle_raster(su, t, 100);  // 201^2 x 201 quadrature
        double l1 = 0.0;
        for (size_t i = 0; i < ours.size(); ++i) l1 += std::abs(ours[i] - truth[i]);
        const double h = rasters.back().bound_components.dx +
                         rasters.back().bound_components.ds;
        note(fmt("(N_x, l) = (%d, %d): h = %.4f, L1 error = %.5f", n_x, l, h, l1));
        log_h.push_back(std::log(h));
        log_e.push_back(std::log(l1));
    }
    // least-squares slope of log e vs log h
    const size_t n = log_h.size();
    double mh = 0, me = 0;
    for (size_t i = 0; i < n; ++i) {
        mh += log_h[i];
        me += log_e[i];
    }
    mh /= n;
    me /= n;
    double num = 0, den = 0;
    for (size_t i = 0; i < n; ++i) {
        num += (log_h[i] - mh) * (log_e[i] - me);
        den += (log_h[i] - mh) * (log_h[i] - mh);
    }
    const double slope = num / den;
    note(fmt("log-log slope: %.3f (required >= 0.8)", slope));
    return slope >= 0.8;
}

// --- criterion 4: normalization across the synthetic evaluation suite -------

bool criterion_normalization() {
    const fs::path dir = fs::temp_directory_path() / "flowcast_acceptance_norm";
    fs::remove_all(dir);
    fs::create_directories(dir);

    const Config cfg = synth_config();
    const SceneDomain scene{*cfg.scene_bounds, cfg.frame_dt};
    double worst = 0.0;
    int rasters_checked = 0;
    for (const std::string scenario : synth_scenarios()) {
        SynthOptions sopts;
        sopts.count = 12;
        sopts.noise = 0.01;
        sopts.seed = 19;
        const SynthResult data = synthesize(scenario, scene, sopts);
        const TrainedModel model = train_model(data.trajectories, cfg);
        const std::vector<Measurement> probes{
            {{2.0, 2.6}, {0.9, 0.1}},
            {{5.0, 5.0}, {0.0, 0.9}},
            {{7.4, 6.0}, {-0.7, -0.4}},
        };
        PredictOptions opts;
        opts.n_t = 10;
        for (const Measurement& meas : probes) {
            const auto rasters = predict(model, meas, opts);
            for (const auto& raster : rasters) {
                worst = std::max(worst, std::abs(raster.sum() - 1.0));
                ++rasters_checked;
            }
            // emitted form: written to disk and read back
            const fs::path file = dir / (scenario + "_raster.csv");
            write_raster(rasters.back(), file.string());
            const DensityRaster back = read_raster(file.string());
            worst = std::max(worst, std::abs(back.sum() - 1.0));
        }
    }
    note(fmt("checked %d rasters over %zu scenarios; worst |sum - 1| = %.3e",
             rasters_checked, synth_scenarios().size(), worst));
    return worst < 1e-9;
}

// --- criterion 5: learning recovery on the two-corridor scene ---------------

bool criterion_learning_recovery() {
    Config cfg = synth_config();
    cfg.kappa_eval_frames = {10.0, 20.0, 30.0};  // early times, within coverage
    const SceneDomain scene{*cfg.scene_bounds, cfg.frame_dt};

    SynthOptions sopts;
    sopts.count = 200;
    sopts.noise = 0.0;
    sopts.kappa = 0.01;  // planted model noise
    sopts.seed = 23;
    const SynthResult data = synthesize("two-corridor", scene, sopts);

    TrainStats stats;
    const TrainedModel model = train_model(data.trajectories, cfg, &stats);
    const bool n_ok = model.fields.size() == 2;
    note(fmt("clusters found: %zu (expected 2)", model.fields.size()));
    if (!n_ok) return false;

    // generator angles: horizontal corridor 0, vertical corridor pi/2;
    // match each cluster by its exemplar's net displacement
    double worst_mean_err = 0.0;
    for (size_t k = 0; k < model.fields.size(); ++k) {
        const Trajectory& exemplar =
            data.trajectories[static_cast<size_t>(stats.clustering.exemplars[k])];
        const Vec2 net = exemplar.samples.back().p - exemplar.samples.front().p;
        const double gen_angle =
            std::abs(net.x) > std::abs(net.y) ? 0.0 : kPi / 2.0;
        double err = 0.0;
        int count = 0;
        for (int idx : stats.clustering.clusters[k]) {
            const Trajectory& traj = data.trajectories[static_cast<size_t>(idx)];
            for (const auto& sample : traj.samples) {
                const Vec2 u = scene.to_canonical(sample.p);
                err += angle_diff(model.fields[k].theta(u), gen_angle);
                ++count;
            }
        }
        const double mean_err = err / count;
        worst_mean_err = std::max(worst_mean_err, mean_err);
        note(fmt("cluster %zu: mean angle error %.4f rad vs generator", k, mean_err));
    }

    const double kappa_err = std::abs(model.noise.kappa - sopts.kappa) / sopts.kappa;
    note(fmt("kappa: planted %.4f, recovered %.4f (relative error %.1f%%)", sopts.kappa,
             model.noise.kappa, 100.0 * kappa_err));
    return worst_mean_err <= 0.05 && kappa_err <= 0.30;
}

// --- criterion 6: metric oracles --------------------------------------------

bool criterion_metric_oracles() {
    // exhaustive-threshold ROC oracle, written from the definition
    auto naive_roc_auc = [](const std::vector<double>& values,
                            const std::vector<bool>& positive) {
        std::vector<double> thresholds = values;
        std::sort(thresholds.begin(), thresholds.end());
        thresholds.erase(std::unique(thresholds.begin(), thresholds.end()),
                         thresholds.end());
        double tot_p = 0, tot_n = 0;
        for (bool p : positive) (p ? tot_p : tot_n) += 1.0;
        std::vector<std::pair<double, double>> pts{{0.0, 0.0}};
        for (auto it = thresholds.rbegin(); it != thresholds.rend(); ++it) {
            double tp = 0, fp = 0;
            for (size_t i = 0; i < values.size(); ++i)
                if (values[i] >= *it) (positive[i] ? tp : fp) += 1.0;
            pts.emplace_back(fp / tot_n, tp / tot_p);
        }
        if (pts.back() != std::make_pair(1.0, 1.0)) pts.emplace_back(1.0, 1.0);
        double auc = 0;
        for (size_t i = 1; i < pts.size(); ++i)
            auc += (pts[i].first - pts[i - 1].first) * 0.5 *
                   (pts[i].second + pts[i - 1].second);
        return auc;
    };

    const std::vector<std::vector<double>> hands2{
        {0.4, 0.3, 0.2, 0.1}, {0.25, 0.25, 0.25, 0.25}, {0.7, 0.1, 0.1, 0.1},
        {0.5, 0.5, 0.0, 0.0}, {0.0, 0.0, 0.6, 0.4}};
    const std::vector<std::vector<double>> hands3{
        {0.30, 0.20, 0.10, 0.09, 0.08, 0.07, 0.06, 0.05, 0.05},
        {1.0 / 9, 1.0 / 9, 1.0 / 9, 1.0 / 9, 1.0 / 9, 1.0 / 9, 1.0 / 9, 1.0 / 9, 1.0 / 9},
        {0.5, 0.2, 0.1, 0.1, 0.1, 0.0, 0.0, 0.0, 0.0},
        {0.2, 0.2, 0.2, 0.1, 0.1, 0.1, 0.05, 0.03, 0.02}};

    int cases_checked = 0;
    for (int side : {2, 3}) {
        const auto& hands = side == 2 ? hands2 : hands3;
        for (const auto& masses : hands)
            for (int truth = 0; truth < side * side; ++truth) {
                DensityRaster raster;
                raster.spec = {{0, 0, static_cast<double>(side), static_cast<double>(side)},
                               side, side};
                raster.masses = masses;
                const Vec2 truth_pt{truth % side + 0.5, truth / side + 0.5};
                const RocCurve curve =
                    roc_auc(std::vector<EvalCase>{{raster, truth_pt}});
                std::vector<bool> labels(masses.size(), false);
                labels[static_cast<size_t>(truth)] = true;
                if (curve.auc != naive_roc_auc(masses, labels)) {
                    note(fmt("ROC mismatch on %dx%d case %d", side, side, truth));
                    return false;
                }
                ++cases_checked;
            }
    }
    note(fmt("ROC matches exhaustive enumeration exactly on %d hand cases",
             cases_checked));

    const std::vector<Vec2> a{{0, 0}, {1, 0}};
    const std::vector<Vec2> b{{0, 1}};
    const double expected = (1.0 + std::sqrt(2.0)) / 2.0;
    const bool mhd_ok = std::abs(mhd(a, b) - expected) < 1e-12 && mhd(a, a) == 0.0 &&
                        std::abs(mhd(std::vector<Vec2>{{0.0, 0.0}}, std::vector<Vec2>{{3.0, 4.0}}) - 5.0) < 1e-12;
    note(fmt("mhd hand cases: {(0,0),(1,0)} vs {(0,1)} -> %.15f (expected %.15f)",
             mhd(a, b), expected));
    return mhd_ok;
}

// --- criterion 7: curved-corridor AUC beats the random walk -----------------

bool criterion_curved_corridor() {
    Config cfg = synth_config();
    cfg.kappa_eval_frames = {10.0, 20.0, 30.0};
    const SceneDomain scene{*cfg.scene_bounds, cfg.frame_dt};

    SynthOptions train_opts;
    train_opts.count = 60;
    train_opts.noise = 0.02;
    train_opts.kappa = 0.005;
    train_opts.seed = 31;
    const SynthResult train_data = synthesize("circle", scene, train_opts);
    const TrainedModel model = train_model(train_data.trajectories, cfg);

    SynthOptions test_opts = train_opts;
    test_opts.count = 24;
    test_opts.seed = 37;
    const SynthResult test_data = synthesize("circle", scene, test_opts);

    const int n_t = 20;
    PredictOptions popts;
    popts.n_t = n_t;
    popts.threads = resolve_threads(0);
    const double sigma_rw = model.rms_speed * std::sqrt(scene.frame_dt);
    const RasterSpec spec{scene.bounds, popts.raster_nx, popts.raster_ny};

    std::vector<std::vector<EvalCase>> ours(n_t), walk(n_t);
    int agents = 0;
    for (const Trajectory& raw : test_data.trajectories) {
        const Trajectory traj = smooth(raw, 4);
        if (static_cast<int>(traj.samples.size()) <= n_t) continue;
        const auto vel = velocities(traj);
        const Measurement meas{traj.samples.front().p, vel.front().v};
        const auto rasters = predict(model, meas, popts);
        for (int l = 1; l <= n_t; ++l) {
            const Vec2 truth = traj.samples[static_cast<size_t>(l)].p;
            ours[static_cast<size_t>(l - 1)].push_back(
                {rasters[static_cast<size_t>(l - 1)], truth});
            walk[static_cast<size_t>(l - 1)].push_back(
                {random_walk_baseline(meas, l * scene.frame_dt, model.noise.sigma_x,
                                      sigma_rw, spec),
                 truth});
        }
        ++agents;
    }
    note(fmt("test agents evaluated: %d (need >= 20)", agents));
    if (agents < 20) return false;

    bool ok = true;
    for (int l = n_t / 2; l <= n_t; ++l) {
        const double auc_ours = roc_auc(ours[static_cast<size_t>(l - 1)]).auc;
        const double auc_walk = roc_auc(walk[static_cast<size_t>(l - 1)]).auc;
        if (l == n_t / 2 || l == n_t)
            note(fmt("t = %.1fs: AUC ours %.4f vs random walk %.4f",
                     l * scene.frame_dt, auc_ours, auc_walk));
        if (auc_ours <= auc_walk) {
            note(fmt("FAILED at l=%d: ours %.4f <= walk %.4f", l, auc_ours, auc_walk));
            ok = false;
        }
    }
    return ok;
}

// --- criterion 8: per-frame runtime guardrail -------------------------------

bool criterion_runtime() {
    Config cfg = synth_config();
    cfg.kappa_eval_frames = {10.0, 20.0, 30.0};
    const SceneDomain scene{*cfg.scene_bounds, cfg.frame_dt};
    SynthOptions sopts;
    sopts.count = 40;
    sopts.noise = 0.02;
    sopts.kappa = 0.005;
    sopts.seed = 41;
    const SynthResult data = synthesize("two-corridor", scene, sopts);
    const TrainedModel model = train_model(data.trajectories, cfg);
    note(fmt("model has n = %zu fields", model.fields.size()));

    const std::vector<Measurement> probes{
        {{2.0, 2.6}, {0.9, 0.1}},
        {{5.0, 2.4}, {1.0, 0.0}},
        {{7.4, 4.0}, {0.0, 0.8}},
        {{7.6, 7.0}, {0.0, 1.0}},
    };
    PredictOptions opts;  // defaults: N_x = 4, 64x64 raster
    opts.n_t = 20;
    opts.threads = resolve_threads(0);
    timing_harness(model, probes, opts, 1);  // warm-up
    const TimingReport report = timing_harness(model, probes, opts, 3);
    note(fmt("mean per-frame prediction time: %.3f ms (bound 50 ms), stddev %.3f ms",
             1e3 * report.mean_s_per_frame, 1e3 * report.stddev_s_per_frame));
    return report.mean_s_per_frame <= 0.050;
}

// --- criterion 9: determinism ------------------------------------------------

bool criterion_determinism() {
    const fs::path dir = fs::temp_directory_path() / "flowcast_acceptance_det";
    fs::remove_all(dir);
    fs::create_directories(dir);

    Config cfg = synth_config();
    cfg.kappa_eval_frames = {10.0, 20.0, 30.0};
    const SceneDomain scene{*cfg.scene_bounds, cfg.frame_dt};
    SynthOptions sopts;
    sopts.count = 30;
    sopts.noise = 0.015;
    sopts.seed = 43;

    auto read_bytes = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };

    // identical seeded runs, end to end
    std::vector<std::string> model_bytes, raster_bytes;
    for (int run = 0; run < 2; ++run) {
        const SynthResult data = synthesize("two-corridor", scene, sopts);
        const TrainedModel model = train_model(data.trajectories, cfg);
        const fs::path model_path = dir / ("model_" + std::to_string(run) + ".json");
        save_model(model, model_path.string());
        model_bytes.push_back(read_bytes(model_path));

        PredictOptions opts;
        opts.n_t = 5;
        opts.threads = run == 0 ? 1 : 2;  // thread count must not matter
        const auto rasters =
            predict(model, {{2.0, 2.6}, {0.9, 0.1}}, opts);
        std::string all;
        for (size_t l = 0; l < rasters.size(); ++l) {
            const fs::path f =
                dir / ("raster_" + std::to_string(run) + "_" + std::to_string(l) + ".csv");
            write_raster(rasters[l], f.string());
            all += read_bytes(f);
        }
        raster_bytes.push_back(all);
    }
    const bool models_ok = model_bytes[0] == model_bytes[1];
    const bool rasters_ok = raster_bytes[0] == raster_bytes[1];
    note(fmt("model files byte-identical: %s", models_ok ? "yes" : "NO"));
    note(fmt("raster files byte-identical (threads 1 vs 2): %s",
             rasters_ok ? "yes" : "NO"));
    return models_ok && rasters_ok;
}

}  // namespace

int main() {
    std::printf("flowcast acceptance suite\n");
    run_criterion(1, "flow-map speed scaling, 100 random cases < 1e-6",
                  criterion_flow_scaling, 10.0);
    run_criterion(2, "transported mass constant across horizons (1e-9 relative)",
                  criterion_mass_conservation, 30.0);
    run_criterion(3, "L1 convergence against brute-force quadrature, slope >= 0.8",
                  criterion_convergence, 300.0);
    run_criterion(4, "every emitted raster normalized to 1e-9",
                  criterion_normalization);
    run_criterion(5, "two-corridor learning recovery (n, angles, kappa)",
                  criterion_learning_recovery, 120.0);
    run_criterion(6, "ROC/MHD match exhaustive oracles", criterion_metric_oracles);
    run_criterion(7, "curved-corridor AUC beats the random walk for t >= horizon/2",
                  criterion_curved_corridor, 300.0);
    run_criterion(8, "mean per-frame prediction time <= 50 ms at defaults",
                  criterion_runtime);
    run_criterion(9, "byte-identical models and rasters across seeded runs",
                  criterion_determinism);
    if (g_failures > 0) {
        std::printf("%d criterion(s) FAILED\n", g_failures);
        return 1;
    }
    std::printf("all criteria passed\n");
    return 0;
}
