#include "flowcast/cli.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "flowcast/eval.hpp"
#include "flowcast/forecast.hpp"
#include "flowcast/model.hpp"
#include "flowcast/model_io.hpp"
#include "flowcast/parallel.hpp"
#include "flowcast/synth.hpp"

namespace flowcast {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

/// Error with a machine-parseable code for the ERROR:<code>: prefix.
struct CliError : std::runtime_error {
    std::string code;
    CliError(std::string code, const std::string& what)
        : std::runtime_error(what), code(std::move(code)) {}
};

std::vector<Trajectory> load_trajectories(const std::string& path, const std::string& format,
                                          double frame_dt, ParseResult* full = nullptr) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CliError("IO", "cannot open data file '" + path + "'");
    ParseResult parsed;
    try {
        parsed = parse_annotations(in, parse_format_name(format), frame_dt);
    } catch (const std::runtime_error& e) {
        throw CliError("PARSE", std::string(e.what()) + " in '" + path + "'");
    }
    if (parsed.skipped_agents > 0)
        std::cerr << "warning: skipped " << parsed.skipped_agents
                  << " agent(s) with < 2 usable samples\n";
    if (full) *full = parsed;
    return parsed.trajectories;
}

void write_simple_csv(const std::vector<Trajectory>& trajs, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw CliError("IO", "cannot write '" + path + "'");
    out << "agent_id,t,x,y\n";
    for (const auto& traj : trajs)
        for (const auto& s : traj.samples)
            out << traj.agent_id << "," << format_g17(s.t) << "," << format_g17(s.p.x)
                << "," << format_g17(s.p.y) << "\n";
}

PredictOptions predict_options_from(const Config& cfg) {
    PredictOptions opts;
    opts.n_x = cfg.n_x;
    opts.eps_tol = cfg.eps_tol;
    opts.raster_nx = cfg.raster_nx;
    opts.raster_ny = cfg.raster_ny;
    opts.flow_step_divisor = cfg.flow_step_divisor;
    opts.threads = cfg.threads;
    return opts;
}

int run_train(const std::string& data, const std::string& format, const Config& config,
              const std::string& output, double holdout, int fold, uint64_t seed) {
    auto trajs = load_trajectories(data, format, config.frame_dt);
    std::vector<Trajectory> train_set;
    if (holdout > 0.0) {
        const HoldoutSplit split = split_holdout(trajs.size(), holdout, fold, seed);
        std::ofstream held(output + ".holdout.txt");
        if (!held) throw CliError("IO", "cannot write '" + output + ".holdout.txt'");
        for (int idx : split.test_indices)
            held << trajs[static_cast<size_t>(idx)].agent_id << "\n";
        for (int idx : split.train_indices)
            train_set.push_back(trajs[static_cast<size_t>(idx)]);
    } else {
        train_set = std::move(trajs);
    }

    TrainStats stats;
    TrainedModel model;
    try {
        model = train_model(train_set, config, &stats);
    } catch (const std::runtime_error& e) {
        throw CliError("DATA", e.what());
    }
    save_model(model, output);

    std::cout << "trained " << model.fields.size() << " model(s) from " << train_set.size()
              << " trajectories\n";
    std::cout << "cluster sizes:";
    for (int s : model.cluster_sizes) std::cout << " " << s;
    std::cout << " (unclassified " << model.unclassified_count << ")\n";
    std::cout << "s_max=" << format_g17(model.model_priors.s_max)
              << " sigma_x=" << format_g17(model.noise.sigma_x)
              << " sigma_v=" << format_g17(model.noise.sigma_v)
              << " kappa=" << format_g17(model.noise.kappa) << "\n";
    if (stats.sigma_x_floored)
        std::cerr << "warning: sigma_x estimate hit the configured floor\n";
    std::cout << "wrote " << output << "\n";
    return 0;
}

int run_predict(const std::string& model_path, Vec2 x_hat, Vec2 v_hat, int n_t,
                const std::string& outdir, const PredictOptions& opts) {
    TrainedModel model;
    try {
        model = load_model(model_path);
    } catch (const std::runtime_error& e) {
        throw CliError("MODEL", e.what());
    }
    if (!x_hat.finite() || !v_hat.finite())
        throw CliError("ARGS", "measurement must be finite");

    PredictOptions popts = opts;
    popts.n_t = n_t;

    fs::create_directories(outdir);
    const auto start = std::chrono::steady_clock::now();
    std::vector<DensityRaster> rasters;
    try {
        rasters = predict(model, {x_hat, v_hat}, popts);
    } catch (const std::runtime_error& e) {
        throw CliError("DATA", e.what());
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    json manifest;
    manifest["model"] = model_path;
    manifest["measurement"] = {{"x", {x_hat.x, x_hat.y}}, {"v", {v_hat.x, v_hat.y}}};
    manifest["options"] = {{"n_t", popts.n_t},
                           {"n_x", popts.n_x},
                           {"eps_tol", popts.eps_tol},
                           {"raster_nx", popts.raster_nx},
                           {"raster_ny", popts.raster_ny},
                           {"flow_step_divisor", popts.flow_step_divisor},
                           {"threads", popts.threads}};
    manifest["timing"] = {{"total_s", seconds}, {"s_per_frame", seconds / popts.n_t}};
    for (size_t l = 0; l < rasters.size(); ++l) {
        char name[32];
        std::snprintf(name, sizeof name, "raster_%04zu.csv", l + 1);
        const fs::path file = fs::path(outdir) / name;
        write_raster(rasters[l], file.string());
        manifest["files"].push_back(name);
    }
    std::ofstream mf(fs::path(outdir) / "manifest.json");
    if (!mf) throw CliError("IO", "cannot write manifest in '" + outdir + "'");
    mf << manifest.dump(2) << "\n";
    std::cout << "wrote " << rasters.size() << " raster(s) to " << outdir << "\n";
    return 0;
}

int run_evaluate(const std::string& model_path, const std::string& data,
                 const std::string& format, int n_t, int samples, uint64_t seed,
                 const std::string& report_path, const Config& config) {
    TrainedModel model;
    try {
        model = load_model(model_path);
    } catch (const std::runtime_error& e) {
        throw CliError("MODEL", e.what());
    }
    const auto raw = load_trajectories(data, format, model.scene.frame_dt);
    if (raw.empty()) throw CliError("DATA", "empty test set");

    std::vector<Trajectory> smoothed;
    for (const auto& traj : raw) {
        const int window =
            std::min<int>(config.smooth_window, static_cast<int>(traj.samples.size()));
        smoothed.push_back(smooth(traj, window));
    }

    PredictOptions popts = predict_options_from(config);
    popts.n_t = n_t;
    const double dt = model.scene.frame_dt;
    const double sigma_rw =
        config.sigma_rw.value_or(model.rms_speed * std::sqrt(dt));
    RasterSpec spec{model.scene.bounds, popts.raster_nx, popts.raster_ny};

    // per time step, amalgamated over agents
    std::vector<std::vector<EvalCase>> ours_cases(static_cast<size_t>(n_t));
    std::vector<std::vector<EvalCase>> rw_cases(static_cast<size_t>(n_t));
    std::vector<std::vector<double>> mhd_ours(static_cast<size_t>(n_t));
    std::vector<std::vector<double>> mhd_rw(static_cast<size_t>(n_t));
    int truncated = 0;
    double predict_seconds = 0.0;
    int predicted_frames = 0;

    for (size_t a = 0; a < smoothed.size(); ++a) {
        const Trajectory& traj = smoothed[a];
        const auto vel = velocities(traj);
        const Measurement meas{traj.samples.front().p, vel.front().v};
        const int horizon =
            std::min<int>(n_t, static_cast<int>(traj.samples.size()) - 1);
        if (horizon < n_t) ++truncated;
        if (horizon < 1) continue;

        PredictOptions agent_opts = popts;
        agent_opts.n_t = horizon;
        const auto start = std::chrono::steady_clock::now();
        std::vector<DensityRaster> rasters;
        try {
            rasters = predict(model, meas, agent_opts);
        } catch (const std::runtime_error& e) {
            throw CliError("DATA", e.what());
        }
        predict_seconds +=
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        predicted_frames += horizon;

        for (int l = 1; l <= horizon; ++l) {
            const Vec2 truth = traj.samples[static_cast<size_t>(l)].p;
            const DensityRaster& ours = rasters[static_cast<size_t>(l - 1)];
            DensityRaster rw = random_walk_baseline(meas, l * dt, model.noise.sigma_x,
                                                    sigma_rw, spec);
            const uint64_t sample_seed = seed + 7919 * a + static_cast<uint64_t>(l);
            const auto ours_pts = sample_raster(ours, samples, sample_seed);
            const auto rw_pts = sample_raster(rw, samples, sample_seed + 1);
            const Vec2 truth_arr[1] = {truth};
            mhd_ours[static_cast<size_t>(l - 1)].push_back(mhd(truth_arr, ours_pts));
            mhd_rw[static_cast<size_t>(l - 1)].push_back(mhd(truth_arr, rw_pts));
            ours_cases[static_cast<size_t>(l - 1)].push_back({ours, truth});
            rw_cases[static_cast<size_t>(l - 1)].push_back({std::move(rw), truth});
        }
    }

    std::ofstream out(report_path);
    if (!out) throw CliError("IO", "cannot write report '" + report_path + "'");
    out << "# seed=" << seed << "\n";
    out << "# samples=" << samples << "\n";
    out << "# n_t=" << n_t << "\n";
    out << "# raster=" << spec.nx << "x" << spec.ny << "\n";
    out << "# agents=" << smoothed.size() << "\n";
    out << "# truncated_agents=" << truncated << "\n";
    out << "# sigma_rw=" << format_g17(sigma_rw) << "\n";
    out << "# mean_s_per_frame="
        << format_g17(predicted_frames > 0 ? predict_seconds / predicted_frames : 0.0)
        << "\n";
    out << "t,auc_ours,auc_rw,mhd_ours,mhd_rw\n";
    for (int l = 1; l <= n_t; ++l) {
        const auto& oc = ours_cases[static_cast<size_t>(l - 1)];
        if (oc.empty()) continue;
        const double auc_ours = roc_auc(oc).auc;
        const double auc_rw = roc_auc(rw_cases[static_cast<size_t>(l - 1)]).auc;
        auto mean = [](const std::vector<double>& v) {
            double s = 0.0;
            for (double x : v) s += x;
            return s / static_cast<double>(v.size());
        };
        out << format_g17(l * dt) << "," << format_g17(auc_ours) << ","
            << format_g17(auc_rw) << "," << format_g17(mean(mhd_ours[l - 1])) << ","
            << format_g17(mean(mhd_rw[l - 1])) << "\n";
    }
    std::cout << "wrote " << report_path << "\n";
    return 0;
}

int run_synth(const std::string& scenario, int count, double noise, double kappa,
              uint64_t seed, const std::string& output, const Config& config) {
    SceneDomain scene{config.scene_bounds.value_or(Rect{0.0, 0.0, 10.0, 10.0}),
                      config.frame_dt};
    SynthOptions opts;
    opts.count = count;
    opts.noise = noise;
    opts.kappa = kappa;
    opts.seed = seed;
    SynthResult result;
    try {
        result = synthesize(scenario, scene, opts);
    } catch (const std::invalid_argument& e) {
        throw CliError("ARGS", e.what());
    }
    write_simple_csv(result.trajectories, output);
    std::ofstream truth(output + ".truth.json");
    if (!truth) throw CliError("IO", "cannot write '" + output + ".truth.json'");
    truth << result.truth_json << "\n";
    std::cout << "wrote " << result.trajectories.size() << " trajectories to " << output
              << "\n";
    return 0;
}

int run_inspect(const std::string& model_path, const std::string& angle_raster_dir) {
    TrainedModel model;
    try {
        model = load_model(model_path);
    } catch (const std::runtime_error& e) {
        throw CliError("MODEL", e.what());
    }
    std::cout << "n=" << model.fields.size() << "\n";
    std::cout << "cluster_sizes=";
    for (size_t i = 0; i < model.cluster_sizes.size(); ++i)
        std::cout << (i ? "," : "") << model.cluster_sizes[i];
    std::cout << "\nunclassified=" << model.unclassified_count << "\n";
    std::cout << "s_max=" << format_g17(model.model_priors.s_max) << "\n";
    std::cout << "sigma_x=" << format_g17(model.noise.sigma_x) << "\n";
    std::cout << "sigma_v=" << format_g17(model.noise.sigma_v) << "\n";
    std::cout << "kappa=" << format_g17(model.noise.kappa) << "\n";
    std::cout << "rms_speed=" << format_g17(model.rms_speed) << "\n";
    for (size_t k = 0; k < model.fields.size(); ++k) {
        double norm = 0.0;
        for (double c : model.fields[k].coeffs) norm += c * c;
        std::cout << "field_" << k << "_coeff_norm=" << format_g17(std::sqrt(norm)) << "\n";
    }

    if (!angle_raster_dir.empty()) {
        fs::create_directories(angle_raster_dir);
        const int n = 64;
        for (size_t k = 0; k < model.fields.size(); ++k) {
            char name[32];
            std::snprintf(name, sizeof name, "angle_%02zu.csv", k);
            std::ofstream out(fs::path(angle_raster_dir) / name);
            if (!out) throw CliError("IO", "cannot write angle raster");
            for (int iy = 0; iy < n; ++iy) {
                for (int ix = 0; ix < n; ++ix) {
                    const Vec2 u{-1.0 + (ix + 0.5) * 2.0 / n, -1.0 + (iy + 0.5) * 2.0 / n};
                    if (ix) out << ",";
                    out << format_g17(model.fields[k].theta(u));
                }
                out << "\n";
            }
        }
        std::cout << "wrote angle rasters to " << angle_raster_dir << "\n";
    }
    return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
    CLI::App app{"flowcast: probabilistic trajectory forecasting over learned flow fields"};
    app.require_subcommand(1);

    std::string config_path;
    uint64_t seed = 0;
    int threads = 0;
    app.add_option("--config", config_path, "JSON config file");
    app.add_option("--seed", seed, "seed for every stochastic step");
    app.add_option("--threads", threads, "worker threads (0 = hardware)");

    // train
    auto* train = app.add_subcommand("train", "learn a model from trajectory data");
    std::string train_data, train_format = "simple-csv", train_out = "model.json";
    double holdout = 0.0;
    int fold = 0;
    train->add_option("--data", train_data, "trajectory file")->required();
    train->add_option("--format", train_format, "simple-csv | drone-annotation");
    train->add_option("-o,--output", train_out, "model file to write");
    train->add_option("--holdout", holdout, "held-out fraction (e.g. 0.2)");
    train->add_option("--fold", fold, "holdout fold index");

    // predict
    auto* predict_cmd = app.add_subcommand("predict", "forecast occupancy rasters");
    std::string pr_model, pr_out = "forecast";
    std::vector<double> pr_x{0.0, 0.0}, pr_v{0.0, 0.0};
    int pr_nt = 20;
    int pr_nx = -1;
    double pr_eps = -1.0;
    std::vector<int> pr_raster;
    predict_cmd->add_option("-m,--model", pr_model, "model file")->required();
    predict_cmd->add_option("--x", pr_x, "measured position (two values)")
        ->expected(2)
        ->required();
    predict_cmd->add_option("--v", pr_v, "measured velocity (two values)")
        ->expected(2)
        ->required();
    predict_cmd->add_option("--nt", pr_nt, "number of forecast frames");
    predict_cmd->add_option("-o,--output", pr_out, "output directory");
    predict_cmd->add_option("--nx", pr_nx, "override N_x (initial grid resolution)");
    predict_cmd->add_option("--eps-tol", pr_eps, "override eps_tol");
    predict_cmd->add_option("--raster", pr_raster, "override raster cells: NX NY")
        ->expected(2);

    // evaluate
    auto* eval_cmd = app.add_subcommand("evaluate", "score a model on test data");
    std::string ev_model, ev_data, ev_format = "simple-csv", ev_report = "report.csv";
    int ev_nt = 20, ev_samples = -1;
    eval_cmd->add_option("-m,--model", ev_model, "model file")->required();
    eval_cmd->add_option("--data", ev_data, "test trajectory file")->required();
    eval_cmd->add_option("--format", ev_format, "simple-csv | drone-annotation");
    eval_cmd->add_option("--nt", ev_nt, "forecast horizon in frames");
    eval_cmd->add_option("--samples", ev_samples, "raster samples per MHD evaluation");
    eval_cmd->add_option("-o,--report", ev_report, "report file to write");

    // synth
    auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic scene");
    std::string sy_scenario, sy_out = "synth.csv";
    int sy_count = 20;
    double sy_noise = 0.0, sy_kappa = 0.0;
    synth_cmd
        ->add_option("--scenario", sy_scenario,
                     "straight-corridor | two-corridor | circle | crossing")
        ->required();
    synth_cmd->add_option("--count", sy_count, "number of trajectories");
    synth_cmd->add_option("--noise", sy_noise, "iid measurement noise (scene units)");
    synth_cmd->add_option("--kappa", sy_kappa, "planted Brownian model noise");
    synth_cmd->add_option("-o,--output", sy_out, "CSV file to write");

    // inspect
    auto* inspect_cmd = app.add_subcommand("inspect", "print model facts");
    std::string in_model, in_angle_dir;
    inspect_cmd->add_option("-m,--model", in_model, "model file")->required();
    inspect_cmd->add_option("--angle-raster-dir", in_angle_dir,
                            "export per-field angle rasters here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            // --help and friends
            return app.exit(e);
        }
        std::cerr << "ERROR:ARGS: " << e.what() << "\n";
        return 1;
    }

    try {
        Config config;
        if (!config_path.empty()) {
            try {
                config = Config::load(config_path);
            } catch (const std::exception& e) {
                throw CliError("IO", e.what());
            }
        }
        if (threads > 0) config.threads = threads;
        config.threads = resolve_threads(config.threads);

        if (train->parsed())
            return run_train(train_data, train_format, config, train_out, holdout, fold,
                             seed);
        if (predict_cmd->parsed()) {
            PredictOptions opts = predict_options_from(config);
            if (pr_nx > 0) opts.n_x = pr_nx;
            if (pr_eps > 0.0) opts.eps_tol = pr_eps;
            if (pr_raster.size() == 2) {
                opts.raster_nx = pr_raster[0];
                opts.raster_ny = pr_raster[1];
            }
            return run_predict(pr_model, {pr_x[0], pr_x[1]}, {pr_v[0], pr_v[1]}, pr_nt,
                               pr_out, opts);
        }
        if (eval_cmd->parsed())
            return run_evaluate(ev_model, ev_data, ev_format, ev_nt,
                                ev_samples > 0 ? ev_samples : config.eval_samples, seed,
                                ev_report, config);
        if (synth_cmd->parsed())
            return run_synth(sy_scenario, sy_count, sy_noise, sy_kappa, seed, sy_out,
                             config);
        if (inspect_cmd->parsed()) return run_inspect(in_model, in_angle_dir);
        std::cerr << "ERROR:ARGS: no subcommand\n";
        return 1;
    } catch (const CliError& e) {
        std::cerr << "ERROR:" << e.code << ": " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "ERROR:ARGS: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "ERROR:INTERNAL: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace flowcast
