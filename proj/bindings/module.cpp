#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "flowcast/eval.hpp"
#include "flowcast/forecast.hpp"
#include "flowcast/model.hpp"
#include "flowcast/model_io.hpp"
#include "flowcast/synth.hpp"

namespace py = pybind11;
using namespace flowcast;

namespace {

// samples: list of (agent_id, [(t, x, y), ...])
using PySamples = std::vector<std::pair<std::string, std::vector<std::tuple<double, double, double>>>>;

std::vector<Trajectory> to_trajectories(const PySamples& samples) {
    std::vector<Trajectory> out;
    for (const auto& [id, rows] : samples) {
        Trajectory traj;
        traj.agent_id = id;
        for (const auto& [t, x, y] : rows) traj.samples.push_back({t, {x, y}});
        out.push_back(std::move(traj));
    }
    return out;
}

PySamples from_trajectories(const std::vector<Trajectory>& trajs) {
    PySamples out;
    for (const auto& traj : trajs) {
        std::vector<std::tuple<double, double, double>> rows;
        for (const auto& s : traj.samples) rows.emplace_back(s.t, s.p.x, s.p.y);
        out.emplace_back(traj.agent_id, std::move(rows));
    }
    return out;
}

Config config_from_json(const std::string& config_json) {
    Config cfg;
    if (!config_json.empty()) cfg.apply_json_string(config_json);
    return cfg;
}

py::array_t<double> rasters_to_array(const std::vector<DensityRaster>& rasters) {
    const int n = static_cast<int>(rasters.size());
    const int ny = rasters.empty() ? 0 : rasters[0].spec.ny;
    const int nx = rasters.empty() ? 0 : rasters[0].spec.nx;
    py::array_t<double> arr({n, ny, nx});
    auto view = arr.mutable_unchecked<3>();
    for (int l = 0; l < n; ++l)
        for (int iy = 0; iy < ny; ++iy)
            for (int ix = 0; ix < nx; ++ix)
                view(l, iy, ix) = rasters[static_cast<size_t>(l)]
                                      .masses[static_cast<size_t>(iy) * nx + ix];
    return arr;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "flowcast: probabilistic trajectory forecasting over learned flow fields";

    py::class_<TrainedModel>(m, "Model")
        .def_static(
            "train",
            [](const PySamples& samples, const std::string& config_json) {
                return train_model(to_trajectories(samples), config_from_json(config_json));
            },
            py::arg("samples"), py::arg("config_json") = std::string(),
            "Train from [(agent_id, [(t, x, y), ...]), ...].")
        .def_static("load", &load_model, py::arg("path"))
        .def(
            "save",
            [](const TrainedModel& model, const std::string& path) {
                save_model(model, path);
            },
            py::arg("path"))
        .def_property_readonly("n", [](const TrainedModel& m) { return m.fields.size(); })
        .def_property_readonly("s_max",
                               [](const TrainedModel& m) { return m.model_priors.s_max; })
        .def_property_readonly("sigma_x",
                               [](const TrainedModel& m) { return m.noise.sigma_x; })
        .def_property_readonly("sigma_v",
                               [](const TrainedModel& m) { return m.noise.sigma_v; })
        .def_property_readonly("kappa", [](const TrainedModel& m) { return m.noise.kappa; })
        .def_property_readonly("cluster_sizes",
                               [](const TrainedModel& m) { return m.cluster_sizes; })
        .def_property_readonly("bounds",
                               [](const TrainedModel& m) {
                                   return std::make_tuple(
                                       m.scene.bounds.xmin, m.scene.bounds.ymin,
                                       m.scene.bounds.xmax, m.scene.bounds.ymax);
                               })
        .def(
            "predict",
            [](const TrainedModel& model, std::pair<double, double> x,
               std::pair<double, double> v, int n_t, int n_x, double eps_tol,
               int raster_nx, int raster_ny, int threads) {
                PredictOptions opts;
                opts.n_t = n_t;
                if (n_x > 0) opts.n_x = n_x;
                if (eps_tol > 0.0) opts.eps_tol = eps_tol;
                if (raster_nx > 0) opts.raster_nx = raster_nx;
                if (raster_ny > 0) opts.raster_ny = raster_ny;
                if (threads > 0) opts.threads = threads;
                const auto rasters = predict(
                    model, {{x.first, x.second}, {v.first, v.second}}, opts);
                std::vector<double> times;
                for (const auto& r : rasters) times.push_back(r.t);
                return std::make_pair(rasters_to_array(rasters), times);
            },
            py::arg("x"), py::arg("v"), py::arg("n_t") = 20, py::arg("n_x") = -1,
            py::arg("eps_tol") = -1.0, py::arg("raster_nx") = -1,
            py::arg("raster_ny") = -1, py::arg("threads") = -1,
            "Forecast rasters; returns (masses[n_t, ny, nx], times).");

    m.def(
        "synthesize",
        [](const std::string& scenario, int count, double noise, double kappa,
           uint64_t seed, double frame_dt) {
            SceneDomain scene{{0.0, 0.0, 10.0, 10.0}, frame_dt};
            SynthOptions opts;
            opts.count = count;
            opts.noise = noise;
            opts.kappa = kappa;
            opts.seed = seed;
            const SynthResult result = synthesize(scenario, scene, opts);
            return std::make_pair(from_trajectories(result.trajectories),
                                  result.truth_json);
        },
        py::arg("scenario"), py::arg("count") = 20, py::arg("noise") = 0.0,
        py::arg("kappa") = 0.0, py::arg("seed") = 1, py::arg("frame_dt") = 0.1,
        "Generate a synthetic scene on [0,10]^2; returns (samples, truth_json).");

    m.def(
        "mhd",
        [](const std::vector<std::pair<double, double>>& a,
           const std::vector<std::pair<double, double>>& b) {
            std::vector<Vec2> va, vb;
            for (auto [x, y] : a) va.push_back({x, y});
            for (auto [x, y] : b) vb.push_back({x, y});
            return mhd(va, vb);
        },
        py::arg("a"), py::arg("b"), "Modified Hausdorff distance between point sets.");
}
