#include "flowcast/config.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace flowcast {

using nlohmann::json;

namespace {

template <typename T>
void maybe(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

void Config::apply_json_string(const std::string& text) {
    json j = json::parse(text);
    maybe(j, "frame_dt", frame_dt);
    if (j.contains("scene_bounds")) {
        const auto& b = j.at("scene_bounds");
        scene_bounds = Rect{b.at(0).get<double>(), b.at(1).get<double>(),
                            b.at(2).get<double>(), b.at(3).get<double>()};
    }
    maybe(j, "smooth_window", smooth_window);
    maybe(j, "min_cluster_size", min_cluster_size);
    maybe(j, "preference_quantile", preference_quantile);
    maybe(j, "ap_damping", ap_damping);
    maybe(j, "ap_max_iter", ap_max_iter);
    maybe(j, "ap_convergence_window", ap_convergence_window);
    maybe(j, "field_degree", field_degree);
    maybe(j, "field_reg", field_reg);
    maybe(j, "field_fit_budget", field_fit_budget);
    maybe(j, "flow_step_divisor", flow_step_divisor);
    maybe(j, "prior_degree", prior_degree);
    maybe(j, "prior_reg", prior_reg);
    maybe(j, "prior_quad_n", prior_quad_n);
    maybe(j, "kappa_eval_frames", kappa_eval_frames);
    maybe(j, "sigma_x_min", sigma_x_min);
    if (j.contains("sigma_x_override")) sigma_x_override = j.at("sigma_x_override").get<double>();
    maybe(j, "n_x", n_x);
    maybe(j, "eps_tol", eps_tol);
    maybe(j, "raster_nx", raster_nx);
    maybe(j, "raster_ny", raster_ny);
    maybe(j, "eval_samples", eval_samples);
    if (j.contains("sigma_rw")) sigma_rw = j.at("sigma_rw").get<double>();
    maybe(j, "threads", threads);
}

Config Config::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    Config cfg;
    cfg.apply_json_string(text);
    return cfg;
}

std::string Config::to_json_string() const {
    json j;
    j["frame_dt"] = frame_dt;
    if (scene_bounds)
        j["scene_bounds"] = {scene_bounds->xmin, scene_bounds->ymin, scene_bounds->xmax,
                             scene_bounds->ymax};
    j["smooth_window"] = smooth_window;
    j["min_cluster_size"] = min_cluster_size;
    j["preference_quantile"] = preference_quantile;
    j["ap_damping"] = ap_damping;
    j["ap_max_iter"] = ap_max_iter;
    j["ap_convergence_window"] = ap_convergence_window;
    j["field_degree"] = field_degree;
    j["field_reg"] = field_reg;
    j["field_fit_budget"] = field_fit_budget;
    j["flow_step_divisor"] = flow_step_divisor;
    j["prior_degree"] = prior_degree;
    j["prior_reg"] = prior_reg;
    j["prior_quad_n"] = prior_quad_n;
    j["kappa_eval_frames"] = kappa_eval_frames;
    j["sigma_x_min"] = sigma_x_min;
    if (sigma_x_override) j["sigma_x_override"] = *sigma_x_override;
    j["n_x"] = n_x;
    j["eps_tol"] = eps_tol;
    j["raster_nx"] = raster_nx;
    j["raster_ny"] = raster_ny;
    j["eval_samples"] = eval_samples;
    if (sigma_rw) j["sigma_rw"] = *sigma_rw;
    j["threads"] = threads;
    return j.dump(2);
}

}  // namespace flowcast
