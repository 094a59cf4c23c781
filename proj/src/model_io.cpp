#include "flowcast/model_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace flowcast {

using nlohmann::json;

namespace {

constexpr int kSchemaVersion = 1;

json vec_to_json(const std::vector<double>& v) { return json(v); }

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << text;
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string model_to_json(const TrainedModel& model) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["scene"] = {{"bounds",
                   {model.scene.bounds.xmin, model.scene.bounds.ymin,
                    model.scene.bounds.xmax, model.scene.bounds.ymax}},
                  {"frame_dt", model.scene.frame_dt}};
    j["clustering"] = {{"n", static_cast<int>(model.fields.size())},
                       {"sizes", model.cluster_sizes},
                       {"unclassified", model.unclassified_count}};
    for (const AngleField& f : model.fields)
        j["fields"].push_back({{"degree", f.degree}, {"coeffs", vec_to_json(f.coeffs)}});
    for (const PositionPrior& p : model.position_priors)
        j["position_priors"].push_back({{"degree", p.degree},
                                        {"coeffs", vec_to_json(p.coeffs)},
                                        {"log_partition", p.log_partition},
                                        {"quad_n", p.quad_n}});
    j["model_priors"] = {{"n", model.model_priors.n},
                         {"p_model", model.model_priors.p_model},
                         {"s_max", model.model_priors.s_max}};
    j["noise"] = {{"sigma_x", model.noise.sigma_x},
                  {"sigma_v", model.noise.sigma_v},
                  {"kappa", model.noise.kappa}};
    j["stats"] = {{"rms_speed", model.rms_speed}};
    j["config"] = json::parse(model.train_config.to_json_string());
    return j.dump(2) + "\n";
}

TrainedModel model_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("model file is not valid JSON: ") + e.what());
    }
    if (!j.contains("schema_version"))
        throw std::runtime_error("model file missing schema_version");
    if (j["schema_version"].get<int>() != kSchemaVersion)
        throw std::runtime_error("unsupported model schema_version " +
                                 j["schema_version"].dump() + " (expected " +
                                 std::to_string(kSchemaVersion) + ")");
    TrainedModel model;
    try {
        const auto& sb = j.at("scene").at("bounds");
        model.scene.bounds = {sb.at(0).get<double>(), sb.at(1).get<double>(),
                              sb.at(2).get<double>(), sb.at(3).get<double>()};
        model.scene.frame_dt = j.at("scene").at("frame_dt").get<double>();
        for (const auto& f : j.at("fields")) {
            AngleField field;
            field.degree = f.at("degree").get<int>();
            field.coeffs = f.at("coeffs").get<std::vector<double>>();
            if (static_cast<int>(field.coeffs.size()) !=
                (field.degree + 1) * (field.degree + 1))
                throw std::runtime_error("field coefficient count does not match degree");
            model.fields.push_back(std::move(field));
        }
        for (const auto& p : j.at("position_priors")) {
            PositionPrior prior;
            prior.degree = p.at("degree").get<int>();
            prior.coeffs = p.at("coeffs").get<std::vector<double>>();
            prior.log_partition = p.at("log_partition").get<double>();
            prior.quad_n = p.at("quad_n").get<int>();
            if (static_cast<int>(prior.coeffs.size()) !=
                (prior.degree + 1) * (prior.degree + 1))
                throw std::runtime_error("prior coefficient count does not match degree");
            model.position_priors.push_back(std::move(prior));
        }
        model.model_priors.n = j.at("model_priors").at("n").get<int>();
        model.model_priors.p_model = j.at("model_priors").at("p_model").get<double>();
        model.model_priors.s_max = j.at("model_priors").at("s_max").get<double>();
        model.noise.sigma_x = j.at("noise").at("sigma_x").get<double>();
        model.noise.sigma_v = j.at("noise").at("sigma_v").get<double>();
        model.noise.kappa = j.at("noise").at("kappa").get<double>();
        model.rms_speed = j.at("stats").at("rms_speed").get<double>();
        model.cluster_sizes = j.at("clustering").at("sizes").get<std::vector<int>>();
        model.unclassified_count = j.at("clustering").at("unclassified").get<int>();
        model.train_config.apply_json_string(j.at("config").dump());
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("model file schema error: ") + e.what());
    }
    model.validate();
    return model;
}

void save_model(const TrainedModel& model, const std::string& path) {
    write_file(path, model_to_json(model));
}

TrainedModel load_model(const std::string& path) { return model_from_json(read_file(path)); }

void write_raster(const DensityRaster& raster, const std::string& path) {
    std::ostringstream out;
    out << "# t=" << format_g17(raster.t) << "\n";
    out << "# cells=" << raster.spec.nx << "x" << raster.spec.ny << "\n";
    out << "# bounds=" << format_g17(raster.spec.bounds.xmin) << ","
        << format_g17(raster.spec.bounds.ymin) << ","
        << format_g17(raster.spec.bounds.xmax) << ","
        << format_g17(raster.spec.bounds.ymax) << "\n";
    out << "# bound_components=" << format_g17(raster.bound_components.dx) << ","
        << format_g17(raster.bound_components.ds) << ","
        << format_g17(raster.bound_components.eps_tol) << "\n";
    for (int iy = 0; iy < raster.spec.ny; ++iy) {
        for (int ix = 0; ix < raster.spec.nx; ++ix) {
            if (ix) out << ",";
            out << format_g17(raster.masses[static_cast<size_t>(iy) * raster.spec.nx + ix]);
        }
        out << "\n";
    }
    write_file(path, out.str());
}

DensityRaster read_raster(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    DensityRaster raster;
    std::string line;
    auto expect_header = [&](const std::string& prefix) {
        if (!std::getline(in, line) || line.rfind(prefix, 0) != 0)
            throw std::runtime_error("raster file '" + path + "': expected header " + prefix);
        return line.substr(prefix.size());
    };
    raster.t = std::stod(expect_header("# t="));
    {
        const std::string cells = expect_header("# cells=");
        if (std::sscanf(cells.c_str(), "%dx%d", &raster.spec.nx, &raster.spec.ny) != 2)
            throw std::runtime_error("raster file '" + path + "': bad cells header");
    }
    {
        const std::string bounds = expect_header("# bounds=");
        if (std::sscanf(bounds.c_str(), "%lf,%lf,%lf,%lf", &raster.spec.bounds.xmin,
                        &raster.spec.bounds.ymin, &raster.spec.bounds.xmax,
                        &raster.spec.bounds.ymax) != 4)
            throw std::runtime_error("raster file '" + path + "': bad bounds header");
    }
    {
        const std::string bc = expect_header("# bound_components=");
        if (std::sscanf(bc.c_str(), "%lf,%lf,%lf", &raster.bound_components.dx,
                        &raster.bound_components.ds, &raster.bound_components.eps_tol) != 3)
            throw std::runtime_error("raster file '" + path + "': bad bound_components");
    }
    raster.masses.reserve(static_cast<size_t>(raster.spec.cells()));
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string tok;
        while (std::getline(row, tok, ',')) raster.masses.push_back(std::stod(tok));
    }
    if (static_cast<int>(raster.masses.size()) != raster.spec.cells())
        throw std::runtime_error("raster file '" + path + "': cell count mismatch");
    return raster;
}

}  // namespace flowcast
