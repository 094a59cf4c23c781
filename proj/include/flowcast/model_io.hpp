#pragma once

#include <string>

#include "flowcast/forecast.hpp"
#include "flowcast/model.hpp"

namespace flowcast {

/// Model persistence: versioned JSON document, byte-identical across
/// save/load/save round trips.
std::string model_to_json(const TrainedModel& model);
TrainedModel model_from_json(const std::string& text);
void save_model(const TrainedModel& model, const std::string& path);
TrainedModel load_model(const std::string& path);

/// Raster file: `# t=`, `# cells=`, `# bounds=`, `# bound_components=` header
/// lines, then ny row-major lines of nx comma-separated masses at 17
/// significant digits.
void write_raster(const DensityRaster& raster, const std::string& path);
DensityRaster read_raster(const std::string& path);

/// %.17g formatting used by the text outputs.
std::string format_g17(double v);

}  // namespace flowcast
