#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "flowcast/geometry.hpp"
#include "flowcast/trajectory.hpp"

namespace flowcast {

struct SynthOptions {
    int count = 20;
    double noise = 0.0;     // iid per-sample measurement noise, scene units
    double kappa = 0.0;     // planted Brownian model noise, units^2 / second
    uint64_t seed = 1;
    double mean_speed = 1.0;
    double speed_jitter = 0.1;
};

struct SynthResult {
    std::vector<Trajectory> trajectories;
    std::string truth_json;  // generating parameters, for downstream checks
};

/// Desk-scale scene generators with known structure. Scenarios:
///   straight-corridor  one horizontal corridor, all agents heading +x
///   two-corridor       a horizontal and a vertical corridor, unidirectional
///   circle             a curved corridor: a fixed circular arc, both directions
///   crossing           two corridors crossing at the center, both directions
SynthResult synthesize(const std::string& scenario, const SceneDomain& scene,
                       const SynthOptions& opts);

std::vector<std::string> synth_scenarios();

}  // namespace flowcast
