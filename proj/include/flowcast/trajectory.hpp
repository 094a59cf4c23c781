#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "flowcast/geometry.hpp"

namespace flowcast {

struct TimedSample {
    double t = 0.0;  // seconds
    Vec2 p;          // scene units
};

struct VelocitySample {
    double t = 0.0;
    Vec2 v;  // scene units / second
};

/// One agent's observed track. Timestamps strictly increasing, >= 2 samples,
/// finite positions.
struct Trajectory {
    std::string agent_id;
    std::vector<TimedSample> samples;

    double duration() const {
        return samples.empty() ? 0.0 : samples.back().t - samples.front().t;
    }
    void validate() const;
};

enum class AnnotationFormat { SimpleCsv, DroneAnnotation };

struct ParseResult {
    std::vector<Trajectory> trajectories;
    int skipped_agents = 0;        // agents with < 2 usable samples
    int dropped_rows = 0;          // lost/occluded annotation rows
    int duplicate_timestamps = 0;  // rows discarded to keep timestamps strict
};

/// Parses trajectory annotations.
///
/// simple-csv: header `agent_id,t,x,y`, one sample per row.
/// drone-annotation: space-separated `track_id xmin ymin xmax ymax frame lost
/// occluded generated label`; t = frame * frame_dt, position = bbox center,
/// rows with lost or occluded set are dropped.
///
/// Malformed rows raise std::runtime_error naming the line number.
ParseResult parse_annotations(std::istream& in, AnnotationFormat format,
                              double frame_dt = 1.0);

AnnotationFormat parse_format_name(const std::string& name);

/// Centered moving average over `window` time steps; the window shrinks near
/// the ends so the output length equals the input length. Even windows use the
/// symmetric w+1-tap form with half-weight end taps, which keeps affine
/// interiors fixed. Timestamps are unchanged.
Trajectory smooth(const Trajectory& traj, int window = 4);

/// Forward-difference velocities; the final entry copies its predecessor so
/// the list length equals the sample count.
std::vector<VelocitySample> velocities(const Trajectory& traj);

}  // namespace flowcast
