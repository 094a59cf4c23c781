#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "flowcast/angle_field.hpp"
#include "flowcast/geometry.hpp"

namespace flowcast {

/// Classic RK4 with a fixed step; the final partial step is shortened.
/// Negative duration integrates backward (equivalently, the reversed field).
/// Deriv is any callable Vec2(Vec2).
template <typename Deriv>
Vec2 rk4_integrate(Deriv&& deriv, Vec2 x, double duration, double step) {
    if (!(step > 0.0)) throw std::invalid_argument("rk4_integrate: step must be > 0");
    if (duration == 0.0) return x;
    const double dir = duration > 0.0 ? 1.0 : -1.0;
    double remaining = std::abs(duration);
    while (remaining > 0.0) {
        const double h = dir * std::min(step, remaining);
        const Vec2 k1 = deriv(x);
        const Vec2 k2 = deriv(x + (h * 0.5) * k1);
        const Vec2 k3 = deriv(x + (h * 0.5) * k2);
        const Vec2 k4 = deriv(x + h * k3);
        x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!x.finite()) throw std::runtime_error("rk4_integrate: state became non-finite");
        remaining -= std::min(step, remaining);
    }
    return x;
}

/// Flow map of the unit-speed field over the scene: integrates
/// dx/dt = X(u(x)) in scene coordinates for `duration` seconds.
Vec2 flow(const AngleField& field, const SceneDomain& scene, Vec2 x0, double duration,
          double step);

/// Precomputed flow positions of a point grid under each field, at integer
/// multiples of one time increment (typically s_max * frame_dt of unit-speed
/// flow). Row m holds the grid flowed for m increments; rows extend
/// incrementally in both directions and existing rows are never recomputed.
struct FlowTable {
    std::vector<Vec2> grid_points;
    double increment = 0.0;  // seconds of unit-speed flow per row step
    double step = 0.0;       // RK4 step used for every extension

    struct FieldRows {
        std::vector<std::vector<Vec2>> forward;   // rows +1, +2, ...
        std::vector<std::vector<Vec2>> backward;  // rows -1, -2, ...
    };
    std::vector<FieldRows> fields;

    /// Current extent l: rows exist for m in [-l, l].
    int extent() const {
        return fields.empty() ? 0 : static_cast<int>(fields[0].forward.size());
    }
    std::span<const Vec2> row(int field_index, int m) const;
};

FlowTable make_flow_table(std::span<const Vec2> grid, size_t n_fields, double increment,
                          double step);

/// Appends rows +/-(l+1) by integrating one increment from rows +/-l.
void extend_flow_table(FlowTable& table, std::span<const AngleField> fields,
                       const SceneDomain& scene, int threads = 1);

}  // namespace flowcast
