#pragma once

#include <cmath>
#include <stdexcept>

namespace flowcast {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }

    double dot(Vec2 o) const { return x * o.x + y * o.y; }
    double norm_sq() const { return x * x + y * y; }
    double norm() const { return std::sqrt(norm_sq()); }
    bool finite() const { return std::isfinite(x) && std::isfinite(y); }
};

inline Vec2 operator*(double s, Vec2 v) { return v * s; }

/// Axis-aligned rectangle, min corner inclusive.
struct Rect {
    double xmin = 0.0, ymin = 0.0, xmax = 0.0, ymax = 0.0;

    double width() const { return xmax - xmin; }
    double height() const { return ymax - ymin; }
    double area() const { return width() * height(); }
    bool contains(Vec2 p) const {
        return p.x >= xmin && p.x <= xmax && p.y >= ymin && p.y <= ymax;
    }
};

/// The fixed scene: rectangular domain D and the sampling interval of the
/// source data. All learned fields and priors are parameterized over the
/// canonical square [-1,1]^2 obtained by mapping D per axis.
struct SceneDomain {
    Rect bounds;
    double frame_dt = 1.0;

    void validate() const {
        if (!(bounds.width() > 0.0) || !(bounds.height() > 0.0))
            throw std::invalid_argument("SceneDomain: degenerate bounds");
        if (!(frame_dt > 0.0))
            throw std::invalid_argument("SceneDomain: frame_dt must be > 0");
    }

    /// Affine map taking D onto [-1,1]^2. Points outside D map outside the square.
    Vec2 to_canonical(Vec2 p) const {
        validate();
        return {2.0 * (p.x - bounds.xmin) / bounds.width() - 1.0,
                2.0 * (p.y - bounds.ymin) / bounds.height() - 1.0};
    }

    Vec2 from_canonical(Vec2 u) const {
        validate();
        return {bounds.xmin + 0.5 * (u.x + 1.0) * bounds.width(),
                bounds.ymin + 0.5 * (u.y + 1.0) * bounds.height()};
    }

    /// Identity scene: D = [-1,1]^2.
    static SceneDomain canonical(double frame_dt = 1.0) {
        return {{-1.0, -1.0, 1.0, 1.0}, frame_dt};
    }
};

}  // namespace flowcast
