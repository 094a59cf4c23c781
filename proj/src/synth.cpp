#include "flowcast/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <stdexcept>

#include <json.hpp>

#include "flowcast/rng.hpp"

namespace flowcast {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Corridor {
    Vec2 start, end;
    bool bidirectional = false;
};

struct Arc {
    Vec2 center;
    double radius = 1.0;
    double angle_start = 0.0;
    double angle_end = 0.0;
    bool bidirectional = true;
};

Trajectory sample_path(const std::string& id, double duration, double dt, double kappa,
                       double noise, Rng& rng, const std::function<Vec2(double)>& path) {
    Trajectory traj;
    traj.agent_id = id;
    Vec2 brownian;
    const int frames = static_cast<int>(std::floor(duration / dt));
    for (int f = 0; f <= frames; ++f) {
        const double t = f * dt;
        if (f > 0 && kappa > 0.0) brownian += rng.normal2(std::sqrt(kappa * dt));
        Vec2 p = path(t) + brownian;
        if (noise > 0.0) p += rng.normal2(noise);
        traj.samples.push_back({t, p});
    }
    return traj;
}

}  // namespace

std::vector<std::string> synth_scenarios() {
    return {"straight-corridor", "two-corridor", "circle", "crossing"};
}

SynthResult synthesize(const std::string& scenario, const SceneDomain& scene,
                       const SynthOptions& opts) {
    scene.validate();
    if (opts.count < 1) throw std::invalid_argument("synthesize: count must be >= 1");
    const Rect& b = scene.bounds;
    const double w = b.width(), h = b.height();
    Rng rng(opts.seed);

    std::vector<Corridor> corridors;
    std::vector<Arc> arcs;
    if (scenario == "straight-corridor") {
        corridors.push_back({{b.xmin + 0.05 * w, b.ymin + 0.5 * h},
                             {b.xmin + 0.95 * w, b.ymin + 0.5 * h},
                             false});
    } else if (scenario == "two-corridor") {
        corridors.push_back({{b.xmin + 0.05 * w, b.ymin + 0.25 * h},
                             {b.xmin + 0.95 * w, b.ymin + 0.25 * h},
                             false});
        corridors.push_back({{b.xmin + 0.75 * w, b.ymin + 0.05 * h},
                             {b.xmin + 0.75 * w, b.ymin + 0.95 * h},
                             false});
    } else if (scenario == "circle") {
        Arc arc;
        arc.center = {b.xmin + 0.5 * w, b.ymin + 0.15 * h};
        arc.radius = 0.55 * std::min(w, h);
        arc.angle_start = 0.25 * kPi;
        arc.angle_end = 0.75 * kPi;
        arcs.push_back(arc);
    } else if (scenario == "crossing") {
        corridors.push_back({{b.xmin + 0.05 * w, b.ymin + 0.5 * h},
                             {b.xmin + 0.95 * w, b.ymin + 0.5 * h},
                             true});
        corridors.push_back({{b.xmin + 0.5 * w, b.ymin + 0.05 * h},
                             {b.xmin + 0.5 * w, b.ymin + 0.95 * h},
                             true});
    } else {
        throw std::invalid_argument("unknown scenario '" + scenario +
                                    "' (options: straight-corridor, two-corridor, "
                                    "circle, crossing)");
    }

    SynthResult result;
    const int n_routes = static_cast<int>(corridors.size() + arcs.size());
    for (int a = 0; a < opts.count; ++a) {
        const int route = a % n_routes;
        double speed = rng.normal(opts.mean_speed, opts.speed_jitter);
        speed = std::clamp(speed, 0.5 * opts.mean_speed, 1.5 * opts.mean_speed);
        const double phase = rng.uniform(0.0, 0.25);  // fraction of the route skipped
        char id[32];
        std::snprintf(id, sizeof id, "a%04d", a);

        if (route < static_cast<int>(corridors.size())) {
            const Corridor& c = corridors[static_cast<size_t>(route)];
            const bool reverse = c.bidirectional && (rng.next_u64() & 1u);
            const Vec2 from = reverse ? c.end : c.start;
            const Vec2 to = reverse ? c.start : c.end;
            const Vec2 dir = (to - from) * (1.0 / (to - from).norm());
            // lateral offset keeps corridors band-like instead of line-like
            const Vec2 normal{-dir.y, dir.x};
            const double lateral = rng.normal(0.0, 0.02 * std::min(w, h));
            const double length = (to - from).norm();
            const Vec2 origin = from + phase * length * dir + lateral * normal;
            const double duration = (1.0 - phase) * length / speed;
            result.trajectories.push_back(sample_path(
                id, duration, scene.frame_dt, opts.kappa, opts.noise, rng,
                [=](double t) { return origin + speed * t * dir; }));
        } else {
            const Arc& arc = arcs[static_cast<size_t>(route - corridors.size())];
            const bool reverse = arc.bidirectional && (rng.next_u64() & 1u);
            const double r = arc.radius + rng.normal(0.0, 0.02 * arc.radius);
            const double span = arc.angle_end - arc.angle_start;
            const double a0 = reverse ? arc.angle_end - phase * span
                                      : arc.angle_start + phase * span;
            const double omega = (reverse ? -1.0 : 1.0) * speed / r;
            const double duration = (1.0 - phase) * std::abs(span) * r / speed;
            const Vec2 center = arc.center;
            result.trajectories.push_back(sample_path(
                id, duration, scene.frame_dt, opts.kappa, opts.noise, rng,
                [=](double t) {
                    const double ang = a0 + omega * t;
                    return center + Vec2{r * std::cos(ang), r * std::sin(ang)};
                }));
        }
    }

    nlohmann::json truth;
    truth["scenario"] = scenario;
    truth["count"] = opts.count;
    truth["noise"] = opts.noise;
    truth["kappa"] = opts.kappa;
    truth["seed"] = opts.seed;
    truth["mean_speed"] = opts.mean_speed;
    truth["speed_jitter"] = opts.speed_jitter;
    truth["frame_dt"] = scene.frame_dt;
    truth["bounds"] = {b.xmin, b.ymin, b.xmax, b.ymax};
    for (const Corridor& c : corridors)
        truth["corridors"].push_back({{"start", {c.start.x, c.start.y}},
                                      {"end", {c.end.x, c.end.y}},
                                      {"angle", std::atan2(c.end.y - c.start.y,
                                                           c.end.x - c.start.x)},
                                      {"bidirectional", c.bidirectional}});
    for (const Arc& arc : arcs)
        truth["arcs"].push_back({{"center", {arc.center.x, arc.center.y}},
                                 {"radius", arc.radius},
                                 {"angle_start", arc.angle_start},
                                 {"angle_end", arc.angle_end},
                                 {"bidirectional", arc.bidirectional}});
    result.truth_json = truth.dump(2);
    return result;
}

}  // namespace flowcast
