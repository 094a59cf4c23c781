#include "flowcast/trajectory.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace flowcast {

void Trajectory::validate() const {
    if (samples.size() < 2)
        throw std::invalid_argument("Trajectory '" + agent_id + "': needs >= 2 samples");
    for (size_t i = 0; i < samples.size(); ++i) {
        if (!samples[i].p.finite() || !std::isfinite(samples[i].t))
            throw std::invalid_argument("Trajectory '" + agent_id + "': non-finite sample");
        if (i > 0 && !(samples[i].t > samples[i - 1].t))
            throw std::invalid_argument("Trajectory '" + agent_id +
                                        "': timestamps not strictly increasing");
    }
}

namespace {

[[noreturn]] void parse_fail(size_t line_no, const std::string& why) {
    throw std::runtime_error("parse error at line " + std::to_string(line_no) + ": " + why);
}

double parse_double(const std::string& tok, size_t line_no) {
    double v = 0.0;
    const char* begin = tok.data();
    const char* end = begin + tok.size();
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc{} || ptr != end) parse_fail(line_no, "bad number '" + tok + "'");
    return v;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string tok;
    std::istringstream ss(line);
    while (std::getline(ss, tok, sep)) out.push_back(tok);
    return out;
}

std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) out.push_back(tok);
    return out;
}

bool blank(const std::string& s) {
    return s.find_first_not_of(" \t\r\n") == std::string::npos;
}

}  // namespace

ParseResult parse_annotations(std::istream& in, AnnotationFormat format, double frame_dt) {
    ParseResult result;
    // keyed by first appearance so output order is stable
    std::vector<std::string> order;
    std::map<std::string, std::vector<TimedSample>> by_agent;

    std::string line;
    size_t line_no = 0;
    bool saw_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (blank(line)) continue;

        std::string id;
        TimedSample sample;
        if (format == AnnotationFormat::SimpleCsv) {
            if (!saw_header) {
                if (line != "agent_id,t,x,y")
                    parse_fail(line_no, "expected header 'agent_id,t,x,y'");
                saw_header = true;
                continue;
            }
            const auto cols = split(line, ',');
            if (cols.size() != 4) parse_fail(line_no, "expected 4 columns");
            id = cols[0];
            sample.t = parse_double(cols[1], line_no);
            sample.p = {parse_double(cols[2], line_no), parse_double(cols[3], line_no)};
        } else {
            const auto cols = split_ws(line);
            if (cols.size() < 9) parse_fail(line_no, "expected >= 9 columns");
            id = cols[0];
            const double xmin = parse_double(cols[1], line_no);
            const double ymin = parse_double(cols[2], line_no);
            const double xmax = parse_double(cols[3], line_no);
            const double ymax = parse_double(cols[4], line_no);
            const double frame = parse_double(cols[5], line_no);
            const double lost = parse_double(cols[6], line_no);
            const double occluded = parse_double(cols[7], line_no);
            if (lost != 0.0 || occluded != 0.0) {
                ++result.dropped_rows;
                continue;
            }
            sample.t = frame * frame_dt;
            sample.p = {0.5 * (xmin + xmax), 0.5 * (ymin + ymax)};
        }
        if (!sample.p.finite() || !std::isfinite(sample.t))
            parse_fail(line_no, "non-finite value");
        auto [it, inserted] = by_agent.try_emplace(id);
        if (inserted) order.push_back(id);
        it->second.push_back(sample);
    }

    for (const auto& id : order) {
        auto& samples = by_agent[id];
        std::stable_sort(samples.begin(), samples.end(),
                         [](const TimedSample& a, const TimedSample& b) { return a.t < b.t; });
        std::vector<TimedSample> dedup;
        dedup.reserve(samples.size());
        for (const auto& s : samples) {
            if (!dedup.empty() && s.t == dedup.back().t) {
                ++result.duplicate_timestamps;
                continue;
            }
            dedup.push_back(s);
        }
        if (dedup.size() < 2) {
            ++result.skipped_agents;
            continue;
        }
        result.trajectories.push_back({id, std::move(dedup)});
    }
    return result;
}

AnnotationFormat parse_format_name(const std::string& name) {
    if (name == "simple-csv") return AnnotationFormat::SimpleCsv;
    if (name == "drone-annotation") return AnnotationFormat::DroneAnnotation;
    throw std::invalid_argument("unknown annotation format '" + name +
                                "' (expected simple-csv or drone-annotation)");
}

Trajectory smooth(const Trajectory& traj, int window) {
    traj.validate();
    const int n = static_cast<int>(traj.samples.size());
    if (window < 1) throw std::invalid_argument("smooth: window must be >= 1");
    if (window > n) throw std::invalid_argument("smooth: window exceeds sample count");

    // Tap offsets and weights of the full centered kernel.
    std::vector<int> offs;
    std::vector<double> wts;
    if (window % 2 == 1) {
        const int r = (window - 1) / 2;
        for (int o = -r; o <= r; ++o) {
            offs.push_back(o);
            wts.push_back(1.0);
        }
    } else {
        const int r = window / 2;
        for (int o = -r; o <= r; ++o) {
            offs.push_back(o);
            wts.push_back(o == -r || o == r ? 0.5 : 1.0);
        }
    }

    Trajectory out;
    out.agent_id = traj.agent_id;
    out.samples.resize(traj.samples.size());
    for (int i = 0; i < n; ++i) {
        Vec2 acc;
        double wsum = 0.0;
        for (size_t k = 0; k < offs.size(); ++k) {
            const int j = i + offs[k];
            if (j < 0 || j >= n) continue;  // shrink at the ends
            acc += wts[k] * traj.samples[j].p;
            wsum += wts[k];
        }
        out.samples[i] = {traj.samples[i].t, acc * (1.0 / wsum)};
    }
    return out;
}

std::vector<VelocitySample> velocities(const Trajectory& traj) {
    if (traj.samples.size() < 2)
        throw std::invalid_argument("velocities: needs >= 2 samples");
    const auto& s = traj.samples;
    std::vector<VelocitySample> out(s.size());
    for (size_t i = 0; i + 1 < s.size(); ++i) {
        const double dt = s[i + 1].t - s[i].t;
        if (dt == 0.0) throw std::invalid_argument("velocities: duplicate timestamps");
        out[i] = {s[i].t, (s[i + 1].p - s[i].p) * (1.0 / dt)};
    }
    out.back() = {s.back().t, out[s.size() - 2].v};
    return out;
}

}  // namespace flowcast
