// Test-only independent oracles. Everything here is written from the
// definitions, without reusing the library's implementation paths.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "flowcast/geometry.hpp"

namespace oracles {

using flowcast::Vec2;

/// Centered moving average with half-weight end taps for even windows,
/// shrinking at the ends. Straightforward restatement of the definition.
inline std::vector<Vec2> moving_average(const std::vector<Vec2>& p, int window) {
    const int n = static_cast<int>(p.size());
    std::vector<Vec2> out(p.size());
    for (int i = 0; i < n; ++i) {
        double wsum = 0.0;
        Vec2 acc;
        auto add = [&](int j, double w) {
            if (j < 0 || j >= n) return;
            acc += w * p[static_cast<size_t>(j)];
            wsum += w;
        };
        if (window % 2 == 1) {
            const int r = (window - 1) / 2;
            for (int o = -r; o <= r; ++o) add(i + o, 1.0);
        } else {
            const int r = window / 2;
            add(i - r, 0.5);
            add(i + r, 0.5);
            for (int o = -r + 1; o <= r - 1; ++o) add(i + o, 1.0);
        }
        out[static_cast<size_t>(i)] = acc * (1.0 / wsum);
    }
    return out;
}

/// Dense affinity propagation run to convergence, transcribed directly from
/// the message-passing update equations.
struct NaiveApResult {
    std::vector<int> exemplar_of;  // exemplar index per point, -1 if none emerged
};

inline NaiveApResult naive_affinity_propagation(std::vector<std::vector<double>> s,
                                                double preference, double damping,
                                                int iterations) {
    const int n = static_cast<int>(s.size());
    for (int i = 0; i < n; ++i) s[i][i] = preference;
    std::vector<std::vector<double>> r(n, std::vector<double>(n, 0.0));
    std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
    for (int it = 0; it < iterations; ++it) {
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k) {
                double best = -std::numeric_limits<double>::infinity();
                for (int kk = 0; kk < n; ++kk)
                    if (kk != k) best = std::max(best, a[i][kk] + s[i][kk]);
                r[i][k] = damping * r[i][k] + (1 - damping) * (s[i][k] - best);
            }
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k) {
                double v;
                if (i == k) {
                    v = 0.0;
                    for (int ii = 0; ii < n; ++ii)
                        if (ii != k) v += std::max(0.0, r[ii][k]);
                } else {
                    v = r[k][k];
                    for (int ii = 0; ii < n; ++ii)
                        if (ii != i && ii != k) v += std::max(0.0, r[ii][k]);
                    v = std::min(0.0, v);
                }
                a[i][k] = damping * a[i][k] + (1 - damping) * v;
            }
    }
    std::vector<int> exemplars;
    for (int k = 0; k < n; ++k)
        if (r[k][k] + a[k][k] > 0.0) exemplars.push_back(k);
    NaiveApResult out;
    out.exemplar_of.assign(static_cast<size_t>(n), -1);
    if (exemplars.empty()) return out;
    for (int i = 0; i < n; ++i) {
        double best = -std::numeric_limits<double>::infinity();
        for (int e : exemplars) {
            if (i == e) {
                out.exemplar_of[static_cast<size_t>(i)] = e;
                best = std::numeric_limits<double>::infinity();
                break;
            }
            if (s[i][static_cast<size_t>(e)] > best) {
                best = s[i][static_cast<size_t>(e)];
                out.exemplar_of[static_cast<size_t>(i)] = e;
            }
        }
    }
    return out;
}

/// ROC by exhaustive threshold enumeration over the value multiset, with
/// >= predicted-positive semantics and (0,0)/(1,1) endpoints.
struct NaiveRoc {
    std::vector<std::pair<double, double>> points;
    double auc = 0.0;
};

inline NaiveRoc naive_roc(const std::vector<double>& values,
                          const std::vector<bool>& positive) {
    std::vector<double> thresholds = values;
    std::sort(thresholds.begin(), thresholds.end());
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
    double total_pos = 0.0, total_neg = 0.0;
    for (bool p : positive) (p ? total_pos : total_neg) += 1.0;

    NaiveRoc out;
    out.points.emplace_back(0.0, 0.0);
    for (auto it = thresholds.rbegin(); it != thresholds.rend(); ++it) {
        double tp = 0.0, fp = 0.0;
        for (size_t i = 0; i < values.size(); ++i)
            if (values[i] >= *it) (positive[i] ? tp : fp) += 1.0;
        out.points.emplace_back(fp / total_neg, tp / total_pos);
    }
    if (out.points.back() != std::make_pair(1.0, 1.0)) out.points.emplace_back(1.0, 1.0);
    for (size_t i = 1; i < out.points.size(); ++i)
        out.auc += (out.points[i].first - out.points[i - 1].first) * 0.5 *
                   (out.points[i].second + out.points[i - 1].second);
    return out;
}

/// Wrapped absolute angular difference in [0, pi].
inline double angle_diff(double a, double b) {
    double d = std::fmod(a - b, 2.0 * 3.14159265358979323846);
    if (d < 0) d += 2.0 * 3.14159265358979323846;
    return std::min(d, 2.0 * 3.14159265358979323846 - d);
}

}  // namespace oracles
