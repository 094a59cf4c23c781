#include "flowcast/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace flowcast {

EndpointEmbedding endpoint_embedding(const Trajectory& traj, const SceneDomain& scene) {
    if (traj.samples.empty())
        throw std::invalid_argument("endpoint_embedding: empty trajectory");
    const Vec2 a = scene.to_canonical(traj.samples.front().p);
    const Vec2 b = scene.to_canonical(traj.samples.back().p);
    return {{a.x, a.y, b.x, b.y}, {b.x, b.y, a.x, a.y}};
}

namespace {

double dist4(const std::array<double, 4>& u, const std::array<double, 4>& v) {
    double s = 0.0;
    for (int i = 0; i < 4; ++i) s += (u[i] - v[i]) * (u[i] - v[i]);
    return std::sqrt(s);
}

}  // namespace

double endpoint_distance(const Trajectory& a, const Trajectory& b, const SceneDomain& scene) {
    const auto ea = endpoint_embedding(a, scene);
    const auto eb = endpoint_embedding(b, scene);
    return std::min(dist4(ea.forward, eb.forward), dist4(ea.reversed, eb.forward));
}

Clustering affinity_propagation(const std::vector<std::vector<double>>& similarity,
                                double preference, const ApOptions& opts) {
    const int n = static_cast<int>(similarity.size());
    if (n == 0) throw std::invalid_argument("affinity_propagation: empty matrix");
    for (const auto& row : similarity)
        if (static_cast<int>(row.size()) != n)
            throw std::invalid_argument("affinity_propagation: matrix not square");
    if (!(opts.damping >= 0.5 && opts.damping < 1.0))
        throw std::invalid_argument("affinity_propagation: damping must be in [0.5,1)");

    // Working copy: diagonal = preference, plus a deterministic
    // index-proportional jitter that breaks symmetric ties.
    std::vector<double> s(static_cast<size_t>(n) * n);
    double scale = std::abs(preference);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) scale = std::max(scale, std::abs(similarity[i][j]));
    if (scale == 0.0) scale = 1.0;
    const double jitter = 1e-12 * scale / (static_cast<double>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double base = (i == j) ? preference : similarity[i][j];
            s[i * n + j] = base + jitter * (static_cast<double>(i) * n + j + 1);
        }

    std::vector<double> r(static_cast<size_t>(n) * n, 0.0);
    std::vector<double> a(static_cast<size_t>(n) * n, 0.0);
    std::vector<char> exemplar_flag(static_cast<size_t>(n), 0);

    const double lam = opts.damping;
    int unchanged = 0;
    for (int iter = 0; iter < opts.max_iter && unchanged < opts.convergence_window; ++iter) {
        // responsibilities: r(i,k) = s(i,k) - max_{k' != k} (a(i,k') + s(i,k'))
        for (int i = 0; i < n; ++i) {
            double max1 = -std::numeric_limits<double>::infinity();
            double max2 = max1;
            int arg1 = -1;
            for (int k = 0; k < n; ++k) {
                const double v = a[i * n + k] + s[i * n + k];
                if (v > max1) {
                    max2 = max1;
                    max1 = v;
                    arg1 = k;
                } else if (v > max2) {
                    max2 = v;
                }
            }
            for (int k = 0; k < n; ++k) {
                const double cap = (k == arg1) ? max2 : max1;
                r[i * n + k] = lam * r[i * n + k] + (1.0 - lam) * (s[i * n + k] - cap);
            }
        }
        // availabilities: a(i,k) = min(0, r(k,k) + sum_{i' != i,k} max(0, r(i',k)))
        for (int k = 0; k < n; ++k) {
            double pos_sum = 0.0;
            for (int i = 0; i < n; ++i)
                if (i != k) pos_sum += std::max(0.0, r[i * n + k]);
            for (int i = 0; i < n; ++i) {
                double v;
                if (i == k) {
                    v = pos_sum;
                } else {
                    v = r[k * n + k] + pos_sum - std::max(0.0, r[i * n + k]);
                    v = std::min(0.0, v);
                }
                a[i * n + k] = lam * a[i * n + k] + (1.0 - lam) * v;
            }
        }
        // convergence: the exemplar indicator set is stable and nonempty
        bool changed = false;
        int n_exemplars = 0;
        for (int k = 0; k < n; ++k) {
            const char is_exemplar = r[k * n + k] + a[k * n + k] > 0.0 ? 1 : 0;
            n_exemplars += is_exemplar;
            if (exemplar_flag[static_cast<size_t>(k)] != is_exemplar) {
                exemplar_flag[static_cast<size_t>(k)] = is_exemplar;
                changed = true;
            }
        }
        unchanged = (changed || n_exemplars == 0) ? 0 : unchanged + 1;
    }

    std::vector<int> exemplars;
    for (int k = 0; k < n; ++k)
        if (r[k * n + k] + a[k * n + k] > 0.0) exemplars.push_back(k);

    Clustering out;
    if (exemplars.empty()) {
        // degenerate: lump everything into one cluster
        int best = 0;
        double best_sum = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < n; ++i) {
            double row = 0.0;
            for (int j = 0; j < n; ++j) row += s[i * n + j];
            if (row > best_sum) {
                best_sum = row;
                best = i;
            }
        }
        out.degenerate_fallback = true;
        out.exemplars = {best};
        out.clusters.resize(1);
        for (int i = 0; i < n; ++i) out.clusters[0].push_back(i);
        return out;
    }

    out.exemplars = exemplars;
    out.clusters.resize(exemplars.size());
    for (int i = 0; i < n; ++i) {
        int best_c = 0;
        double best_s = -std::numeric_limits<double>::infinity();
        for (size_t c = 0; c < exemplars.size(); ++c) {
            const int e = exemplars[c];
            if (i == e) {
                best_c = static_cast<int>(c);
                break;
            }
            if (s[i * n + e] > best_s) {
                best_s = s[i * n + e];
                best_c = static_cast<int>(c);
            }
        }
        out.clusters[best_c].push_back(i);
    }
    return out;
}

Clustering cluster_trajectories(const std::vector<Trajectory>& trajs,
                                const SceneDomain& scene, const ClusterOptions& opts) {
    const int n = static_cast<int>(trajs.size());
    if (n == 0) throw std::invalid_argument("cluster_trajectories: no trajectories");

    std::vector<std::vector<double>> sim(n, std::vector<double>(n, 0.0));
    std::vector<double> off_diag;
    off_diag.reserve(static_cast<size_t>(n) * (n - 1));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double d = endpoint_distance(trajs[i], trajs[j], scene);
            const double v = -d * d;
            sim[i][j] = v;
            sim[j][i] = v;
            off_diag.push_back(v);
            off_diag.push_back(v);
        }

    double preference = 0.0;
    if (!off_diag.empty()) {
        std::sort(off_diag.begin(), off_diag.end());
        const double q = opts.preference_quantile;
        const double pos = q * (static_cast<double>(off_diag.size()) - 1.0);
        const size_t lo = static_cast<size_t>(pos);
        const size_t hi = std::min(lo + 1, off_diag.size() - 1);
        const double frac = pos - static_cast<double>(lo);
        preference = off_diag[lo] * (1.0 - frac) + off_diag[hi] * frac;
    }

    Clustering raw = affinity_propagation(sim, preference, opts.ap);

    Clustering out;
    out.degenerate_fallback = raw.degenerate_fallback;
    for (size_t c = 0; c < raw.clusters.size(); ++c) {
        if (static_cast<int>(raw.clusters[c].size()) >= opts.min_size) {
            out.clusters.push_back(raw.clusters[c]);
            out.exemplars.push_back(raw.exemplars[c]);
        } else {
            out.unclassified.insert(out.unclassified.end(), raw.clusters[c].begin(),
                                    raw.clusters[c].end());
        }
    }
    std::sort(out.unclassified.begin(), out.unclassified.end());
    return out;
}

}  // namespace flowcast
