#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "flowcast/clustering.hpp"
#include "flowcast/rng.hpp"
#include "oracles.hpp"

using namespace flowcast;

namespace {

Trajectory line(const std::string& id, Vec2 from, Vec2 to, int n = 5) {
    Trajectory traj{id, {}};
    for (int i = 0; i < n; ++i) {
        const double f = static_cast<double>(i) / (n - 1);
        traj.samples.push_back({0.1 * i, from + f * (to - from)});
    }
    return traj;
}

const SceneDomain kScene = SceneDomain::canonical(0.1);

}  // namespace

TEST_SUITE_BEGIN("clustering");

TEST_CASE("endpoint distance of identical trajectories is zero") {
    const auto a = line("a", {0.1, 0.2}, {0.7, -0.3});
    CHECK(endpoint_distance(a, a, kScene) == 0.0);
}

TEST_CASE("endpoint distance ignores traversal order") {
    const auto a = line("a", {0.0, 0.0}, {1.0, 0.0});
    const auto b = line("b", {1.0, 0.0}, {0.0, 0.0});
    CHECK(endpoint_distance(a, b, kScene) == 0.0);
}

TEST_CASE("endpoint distance hand case: diagonal vs degenerate") {
    // forward: |(0,0,1,1)-(0,0,0,0)| = sqrt(2); reversed the same; min = sqrt(2)
    const auto a = line("a", {0.0, 0.0}, {1.0, 1.0});
    const auto b = line("b", {0.0, 0.0}, {0.0, 0.0});
    CHECK(endpoint_distance(a, b, kScene) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("affinity propagation: a single point forms its own cluster") {
    const Clustering c = affinity_propagation({{0.0}}, -1.0);
    REQUIRE(c.n() == 1);
    CHECK(c.clusters[0] == std::vector<int>{0});
    CHECK(c.exemplars[0] == 0);
}

TEST_CASE("affinity propagation recovers two well-separated groups and matches "
          "an independent message-passing oracle") {
    // two groups of 5: within-distance 0.1, between-distance 100
    std::vector<Vec2> pts;
    Rng rng(5);
    for (int g = 0; g < 2; ++g)
        for (int i = 0; i < 5; ++i)
            pts.push_back({g * 100.0 + rng.uniform(0.0, 0.07), rng.uniform(0.0, 0.07)});
    const int n = static_cast<int>(pts.size());
    std::vector<std::vector<double>> sim(n, std::vector<double>(n, 0.0));
    std::vector<double> off;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) {
                sim[i][j] = -(pts[i] - pts[j]).norm_sq();
                off.push_back(sim[i][j]);
            }
    std::sort(off.begin(), off.end());
    const double preference = 0.5 * (off[off.size() / 2 - 1] + off[off.size() / 2]);

    const Clustering c = affinity_propagation(sim, preference);
    REQUIRE(c.n() == 2);
    for (const auto& cluster : c.clusters) {
        REQUIRE(cluster.size() == 5);
        for (int idx : cluster) CHECK(idx / 5 == cluster[0] / 5);
    }

    const auto naive = oracles::naive_affinity_propagation(sim, preference, 0.9, 500);
    // same partition: points agree on "same exemplar" relations
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const bool together_naive = naive.exemplar_of[i] == naive.exemplar_of[j];
            bool together = false;
            for (const auto& cluster : c.clusters)
                if (std::count(cluster.begin(), cluster.end(), i) &&
                    std::count(cluster.begin(), cluster.end(), j))
                    together = true;
            CHECK(together == together_naive);
        }
}

TEST_CASE("affinity propagation lumps indistinguishable points into one cluster") {
    const int n = 6;
    std::vector<std::vector<double>> sim(n, std::vector<double>(n, 0.0));
    const Clustering c = affinity_propagation(sim, 0.0);
    CHECK(c.n() == 1);
    CHECK(c.clusters[0].size() == static_cast<size_t>(n));
}

TEST_CASE("affinity propagation rejects non-square matrices") {
    CHECK_THROWS_AS(affinity_propagation({{0.0, 1.0}}, 0.0), std::invalid_argument);
}

TEST_CASE("three identical trajectories form one cluster, S_0 empty") {
    std::vector<Trajectory> trajs{line("a", {0, 0}, {1, 0}), line("b", {0, 0}, {1, 0}),
                                  line("c", {0, 0}, {1, 0})};
    ClusterOptions opts;
    opts.min_size = 2;
    const Clustering c = cluster_trajectories(trajs, kScene, opts);
    CHECK(c.n() == 1);
    CHECK(c.unclassified.empty());
}

TEST_CASE("two synthetic corridors cluster to n=2 with the outlier unclassified") {
    std::vector<Trajectory> trajs;
    Rng rng(9);
    for (int i = 0; i < 10; ++i) {
        const Vec2 j1{rng.uniform(-0.02, 0.02), rng.uniform(-0.02, 0.02)};
        const Vec2 j2{rng.uniform(-0.02, 0.02), rng.uniform(-0.02, 0.02)};
        trajs.push_back(line("h" + std::to_string(i), Vec2{-0.8, -0.5} + j1,
                             Vec2{0.8, -0.5} + j2));
    }
    for (int i = 0; i < 10; ++i) {
        const Vec2 j1{rng.uniform(-0.02, 0.02), rng.uniform(-0.02, 0.02)};
        const Vec2 j2{rng.uniform(-0.02, 0.02), rng.uniform(-0.02, 0.02)};
        trajs.push_back(line("v" + std::to_string(i), Vec2{0.5, -0.8} + j1,
                             Vec2{0.5, 0.8} + j2));
    }
    trajs.push_back(line("outlier", {-0.9, 0.9}, {-0.85, 0.85}));

    ClusterOptions opts;
    opts.min_size = 3;
    const Clustering c = cluster_trajectories(trajs, kScene, opts);
    REQUIRE(c.n() == 2);
    CHECK(c.unclassified == std::vector<int>{20});
    for (const auto& cluster : c.clusters) {
        // members stay within one corridor
        for (int idx : cluster) CHECK(idx / 10 == cluster[0] / 10);
    }
}

TEST_CASE("min_size above the dataset size sends everything to S_0") {
    std::vector<Trajectory> trajs{line("a", {0, 0}, {1, 0}), line("b", {0, 0}, {0, 1})};
    ClusterOptions opts;
    opts.min_size = 10;
    const Clustering c = cluster_trajectories(trajs, kScene, opts);
    CHECK(c.n() == 0);
    CHECK(c.unclassified.size() == 2);
}

TEST_CASE("endpoint distance is a pseudometric on random triples") {
    Rng rng(123);
    auto random_line = [&](int i) {
        return line("t" + std::to_string(i), {rng.uniform(-1, 1), rng.uniform(-1, 1)},
                    {rng.uniform(-1, 1), rng.uniform(-1, 1)});
    };
    for (int trial = 0; trial < 10000; ++trial) {
        const auto a = random_line(0), b = random_line(1), c = random_line(2);
        const double ab = endpoint_distance(a, b, kScene);
        const double ba = endpoint_distance(b, a, kScene);
        const double ac = endpoint_distance(a, c, kScene);
        const double cb = endpoint_distance(c, b, kScene);
        CHECK(ab == doctest::Approx(ba).epsilon(1e-12));
        CHECK(endpoint_distance(a, a, kScene) == 0.0);
        CHECK(ab <= ac + cb + 1e-12);
    }
}

TEST_CASE("clustering is invariant under index relabeling") {
    std::vector<Trajectory> trajs;
    Rng rng(31);
    for (int i = 0; i < 8; ++i)
        trajs.push_back(line("a" + std::to_string(i),
                             {-0.8 + rng.uniform(-0.03, 0.03), rng.uniform(-0.03, 0.03)},
                             {0.8 + rng.uniform(-0.03, 0.03), rng.uniform(-0.03, 0.03)}));
    for (int i = 0; i < 8; ++i)
        trajs.push_back(line("b" + std::to_string(i),
                             {rng.uniform(-0.03, 0.03), -0.8 + rng.uniform(-0.03, 0.03)},
                             {rng.uniform(-0.03, 0.03), 0.8 + rng.uniform(-0.03, 0.03)}));

    std::vector<int> perm(trajs.size());
    for (size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<int>(i);
    Rng shuffler(77);
    shuffler.shuffle(perm);
    std::vector<Trajectory> permuted(trajs.size());
    for (size_t i = 0; i < perm.size(); ++i) permuted[perm[i]] = trajs[i];

    const Clustering base = cluster_trajectories(trajs, kScene);
    const Clustering shuffled = cluster_trajectories(permuted, kScene);
    REQUIRE(base.n() == shuffled.n());
    auto member_sets = [&](const Clustering& c, bool mapped) {
        std::vector<std::vector<std::string>> sets;
        const auto& source = mapped ? permuted : trajs;
        for (const auto& cluster : c.clusters) {
            std::vector<std::string> ids;
            for (int idx : cluster) ids.push_back(source[static_cast<size_t>(idx)].agent_id);
            std::sort(ids.begin(), ids.end());
            sets.push_back(ids);
        }
        std::sort(sets.begin(), sets.end());
        return sets;
    };
    CHECK(member_sets(base, false) == member_sets(shuffled, true));
}

TEST_CASE("cluster membership is invariant under rigid translation") {
    std::vector<Trajectory> trajs;
    Rng rng(41);
    for (int i = 0; i < 6; ++i)
        trajs.push_back(line("a" + std::to_string(i),
                             {-0.5 + rng.uniform(-0.02, 0.02), -0.3},
                             {0.5 + rng.uniform(-0.02, 0.02), -0.3}));
    for (int i = 0; i < 6; ++i)
        trajs.push_back(line("b" + std::to_string(i),
                             {-0.5 + rng.uniform(-0.02, 0.02), 0.4},
                             {-0.5 + rng.uniform(-0.02, 0.02), -0.4}));

    const Vec2 shift{0.15, -0.1};
    std::vector<Trajectory> moved = trajs;
    for (auto& traj : moved)
        for (auto& s : traj.samples) s.p += shift;

    const Clustering base = cluster_trajectories(trajs, kScene);
    const Clustering shifted = cluster_trajectories(moved, kScene);
    REQUIRE(base.n() == shifted.n());
    for (int c = 0; c < base.n(); ++c) {
        auto lhs = base.clusters[static_cast<size_t>(c)];
        auto rhs = shifted.clusters[static_cast<size_t>(c)];
        std::sort(lhs.begin(), lhs.end());
        std::sort(rhs.begin(), rhs.end());
        CHECK(lhs == rhs);
    }
}

TEST_SUITE_END();
