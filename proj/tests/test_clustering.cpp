#include <doctest.h>

#include <algorithm>
#include <set>
#include <vector>

#include <json.hpp>

#include "dri/clustering.hpp"
#include "dri/oracles.hpp"
#include "dri/similarity.hpp"
#include "dri/synthetic.hpp"
#include "helpers.hpp"

using namespace dri;

namespace {

    SimilarityMatrix matrix_for(const Instance& instance, double angle_weight = 1.0) {
        return build_similarity_matrix(instance, {angle_weight, false});
    }

    // Two spatially tight groups of four customers each, identical windows and
    // demands, so the metric is dominated by geometry.
    Instance two_blobs() {
        std::vector<Vertex> vertices{fixture::vertex(0, 50, 50, 0, 0, 2000, 0)};
        const double offsets[4][2] = {{0, 0}, {2, 0}, {0, 2}, {2, 2}};
        for (int k = 0; k < 4; ++k)
            vertices.push_back(fixture::vertex(k + 1, 10 + offsets[k][0], 10 + offsets[k][1], 5, 0, 2000, 10));
        for (int k = 0; k < 4; ++k)
            vertices.push_back(fixture::vertex(k + 5, 90 + offsets[k][0], 90 + offsets[k][1], 5, 0, 2000, 10));
        return fixture::instance(std::move(vertices), 4, 100);
    }

    bool is_partition(const Clustering& clustering, int n) {
        if (static_cast<int>(clustering.assignment.size()) != n + 1) return false;
        std::vector<int> sizes(clustering.q, 0);
        for (int i = 1; i <= n; ++i) {
            if (clustering.assignment[i] < 0 || clustering.assignment[i] >= clustering.q) return false;
            ++sizes[clustering.assignment[i]];
        }
        return std::all_of(sizes.begin(), sizes.end(), [](int s) { return s > 0; });
    }

}  // namespace

TEST_CASE("kmedoids separates obvious spatial groups") {
    const Instance instance = two_blobs();
    const SimilarityMatrix matrix = matrix_for(instance);
    ClusteringSpec spec;
    spec.q = 2;
    const Clustering clustering = kmedoids(matrix, spec);

    REQUIRE(is_partition(clustering, 8));
    CHECK(clustering.method == ClusterMethod::k_medoids);
    // Customers 1-4 on one side, 5-8 on the other.
    for (int i = 2; i <= 4; ++i) CHECK(clustering.assignment[i] == clustering.assignment[1]);
    for (int i = 6; i <= 8; ++i) CHECK(clustering.assignment[i] == clustering.assignment[5]);
    CHECK(clustering.assignment[1] != clustering.assignment[5]);

    // Medoids are members of their own cluster, and every customer sits with
    // its nearest medoid.
    REQUIRE(clustering.medoids.size() == 2);
    for (int p = 0; p < 2; ++p) CHECK(clustering.assignment[clustering.medoids[p]] == p);
    for (int i = 1; i <= 8; ++i) {
        const double own = matrix.symmetric(i, clustering.medoids[clustering.assignment[i]]);
        for (int p = 0; p < 2; ++p) CHECK(own <= matrix.symmetric(i, clustering.medoids[p]) + 1e-12);
    }

    // The reported objective is the summed medoid distance and is bounded
    // below by the exhaustive best over all medoid sets.
    CHECK(clustering.objective == doctest::Approx(medoid_objective(matrix, clustering)).epsilon(1e-12));
    CHECK(clustering.objective >= oracle::best_medoid_objective(matrix, 2) - 1e-9);
}

TEST_CASE("kmedoids is deterministic and respects q bounds") {
    SyntheticSpec synth;
    synth.customers = 15;
    synth.seed = 21;
    const Instance instance = synthetic_instance(synth);
    const SimilarityMatrix matrix = matrix_for(instance);

    ClusteringSpec spec;
    spec.q = 4;
    const Clustering a = kmedoids(matrix, spec);
    const Clustering b = kmedoids(matrix, spec);
    CHECK(a.assignment == b.assignment);
    CHECK(a.medoids == b.medoids);
    CHECK(a.objective == b.objective);
    CHECK(a.iterations <= 100);

    spec.q = 1;
    CHECK_THROWS_AS(kmedoids(matrix, spec), std::invalid_argument);
    spec.q = 16;
    CHECK_THROWS_AS(kmedoids(matrix, spec), std::invalid_argument);
    spec.q = 15;  // every customer its own medoid
    const Clustering all = kmedoids(matrix, spec);
    CHECK(is_partition(all, 15));
    CHECK(all.objective == 0.0);
}

TEST_CASE("kmedoids seed selection breaks exact ties by lowest id") {
    // All customers coincide, so every pairwise distance is zero, every seed
    // score ties, and the q lowest ids must be picked.
    std::vector<Vertex> vertices{fixture::vertex(0, 0, 0, 0, 0, 100, 0)};
    for (int id = 1; id <= 5; ++id) vertices.push_back(fixture::vertex(id, 7, 7, 1, 0, 100, 2));
    const SimilarityMatrix matrix = matrix_for(fixture::instance(std::move(vertices), 2, 10));

    ClusteringSpec spec;
    spec.q = 2;
    const Clustering clustering = kmedoids(matrix, spec);
    CHECK(clustering.medoids == std::vector<int>{1, 2});
    CHECK(clustering.objective == 0.0);
}

TEST_CASE("fuzzy_cmedoids produces row-stochastic memberships") {
    SyntheticSpec synth;
    synth.customers = 14;
    synth.seed = 8;
    const Instance instance = synthetic_instance(synth);
    const SimilarityMatrix matrix = matrix_for(instance);

    ClusteringSpec spec;
    spec.method = ClusterMethod::fuzzy_c_medoids;
    spec.q = 3;
    spec.seed = 5;
    const Clustering clustering = fuzzy_cmedoids(matrix, spec);

    REQUIRE(is_partition(clustering, 14));
    REQUIRE(clustering.membership.size() == 14u * 3u);
    for (int i = 1; i <= 14; ++i) {
        double row_sum = 0.0;
        for (int p = 0; p < 3; ++p) {
            const double mu = clustering.membership_of(i, p);
            CHECK(mu >= 0.0);
            CHECK(mu <= 1.0 + 1e-12);
            row_sum += mu;
        }
        CHECK(row_sum == doctest::Approx(1.0).epsilon(1e-9));

        // Hard assignment is the row argmax.
        int best = 0;
        for (int p = 1; p < 3; ++p)
            if (clustering.membership_of(i, p) > clustering.membership_of(i, best)) best = p;
        CHECK(clustering.membership_of(i, clustering.assignment[i]) ==
              clustering.membership_of(i, best));
    }

    // Medoids are distinct customers.
    std::set<int> unique(clustering.medoids.begin(), clustering.medoids.end());
    CHECK(unique.size() == 3);

    // Deterministic for a fixed seed.
    const Clustering again = fuzzy_cmedoids(matrix, spec);
    CHECK(again.assignment == clustering.assignment);
    CHECK(again.membership == clustering.membership);

    // A customer sitting exactly on a medoid owns it outright.
    for (int p = 0; p < 3; ++p)
        CHECK(clustering.membership_of(clustering.medoids[p], p) == doctest::Approx(1.0).epsilon(1e-12));

    spec.kappa = 1.0;
    CHECK_THROWS_AS(fuzzy_cmedoids(matrix, spec), std::invalid_argument);
}

TEST_CASE("agglomerative matches the naive re-implementation merge for merge") {
    SyntheticSpec synth;
    synth.customers = 12;
    synth.seed = 3;
    const Instance instance = synthetic_instance(synth);
    const SimilarityMatrix matrix = matrix_for(instance);

    for (const Linkage linkage : {Linkage::single, Linkage::complete, Linkage::average}) {
        CAPTURE(to_string(linkage));
        ClusteringSpec spec;
        spec.method = ClusterMethod::agglomerative;
        spec.linkage = linkage;
        spec.q = 3;
        spec.seed = 17;

        std::vector<MergeStep> trace;
        const Clustering ours = agglomerative(matrix, spec, &trace);
        std::vector<MergeStep> naive_trace;
        const Clustering naive = oracle::naive_agglomerative(matrix, spec, &naive_trace);

        REQUIRE(trace.size() == 9);  // n - q merges
        REQUIRE(naive_trace.size() == trace.size());
        for (std::size_t k = 0; k < trace.size(); ++k) {
            CAPTURE(k);
            CHECK(trace[k].rep_a == naive_trace[k].rep_a);
            CHECK(trace[k].rep_b == naive_trace[k].rep_b);
            CHECK(trace[k].distance == doctest::Approx(naive_trace[k].distance).epsilon(1e-9));
        }
        CHECK(ours.assignment == naive.assignment);
        REQUIRE(is_partition(ours, 12));

        // Single, complete and average linkage are all reducible, so the
        // merge distances never decrease.
        for (std::size_t k = 1; k < trace.size(); ++k)
            CHECK(trace[k].distance >= trace[k - 1].distance - 1e-9);
    }
}

TEST_CASE("agglomerative resolves exact ties deterministically per seed") {
    // Four coincident customers: every pair ties at distance zero.
    std::vector<Vertex> vertices{fixture::vertex(0, 0, 0, 0, 0, 100, 0)};
    for (int id = 1; id <= 4; ++id) vertices.push_back(fixture::vertex(id, 3, 4, 1, 0, 100, 1));
    const SimilarityMatrix matrix = matrix_for(fixture::instance(std::move(vertices), 2, 10));

    ClusteringSpec spec;
    spec.method = ClusterMethod::agglomerative;
    spec.q = 2;

    std::set<std::vector<int>> outcomes;
    for (std::uint64_t seed = 1; seed <= 12; ++seed) {
        spec.seed = seed;
        std::vector<MergeStep> trace_a;
        const Clustering first = agglomerative(matrix, spec, &trace_a);
        std::vector<MergeStep> trace_b;
        const Clustering second = agglomerative(matrix, spec, &trace_b);
        CHECK(first.assignment == second.assignment);  // same seed, same draw
        REQUIRE(trace_a.size() == 2);
        for (std::size_t k = 0; k < trace_a.size(); ++k) {
            CHECK(trace_a[k].rep_a == trace_b[k].rep_a);
            CHECK(trace_a[k].rep_b == trace_b[k].rep_b);
            CHECK(trace_a[k].distance == 0.0);
        }
        REQUIRE(is_partition(first, 4));
        outcomes.insert(first.assignment);
    }
    // With twelve seeds the uniform draw over tied pairs must produce more
    // than one distinct merge history.
    CHECK(outcomes.size() > 1);
}

TEST_CASE("agglomerative accepts q = 1 and q = n") {
    SyntheticSpec synth;
    synth.customers = 6;
    synth.seed = 30;
    const SimilarityMatrix matrix = matrix_for(synthetic_instance(synth));

    ClusteringSpec spec;
    spec.method = ClusterMethod::agglomerative;
    spec.q = 1;
    const Clustering whole = agglomerative(matrix, spec);
    CHECK(whole.cluster_sizes() == std::vector<int>{6});

    spec.q = 6;
    const Clustering singletons = agglomerative(matrix, spec);
    CHECK(singletons.cluster_sizes() == std::vector<int>(6, 1));
    CHECK(singletons.iterations == 0);
}

TEST_CASE("choose_q implements the two sizing policies") {
    SyntheticSpec synth;
    synth.customers = 1200;
    synth.seed = 1;
    synth.capacity = 200.0;
    const Instance large = synthetic_instance(synth);

    CHECK(choose_q(large, QPolicy::solver_based, 500) == 3);   // ceil(1200 / 500)
    CHECK(choose_q(large, QPolicy::solver_based, 1200) == 1);
    CHECK(choose_q(large, QPolicy::solver_based, 1) == 1200);  // clamped to n
    CHECK_THROWS_AS(choose_q(large, QPolicy::solver_based, 0), std::invalid_argument);

    // Fleet-based: ceil(total demand / capacity).
    std::vector<Vertex> vertices{fixture::vertex(0, 0, 0, 0, 0, 1000, 0)};
    for (int id = 1; id <= 10; ++id) vertices.push_back(fixture::vertex(id, id, 0, 100, 0, 1000, 0));
    const Instance heavy = fixture::instance(std::move(vertices), 10, 200);
    CHECK(choose_q(heavy, QPolicy::fleet_based) == 5);  // 1000 / 200
}

TEST_CASE("method and linkage names round trip") {
    CHECK(to_string(ClusterMethod::k_medoids) == "k-medoids");
    CHECK(to_string(ClusterMethod::fuzzy_c_medoids) == "fuzzy-c-medoids");
    CHECK(to_string(ClusterMethod::agglomerative) == "agglomerative");
    CHECK(cluster_method_from_string("k-medoids") == ClusterMethod::k_medoids);
    CHECK(cluster_method_from_string("k_medoids") == ClusterMethod::k_medoids);
    CHECK(cluster_method_from_string("fuzzy") == ClusterMethod::fuzzy_c_medoids);
    CHECK_THROWS_AS(cluster_method_from_string("voronoi"), std::invalid_argument);
    for (const Linkage linkage : {Linkage::single, Linkage::complete, Linkage::average})
        CHECK(linkage_from_string(to_string(linkage)) == linkage);
    CHECK_THROWS_AS(linkage_from_string("ward"), std::invalid_argument);
}

TEST_CASE("clustering_to_json carries the assignment and memberships") {
    SyntheticSpec synth;
    synth.customers = 6;
    synth.seed = 12;
    const SimilarityMatrix matrix = matrix_for(synthetic_instance(synth));
    ClusteringSpec spec;
    spec.method = ClusterMethod::fuzzy_c_medoids;
    spec.q = 2;
    const Clustering clustering = fuzzy_cmedoids(matrix, spec);

    const auto doc = nlohmann::json::parse(clustering_to_json(clustering));
    CHECK(doc.at("method") == "fuzzy-c-medoids");
    CHECK(doc.at("q") == 2);
    CHECK(doc.at("assignment").size() == 6);
    CHECK(doc.at("membership").size() == 6);
    CHECK(doc.at("membership")[0].size() == 2);
}
