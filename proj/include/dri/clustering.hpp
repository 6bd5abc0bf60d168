#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dri/similarity.hpp"

// Splits the customer set into q subsets over the symmetrized STD metric.
// Three methods: k-medoids, fuzzy c-medoids (soft memberships retained for
// local-search pruning), and agglomerative hierarchical clustering.
namespace dri {

    enum class ClusterMethod { k_medoids, fuzzy_c_medoids, agglomerative };
    enum class Linkage { single, complete, average };

    std::string to_string(ClusterMethod method);
    std::string to_string(Linkage linkage);
    ClusterMethod cluster_method_from_string(const std::string& name);
    Linkage linkage_from_string(const std::string& name);

    struct ClusteringSpec {
        ClusterMethod method = ClusterMethod::k_medoids;
        int q = 2;                         // target cluster count
        double kappa = 2.0;                // fuzziness, > 1 (fuzzy only)
        double epsilon = 1e-4;             // membership convergence threshold (fuzzy only)
        Linkage linkage = Linkage::average;  // agglomerative only
        std::uint64_t seed = 0;
        int max_iterations = 0;  // 0 picks the per-method default (100 / 200)
    };

    struct Clustering {
        ClusterMethod method = ClusterMethod::k_medoids;
        int q = 0;
        std::vector<int> assignment;    // indexed by customer id (slot 0 unused, -1)
        std::vector<int> medoids;       // customer id per cluster; empty for agglomerative
        std::vector<double> membership;  // n x q row-major, customers 1..n (fuzzy only)
        int iterations = 0;
        double objective = 0.0;  // k-medoids: converged summed medoid distance

        double membership_of(int customer, int cluster) const {
            return membership[static_cast<std::size_t>(customer - 1) * q + cluster];
        }

        // Member customer ids per cluster, ascending.
        std::vector<std::vector<int>> clusters() const;
        std::vector<int> cluster_sizes() const;
    };

    // One merge of the agglomerative hierarchy: the two cluster representatives
    // (smallest member ids, rep_a < rep_b) and the linkage value that won.
    struct MergeStep {
        int rep_a = 0;
        int rep_b = 0;
        double distance = 0.0;
        bool operator==(const MergeStep&) const = default;
    };

    // Partitional clustering around medoids; deterministic (ties by lowest id).
    Clustering kmedoids(const SimilarityMatrix& similarity, const ClusteringSpec& spec);

    // Soft clustering; memberships per customer sum to 1. The hard assignment
    // is the argmax row entry.
    Clustering fuzzy_cmedoids(const SimilarityMatrix& similarity, const ClusteringSpec& spec);

    // Bottom-up merging under the configured linkage; exact-tie pairs are
    // resolved uniformly at random from the seeded RNG.
    Clustering agglomerative(const SimilarityMatrix& similarity, const ClusteringSpec& spec);
    Clustering agglomerative(const SimilarityMatrix& similarity, const ClusteringSpec& spec,
                             std::vector<MergeStep>* trace);

    enum class QPolicy { solver_based, fleet_based };

    // Picks the cluster count: either sized so each subproblem stays below
    // `target_size` customers, or the fleet lower bound ceil(total demand / Q).
    int choose_q(const Instance& instance, QPolicy policy, int target_size = 500);

    // Sum of symmetrized distances from each customer to its cluster medoid.
    double medoid_objective(const SimilarityMatrix& similarity, const Clustering& clustering);

    std::string clustering_to_json(const Clustering& clustering);

}  // namespace dri
