#pragma once

#include <vector>

#include "dri/clustering.hpp"
#include "dri/improve.hpp"
#include "dri/instance.hpp"
#include "dri/similarity.hpp"

// Independent reference implementations used to cross-check the production
// code: a second schedule recursion, exhaustive small-instance optima, naive
// clustering re-implementations, and an unpruned move enumerator. These favor
// clarity over speed and are only suitable for small inputs.
namespace dri::oracle {

    struct ScheduleCheck {
        bool feasible = false;
        double distance = 0.0;
        std::vector<double> start_times;
    };

    // Walks one route front to back, recomputing travel from raw coordinates
    // rather than the instance's cached matrices.
    ScheduleCheck schedule_walk(const Instance& instance, const std::vector<int>& visits);

    // Flat re-summation of a solution's distance from raw coordinates.
    double solution_distance(const Instance& instance, const Solution& solution);

    struct ExhaustiveResult {
        bool found = false;
        double cost = 0.0;
        std::vector<std::vector<int>> routes;
    };

    // Provably optimal VRPTW solution by canonical enumeration: route lists
    // are ordered by their first visit, so each unordered set of routes is
    // visited exactly once. `max_routes` < 0 lifts the fleet cap (matching
    // the distance-only objective). Exponential; keep n at 10 or below.
    ExhaustiveResult exhaustive_vrptw(const Instance& instance, int max_routes = -1);

    // Hierarchical clustering that recomputes every cluster-pair linkage from
    // scratch each iteration (O(n^3)). Follows the same canonical scan order,
    // exact-tie protocol, and RNG stream as the production implementation, so
    // traces must match merge for merge.
    Clustering naive_agglomerative(const SimilarityMatrix& similarity, const ClusteringSpec& spec,
                                   std::vector<MergeStep>* trace);

    // Best achievable k-medoids objective by trying all C(n, q) medoid sets.
    double best_medoid_objective(const SimilarityMatrix& similarity, int q);

    // Every structural move candidate of a solution, enumerated directly from
    // the operator definitions with no vicinity pruning.
    std::vector<Candidate> naive_candidates(const Solution& solution);

    // Independent implementation of the improvement worklist order.
    std::vector<int> naive_route_order(const Instance& instance, const Solution& solution);

}  // namespace dri::oracle
