#pragma once

#include <string>
#include <vector>

#include "dri/clustering.hpp"
#include "dri/instance.hpp"
#include "dri/similarity.hpp"

// Turns a clustering into stand-alone sub-VRPTWs (duplicated depot, allotted
// fleet, per-subproblem time budget) plus the vicinity structures that prune
// the improvement phase.
namespace dri {

    // One carved sub-VRPTW. Local vertex ids are 0 (depot copy) and 1..k in
    // ascending parent-id order.
    struct SubProblem {
        int index = 0;
        std::vector<int> customers;  // parent customer ids, ascending
        Instance instance;           // depot copy + customer subset, re-indexed
        std::vector<int> to_parent;  // local id -> parent id ([0] = 0)
        int fleet = 0;               // vehicles allotted to this subproblem
        double time_budget = 0.0;    // routing seconds, filled by budget_time
    };

    // Carves one instance per cluster; fleet is split proportionally to demand
    // share (rounded up, so the total may exceed the parent fleet).
    std::vector<SubProblem> build_subproblems(const Instance& instance, const Clustering& clustering);

    struct TimeBudget {
        double total = 0.0;         // overall limit
        double decomposition = 0.0;  // time already spent building subproblems
        double routing = 0.0;        // share for the routing phase
        double improvement = 0.0;    // share for the improvement phase
        std::vector<double> per_subproblem;  // routing seconds per subproblem
    };

    // Splits the remaining time between routing and improvement by `alpha`
    // and allots routing time to subproblems by customer share (rounded
    // down). Throws when the decomposition already consumed the whole budget.
    TimeBudget budget_time(double total, double decomposition, double alpha, const std::vector<int>& sizes, int n);

    // Complexity measure: summed subproblem edge-set sizes relative to the
    // parent's, i.e. sum |V_p|^2 / n^2 for complete graphs.
    double edge_reduction(const std::vector<int>& sizes, int n);

    // Neighborhood structure consumed by the local search.
    struct VicinityIndex {
        int q = 0;
        int n = 0;
        double fuzzy_threshold = 1.0;
        std::vector<std::vector<int>> subproblem_neighbors;  // per subproblem, nearest first
        std::vector<std::vector<int>> customer_neighbors;    // per customer id, most similar first
        std::vector<char> fuzzy;  // per customer id; empty when no membership matrix exists

        bool has_fuzzy_labels() const { return !fuzzy.empty(); }

        // Inter-route moves may only displace eligible customers: everyone
        // when no fuzzy labels exist, otherwise only customers whose largest
        // membership is at most the threshold (cluster-boundary customers).
        bool customer_eligible(int id) const { return fuzzy.empty() || fuzzy[id] != 0; }

        bool subproblem_near(int p, int g) const;
        bool customer_near(int i, int j) const;
    };

    // Builds the `neighbor_subproblems` nearest subproblems per subproblem
    // (linkage distance over the symmetrized metric, default average) and the
    // `neighbor_customers` most similar customers per customer; both counts
    // are clamped to q-1 / n-1. `rho` only takes effect when the clustering
    // carries memberships; otherwise it is ignored with a warning on stderr.
    VicinityIndex build_vicinities(const SimilarityMatrix& similarity, const Clustering& clustering,
                                   int neighbor_subproblems, int neighbor_customers, double rho,
                                   Linkage linkage = Linkage::average);

    // Manifest describing a decomposition (assignment, fleets, budgets,
    // vicinities) for the decompose CLI command.
    std::string manifest_to_json(const Instance& instance, const Clustering& clustering,
                                 const std::vector<SubProblem>& subproblems, const VicinityIndex& vicinity,
                                 const TimeBudget& budget);

}  // namespace dri
