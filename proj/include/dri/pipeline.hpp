#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "dri/clustering.hpp"
#include "dri/decompose.hpp"
#include "dri/improve.hpp"
#include "dri/instance.hpp"
#include "dri/routing.hpp"
#include "dri/similarity.hpp"

namespace dri {

    // Full configuration of one decompose-route-improve run.
    struct DriConfig {
        ClusteringSpec clustering;                 // method, q, kappa, epsilon, linkage, seed
        SimilarityConfig similarity;               // angle weight and wrap mode
        QPolicy q_policy = QPolicy::solver_based;  // how q is derived when not overridden
        int q_target_size = 500;                   // target subproblem size for solver_based
        int q_override = 0;                        // > 0 forces the cluster count

        double routing_share = 0.8;         // fraction of the post-decomposition budget spent routing
        double total_budget_seconds = 60.0;  // whole-run wall-clock budget

        int subproblem_neighbors = 5;    // pruning: nearest subproblems considered per subproblem
        int customer_neighbors = 10;     // pruning: most similar customers considered per customer
        double fuzzy_threshold = 1.0;    // customers with max membership <= threshold move freely
        Linkage vicinity_linkage = Linkage::average;  // linkage for subproblem-to-subproblem distance

        Descent strategy = Descent::steepest;
        double improvement_budget_override = -1.0;  // < 0: use the derived budget; may be +inf

        std::string solver_command;      // empty: built-in baseline; otherwise external command
        BaselineSolverConfig baseline;   // settings for the built-in solver (and fallback)
        bool concurrent_routing = false;

        bool use_std_metric = true;  // false: cluster on plain travel cost instead
        std::uint64_t master_seed = 1;
    };

    // Everything measured and derived during one run, alongside the solution.
    struct RunReport {
        std::string instance_name;
        int customers = 0;

        int q = 0;
        ClusterMethod method = ClusterMethod::k_medoids;
        std::vector<int> cluster_sizes;
        bool decomposed = false;  // false when q == 1 (solver-only run)

        double edge_reduction = 1.0;
        TimeBudget budgets;  // planned split of the total budget

        double seconds_similarity = 0.0;
        double seconds_clustering = 0.0;
        double seconds_decomposition = 0.0;  // similarity + clustering + subproblem carving
        double seconds_routing = 0.0;
        double seconds_improvement = 0.0;

        double z_initial = 0.0;  // merged cost before improvement
        double z_final = 0.0;

        bool has_gap = false;  // true when a best-known cost was supplied
        ImprovementReport gap;

        int sweeps = 0;
        bool improvement_budget_exhausted = false;
        std::vector<MoveRecord> moves;

        bool fleet_feasible = true;
        int vehicles_used = 0;
        int fleet_size = 0;

        std::vector<std::string> notes;
    };

    struct DriResult {
        Solution solution;
        RunReport report;
    };

    // Runs decompose -> route -> improve on one instance. A positive
    // best_known cost enables gap reporting. Stage failures are rethrown
    // with the stage name prefixed.
    DriResult run_dri(const Instance& instance, const DriConfig& config, double best_known = 0.0);

    // Identical pipeline with the similarity metric replaced by plain travel
    // cost, for metric comparisons.
    DriResult run_baseline_metric(const Instance& instance, const DriConfig& config, double best_known = 0.0);

    nlohmann::ordered_json config_to_json(const DriConfig& config);

    // Reads a config JSON document; absent keys keep their defaults.
    DriConfig config_from_json(const nlohmann::json& json);

    nlohmann::ordered_json report_to_json(const RunReport& report);

}  // namespace dri
