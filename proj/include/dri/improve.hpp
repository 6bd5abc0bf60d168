#pragma once

#include <limits>
#include <string>
#include <vector>

#include "dri/decompose.hpp"
#include "dri/instance.hpp"

// Improvement phase: routes are ordered by solution-quality indicators, then
// similarity-pruned inter-route local search (with intra-route repair) runs
// under a wall-clock budget, accepting strict improvements only.
namespace dri {

    // Quality indicators behind the worklist order.
    struct RouteQuality {
        std::vector<double> subproblem_cost;     // summed route distance per subproblem tag
        std::vector<double> subproblem_average;  // the above divided by the route count
        std::vector<double> utilization;         // per route: load / capacity
    };

    RouteQuality assess_quality(const Instance& instance, const Solution& solution);

    // Route indices ordered for processing: subproblems by descending average
    // route cost, routes inside a subproblem by ascending utilization. Ties
    // fall back to the subproblem index and the first visited customer, so the
    // order is invariant under permutations of the input routes.
    std::vector<int> order_routes(const Solution& solution, const RouteQuality& quality);

    enum class MoveOperator : int {
        cross_over = 0,   // exchange tails at a cut
        relocate = 1,     // move one customer into another route
        swap = 2,         // exchange two customers across routes
        two_opt = 3,      // exchange tails with one segment reversed
        two_opt_intra = 4,  // reverse a segment inside a route
        swap_intra = 5,     // exchange two positions inside a route
    };

    std::string to_string(MoveOperator op);

    // One structural move candidate. Positions are 0-based visit indices; for
    // relocate, pos_b is the insertion gap (0..route length). Intra operators
    // use route_b == route_a.
    struct Candidate {
        MoveOperator op;
        int route_a;
        int pos_a;
        int route_b;
        int pos_b;

        bool operator==(const Candidate&) const = default;
        bool operator<(const Candidate& other) const;
    };

    // All candidates anchored on one route, in deterministic scan order:
    // operators first, then vicinity rank of the partner subproblem, partner
    // route index, and positions. `vicinity == nullptr` disables pruning.
    // Inter-route candidates pair routes of different subproblems only, with
    // the partner subproblem inside the anchor's vicinity, the partner vertex
    // among the anchor vertex's most similar customers, and (when fuzzy labels
    // exist) the anchor vertex labeled as a boundary customer.
    std::vector<Candidate> route_candidates(const Solution& solution, int route_index,
                                            const VicinityIndex* vicinity);

    // Union over all routes (inter and intra), used for pruning-soundness
    // checks against an exhaustive enumeration.
    std::vector<Candidate> enumerate_candidates(const Solution& solution, const VicinityIndex* vicinity);

    // Cost delta and resulting visit orders of a candidate; infeasible
    // candidates report feasible == false and must never be applied.
    struct MoveEvaluation {
        bool feasible = false;
        double delta = 0.0;
        std::vector<int> visits_a;
        std::vector<int> visits_b;  // unused for intra operators
    };

    MoveEvaluation evaluate_candidate(const Instance& instance, const Solution& solution, const Candidate& candidate);

    enum class Descent { first, steepest };

    struct MoveContext {
        Descent strategy = Descent::steepest;
        const VicinityIndex* vicinity = nullptr;
        double budget_seconds = std::numeric_limits<double>::infinity();
    };

    // One accepted move, for the improvement log.
    struct MoveRecord {
        MoveOperator op;
        int route_a;
        int pos_a;
        int route_b;
        int pos_b;
        double delta;
        double cost_after;
        double elapsed_seconds;
    };

    struct LocalSearchResult {
        Solution solution;
        std::vector<MoveRecord> log;
        bool budget_exhausted = false;
        int sweeps = 0;
    };

    // Runs the improvement phase on a merged solution. Accepts strictly
    // improving moves only; after every accepted inter-route move the intra
    // operators repair both modified routes. Stops at a local optimum or when
    // the budget expires.
    LocalSearchResult local_search(const Instance& instance, Solution solution, const MoveContext& context);

    // Improvement log as JSON lines (one object per accepted move).
    std::string improvement_log_to_jsonl(const std::vector<MoveRecord>& log);

    // Error gaps against a best-known cost: xi = (Z - Z*) / Z* before and
    // after improvement, and the relative gap change.
    struct ImprovementReport {
        double xi_before = 0.0;
        double xi_after = 0.0;
        double xi_change = 0.0;  // (xi_after - xi_before) / xi_before, 0 when xi_before is 0
        bool below_best_known = false;
    };

    ImprovementReport improvement_report(double cost_before, double cost_after, double best_known);

}  // namespace dri
