#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "dri/instance.hpp"
#include "dri/oracles.hpp"
#include "dri/pipeline.hpp"
#include "dri/synthetic.hpp"
#include "helpers.hpp"

using namespace dri;

namespace {

    Instance pipeline_instance(int customers, std::uint64_t seed) {
        SyntheticSpec spec;
        spec.customers = customers;
        spec.seed = seed;
        return synthetic_instance(spec);
    }

    DriConfig decomposed_config(int q) {
        DriConfig config;
        config.q_override = q;
        config.total_budget_seconds = 60.0;
        return config;
    }

}  // namespace

TEST_CASE("run_dri produces a consistent report for a decomposed run") {
    const Instance instance = pipeline_instance(40, 21);
    const DriConfig config = decomposed_config(3);
    const DriResult result = run_dri(instance, config);
    const RunReport& report = result.report;

    CHECK(report.instance_name == instance.name);
    CHECK(report.customers == 40);
    CHECK(report.q == 3);
    CHECK(report.decomposed);
    CHECK(report.cluster_sizes.size() == 3);
    CHECK(std::accumulate(report.cluster_sizes.begin(), report.cluster_sizes.end(), 0) == 40);
    CHECK(report.edge_reduction > 0.0);
    CHECK(report.edge_reduction < 1.0);

    // Budget split: alpha fraction of the post-decomposition time for
    // routing, the rest for improvement, subproblem shares rounded down.
    const TimeBudget& budgets = report.budgets;
    CHECK(budgets.total == 60.0);
    const double remaining = budgets.total - budgets.decomposition;
    CHECK(budgets.routing == doctest::Approx(0.8 * remaining).epsilon(1e-12));
    CHECK(budgets.improvement == doctest::Approx(0.2 * remaining).epsilon(1e-9));
    REQUIRE(budgets.per_subproblem.size() == 3);
    for (std::size_t p = 0; p < 3; ++p)
        CHECK(budgets.per_subproblem[p] ==
              std::floor(budgets.routing * report.cluster_sizes[p] / 40.0));

    CHECK(report.z_final <= report.z_initial + 1e-9);
    CHECK(report.z_final == doctest::Approx(result.solution.total_cost).epsilon(1e-12));
    CHECK(report.z_final ==
          doctest::Approx(oracle::solution_distance(instance, result.solution)).epsilon(1e-9));
    CHECK(report.vehicles_used == static_cast<int>(result.solution.routes.size()));
    CHECK(report.fleet_size == instance.fleet_size);
    CHECK(report.sweeps >= 1);
    CHECK_FALSE(report.has_gap);

    const FeasibilityReport check = verify_solution(instance, result.solution);
    CHECK(check.feasible);
    CHECK(report.fleet_feasible == check.fleet_feasible);
}

TEST_CASE("q = 1 collapses to a plain solver run") {
    const Instance instance = pipeline_instance(30, 4);
    const DriResult result = run_dri(instance, decomposed_config(1));
    const RunReport& report = result.report;

    CHECK_FALSE(report.decomposed);
    CHECK(report.q == 1);
    CHECK(report.cluster_sizes == std::vector<int>{30});
    CHECK(report.edge_reduction == 1.0);
    CHECK(report.z_initial == doctest::Approx(report.z_final).epsilon(1e-12));
    CHECK(report.sweeps == 0);
    CHECK(report.moves.empty());
    CHECK(report.budgets.improvement == 0.0);
    CHECK(verify_solution(instance, result.solution).feasible);
    for (int tag : result.solution.origin) CHECK(tag == -1);
}

TEST_CASE("the default policy keeps small instances whole") {
    // solver_based with target size 500: a 40-customer instance needs q = 1.
    const Instance instance = pipeline_instance(40, 8);
    DriConfig config;
    config.total_budget_seconds = 60.0;
    const DriResult result = run_dri(instance, config);
    CHECK(result.report.q == 1);
    CHECK_FALSE(result.report.decomposed);
}

TEST_CASE("a q override beyond n is clamped to n") {
    const Instance instance = pipeline_instance(12, 3);
    const DriResult result = run_dri(instance, decomposed_config(99));
    CHECK(result.report.q == 12);
    CHECK(result.report.cluster_sizes == std::vector<int>(12, 1));
    CHECK(verify_solution(instance, result.solution).feasible);
}

TEST_CASE("equal seeds reproduce the run byte for byte") {
    const Instance instance = pipeline_instance(36, 13);
    const DriConfig config = decomposed_config(3);
    const DriResult first = run_dri(instance, config);
    const DriResult second = run_dri(instance, config);
    CHECK(solution_to_json(first.solution) == solution_to_json(second.solution));
    CHECK(first.report.z_initial == second.report.z_initial);
    CHECK(first.report.z_final == second.report.z_final);
    CHECK(first.report.moves.size() == second.report.moves.size());

    DriConfig other = config;
    other.master_seed = 14;
    const DriResult shifted = run_dri(instance, other);
    CHECK(verify_solution(instance, shifted.solution).feasible);
}

TEST_CASE("a best-known cost turns on gap reporting") {
    const Instance instance = pipeline_instance(32, 6);
    const DriConfig config = decomposed_config(3);
    const DriResult plain = run_dri(instance, config);
    REQUIRE_FALSE(plain.report.has_gap);

    const double best_known = plain.report.z_initial / 2.0;
    const DriResult gapped = run_dri(instance, config, best_known);
    const RunReport& report = gapped.report;
    REQUIRE(report.has_gap);
    CHECK(report.gap.xi_before ==
          doctest::Approx((report.z_initial - best_known) / best_known).epsilon(1e-12));
    CHECK(report.gap.xi_after ==
          doctest::Approx((report.z_final - best_known) / best_known).epsilon(1e-12));
    CHECK(report.gap.xi_change <= 1e-12);
    CHECK_FALSE(report.gap.below_best_known);

    const nlohmann::ordered_json json = report_to_json(report);
    CHECK(json.contains("gap"));
    CHECK(json["gap"]["xi_final"].get<double>() == report.gap.xi_after);
}

TEST_CASE("the cost-metric pipeline also produces feasible runs") {
    const Instance instance = pipeline_instance(30, 17);
    const DriResult result = run_baseline_metric(instance, decomposed_config(3));
    CHECK(result.report.decomposed);
    CHECK(verify_solution(instance, result.solution).feasible);
    CHECK(result.report.z_final <= result.report.z_initial + 1e-9);
}

TEST_CASE("invalid budgets and shares are rejected") {
    const Instance instance = pipeline_instance(12, 2);
    DriConfig config = decomposed_config(2);
    config.routing_share = 0.0;
    CHECK_THROWS_AS(run_dri(instance, config), std::invalid_argument);
    config.routing_share = 1.5;
    CHECK_THROWS_AS(run_dri(instance, config), std::invalid_argument);
    config = decomposed_config(2);
    config.total_budget_seconds = 0.0;
    CHECK_THROWS_AS(run_dri(instance, config), std::invalid_argument);
    config.total_budget_seconds = -3.0;
    CHECK_THROWS_AS(run_dri(instance, config), std::invalid_argument);
}

TEST_CASE("a tiny budget on a solver-only run is clamped with a note") {
    const Instance instance = pipeline_instance(10, 5);
    DriConfig config = decomposed_config(1);
    config.total_budget_seconds = 0.01;
    const DriResult result = run_dri(instance, config);
    CHECK(result.report.budgets.routing == 1.0);
    REQUIRE_FALSE(result.report.notes.empty());
    CHECK(result.report.notes.front().find("clamped") != std::string::npos);
    CHECK(verify_solution(instance, result.solution).feasible);
}

TEST_CASE("an improvement budget override replaces the derived share") {
    const Instance instance = pipeline_instance(30, 11);
    DriConfig config = decomposed_config(3);
    config.improvement_budget_override = 0.0;
    const DriResult result = run_dri(instance, config);
    CHECK(result.report.decomposed);
    CHECK(result.report.sweeps == 0);
    CHECK(result.report.moves.empty());
    CHECK(result.report.improvement_budget_exhausted);
    CHECK(result.report.z_final == doctest::Approx(result.report.z_initial).epsilon(1e-12));
}

TEST_CASE("config JSON round trips and accepts the short aliases") {
    DriConfig config;
    config.clustering.method = ClusterMethod::fuzzy_c_medoids;
    config.clustering.kappa = 1.7;
    config.similarity.angle_weight = 2.5;
    config.q_override = 6;
    config.routing_share = 0.65;
    config.total_budget_seconds = 42.0;
    config.subproblem_neighbors = 4;
    config.customer_neighbors = 9;
    config.fuzzy_threshold = 0.55;
    config.strategy = Descent::first;
    config.use_std_metric = false;
    config.master_seed = 77;

    const nlohmann::ordered_json json = config_to_json(config);
    CHECK(json["clustering"] == "fuzzy-c-medoids");
    CHECK(json["metric"] == "cost");
    CHECK(json["solver"] == "baseline");

    const DriConfig back = config_from_json(nlohmann::json::parse(json.dump()));
    CHECK(back.clustering.method == ClusterMethod::fuzzy_c_medoids);
    CHECK(back.clustering.kappa == 1.7);
    CHECK(back.similarity.angle_weight == 2.5);
    CHECK(back.q_override == 6);
    CHECK(back.routing_share == 0.65);
    CHECK(back.total_budget_seconds == 42.0);
    CHECK(back.subproblem_neighbors == 4);
    CHECK(back.customer_neighbors == 9);
    CHECK(back.fuzzy_threshold == 0.55);
    CHECK(back.strategy == Descent::first);
    CHECK_FALSE(back.use_std_metric);
    CHECK(back.master_seed == 77);

    const DriConfig aliased = config_from_json(nlohmann::json::parse(
        R"({"alpha": 0.5, "theta": 30, "rho": 0.7, "solver": "my-solver --fast"})"));
    CHECK(aliased.routing_share == 0.5);
    CHECK(aliased.total_budget_seconds == 30.0);
    CHECK(aliased.fuzzy_threshold == 0.7);
    CHECK(aliased.solver_command == "my-solver --fast");

    // Absent keys keep the defaults.
    const DriConfig defaults = config_from_json(nlohmann::json::parse("{}"));
    CHECK(defaults.clustering.method == ClusterMethod::k_medoids);
    CHECK(defaults.routing_share == 0.8);
    CHECK(defaults.total_budget_seconds == 60.0);
    CHECK(defaults.subproblem_neighbors == 5);
    CHECK(defaults.customer_neighbors == 10);
    CHECK(defaults.fuzzy_threshold == 1.0);
    CHECK(defaults.use_std_metric);
    CHECK(defaults.master_seed == 1);
}

TEST_CASE("malformed config fields are rejected with clear errors") {
    CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"metric": "fancy"})")),
                    std::invalid_argument);
    CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"q_policy": "magic"})")),
                    std::invalid_argument);
    CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"strategy": "random"})")),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        config_from_json(nlohmann::json::parse(R"({"baseline": {"construction": "luck"}})")),
        std::invalid_argument);
    CHECK_THROWS(config_from_json(nlohmann::json::parse(R"({"clustering": "voronoi"})")));
}

TEST_CASE("report JSON carries the run measurements") {
    const Instance instance = pipeline_instance(24, 9);
    const DriResult result = run_dri(instance, decomposed_config(2));
    const nlohmann::ordered_json json = report_to_json(result.report);

    for (const char* key : {"instance", "customers", "q", "method", "decomposed", "cluster_sizes",
                            "edge_reduction", "budgets", "timings", "z_initial", "z_final", "sweeps",
                            "improvement_moves", "improvement_budget_exhausted", "fleet_feasible",
                            "vehicles_used", "fleet_size", "notes"})
        CHECK(json.contains(key));

    CHECK(json["q"].get<int>() == 2);
    CHECK(json["z_final"].get<double>() == result.report.z_final);
    CHECK(json["budgets"]["per_subproblem"].size() == 2);
    CHECK(json["improvement_moves"].get<std::size_t>() == result.report.moves.size());
    CHECK_FALSE(json.contains("gap"));
}
