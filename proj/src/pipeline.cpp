#include "dri/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>
#include <utility>

namespace dri {

    namespace {

        using Clock = std::chrono::steady_clock;

        double seconds_since(Clock::time_point start) {
            return std::chrono::duration<double>(Clock::now() - start).count();
        }

        // Reruns a stage and prefixes any failure with the stage name, so a
        // pipeline error pinpoints where it happened.
        template <typename Fn>
        auto stage(const char* label, Fn&& fn) -> decltype(fn()) {
            try {
                return fn();
            } catch (const std::exception& error) {
                throw std::runtime_error(std::string(label) + ": " + error.what());
            }
        }

        Clustering cluster(const SimilarityMatrix& matrix, const ClusteringSpec& spec) {
            switch (spec.method) {
                case ClusterMethod::k_medoids: return kmedoids(matrix, spec);
                case ClusterMethod::fuzzy_c_medoids: return fuzzy_cmedoids(matrix, spec);
                case ClusterMethod::agglomerative: return agglomerative(matrix, spec);
            }
            throw std::invalid_argument("unknown clustering method");
        }

        std::unique_ptr<SolverInterface> make_solver(const DriConfig& config) {
            if (config.solver_command.empty()) return std::make_unique<BaselineSolver>(config.baseline);
            return std::make_unique<ExternalSolver>(config.solver_command);
        }

        void finish_report(const Instance& instance, Solution& solution, RunReport& report, double best_known) {
            const FeasibilityReport check = verify_solution(instance, solution);
            solution.fleet_feasible = check.fleet_feasible;
            solution.violations = check.violations;
            report.fleet_feasible = check.fleet_feasible;
            report.vehicles_used = static_cast<int>(solution.routes.size());
            report.fleet_size = instance.fleet_size;
            report.z_final = solution.total_cost;
            if (best_known > 0.0) {
                report.has_gap = true;
                report.gap = improvement_report(report.z_initial, report.z_final, best_known);
            }
        }

        DriResult run_pipeline(const Instance& instance, const DriConfig& config, double best_known,
                               bool use_std_metric) {
            if (config.routing_share <= 0.0 || config.routing_share > 1.0)
                throw std::invalid_argument("routing share must lie in (0, 1]");
            if (config.total_budget_seconds <= 0.0)
                throw std::invalid_argument("total budget must be positive");

            const Clock::time_point start = Clock::now();
            DriResult result;
            RunReport& report = result.report;
            report.instance_name = instance.name;
            report.customers = instance.customers();
            report.fleet_size = instance.fleet_size;

            // Similarity matrix (counted into the decomposition time nu).
            const SimilarityMatrix matrix = stage("similarity", [&] {
                return use_std_metric ? build_similarity_matrix(instance, config.similarity)
                                      : build_cost_similarity_matrix(instance);
            });
            report.seconds_similarity = seconds_since(start);

            // Cluster count.
            int q = config.q_override > 0 ? config.q_override : choose_q(instance, config.q_policy,
                                                                         config.q_target_size);
            q = std::max(1, std::min(q, instance.customers()));
            report.q = q;
            report.method = config.clustering.method;

            if (q <= 1) {
                // Degenerate decomposition: the run collapses to a plain
                // solver call on the whole instance.
                report.decomposed = false;
                report.cluster_sizes = {instance.customers()};
                report.edge_reduction = 1.0;
                const double spent = seconds_since(start);
                report.seconds_decomposition = spent;
                double budget = config.total_budget_seconds - spent;
                if (budget < 1.0) {
                    report.notes.push_back("routing budget clamped to 1 s");
                    budget = 1.0;
                }
                report.budgets.total = config.total_budget_seconds;
                report.budgets.decomposition = spent;
                report.budgets.routing = budget;
                report.budgets.improvement = 0.0;
                report.budgets.per_subproblem = {budget};

                auto solver = make_solver(config);
                const Clock::time_point route_start = Clock::now();
                result.solution = stage("routing", [&] {
                    Solution solution = solver->solve(instance, instance.fleet_size, budget, config.master_seed);
                    const FeasibilityReport check = verify_solution(instance, solution);
                    if (!check.feasible)
                        throw std::runtime_error("solver returned an infeasible solution: " +
                                                 (check.violations.empty() ? std::string("unknown")
                                                                           : check.violations.front()));
                    return solution;
                });
                report.seconds_routing = seconds_since(route_start);
                report.z_initial = result.solution.total_cost;
                finish_report(instance, result.solution, report, best_known);
                return result;
            }

            // Clustering.
            ClusteringSpec spec = config.clustering;
            spec.q = q;
            spec.seed = config.master_seed;
            const Clock::time_point cluster_start = Clock::now();
            const Clustering clustering = stage("clustering", [&] { return cluster(matrix, spec); });
            report.seconds_clustering = seconds_since(cluster_start);
            report.cluster_sizes = clustering.cluster_sizes();

            // Subproblems, budgets, vicinities.
            std::vector<SubProblem> subproblems = stage("decompose", [&] {
                return build_subproblems(instance, clustering);
            });
            std::vector<int> sizes;
            sizes.reserve(subproblems.size());
            for (const SubProblem& sub : subproblems) sizes.push_back(static_cast<int>(sub.customers.size()));
            report.edge_reduction = edge_reduction(sizes, instance.customers());

            const double nu = seconds_since(start);
            report.seconds_decomposition = nu;
            report.budgets = stage("decompose", [&] {
                return budget_time(config.total_budget_seconds, nu, config.routing_share, sizes,
                                   instance.customers());
            });
            for (std::size_t p = 0; p < subproblems.size(); ++p)
                subproblems[p].time_budget = report.budgets.per_subproblem[p];

            const VicinityIndex vicinity = stage("decompose", [&] {
                return build_vicinities(matrix, clustering, config.subproblem_neighbors,
                                        config.customer_neighbors, config.fuzzy_threshold,
                                        config.vicinity_linkage);
            });

            // Routing.
            auto solver = make_solver(config);
            BaselineSolver fallback(config.baseline);
            SolverInterface* fallback_ptr = config.solver_command.empty() ? nullptr : &fallback;
            const Clock::time_point route_start = Clock::now();
            const std::vector<Solution> parts = stage("routing", [&] {
                return solve_subproblems(subproblems, *solver, report.budgets, config.master_seed, fallback_ptr,
                                         config.concurrent_routing);
            });
            Solution merged = stage("routing", [&] { return merge_solutions(parts, subproblems, instance); });
            report.seconds_routing = seconds_since(route_start);
            report.decomposed = true;
            report.z_initial = merged.total_cost;

            // Improvement.
            MoveContext context;
            context.strategy = config.strategy;
            context.vicinity = &vicinity;
            context.budget_seconds = config.improvement_budget_override >= 0.0
                                         ? config.improvement_budget_override
                                         : report.budgets.improvement;
            const Clock::time_point improve_start = Clock::now();
            LocalSearchResult improved = stage("improve", [&] {
                return local_search(instance, std::move(merged), context);
            });
            report.seconds_improvement = seconds_since(improve_start);
            report.sweeps = improved.sweeps;
            report.improvement_budget_exhausted = improved.budget_exhausted;
            report.moves = std::move(improved.log);

            result.solution = std::move(improved.solution);
            finish_report(instance, result.solution, report, best_known);
            return result;
        }

    }  // namespace

    DriResult run_dri(const Instance& instance, const DriConfig& config, double best_known) {
        return run_pipeline(instance, config, best_known, config.use_std_metric);
    }

    DriResult run_baseline_metric(const Instance& instance, const DriConfig& config, double best_known) {
        return run_pipeline(instance, config, best_known, false);
    }

    nlohmann::ordered_json config_to_json(const DriConfig& config) {
        nlohmann::ordered_json json;
        json["clustering"] = to_string(config.clustering.method);
        json["linkage"] = to_string(config.clustering.linkage);
        json["kappa"] = config.clustering.kappa;
        json["epsilon"] = config.clustering.epsilon;
        json["angle_weight"] = config.similarity.angle_weight;
        json["metric"] = config.use_std_metric ? "std" : "cost";
        json["q_policy"] = config.q_policy == QPolicy::solver_based ? "solver" : "fleet";
        json["q_target_size"] = config.q_target_size;
        json["q_override"] = config.q_override;
        json["routing_share"] = config.routing_share;
        json["total_budget_seconds"] = config.total_budget_seconds;
        json["subproblem_neighbors"] = config.subproblem_neighbors;
        json["customer_neighbors"] = config.customer_neighbors;
        json["fuzzy_threshold"] = config.fuzzy_threshold;
        json["vicinity_linkage"] = to_string(config.vicinity_linkage);
        json["strategy"] = config.strategy == Descent::steepest ? "steepest" : "first";
        json["improvement_budget_override"] = config.improvement_budget_override;
        json["solver"] = config.solver_command.empty() ? "baseline" : config.solver_command;
        json["concurrent_routing"] = config.concurrent_routing;
        json["master_seed"] = config.master_seed;
        return json;
    }

    DriConfig config_from_json(const nlohmann::json& json) {
        DriConfig config;
        if (json.contains("clustering"))
            config.clustering.method = cluster_method_from_string(json.at("clustering").get<std::string>());
        if (json.contains("linkage")) {
            config.clustering.linkage = linkage_from_string(json.at("linkage").get<std::string>());
            config.vicinity_linkage = config.clustering.linkage;
        }
        config.clustering.kappa = json.value("kappa", config.clustering.kappa);
        config.clustering.epsilon = json.value("epsilon", config.clustering.epsilon);
        config.similarity.angle_weight = json.value("angle_weight", config.similarity.angle_weight);
        if (json.contains("metric")) {
            const std::string metric = json.at("metric").get<std::string>();
            if (metric != "std" && metric != "cost")
                throw std::invalid_argument("metric must be 'std' or 'cost'");
            config.use_std_metric = metric == "std";
        }
        if (json.contains("q_policy")) {
            const std::string policy = json.at("q_policy").get<std::string>();
            if (policy == "solver")
                config.q_policy = QPolicy::solver_based;
            else if (policy == "fleet")
                config.q_policy = QPolicy::fleet_based;
            else
                throw std::invalid_argument("q_policy must be 'solver' or 'fleet'");
        }
        config.q_target_size = json.value("q_target_size", config.q_target_size);
        config.q_override = json.value("q_override", config.q_override);
        config.routing_share = json.value("routing_share", config.routing_share);
        config.routing_share = json.value("alpha", config.routing_share);
        config.total_budget_seconds = json.value("total_budget_seconds", config.total_budget_seconds);
        config.total_budget_seconds = json.value("theta", config.total_budget_seconds);
        config.subproblem_neighbors = json.value("subproblem_neighbors", config.subproblem_neighbors);
        config.customer_neighbors = json.value("customer_neighbors", config.customer_neighbors);
        config.fuzzy_threshold = json.value("fuzzy_threshold", config.fuzzy_threshold);
        config.fuzzy_threshold = json.value("rho", config.fuzzy_threshold);
        if (json.contains("vicinity_linkage"))
            config.vicinity_linkage = linkage_from_string(json.at("vicinity_linkage").get<std::string>());
        if (json.contains("strategy")) {
            const std::string strategy = json.at("strategy").get<std::string>();
            if (strategy == "steepest")
                config.strategy = Descent::steepest;
            else if (strategy == "first")
                config.strategy = Descent::first;
            else
                throw std::invalid_argument("strategy must be 'steepest' or 'first'");
        }
        config.improvement_budget_override =
            json.value("improvement_budget_override", config.improvement_budget_override);
        if (json.contains("solver")) {
            const std::string solver = json.at("solver").get<std::string>();
            config.solver_command = solver == "baseline" ? "" : solver;
        }
        config.concurrent_routing = json.value("concurrent_routing", config.concurrent_routing);
        config.master_seed = json.value("master_seed", config.master_seed);
        if (json.contains("baseline")) {
            const auto& base = json.at("baseline");
            if (base.contains("construction")) {
                const std::string c = base.at("construction").get<std::string>();
                if (c == "insertion")
                    config.baseline.construction = BaselineSolverConfig::Construction::insertion;
                else if (c == "savings")
                    config.baseline.construction = BaselineSolverConfig::Construction::savings;
                else
                    throw std::invalid_argument("construction must be 'insertion' or 'savings'");
            }
            config.baseline.intra_improvement = base.value("intra_improvement", config.baseline.intra_improvement);
            config.baseline.restarts = base.value("restarts", config.baseline.restarts);
        }
        return config;
    }

    nlohmann::ordered_json report_to_json(const RunReport& report) {
        nlohmann::ordered_json json;
        json["instance"] = report.instance_name;
        json["customers"] = report.customers;
        json["q"] = report.q;
        json["method"] = to_string(report.method);
        json["decomposed"] = report.decomposed;
        json["cluster_sizes"] = report.cluster_sizes;
        json["edge_reduction"] = report.edge_reduction;

        nlohmann::ordered_json budgets;
        budgets["total"] = report.budgets.total;
        budgets["decomposition"] = report.budgets.decomposition;
        budgets["routing"] = report.budgets.routing;
        budgets["improvement"] = report.budgets.improvement;
        budgets["per_subproblem"] = report.budgets.per_subproblem;
        json["budgets"] = budgets;

        nlohmann::ordered_json timings;
        timings["similarity"] = report.seconds_similarity;
        timings["clustering"] = report.seconds_clustering;
        timings["decomposition"] = report.seconds_decomposition;
        timings["routing"] = report.seconds_routing;
        timings["improvement"] = report.seconds_improvement;
        json["timings"] = timings;

        json["z_initial"] = report.z_initial;
        json["z_final"] = report.z_final;
        if (report.has_gap) {
            nlohmann::ordered_json gap;
            gap["xi_initial"] = report.gap.xi_before;
            gap["xi_final"] = report.gap.xi_after;
            gap["xi_change"] = report.gap.xi_change;
            gap["below_best_known"] = report.gap.below_best_known;
            json["gap"] = gap;
        }

        json["sweeps"] = report.sweeps;
        json["improvement_moves"] = report.moves.size();
        json["improvement_budget_exhausted"] = report.improvement_budget_exhausted;
        json["fleet_feasible"] = report.fleet_feasible;
        json["vehicles_used"] = report.vehicles_used;
        json["fleet_size"] = report.fleet_size;
        json["notes"] = report.notes;
        return json;
    }

}  // namespace dri
