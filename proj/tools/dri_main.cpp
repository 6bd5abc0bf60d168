#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dri/bench.hpp"
#include "dri/pipeline.hpp"

namespace {

    std::string read_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open " + path);
        std::ostringstream buffer;
        buffer << in.rdbuf();
        return buffer.str();
    }

    void write_file(const std::string& path, const std::string& content) {
        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot write " + path);
        out << content;
    }

    // Config source shared by `solve` and `decompose`: an optional JSON file
    // plus command-line overrides for the common knobs.
    struct ConfigOptions {
        std::string config_path;

        std::string method;
        std::string linkage;
        std::string strategy;
        std::string metric;
        std::string solver;
        std::string q_policy;
        int q = 0;
        int target_size = 500;
        int subproblem_neighbors = 5;
        int customer_neighbors = 10;
        double angle_weight = 1.0;
        double alpha = 0.8;
        double theta = 60.0;
        double rho = 1.0;
        double kappa = 2.0;
        std::uint64_t seed = 1;
        bool concurrent = false;

        CLI::Option* method_opt = nullptr;
        CLI::Option* linkage_opt = nullptr;
        CLI::Option* strategy_opt = nullptr;
        CLI::Option* metric_opt = nullptr;
        CLI::Option* solver_opt = nullptr;
        CLI::Option* q_policy_opt = nullptr;
        CLI::Option* q_opt = nullptr;
        CLI::Option* target_opt = nullptr;
        CLI::Option* phi_opt = nullptr;
        CLI::Option* varphi_opt = nullptr;
        CLI::Option* angle_opt = nullptr;
        CLI::Option* alpha_opt = nullptr;
        CLI::Option* theta_opt = nullptr;
        CLI::Option* rho_opt = nullptr;
        CLI::Option* kappa_opt = nullptr;
        CLI::Option* seed_opt = nullptr;
        CLI::Option* concurrent_opt = nullptr;
    };

    void register_config_options(CLI::App& cmd, ConfigOptions& opts) {
        cmd.add_option("--config", opts.config_path, "config JSON file")->check(CLI::ExistingFile);
        opts.method_opt =
            cmd.add_option("--clustering", opts.method, "clustering method: k-medoids | fuzzy | agglomerative");
        opts.linkage_opt = cmd.add_option("--linkage", opts.linkage, "linkage: single | complete | average");
        opts.strategy_opt = cmd.add_option("--strategy", opts.strategy, "descent: steepest | first");
        opts.metric_opt = cmd.add_option("--metric", opts.metric, "clustering metric: std | cost");
        opts.solver_opt = cmd.add_option("--solver", opts.solver, "baseline or an external solver command");
        opts.q_policy_opt = cmd.add_option("--q-policy", opts.q_policy, "cluster count policy: solver | fleet");
        opts.q_opt = cmd.add_option("--q", opts.q, "cluster count override (0 = policy)");
        opts.target_opt = cmd.add_option("--target-size", opts.target_size, "target subproblem size");
        opts.phi_opt = cmd.add_option("--subproblem-neighbors", opts.subproblem_neighbors,
                                      "pruning: nearest subproblems per subproblem");
        opts.varphi_opt = cmd.add_option("--customer-neighbors", opts.customer_neighbors,
                                         "pruning: most similar customers per customer");
        opts.angle_opt = cmd.add_option("--angle-weight", opts.angle_weight, "polar-angle weight in the metric");
        opts.alpha_opt = cmd.add_option("--alpha", opts.alpha, "routing share of the remaining budget");
        opts.theta_opt = cmd.add_option("--theta", opts.theta, "total budget in seconds");
        opts.rho_opt = cmd.add_option("--rho", opts.rho, "fuzzy boundary threshold");
        opts.kappa_opt = cmd.add_option("--kappa", opts.kappa, "fuzziness exponent");
        opts.seed_opt = cmd.add_option("--seed", opts.seed, "master seed");
        opts.concurrent_opt = cmd.add_flag("--concurrent", opts.concurrent, "solve subproblems concurrently");
    }

    dri::DriConfig make_config(const ConfigOptions& opts) {
        dri::DriConfig config;
        if (!opts.config_path.empty())
            config = dri::config_from_json(nlohmann::json::parse(read_file(opts.config_path)));

        if (opts.method_opt->count()) config.clustering.method = dri::cluster_method_from_string(opts.method);
        if (opts.linkage_opt->count()) {
            config.clustering.linkage = dri::linkage_from_string(opts.linkage);
            config.vicinity_linkage = config.clustering.linkage;
        }
        if (opts.strategy_opt->count()) {
            if (opts.strategy == "steepest")
                config.strategy = dri::Descent::steepest;
            else if (opts.strategy == "first")
                config.strategy = dri::Descent::first;
            else
                throw std::runtime_error("strategy must be 'steepest' or 'first'");
        }
        if (opts.metric_opt->count()) {
            if (opts.metric != "std" && opts.metric != "cost")
                throw std::runtime_error("metric must be 'std' or 'cost'");
            config.use_std_metric = opts.metric == "std";
        }
        if (opts.solver_opt->count()) config.solver_command = opts.solver == "baseline" ? "" : opts.solver;
        if (opts.q_policy_opt->count()) {
            if (opts.q_policy == "solver")
                config.q_policy = dri::QPolicy::solver_based;
            else if (opts.q_policy == "fleet")
                config.q_policy = dri::QPolicy::fleet_based;
            else
                throw std::runtime_error("q_policy must be 'solver' or 'fleet'");
        }
        if (opts.q_opt->count()) config.q_override = opts.q;
        if (opts.target_opt->count()) config.q_target_size = opts.target_size;
        if (opts.phi_opt->count()) config.subproblem_neighbors = opts.subproblem_neighbors;
        if (opts.varphi_opt->count()) config.customer_neighbors = opts.customer_neighbors;
        if (opts.angle_opt->count()) config.similarity.angle_weight = opts.angle_weight;
        if (opts.alpha_opt->count()) config.routing_share = opts.alpha;
        if (opts.theta_opt->count()) config.total_budget_seconds = opts.theta;
        if (opts.rho_opt->count()) config.fuzzy_threshold = opts.rho;
        if (opts.kappa_opt->count()) config.clustering.kappa = opts.kappa;
        if (opts.seed_opt->count()) config.master_seed = opts.seed;
        if (opts.concurrent_opt->count()) config.concurrent_routing = opts.concurrent;
        return config;
    }

    int command_solve(const std::string& instance_path, const ConfigOptions& opts, const std::string& bks_path,
                      const std::string& out_path, const std::string& report_path, const std::string& log_path,
                      bool quiet) {
        const dri::Instance instance = dri::load_instance(instance_path);
        const dri::DriConfig config = make_config(opts);

        double best_known = 0.0;
        if (!bks_path.empty()) {
            const dri::BksTable table = dri::load_bks_csv(bks_path);
            if (const auto entry = table.lookup(instance.name))
                best_known = *entry;
            else
                std::cerr << "warning: no best-known cost for instance '" << instance.name << "'\n";
        }

        const dri::DriResult result = dri::run_dri(instance, config, best_known);

        if (!out_path.empty()) write_file(out_path, dri::solution_to_json(result.solution));
        if (!report_path.empty()) write_file(report_path, dri::report_to_json(result.report).dump(2) + "\n");
        if (!log_path.empty()) write_file(log_path, dri::improvement_log_to_jsonl(result.report.moves));

        if (!quiet) {
            nlohmann::ordered_json summary;
            summary["config"] = dri::config_to_json(config);
            summary["report"] = dri::report_to_json(result.report);
            if (out_path.empty()) summary["solution"] = nlohmann::ordered_json::parse(
                dri::solution_to_json(result.solution));
            std::cout << summary.dump(2) << "\n";
        }
        return 0;
    }

    int command_decompose(const std::string& instance_path, const ConfigOptions& opts,
                          const std::string& out_dir, bool dump_similarity) {
        namespace fs = std::filesystem;
        const dri::Instance instance = dri::load_instance(instance_path);
        const dri::DriConfig config = make_config(opts);

        const auto start = std::chrono::steady_clock::now();
        const dri::SimilarityMatrix matrix = config.use_std_metric
                                                 ? dri::build_similarity_matrix(instance, config.similarity)
                                                 : dri::build_cost_similarity_matrix(instance);

        int q = config.q_override > 0 ? config.q_override
                                      : dri::choose_q(instance, config.q_policy, config.q_target_size);
        q = std::max(1, std::min(q, instance.customers()));

        dri::Clustering clustering;
        if (q <= 1) {
            clustering.method = config.clustering.method;
            clustering.q = 1;
            clustering.assignment.assign(instance.customers() + 1, 0);
            clustering.assignment[0] = -1;
        } else {
            dri::ClusteringSpec spec = config.clustering;
            spec.q = q;
            spec.seed = config.master_seed;
            switch (spec.method) {
                case dri::ClusterMethod::k_medoids: clustering = dri::kmedoids(matrix, spec); break;
                case dri::ClusterMethod::fuzzy_c_medoids: clustering = dri::fuzzy_cmedoids(matrix, spec); break;
                case dri::ClusterMethod::agglomerative: clustering = dri::agglomerative(matrix, spec); break;
            }
        }

        std::vector<dri::SubProblem> subproblems = dri::build_subproblems(instance, clustering);
        std::vector<int> sizes;
        for (const dri::SubProblem& sub : subproblems) sizes.push_back(static_cast<int>(sub.customers.size()));
        const double nu = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const dri::TimeBudget budget = dri::budget_time(config.total_budget_seconds, nu, config.routing_share,
                                                        sizes, instance.customers());
        for (std::size_t p = 0; p < subproblems.size(); ++p)
            subproblems[p].time_budget = budget.per_subproblem[p];
        const dri::VicinityIndex vicinity =
            dri::build_vicinities(matrix, clustering, config.subproblem_neighbors, config.customer_neighbors,
                                  config.fuzzy_threshold, config.vicinity_linkage);

        fs::create_directories(out_dir);
        for (const dri::SubProblem& sub : subproblems) {
            char name[32];
            std::snprintf(name, sizeof(name), "sub_%03d.txt", sub.index);
            write_file((fs::path(out_dir) / name).string(), dri::instance_to_text(sub.instance));
        }
        write_file((fs::path(out_dir) / "manifest.json").string(),
                   dri::manifest_to_json(instance, clustering, subproblems, vicinity, budget));
        if (dump_similarity)
            dri::dump_similarity(matrix, (fs::path(out_dir) / "similarity.bin").string(),
                                 (fs::path(out_dir) / "similarity.meta.json").string());

        std::cout << "wrote " << subproblems.size() << " subproblem(s) to " << out_dir << "\n";
        return 0;
    }

    int command_bench(const std::string& grid_path, const std::string& bks_path, const std::string& out_dir,
                      int workers) {
        namespace fs = std::filesystem;
        const dri::ExperimentGrid grid = dri::load_grid(grid_path);
        dri::BksTable bks;
        if (!bks_path.empty()) bks = dri::load_bks_csv(bks_path);

        const dri::GridOutput output = dri::run_grid(grid, bks, workers);

        fs::create_directories(out_dir);
        write_file((fs::path(out_dir) / "results.csv").string(), output.csv);
        write_file((fs::path(out_dir) / "summary.csv").string(), output.summary_csv);
        write_file((fs::path(out_dir) / "results.json").string(), output.sidecar.dump(2) + "\n");

        std::cout << output.rows.size() << " cell(s), " << output.failures << " failure(s); results in "
                  << out_dir << "\n";
        return output.failures > 0 ? 1 : 0;
    }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"decompose-route-improve VRPTW solver"};
    app.require_subcommand(1);

    // solve
    auto* solve = app.add_subcommand("solve", "run the full pipeline on one instance");
    std::string solve_instance;
    ConfigOptions solve_opts;
    std::string solve_bks, solve_out, solve_report, solve_log;
    bool solve_quiet = false;
    solve->add_option("instance", solve_instance, "instance file")->required()->check(CLI::ExistingFile);
    register_config_options(*solve, solve_opts);
    solve->add_option("--bks", solve_bks, "best-known-solution CSV")->check(CLI::ExistingFile);
    solve->add_option("--out", solve_out, "write the solution JSON here");
    solve->add_option("--report", solve_report, "write the run report JSON here");
    solve->add_option("--log", solve_log, "write the improvement log (JSON lines) here");
    solve->add_flag("--quiet", solve_quiet, "suppress stdout summary");

    // decompose
    auto* decompose = app.add_subcommand("decompose", "cluster and carve subproblems without solving");
    std::string dec_instance, dec_out = "decomposed";
    ConfigOptions dec_opts;
    bool dec_dump = false;
    decompose->add_option("instance", dec_instance, "instance file")->required()->check(CLI::ExistingFile);
    register_config_options(*decompose, dec_opts);
    decompose->add_option("--out-dir", dec_out, "output directory");
    decompose->add_flag("--dump-similarity", dec_dump, "also dump the similarity matrix");

    // bench
    auto* bench = app.add_subcommand("bench", "run an experiment grid");
    std::string bench_grid, bench_bks, bench_out = "results";
    int bench_workers = 0;
    bench->add_option("--grid", bench_grid, "grid TOML file")->required()->check(CLI::ExistingFile);
    bench->add_option("--bks", bench_bks, "best-known-solution CSV")->check(CLI::ExistingFile);
    bench->add_option("--out", bench_out, "output directory");
    bench->add_option("--workers", bench_workers, "worker threads (default: DRI_WORKERS or 1)");

    // oracle-suite
    auto* oracle = app.add_subcommand("oracle-suite", "run the reference-oracle self checks");

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed())
            return command_solve(solve_instance, solve_opts, solve_bks, solve_out, solve_report, solve_log,
                                 solve_quiet);
        if (decompose->parsed()) return command_decompose(dec_instance, dec_opts, dec_out, dec_dump);
        if (bench->parsed()) {
            int workers = bench_workers;
            if (workers <= 0) {
                const char* env = std::getenv("DRI_WORKERS");
                workers = env ? std::atoi(env) : 1;
                if (workers <= 0) workers = 1;
            }
            return command_bench(bench_grid, bench_bks, bench_out, workers);
        }
        if (oracle->parsed()) {
            const dri::OracleReport report = dri::oracle_suite();
            std::cout << dri::oracle_report_text(report);
            return report.all_passed() ? 0 : 1;
        }
    } catch (const std::exception& error) {
        std::cerr << "error: " << error.what() << "\n";
        return 1;
    }
    return 0;
}
