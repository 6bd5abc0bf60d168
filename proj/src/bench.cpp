#include "dri/bench.hpp"

#include <glob.h>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <utility>

#include "dri/oracles.hpp"
#include "dri/rng.hpp"
#include "dri/synthetic.hpp"
#include "dri/toml.hpp"

namespace dri {

    namespace {

        std::string trim(const std::string& s) {
            std::size_t a = 0;
            std::size_t b = s.size();
            while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
            while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
            return s.substr(a, b - a);
        }

    }  // namespace

    BksTable parse_bks_csv(const std::string& text) {
        BksTable table;
        std::istringstream in(text);
        std::string line;
        int line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            const std::string stripped = trim(line);
            if (stripped.empty() || stripped[0] == '#') continue;
            const std::size_t comma = stripped.find(',');
            if (comma == std::string::npos)
                throw std::runtime_error("BKS line " + std::to_string(line_no) + ": expected 'instance,cost'");
            const std::string name = trim(stripped.substr(0, comma));
            const std::string value = trim(stripped.substr(comma + 1));
            char* end = nullptr;
            const double cost = std::strtod(value.c_str(), &end);
            if (end == value.c_str() || *end != '\0') {
                if (line_no == 1) continue;  // header row
                throw std::runtime_error("BKS line " + std::to_string(line_no) + ": non-numeric cost");
            }
            if (cost <= 0.0)
                throw std::runtime_error("BKS line " + std::to_string(line_no) + ": cost must be positive");
            table.cost[name] = cost;
        }
        return table;
    }

    BksTable load_bks_csv(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open " + path);
        std::ostringstream buffer;
        buffer << in.rdbuf();
        return parse_bks_csv(buffer.str());
    }

    int ExperimentGrid::configurations() const {
        const std::size_t product = metrics.size() * methods.size() * q_values.size() * angle_weights.size() *
                                    alphas.size() * thetas.size() * subproblem_neighbors.size() *
                                    customer_neighbors.size() * rhos.size() * strategies.size();
        return static_cast<int>(product);
    }

    namespace {

        std::vector<int> int_axis(const toml::Document& doc, const std::string& key,
                                  const std::vector<int>& fallback) {
            if (!doc.has("axes", key)) return fallback;
            std::vector<int> out;
            for (std::int64_t v : doc.integer_array("axes", key)) out.push_back(static_cast<int>(v));
            return out;
        }

        std::vector<double> double_axis(const toml::Document& doc, const std::string& key,
                                        const std::vector<double>& fallback) {
            return doc.has("axes", key) ? doc.double_array("axes", key) : fallback;
        }

        std::vector<std::string> string_axis(const toml::Document& doc, const std::string& key,
                                             const std::vector<std::string>& fallback) {
            return doc.has("axes", key) ? doc.string_array("axes", key) : fallback;
        }

        void validate_grid(const ExperimentGrid& grid) {
            if (grid.instance_patterns.empty()) throw std::runtime_error("grid lists no instances");
            auto non_empty = [](const char* name, std::size_t size) {
                if (size == 0) throw std::runtime_error(std::string("empty grid axis: ") + name);
            };
            non_empty("q", grid.q_values.size());
            non_empty("clustering", grid.methods.size());
            non_empty("angle_weight", grid.angle_weights.size());
            non_empty("alpha", grid.alphas.size());
            non_empty("theta", grid.thetas.size());
            non_empty("subproblem_neighbors", grid.subproblem_neighbors.size());
            non_empty("customer_neighbors", grid.customer_neighbors.size());
            non_empty("rho", grid.rhos.size());
            non_empty("strategy", grid.strategies.size());
            non_empty("metric", grid.metrics.size());
            non_empty("seeds", grid.seeds.size());
            for (const std::string& m : grid.methods) cluster_method_from_string(m);
            linkage_from_string(grid.linkage);
            for (const std::string& s : grid.strategies)
                if (s != "steepest" && s != "first") throw std::runtime_error("unknown strategy '" + s + "'");
            for (const std::string& m : grid.metrics)
                if (m != "std" && m != "cost") throw std::runtime_error("unknown metric '" + m + "'");
            for (double a : grid.alphas)
                if (a <= 0.0 || a > 1.0) throw std::runtime_error("alpha must lie in (0, 1]");
            // Every configuration must form a valid DriConfig.
            ExperimentGrid copy = grid;
            for (int c = 0; c < copy.configurations(); ++c) grid_config(copy, c);
        }

    }  // namespace

    ExperimentGrid parse_grid(const std::string& toml_text) {
        const toml::Document doc = toml::parse(toml_text);
        ExperimentGrid grid;

        grid.instance_patterns = doc.has("grid", "instances") ? doc.string_array("grid", "instances")
                                                              : std::vector<std::string>{};
        grid.solver = doc.get_string("grid", "solver", "");
        if (grid.solver == "baseline") grid.solver.clear();
        grid.q_policy = doc.get_string("grid", "q_policy", "solver");
        if (grid.q_policy != "solver" && grid.q_policy != "fleet")
            throw std::runtime_error("q_policy must be 'solver' or 'fleet'");
        grid.q_target_size = static_cast<int>(doc.get_integer("grid", "q_target_size", 500));
        grid.linkage = doc.get_string("grid", "linkage", "average");
        grid.kappa = doc.get_double("grid", "kappa", 2.0);
        grid.concurrent_routing = doc.get_bool("grid", "concurrent_routing", false);

        grid.q_values = int_axis(doc, "q", grid.q_values);
        grid.methods = string_axis(doc, "clustering", grid.methods);
        grid.angle_weights = double_axis(doc, "angle_weight", grid.angle_weights);
        grid.alphas = double_axis(doc, "alpha", grid.alphas);
        grid.thetas = double_axis(doc, "theta", grid.thetas);
        grid.subproblem_neighbors = int_axis(doc, "subproblem_neighbors", grid.subproblem_neighbors);
        grid.customer_neighbors = int_axis(doc, "customer_neighbors", grid.customer_neighbors);
        grid.rhos = double_axis(doc, "rho", grid.rhos);
        grid.strategies = string_axis(doc, "strategy", grid.strategies);
        grid.metrics = string_axis(doc, "metric", grid.metrics);

        if (doc.has("run", "seeds")) {
            grid.seeds.clear();
            for (std::int64_t s : doc.integer_array("run", "seeds"))
                grid.seeds.push_back(static_cast<std::uint64_t>(s));
        }

        validate_grid(grid);
        return grid;
    }

    ExperimentGrid load_grid(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open " + path);
        std::ostringstream buffer;
        buffer << in.rdbuf();
        return parse_grid(buffer.str());
    }

    std::vector<std::string> expand_patterns(const std::vector<std::string>& patterns) {
        std::set<std::string> unique;
        for (const std::string& pattern : patterns) {
            glob_t matches{};
            const int rc = ::glob(pattern.c_str(), 0, nullptr, &matches);
            if (rc == 0) {
                for (std::size_t i = 0; i < matches.gl_pathc; ++i) unique.insert(matches.gl_pathv[i]);
            } else if (rc != GLOB_NOMATCH) {
                ::globfree(&matches);
                throw std::runtime_error("glob failed for pattern '" + pattern + "'");
            }
            ::globfree(&matches);
        }
        std::vector<std::string> paths(unique.begin(), unique.end());
        if (paths.empty()) throw std::runtime_error("no instance files matched the grid patterns");
        return paths;
    }

    DriConfig grid_config(const ExperimentGrid& grid, int config_index) {
        if (config_index < 0 || config_index >= grid.configurations())
            throw std::out_of_range("configuration index out of range");

        // Row-major unravel over the axes, metric outermost.
        const std::size_t sizes[] = {grid.metrics.size(),          grid.methods.size(),
                                     grid.q_values.size(),         grid.angle_weights.size(),
                                     grid.alphas.size(),           grid.thetas.size(),
                                     grid.subproblem_neighbors.size(), grid.customer_neighbors.size(),
                                     grid.rhos.size(),             grid.strategies.size()};
        std::size_t index[10] = {};
        std::size_t rest = static_cast<std::size_t>(config_index);
        for (int axis = 9; axis >= 0; --axis) {
            index[axis] = rest % sizes[axis];
            rest /= sizes[axis];
        }

        DriConfig config;
        config.use_std_metric = grid.metrics[index[0]] == "std";
        config.clustering.method = cluster_method_from_string(grid.methods[index[1]]);
        config.clustering.linkage = linkage_from_string(grid.linkage);
        config.clustering.kappa = grid.kappa;
        config.q_override = grid.q_values[index[2]];
        config.similarity.angle_weight = grid.angle_weights[index[3]];
        config.routing_share = grid.alphas[index[4]];
        config.total_budget_seconds = grid.thetas[index[5]];
        config.subproblem_neighbors = grid.subproblem_neighbors[index[6]];
        config.customer_neighbors = grid.customer_neighbors[index[7]];
        config.fuzzy_threshold = grid.rhos[index[8]];
        config.strategy = grid.strategies[index[9]] == "first" ? Descent::first : Descent::steepest;
        config.solver_command = grid.solver;
        config.q_policy = grid.q_policy == "fleet" ? QPolicy::fleet_based : QPolicy::solver_based;
        config.q_target_size = grid.q_target_size;
        config.vicinity_linkage = linkage_from_string(grid.linkage);
        config.concurrent_routing = grid.concurrent_routing;
        return config;
    }

    namespace {

        std::string format_number(double value) {
            char buffer[64];
            std::snprintf(buffer, sizeof(buffer), "%.10g", value);
            return buffer;
        }

        std::string csv_escape(const std::string& field) {
            if (field.find_first_of(",\"\n") == std::string::npos) return field;
            std::string out = "\"";
            for (char c : field) {
                if (c == '"') out += '"';
                out += c;
            }
            out += '"';
            return out;
        }

        // Class key for summary rows: the instance name with a trailing
        // "_<number>" stripped (C1_2_1 -> C1_2).
        std::string class_of(const std::string& name) {
            const std::size_t us = name.rfind('_');
            if (us == std::string::npos || us + 1 >= name.size()) return name;
            for (std::size_t i = us + 1; i < name.size(); ++i)
                if (!std::isdigit(static_cast<unsigned char>(name[i]))) return name;
            return name.substr(0, us);
        }

        const char* kCsvSchema = "# schema: dri-results-v1";
        const char* kCsvHeader =
            "instance,file,customers,config,metric,clustering,q,angle_weight,alpha,theta,"
            "subproblem_neighbors,customer_neighbors,rho,strategy,seed,decomposed,q_effective,"
            "edge_reduction,z_initial,z_final,xi_initial,xi_final,xi_change,vehicles,fleet_feasible,"
            "sweeps,moves,error,z_best_of_seeds";

        struct CellKey {
            int instance;
            int config;
            int seed;
        };

    }  // namespace

    GridOutput run_grid(const ExperimentGrid& grid, const BksTable& bks, int workers) {
        const std::vector<std::string> files = expand_patterns(grid.instance_patterns);
        std::vector<Instance> instances;
        instances.reserve(files.size());
        for (const std::string& file : files) instances.push_back(load_instance(file));

        for (const Instance& instance : instances)
            if (!bks.lookup(instance.name))
                std::cerr << "warning: no best-known cost for instance '" << instance.name << "'\n";

        const int configs = grid.configurations();
        std::vector<CellKey> cells;
        for (int i = 0; i < static_cast<int>(instances.size()); ++i)
            for (int c = 0; c < configs; ++c)
                for (int s = 0; s < static_cast<int>(grid.seeds.size()); ++s) cells.push_back({i, c, s});

        GridOutput output;
        output.rows.resize(cells.size());

        std::atomic<std::size_t> next{0};
        std::atomic<int> failures{0};
        auto worker = [&] {
            while (true) {
                const std::size_t at = next.fetch_add(1);
                if (at >= cells.size()) return;
                const CellKey cell = cells[at];
                const Instance& instance = instances[cell.instance];
                GridRow& row = output.rows[at];
                row.instance = instance.name;
                row.customers = instance.customers();
                row.config = cell.config;
                row.seed = grid.seeds[cell.seed];
                try {
                    DriConfig config = grid_config(grid, cell.config);
                    config.master_seed = row.seed;
                    const double best = bks.lookup(instance.name).value_or(0.0);
                    DriResult result = run_dri(instance, config, best);
                    row.report = std::move(result.report);
                } catch (const std::exception& error) {
                    row.failed = true;
                    row.error = error.what();
                    failures.fetch_add(1);
                    std::cerr << "error: " << instance.name << " config " << cell.config << " seed "
                              << row.seed << ": " << error.what() << "\n";
                }
            }
        };

        const int thread_count = std::max(1, std::min<int>(workers, static_cast<int>(cells.size())));
        if (thread_count == 1) {
            worker();
        } else {
            std::vector<std::thread> pool;
            pool.reserve(thread_count);
            for (int t = 0; t < thread_count; ++t) pool.emplace_back(worker);
            for (std::thread& t : pool) t.join();
        }
        output.failures = failures.load();

        // Best final cost per (instance, config) across seeds.
        std::map<std::pair<int, int>, double> best_of_seeds;
        for (std::size_t at = 0; at < cells.size(); ++at) {
            if (output.rows[at].failed) continue;
            const auto key = std::make_pair(cells[at].instance, cells[at].config);
            const double z = output.rows[at].report.z_final;
            const auto it = best_of_seeds.find(key);
            if (it == best_of_seeds.end() || z < it->second) best_of_seeds[key] = z;
        }

        // Raw rows (deterministic: no wall-clock columns; timings live in the
        // JSON sidecar).
        std::ostringstream csv;
        csv << kCsvSchema << "\n" << kCsvHeader << "\n";
        for (std::size_t at = 0; at < cells.size(); ++at) {
            const CellKey cell = cells[at];
            const GridRow& row = output.rows[at];
            const DriConfig config = grid_config(grid, cell.config);
            csv << csv_escape(row.instance) << ',' << csv_escape(files[cell.instance]) << ','
                << row.customers << ',' << row.config << ',' << (config.use_std_metric ? "std" : "cost") << ','
                << to_string(config.clustering.method) << ',' << config.q_override << ','
                << format_number(config.similarity.angle_weight) << ',' << format_number(config.routing_share)
                << ',' << format_number(config.total_budget_seconds) << ',' << config.subproblem_neighbors
                << ',' << config.customer_neighbors << ',' << format_number(config.fuzzy_threshold) << ','
                << (config.strategy == Descent::first ? "first" : "steepest") << ',' << row.seed << ',';
            if (row.failed) {
                csv << ",,,,,,,,,,,," << csv_escape(row.error) << ',';
            } else {
                const RunReport& r = row.report;
                csv << (r.decomposed ? 1 : 0) << ',' << r.q << ',' << format_number(r.edge_reduction) << ','
                    << format_number(r.z_initial) << ',' << format_number(r.z_final) << ',';
                if (r.has_gap)
                    csv << format_number(r.gap.xi_before) << ',' << format_number(r.gap.xi_after) << ','
                        << format_number(r.gap.xi_change) << ',';
                else
                    csv << ",,,";
                csv << r.vehicles_used << ',' << (r.fleet_feasible ? 1 : 0) << ',' << r.sweeps << ','
                    << r.moves.size() << ",,";
            }
            const auto best = best_of_seeds.find(std::make_pair(cell.instance, cell.config));
            if (best != best_of_seeds.end()) csv << format_number(best->second);
            csv << '\n';
        }
        output.csv = csv.str();

        // Summary: per configuration and instance class, the mean over
        // instances of the best-of-seeds cost (and gap when available).
        std::ostringstream summary;
        summary << kCsvSchema << "\n"
                << "config,metric,clustering,q,alpha,theta,strategy,class,instances,mean_z_best,mean_xi_best\n";
        for (int c = 0; c < configs; ++c) {
            const DriConfig config = grid_config(grid, c);
            std::map<std::string, std::vector<int>> classes;  // class -> instance indices
            for (int i = 0; i < static_cast<int>(instances.size()); ++i) {
                classes[class_of(instances[i].name)].push_back(i);
                classes["ALL"].push_back(i);
            }
            for (const auto& [klass, members] : classes) {
                double z_sum = 0.0;
                double xi_sum = 0.0;
                int counted = 0;
                bool all_gaps = true;
                for (int i : members) {
                    const auto best = best_of_seeds.find(std::make_pair(i, c));
                    if (best == best_of_seeds.end()) continue;
                    ++counted;
                    z_sum += best->second;
                    const auto bks_entry = bks.lookup(instances[i].name);
                    if (bks_entry)
                        xi_sum += (best->second - *bks_entry) / *bks_entry;
                    else
                        all_gaps = false;
                }
                summary << c << ',' << (config.use_std_metric ? "std" : "cost") << ','
                        << to_string(config.clustering.method) << ',' << config.q_override << ','
                        << format_number(config.routing_share) << ','
                        << format_number(config.total_budget_seconds) << ','
                        << (config.strategy == Descent::first ? "first" : "steepest") << ','
                        << csv_escape(klass) << ',' << counted << ',';
                if (counted > 0) summary << format_number(z_sum / counted);
                summary << ',';
                if (counted > 0 && all_gaps) summary << format_number(xi_sum / counted);
                summary << '\n';
            }
        }
        output.summary_csv = summary.str();

        // Sidecar with the non-deterministic part: wall-clock timings.
        nlohmann::ordered_json sidecar;
        sidecar["configurations"] = configs;
        sidecar["instances"] = files;
        sidecar["seeds"] = grid.seeds;
        nlohmann::ordered_json cell_list = nlohmann::ordered_json::array();
        for (std::size_t at = 0; at < cells.size(); ++at) {
            const GridRow& row = output.rows[at];
            nlohmann::ordered_json entry;
            entry["instance"] = row.instance;
            entry["config"] = row.config;
            entry["seed"] = row.seed;
            entry["failed"] = row.failed;
            if (row.failed) {
                entry["error"] = row.error;
            } else {
                entry["seconds_decomposition"] = row.report.seconds_decomposition;
                entry["seconds_routing"] = row.report.seconds_routing;
                entry["seconds_improvement"] = row.report.seconds_improvement;
            }
            cell_list.push_back(std::move(entry));
        }
        sidecar["cells"] = std::move(cell_list);
        output.sidecar = std::move(sidecar);
        return output;
    }

    namespace {

        using Check = OracleCheck;

        Check run_check(const std::string& name, const std::function<std::string()>& body) {
            Check check;
            check.name = name;
            try {
                check.detail = body();
                check.passed = true;
            } catch (const std::exception& error) {
                check.passed = false;
                check.detail = error.what();
            }
            return check;
        }

        void expect(bool condition, const std::string& what) {
            if (!condition) throw std::runtime_error(what);
        }

        // Random visit sequences over a synthetic instance, including
        // infeasible ones (the generator draws tight windows).
        std::string check_schedule_recursion() {
            int feasible = 0;
            int infeasible = 0;
            for (std::uint64_t seed = 1; seed <= 100; ++seed) {
                SyntheticSpec spec;
                spec.customers = 10;
                spec.seed = seed;
                spec.window_min = 20.0;
                spec.window_max = 60.0;
                const Instance instance = synthetic_instance(spec);
                rng::SplitMix64 random(rng::derive(seed, 0x6F726163U));

                for (int trial = 0; trial < 10; ++trial) {
                    std::vector<int> visits;
                    for (int i = 1; i <= instance.customers(); ++i)
                        if (random.next_double() < 0.5) visits.push_back(i);
                    for (std::size_t k = visits.size(); k > 1; --k)
                        std::swap(visits[k - 1], visits[random.bounded(k)]);

                    const ScheduleResult produced = propagate_schedule(instance, visits);
                    const oracle::ScheduleCheck reference = oracle::schedule_walk(instance, visits);
                    expect(produced.feasible() == reference.feasible, "feasibility verdicts disagree");
                    if (!produced.feasible()) {
                        ++infeasible;
                        continue;
                    }
                    ++feasible;
                    expect(std::abs(produced.route->distance - reference.distance) <= 1e-9,
                           "route distances disagree");
                    for (std::size_t k = 0; k < visits.size(); ++k)
                        expect(std::abs(produced.route->start[k] - reference.start_times[k]) <= 1e-9,
                               "schedules disagree");
                }
            }
            return std::to_string(feasible) + " feasible / " + std::to_string(infeasible) +
                   " infeasible sequences agree";
        }

        std::string check_exhaustive_optimum() {
            BaselineSolver solver;
            int compared = 0;
            for (std::uint64_t seed = 1; seed <= 5; ++seed) {
                SyntheticSpec spec;
                spec.customers = 7;
                spec.seed = seed;
                spec.capacity = 60.0;
                const Instance instance = synthetic_instance(spec);
                const oracle::ExhaustiveResult optimum = oracle::exhaustive_vrptw(instance);
                expect(optimum.found, "exhaustive search found no feasible solution");
                const Solution solution = solver.solve(instance, instance.fleet_size, 1.0, seed);
                expect(solution.total_cost >= optimum.cost - 1e-9, "solver beat the exhaustive optimum");
                ++compared;
            }
            return std::to_string(compared) + " instances bounded by their exhaustive optimum";
        }

        std::string check_agglomerative_trace() {
            int merges = 0;
            for (std::uint64_t seed = 1; seed <= 10; ++seed) {
                SyntheticSpec spec;
                spec.customers = 10;
                spec.seed = seed;
                const Instance instance = synthetic_instance(spec);
                const SimilarityMatrix matrix = build_similarity_matrix(instance, {});
                for (Linkage linkage : {Linkage::single, Linkage::complete, Linkage::average}) {
                    ClusteringSpec cluster_spec;
                    cluster_spec.method = ClusterMethod::agglomerative;
                    cluster_spec.q = 3;
                    cluster_spec.linkage = linkage;
                    cluster_spec.seed = seed;
                    std::vector<MergeStep> produced;
                    std::vector<MergeStep> reference;
                    const Clustering a = agglomerative(matrix, cluster_spec, &produced);
                    const Clustering b = oracle::naive_agglomerative(matrix, cluster_spec, &reference);
                    expect(produced.size() == reference.size(), "merge counts differ");
                    for (std::size_t k = 0; k < produced.size(); ++k) {
                        expect(produced[k].rep_a == reference[k].rep_a &&
                                   produced[k].rep_b == reference[k].rep_b,
                               "merge pair differs at step " + std::to_string(k));
                        expect(std::abs(produced[k].distance - reference[k].distance) <= 1e-9,
                               "merge distance differs at step " + std::to_string(k));
                    }
                    expect(a.assignment == b.assignment, "assignments differ");
                    merges += static_cast<int>(produced.size());
                }
            }
            return std::to_string(merges) + " merges match the naive re-implementation";
        }

        std::string check_kmedoids_objective() {
            for (std::uint64_t seed = 1; seed <= 10; ++seed) {
                SyntheticSpec spec;
                spec.customers = 10;
                spec.seed = seed;
                const Instance instance = synthetic_instance(spec);
                const SimilarityMatrix matrix = build_similarity_matrix(instance, {});
                ClusteringSpec cluster_spec;
                cluster_spec.q = 3;
                const Clustering clustering = kmedoids(matrix, cluster_spec);
                const double re_evaluated = medoid_objective(matrix, clustering);
                expect(std::abs(clustering.objective - re_evaluated) <= 1e-9,
                       "converged objective disagrees with re-evaluation");
                const double bound = oracle::best_medoid_objective(matrix, cluster_spec.q);
                expect(clustering.objective >= bound - 1e-9, "objective below the exhaustive bound");
            }
            return "10 instances within bounds";
        }

        std::string check_fuzzy_rows() {
            for (std::uint64_t seed = 1; seed <= 10; ++seed) {
                SyntheticSpec spec;
                spec.customers = 12;
                spec.seed = seed;
                const Instance instance = synthetic_instance(spec);
                const SimilarityMatrix matrix = build_similarity_matrix(instance, {});
                ClusteringSpec cluster_spec;
                cluster_spec.method = ClusterMethod::fuzzy_c_medoids;
                cluster_spec.q = 3;
                cluster_spec.seed = seed;
                const Clustering clustering = fuzzy_cmedoids(matrix, cluster_spec);
                for (int i = 1; i <= instance.customers(); ++i) {
                    double row_sum = 0.0;
                    for (int p = 0; p < cluster_spec.q; ++p) row_sum += clustering.membership_of(i, p);
                    expect(std::abs(row_sum - 1.0) <= 1e-9, "membership row does not sum to 1");
                }
            }
            return "membership rows sum to 1";
        }

        std::string check_pruning_enumeration() {
            SyntheticSpec spec;
            spec.customers = 20;
            spec.seed = 7;
            const Instance instance = synthetic_instance(spec);
            const SimilarityMatrix matrix = build_similarity_matrix(instance, {});
            ClusteringSpec cluster_spec;
            cluster_spec.q = 3;
            const Clustering clustering = kmedoids(matrix, cluster_spec);
            const std::vector<SubProblem> subs = build_subproblems(instance, clustering);
            BaselineSolver solver;
            TimeBudget budget;
            budget.total = 60.0;
            budget.routing = 30.0;
            budget.improvement = 30.0;
            budget.per_subproblem.assign(subs.size(), 1.0);
            const std::vector<Solution> parts = solve_subproblems(subs, solver, budget, 7);
            const Solution merged = merge_solutions(parts, subs, instance);

            const VicinityIndex vicinity =
                build_vicinities(matrix, clustering, cluster_spec.q, instance.customers(), 1.0);
            std::vector<Candidate> pruned = enumerate_candidates(merged, &vicinity);
            std::vector<Candidate> naive = oracle::naive_candidates(merged);
            std::sort(pruned.begin(), pruned.end());
            std::sort(naive.begin(), naive.end());
            expect(pruned == naive, "pruned enumeration at maximal settings differs from the naive set");
            return std::to_string(naive.size()) + " candidates match";
        }

        std::string check_negative_control() {
            SyntheticSpec spec;
            spec.customers = 8;
            spec.seed = 3;
            const Instance instance = synthetic_instance(spec);
            BaselineSolver solver;
            Solution solution = solver.solve(instance, instance.fleet_size, 1.0, 3);
            expect(verify_solution(instance, solution).feasible, "fixture must start feasible");

            // Deliberate corruption: drop one customer from its route.
            expect(!solution.routes.empty() && !solution.routes[0].visits.empty(), "fixture has no visits");
            Solution corrupted = solution;
            corrupted.routes[0].visits.pop_back();
            const FeasibilityReport report = verify_solution(instance, corrupted);
            expect(!report.feasible, "corrupted solution slipped through verification");
            expect(!report.violations.empty(), "no violation was pinpointed");
            return "corruption detected: " + report.violations.front();
        }

        std::string check_feasibility_sweep() {
            BaselineSolver solver;
            for (std::uint64_t seed = 1; seed <= 100; ++seed) {
                SyntheticSpec spec;
                spec.customers = 4 + static_cast<int>(seed % 9);
                spec.seed = seed;
                const Instance instance = synthetic_instance(spec);
                const Solution solution = solver.solve(instance, instance.fleet_size, 1.0, seed);
                const FeasibilityReport report = verify_solution(instance, solution);
                expect(report.feasible, "seed " + std::to_string(seed) + " produced an infeasible solution");
            }
            return "100 seeds, zero feasibility violations";
        }

    }  // namespace

    OracleReport oracle_suite() {
        OracleReport report;
        report.checks.push_back(run_check("schedule-recursion", check_schedule_recursion));
        report.checks.push_back(run_check("exhaustive-optimum", check_exhaustive_optimum));
        report.checks.push_back(run_check("agglomerative-trace", check_agglomerative_trace));
        report.checks.push_back(run_check("kmedoids-objective", check_kmedoids_objective));
        report.checks.push_back(run_check("fuzzy-membership-rows", check_fuzzy_rows));
        report.checks.push_back(run_check("pruning-enumeration", check_pruning_enumeration));
        report.checks.push_back(run_check("negative-control", check_negative_control));
        report.checks.push_back(run_check("feasibility-sweep", check_feasibility_sweep));
        return report;
    }

    std::string oracle_report_text(const OracleReport& report) {
        std::ostringstream out;
        for (const OracleCheck& check : report.checks)
            out << (check.passed ? "PASS" : "FAIL") << "  " << check.name << ": " << check.detail << "\n";
        out << (report.all_passed() ? "all oracle checks passed" : "oracle checks FAILED") << "\n";
        return out.str();
    }

}  // namespace dri
