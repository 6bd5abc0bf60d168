#include "dri/routing.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <stdexcept>
#include <thread>

#include <sys/types.h>
#include <unistd.h>

#include "dri/rng.hpp"

namespace dri {

    namespace {

        using Clock = std::chrono::steady_clock;

        Clock::time_point deadline_after(double seconds) {
            if (seconds <= 0.0) return Clock::now();
            return Clock::now() + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(seconds));
        }

        bool expired(Clock::time_point deadline) { return Clock::now() >= deadline; }

        // Steepest-descent 2-opt and swap inside one route until no move
        // improves or the deadline passes. Returns the improved visit order.
        std::vector<int> improve_route(const Instance& instance, std::vector<int> visits,
                                       Clock::time_point deadline) {
            if (visits.size() < 2) return visits;
            double current = propagate_schedule(instance, visits).route->distance;
            bool improved = true;
            while (improved && !expired(deadline)) {
                improved = false;
                double best_delta = -1e-9;
                std::vector<int> best;
                const int k = static_cast<int>(visits.size());
                for (int u = 0; u < k - 1; ++u) {
                    for (int v = u + 1; v < k; ++v) {
                        // Segment reversal.
                        std::vector<int> reversed = visits;
                        std::reverse(reversed.begin() + u, reversed.begin() + v + 1);
                        if (const auto res = propagate_schedule(instance, reversed); res.feasible()) {
                            const double delta = res.route->distance - current;
                            if (delta < best_delta) {
                                best_delta = delta;
                                best = std::move(reversed);
                            }
                        }
                        // Position exchange.
                        std::vector<int> swapped = visits;
                        std::swap(swapped[u], swapped[v]);
                        if (const auto res = propagate_schedule(instance, swapped); res.feasible()) {
                            const double delta = res.route->distance - current;
                            if (delta < best_delta) {
                                best_delta = delta;
                                best = std::move(swapped);
                            }
                        }
                    }
                }
                if (!best.empty()) {
                    visits = std::move(best);
                    current += best_delta;
                    improved = true;
                }
            }
            return visits;
        }

        struct InsertionWeights {
            double mu = 1.0;       // detour reference weight
            double alpha1 = 0.5;   // weight of the added distance
            double alpha2 = 0.5;   // weight of the induced schedule push-forward
            double lambda = 1.0;   // weight of the depot round trip in customer selection
            bool seed_by_deadline = false;  // route seed: earliest due date instead of farthest
        };

        InsertionWeights restart_weights(int restart, rng::SplitMix64& random) {
            switch (restart) {
                case 0: return {1.0, 0.5, 0.5, 1.0, false};
                case 1: return {1.0, 1.0, 0.0, 2.0, false};
                case 2: return {1.0, 0.5, 0.5, 1.0, true};
                case 3: return {1.0, 0.0, 1.0, 1.0, false};
                default: {
                    const double a1 = random.next_double();
                    return {0.5 + random.next_double(), a1, 1.0 - a1, random.next_double(0.5, 2.0),
                            random.next_double() < 0.5};
                }
            }
        }

        // Builds one route set with Solomon-style sequential insertion.
        std::vector<std::vector<int>> construct_insertion(const Instance& instance, const InsertionWeights& w) {
            const int n = instance.customers();
            std::vector<bool> routed(n + 1, false);
            int remaining = n;
            std::vector<std::vector<int>> routes;

            while (remaining > 0) {
                // Open a route at the farthest unrouted customer (or the most
                // urgent one); ties fall to the lowest id.
                int seed = -1;
                double seed_key = -std::numeric_limits<double>::infinity();
                for (int i = 1; i <= n; ++i) {
                    if (routed[i]) continue;
                    const double key = w.seed_by_deadline ? -instance.vertex(i).due : instance.cost(0, i);
                    if (key > seed_key) {
                        seed_key = key;
                        seed = i;
                    }
                }
                std::vector<int> visits{seed};
                if (!propagate_schedule(instance, visits).feasible())
                    throw std::runtime_error("customer " + std::to_string(seed) +
                                             " cannot be served by a dedicated vehicle");
                routed[seed] = true;
                --remaining;

                // Fill the route: best feasible position per customer, best
                // customer by the savings-like selection criterion.
                while (remaining > 0) {
                    const ScheduledRoute current = *propagate_schedule(instance, visits).route;
                    int best_customer = -1;
                    int best_position = -1;
                    double best_selection = -std::numeric_limits<double>::infinity();
                    for (int u = 1; u <= n; ++u) {
                        if (routed[u]) continue;
                        double best_cost = std::numeric_limits<double>::infinity();
                        int best_pos = -1;
                        for (int pos = 0; pos <= static_cast<int>(visits.size()); ++pos) {
                            std::vector<int> candidate = visits;
                            candidate.insert(candidate.begin() + pos, u);
                            const auto res = propagate_schedule(instance, candidate);
                            if (!res.feasible()) continue;
                            const int before = pos > 0 ? visits[pos - 1] : 0;
                            const int after = pos < static_cast<int>(visits.size()) ? visits[pos] : 0;
                            const double detour = instance.cost(before, u) + instance.cost(u, after) -
                                                  w.mu * instance.cost(before, after);
                            // Push-forward of the displaced successor (or of
                            // the depot return when appending).
                            const double push = pos < static_cast<int>(visits.size())
                                                    ? res.route->start[pos + 1] - current.start[pos]
                                                    : res.route->depot_return - current.depot_return;
                            const double cost = w.alpha1 * detour + w.alpha2 * push;
                            if (cost < best_cost) {
                                best_cost = cost;
                                best_pos = pos;
                            }
                        }
                        if (best_pos < 0) continue;
                        const double selection = w.lambda * instance.cost(0, u) - best_cost;
                        if (selection > best_selection) {
                            best_selection = selection;
                            best_customer = u;
                            best_position = best_pos;
                        }
                    }
                    if (best_customer < 0) break;  // nothing else fits this route
                    visits.insert(visits.begin() + best_position, best_customer);
                    routed[best_customer] = true;
                    --remaining;
                }
                routes.push_back(std::move(visits));
            }
            return routes;
        }

        // Clarke-Wright savings with time-window checks: merge a route tail
        // with another route's head while feasible, best savings first.
        std::vector<std::vector<int>> construct_savings(const Instance& instance) {
            const int n = instance.customers();
            std::vector<std::vector<int>> routes(n + 1);
            std::vector<int> head_route(n + 1), tail_route(n + 1);  // route owning i as head/tail, -1 inside
            for (int i = 1; i <= n; ++i) {
                routes[i] = {i};
                if (!propagate_schedule(instance, routes[i]).feasible())
                    throw std::runtime_error("customer " + std::to_string(i) +
                                             " cannot be served by a dedicated vehicle");
                head_route[i] = i;
                tail_route[i] = i;
            }

            struct Saving {
                double value;
                int from, to;
            };
            std::vector<Saving> savings;
            savings.reserve(static_cast<std::size_t>(n) * (n - 1));
            for (int i = 1; i <= n; ++i)
                for (int j = 1; j <= n; ++j)
                    if (i != j)
                        savings.push_back({instance.cost(i, 0) + instance.cost(0, j) - instance.cost(i, j), i, j});
            std::sort(savings.begin(), savings.end(), [](const Saving& a, const Saving& b) {
                if (a.value != b.value) return a.value > b.value;
                if (a.from != b.from) return a.from < b.from;
                return a.to < b.to;
            });

            for (const Saving& s : savings) {
                const int ra = tail_route[s.from];
                const int rb = head_route[s.to];
                if (ra < 0 || rb < 0 || ra == rb) continue;
                std::vector<int> joined = routes[ra];
                joined.insert(joined.end(), routes[rb].begin(), routes[rb].end());
                if (!propagate_schedule(instance, joined).feasible()) continue;
                // The merged route lives in slot ra; interior endpoints close.
                tail_route[s.from] = -1;
                head_route[s.to] = -1;
                head_route[joined.front()] = ra;
                tail_route[joined.back()] = ra;
                routes[ra] = std::move(joined);
                routes[rb].clear();
            }

            std::vector<std::vector<int>> result;
            for (int i = 1; i <= n; ++i)
                if (!routes[i].empty()) result.push_back(std::move(routes[i]));
            return result;
        }

        Solution assemble(const Instance& instance, int fleet, std::vector<std::vector<int>> routes) {
            Solution solution;
            solution.instance_name = instance.name;
            for (std::size_t r = 0; r < routes.size(); ++r) {
                ScheduledRoute route = *propagate_schedule(instance, routes[r]).route;
                route.vehicle = static_cast<int>(r);
                solution.routes.push_back(std::move(route));
                solution.origin.push_back(-1);
            }
            solution.total_cost = solution_cost(solution);
            solution.fleet_feasible = static_cast<int>(solution.routes.size()) <= fleet;
            if (!solution.fleet_feasible)
                solution.violations.push_back("construction used " + std::to_string(solution.routes.size()) +
                                              " routes for a fleet of " + std::to_string(fleet));
            return solution;
        }

    }  // namespace

    BaselineSolver::BaselineSolver(BaselineSolverConfig config_) : config(config_) {
        if (config.restarts < 1) throw std::invalid_argument("restart count must be at least 1");
    }

    Solution BaselineSolver::solve(const Instance& instance, int fleet, double budget_seconds, std::uint64_t seed) {
        const auto deadline = deadline_after(budget_seconds);
        rng::SplitMix64 random(rng::derive(seed, 0x62617365));

        std::optional<Solution> best;
        const int restarts = config.construction == BaselineSolverConfig::Construction::savings ? 1 : config.restarts;
        for (int restart = 0; restart < restarts; ++restart) {
            std::vector<std::vector<int>> routes;
            if (config.construction == BaselineSolverConfig::Construction::savings)
                routes = construct_savings(instance);
            else
                routes = construct_insertion(instance, restart_weights(restart, random));

            if (config.intra_improvement)
                for (auto& visits : routes) visits = improve_route(instance, std::move(visits), deadline);

            Solution candidate = assemble(instance, fleet, std::move(routes));
            if (!best || candidate.total_cost < best->total_cost) best = std::move(candidate);
            // The first construction always completes so a solution exists
            // even under a zero budget; later restarts respect the clock.
            if (expired(deadline)) break;
        }
        return *best;
    }

    ExternalSolver::ExternalSolver(std::string command_) : command(std::move(command_)) {
        if (command.empty()) throw std::invalid_argument("external solver command must not be empty");
    }

    namespace {

        std::string shell_quote(const std::string& s) {
            std::string quoted = "'";
            for (char c : s) {
                if (c == '\'')
                    quoted += "'\\''";
                else
                    quoted += c;
            }
            quoted += "'";
            return quoted;
        }

    }  // namespace

    Solution ExternalSolver::solve(const Instance& instance, int fleet, double budget_seconds, std::uint64_t seed) {
        namespace fs = std::filesystem;
        static std::atomic<unsigned> counter{0};
        const fs::path path = fs::temp_directory_path() /
                              ("dri_sub_" + std::to_string(::getpid()) + "_" +
                               std::to_string(counter.fetch_add(1)) + ".txt");
        {
            std::ofstream out(path);
            if (!out) throw std::runtime_error("cannot write temporary instance file " + path.string());
            out << instance_to_text(instance);
        }

        char budget[32];
        std::snprintf(budget, sizeof(budget), "%.3f", budget_seconds);
        const std::string cmdline = command + " " + shell_quote(path.string()) + " " + std::to_string(fleet) + " " +
                                    budget + " " + std::to_string(seed);

        std::string output;
        FILE* pipe = ::popen(cmdline.c_str(), "r");
        if (!pipe) {
            fs::remove(path);
            throw std::runtime_error("cannot launch external solver: " + command);
        }
        char buffer[4096];
        std::size_t got;
        while ((got = std::fread(buffer, 1, sizeof(buffer), pipe)) > 0) output.append(buffer, got);
        const int status = ::pclose(pipe);
        fs::remove(path);
        if (status != 0)
            throw std::runtime_error("external solver exited with status " + std::to_string(status));

        Solution solution = solution_from_json(output);
        solution.instance_name = instance.name;

        // Normalize: recompute schedules and distances; reject broken routes.
        double total = 0.0;
        for (ScheduledRoute& route : solution.routes) {
            const auto res = propagate_schedule(instance, route.visits);
            if (!res.feasible())
                throw std::runtime_error("external solver returned an infeasible route: " + res.reason->message());
            const int vehicle = route.vehicle;
            route = *res.route;
            route.vehicle = vehicle;
            total += route.distance;
        }
        solution.total_cost = total;
        const auto report = verify_solution(instance, solution);
        if (!report.feasible) throw std::runtime_error("external solver solution failed verification");
        solution.fleet_feasible = static_cast<int>(solution.routes.size()) <= fleet;
        return solution;
    }

    std::vector<Solution> solve_subproblems(const std::vector<SubProblem>& subproblems, SolverInterface& solver,
                                            const TimeBudget& budget, std::uint64_t seed, SolverInterface* fallback,
                                            bool concurrent) {
        if (budget.per_subproblem.size() < subproblems.size())
            throw std::invalid_argument("missing per-subproblem budgets");

        std::vector<Solution> solutions(subproblems.size());
        BaselineSolver emergency;  // default fallback when none is supplied

        auto solve_one = [&](std::size_t p) {
            const SubProblem& sub = subproblems[p];
            double seconds = budget.per_subproblem[p];
            if (seconds < 1.0) {
                std::cerr << "note: routing budget for subproblem " << sub.index << " raised from " << seconds
                          << " s to the 1 s floor\n";
                seconds = 1.0;
            }
            const std::uint64_t sub_seed = rng::derive(seed, 0x726F7574ULL + static_cast<std::uint64_t>(sub.index));
            try {
                solutions[p] = solver.solve(sub.instance, sub.fleet, seconds, sub_seed);
                return;
            } catch (const std::exception& e) {
                std::cerr << "warning: solver '" << solver.name() << "' failed on subproblem " << sub.index << ": "
                          << e.what() << "; falling back\n";
            }
            SolverInterface& backup = fallback ? *fallback : static_cast<SolverInterface&>(emergency);
            try {
                solutions[p] = backup.solve(sub.instance, sub.fleet, seconds, sub_seed);
            } catch (const std::exception& e) {
                throw std::runtime_error("subproblem " + std::to_string(sub.index) +
                                         " could not be solved: " + e.what());
            }
        };

        if (concurrent) {
            std::vector<std::thread> workers;
            std::vector<std::exception_ptr> errors(subproblems.size());
            workers.reserve(subproblems.size());
            for (std::size_t p = 0; p < subproblems.size(); ++p)
                workers.emplace_back([&, p] {
                    try {
                        solve_one(p);
                    } catch (...) {
                        errors[p] = std::current_exception();
                    }
                });
            for (auto& worker : workers) worker.join();
            for (auto& error : errors)
                if (error) std::rethrow_exception(error);
        } else {
            for (std::size_t p = 0; p < subproblems.size(); ++p) solve_one(p);
        }
        return solutions;
    }

    Solution merge_solutions(const std::vector<Solution>& parts, const std::vector<SubProblem>& subproblems,
                             const Instance& parent) {
        if (parts.size() != subproblems.size())
            throw std::invalid_argument("one solution per subproblem required");

        Solution merged;
        merged.instance_name = parent.name;
        double total = 0.0;
        int vehicle = 0;
        for (std::size_t p = 0; p < parts.size(); ++p) {
            const SubProblem& sub = subproblems[p];
            for (const ScheduledRoute& local : parts[p].routes) {
                std::vector<int> visits;
                visits.reserve(local.visits.size());
                for (int id : local.visits) visits.push_back(sub.to_parent[id]);
                const auto res = propagate_schedule(parent, visits);
                if (!res.feasible())
                    throw std::logic_error("subproblem route became infeasible on the parent instance: " +
                                           res.reason->message());
                ScheduledRoute route = *res.route;
                route.vehicle = vehicle++;
                merged.routes.push_back(std::move(route));
                merged.origin.push_back(sub.index);
            }
            total += parts[p].total_cost;
        }
        merged.total_cost = total;

        const auto report = verify_solution(parent, merged);
        merged.fleet_feasible = report.fleet_feasible;
        if (!report.feasible)
            throw std::logic_error("merged solution failed parent feasibility: " +
                                   (report.violations.empty() ? std::string("unknown") : report.violations.front()));
        if (!report.fleet_feasible) merged.violations = report.violations;
        return merged;
    }

}  // namespace dri
