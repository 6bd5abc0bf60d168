#include "dri/improve.hpp"

#include <algorithm>
#include <cassert>
#include <chrono>
#include <cmath>
#include <optional>
#include <tuple>

#include <json.hpp>

namespace dri {

    namespace {

        using Clock = std::chrono::steady_clock;

        // Smallest delta counted as an improvement; guards against cycling on
        // rounding noise.
        constexpr double kImprovement = -1e-9;

        std::optional<Clock::time_point> deadline_after(double seconds) {
            if (!std::isfinite(seconds)) return std::nullopt;
            if (seconds <= 0.0) return Clock::now();
            return Clock::now() + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(seconds));
        }

        bool expired(const std::optional<Clock::time_point>& deadline) {
            return deadline && Clock::now() >= *deadline;
        }

    }  // namespace

    RouteQuality assess_quality(const Instance& instance, const Solution& solution) {
        int max_tag = 0;
        for (int tag : solution.origin) max_tag = std::max(max_tag, tag);

        RouteQuality quality;
        quality.subproblem_cost.assign(max_tag + 1, 0.0);
        quality.subproblem_average.assign(max_tag + 1, 0.0);
        quality.utilization.reserve(solution.routes.size());
        std::vector<int> route_count(max_tag + 1, 0);
        for (std::size_t r = 0; r < solution.routes.size(); ++r) {
            const int tag = std::max(0, r < solution.origin.size() ? solution.origin[r] : 0);
            quality.subproblem_cost[tag] += solution.routes[r].distance;
            ++route_count[tag];
            quality.utilization.push_back(solution.routes[r].load / instance.capacity);
        }
        for (std::size_t p = 0; p < quality.subproblem_cost.size(); ++p)
            if (route_count[p] > 0) quality.subproblem_average[p] = quality.subproblem_cost[p] / route_count[p];
        return quality;
    }

    std::vector<int> order_routes(const Solution& solution, const RouteQuality& quality) {
        std::vector<int> order(solution.routes.size());
        for (std::size_t r = 0; r < order.size(); ++r) order[r] = static_cast<int>(r);

        auto key = [&](int r) {
            const int tag = std::max(0, static_cast<std::size_t>(r) < solution.origin.size() ? solution.origin[r] : 0);
            const auto& visits = solution.routes[r].visits;
            const int first = visits.empty() ? 0 : visits.front();
            return std::make_tuple(-quality.subproblem_average[tag], tag, quality.utilization[r], first);
        };
        std::sort(order.begin(), order.end(), [&](int a, int b) { return key(a) < key(b); });
        return order;
    }

    std::string to_string(MoveOperator op) {
        switch (op) {
            case MoveOperator::cross_over: return "cross_over";
            case MoveOperator::relocate: return "relocate";
            case MoveOperator::swap: return "swap";
            case MoveOperator::two_opt: return "two_opt";
            case MoveOperator::two_opt_intra: return "two_opt_intra";
            case MoveOperator::swap_intra: return "swap_intra";
        }
        return "unknown";
    }

    bool Candidate::operator<(const Candidate& other) const {
        return std::tie(op, route_a, route_b, pos_a, pos_b) <
               std::tie(other.op, other.route_a, other.route_b, other.pos_a, other.pos_b);
    }

    namespace {

        int origin_of(const Solution& solution, int route) {
            return static_cast<std::size_t>(route) < solution.origin.size() ? solution.origin[route] : -1;
        }

        // Partner routes for inter-route moves, grouped in vicinity order:
        // routes of a different subproblem that lies in the anchor
        // subproblem's vicinity. Without pruning: every other subproblem.
        std::vector<int> partner_routes(const Solution& solution, int route, const VicinityIndex* vicinity) {
            const int p = origin_of(solution, route);
            std::vector<int> partners;
            auto add_routes_of = [&](int g) {
                for (std::size_t r = 0; r < solution.routes.size(); ++r)
                    if (static_cast<int>(r) != route && origin_of(solution, static_cast<int>(r)) == g)
                        partners.push_back(static_cast<int>(r));
            };
            if (vicinity && p >= 0 && p < static_cast<int>(vicinity->subproblem_neighbors.size())) {
                for (int g : vicinity->subproblem_neighbors[p]) add_routes_of(g);
            } else if (!vicinity) {
                int max_tag = 0;
                for (int tag : solution.origin) max_tag = std::max(max_tag, tag);
                for (int g = 0; g <= max_tag; ++g)
                    if (g != p) add_routes_of(g);
            }
            return partners;
        }

        bool vertex_pair_allowed(const VicinityIndex* vicinity, int i, int j) {
            return !vicinity || vicinity->customer_near(i, j);
        }

        bool anchor_allowed(const VicinityIndex* vicinity, int i) {
            return !vicinity || vicinity->customer_eligible(i);
        }

    }  // namespace

    std::vector<Candidate> route_candidates(const Solution& solution, int route_index,
                                            const VicinityIndex* vicinity) {
        std::vector<Candidate> candidates;
        const auto& visits_a = solution.routes[route_index].visits;
        const int ka = static_cast<int>(visits_a.size());
        const std::vector<int> partners = partner_routes(solution, route_index, vicinity);

        // Inter-route operators, anchored on this route's vertices.
        for (const MoveOperator op :
             {MoveOperator::cross_over, MoveOperator::relocate, MoveOperator::swap, MoveOperator::two_opt}) {
            for (const int rb : partners) {
                const auto& visits_b = solution.routes[rb].visits;
                const int kb = static_cast<int>(visits_b.size());
                for (int u = 0; u < ka; ++u) {
                    const int i = visits_a[u];
                    if (!anchor_allowed(vicinity, i)) continue;
                    if (op == MoveOperator::relocate) {
                        for (int gap = 0; gap <= kb; ++gap) {
                            const bool near = (gap > 0 && vertex_pair_allowed(vicinity, i, visits_b[gap - 1])) ||
                                              (gap < kb && vertex_pair_allowed(vicinity, i, visits_b[gap]));
                            if (near) candidates.push_back({op, route_index, u, rb, gap});
                        }
                    } else {
                        for (int v = 0; v < kb; ++v)
                            if (vertex_pair_allowed(vicinity, i, visits_b[v]))
                                candidates.push_back({op, route_index, u, rb, v});
                    }
                }
            }
        }

        // Intra-route operators; never pruned (the vicinity structures steer
        // moves between subproblems, not inside a route).
        for (const MoveOperator op : {MoveOperator::two_opt_intra, MoveOperator::swap_intra})
            for (int u = 0; u + 1 < ka; ++u)
                for (int v = u + 1; v < ka; ++v) candidates.push_back({op, route_index, u, route_index, v});

        return candidates;
    }

    std::vector<Candidate> enumerate_candidates(const Solution& solution, const VicinityIndex* vicinity) {
        std::vector<Candidate> all;
        for (std::size_t r = 0; r < solution.routes.size(); ++r) {
            auto per_route = route_candidates(solution, static_cast<int>(r), vicinity);
            all.insert(all.end(), per_route.begin(), per_route.end());
        }
        return all;
    }

    MoveEvaluation evaluate_candidate(const Instance& instance, const Solution& solution,
                                      const Candidate& candidate) {
        const auto& a = solution.routes[candidate.route_a].visits;
        MoveEvaluation eval;

        if (candidate.op == MoveOperator::two_opt_intra || candidate.op == MoveOperator::swap_intra) {
            std::vector<int> changed = a;
            if (candidate.op == MoveOperator::two_opt_intra)
                std::reverse(changed.begin() + candidate.pos_a, changed.begin() + candidate.pos_b + 1);
            else
                std::swap(changed[candidate.pos_a], changed[candidate.pos_b]);
            const auto res = propagate_schedule(instance, changed);
            if (!res.feasible()) return eval;
            eval.feasible = true;
            eval.delta = res.route->distance - solution.routes[candidate.route_a].distance;
            eval.visits_a = std::move(changed);
            return eval;
        }

        const auto& b = solution.routes[candidate.route_b].visits;
        std::vector<int> new_a;
        std::vector<int> new_b;
        const int u = candidate.pos_a;
        const int v = candidate.pos_b;
        switch (candidate.op) {
            case MoveOperator::cross_over:
                // Cut after u in A and before v in B, then swap the tails.
                new_a.assign(a.begin(), a.begin() + u + 1);
                new_a.insert(new_a.end(), b.begin() + v, b.end());
                new_b.assign(b.begin(), b.begin() + v);
                new_b.insert(new_b.end(), a.begin() + u + 1, a.end());
                break;
            case MoveOperator::relocate:
                new_a = a;
                new_a.erase(new_a.begin() + u);
                new_b = b;
                new_b.insert(new_b.begin() + v, a[u]);
                break;
            case MoveOperator::swap:
                new_a = a;
                new_b = b;
                std::swap(new_a[u], new_b[v]);
                break;
            case MoveOperator::two_opt:
                // Tail exchange with reversal: A keeps its head and receives
                // B's head reversed; B gets A's tail reversed plus its own tail.
                new_a.assign(a.begin(), a.begin() + u + 1);
                new_a.insert(new_a.end(), b.rend() - (v + 1), b.rend());
                new_b.assign(a.rbegin(), a.rend() - (u + 1));
                new_b.insert(new_b.end(), b.begin() + v + 1, b.end());
                break;
            default: return eval;
        }

        const auto res_a = propagate_schedule(instance, new_a);
        if (!res_a.feasible()) return eval;
        const auto res_b = propagate_schedule(instance, new_b);
        if (!res_b.feasible()) return eval;
        eval.feasible = true;
        eval.delta = res_a.route->distance + res_b.route->distance - solution.routes[candidate.route_a].distance -
                     solution.routes[candidate.route_b].distance;
        eval.visits_a = std::move(new_a);
        eval.visits_b = std::move(new_b);
        return eval;
    }

    namespace {

        // Post-application location of the two touched routes; -1 when a
        // route lost all customers and was dropped (or was not involved).
        struct ApplyResult {
            int index_a = -1;
            int index_b = -1;
        };

        // Applies an evaluated candidate in place.
        ApplyResult apply_move(const Instance& instance, Solution& solution, const Candidate& candidate,
                               MoveEvaluation eval) {
            auto replace = [&](int index, std::vector<int> visits) {
                ScheduledRoute fresh = *propagate_schedule(instance, visits).route;
                fresh.vehicle = solution.routes[index].vehicle;
                solution.routes[index] = std::move(fresh);
            };
            const bool inter = candidate.route_b != candidate.route_a;
            replace(candidate.route_a, std::move(eval.visits_a));
            if (inter) replace(candidate.route_b, std::move(eval.visits_b));

            ApplyResult result;
            result.index_a = candidate.route_a;
            result.index_b = inter ? candidate.route_b : -1;

            // Drop routes that lost all their customers.
            for (int r = static_cast<int>(solution.routes.size()) - 1; r >= 0; --r) {
                if (!solution.routes[r].visits.empty()) continue;
                solution.routes.erase(solution.routes.begin() + r);
                solution.origin.erase(solution.origin.begin() + r);
                if (result.index_a == r)
                    result.index_a = -1;
                else if (result.index_a > r)
                    --result.index_a;
                if (result.index_b == r)
                    result.index_b = -1;
                else if (result.index_b > r)
                    --result.index_b;
            }
            solution.total_cost = solution_cost(solution);
            return result;
        }

        struct SearchState {
            const Instance& instance;
            Solution& solution;
            const MoveContext& context;
            const std::optional<Clock::time_point> deadline;
            const Clock::time_point started;
            std::vector<MoveRecord>& log;
            bool out_of_time = false;

            bool timed_out() {
                if (out_of_time) return true;
                out_of_time = expired(deadline);
                return out_of_time;
            }

            void record(const Candidate& c, double delta) {
                log.push_back({c.op, c.route_a, c.pos_a, c.route_b, c.pos_b, delta, solution.total_cost,
                               std::chrono::duration<double>(Clock::now() - started).count()});
            }
        };

        // Selects the move to accept among a route's candidates under the
        // given strategy. Equal deltas resolve to the lexicographically
        // smallest candidate.
        std::optional<std::pair<Candidate, MoveEvaluation>> pick_move(SearchState& state, int route,
                                                                      bool intra_only) {
            std::optional<std::pair<Candidate, MoveEvaluation>> best;
            int checked = 0;
            for (const Candidate& candidate : route_candidates(state.solution, route, state.context.vicinity)) {
                if (intra_only && candidate.op != MoveOperator::two_opt_intra &&
                    candidate.op != MoveOperator::swap_intra)
                    continue;
                if ((++checked & 63) == 0 && state.timed_out()) return best;
                MoveEvaluation eval = evaluate_candidate(state.instance, state.solution, candidate);
                if (!eval.feasible || eval.delta >= kImprovement) continue;
                if (state.context.strategy == Descent::first) return std::make_pair(candidate, std::move(eval));
                if (!best || eval.delta < best->second.delta ||
                    (eval.delta == best->second.delta && candidate < best->first))
                    best = std::make_pair(candidate, std::move(eval));
            }
            return best;
        }

        // Runs intra-route descent on one route until it is locally optimal.
        void repair_route(SearchState& state, int route) {
            while (!state.timed_out()) {
                auto move = pick_move(state, route, true);
                if (!move) return;
                const double delta = move->second.delta;
                apply_move(state.instance, state.solution, move->first, std::move(move->second));
                state.record(move->first, delta);
            }
        }

    }  // namespace

    LocalSearchResult local_search(const Instance& instance, Solution solution, const MoveContext& context) {
        LocalSearchResult result;
        solution.total_cost = solution_cost(solution);

        SearchState state{instance, solution, context, deadline_after(context.budget_seconds), Clock::now(),
                          result.log};

        while (!state.timed_out()) {
            ++result.sweeps;
            bool improved_in_sweep = false;

            // Freeze the processing order for this sweep by route identity
            // (first visited customer), so mutations cannot skew the walk.
            const RouteQuality quality = assess_quality(instance, solution);
            std::vector<int> keys;
            for (int r : order_routes(solution, quality))
                if (!solution.routes[r].visits.empty()) keys.push_back(solution.routes[r].visits.front());

            for (int key : keys) {
                if (state.timed_out()) break;
                // The route may have been dropped or changed by earlier moves.
                int route = -1;
                for (std::size_t r = 0; r < solution.routes.size(); ++r) {
                    const auto& visits = solution.routes[r].visits;
                    if (std::find(visits.begin(), visits.end(), key) != visits.end()) {
                        route = static_cast<int>(r);
                        break;
                    }
                }
                if (route < 0) continue;

                // Exhaust this route: accept moves until none improves.
                while (!state.timed_out()) {
                    auto move = pick_move(state, route, false);
                    if (!move) break;
                    const Candidate candidate = move->first;
                    const double delta = move->second.delta;
                    const ApplyResult applied = apply_move(instance, solution, candidate, std::move(move->second));
                    state.record(candidate, delta);
                    improved_in_sweep = true;

                    if (applied.index_b >= 0) {
                        // An inter-route move perturbed both routes; restore
                        // each to an intra-route local optimum before moving on.
                        if (applied.index_a >= 0) repair_route(state, applied.index_a);
                        repair_route(state, applied.index_b);
                    }
                    route = applied.index_a;
                    if (route < 0) break;
                }
            }

            if (!improved_in_sweep) break;  // local optimum
        }

        result.budget_exhausted = state.out_of_time;
        for (std::size_t r = 0; r < solution.routes.size(); ++r)
            solution.routes[r].vehicle = static_cast<int>(r);
        solution.total_cost = solution_cost(solution);
        result.solution = std::move(solution);
        return result;
    }

    std::string improvement_log_to_jsonl(const std::vector<MoveRecord>& log) {
        std::string out;
        for (const MoveRecord& record : log) {
            nlohmann::ordered_json line;
            line["op"] = to_string(record.op);
            line["route_a"] = record.route_a;
            line["pos_a"] = record.pos_a;
            line["route_b"] = record.route_b;
            line["pos_b"] = record.pos_b;
            line["delta"] = record.delta;
            line["cost"] = record.cost_after;
            line["t"] = record.elapsed_seconds;
            out += line.dump();
            out += "\n";
        }
        return out;
    }

    ImprovementReport improvement_report(double cost_before, double cost_after, double best_known) {
        ImprovementReport report;
        report.xi_before = (cost_before - best_known) / best_known;
        report.xi_after = (cost_after - best_known) / best_known;
        report.xi_change = report.xi_before != 0.0 ? (report.xi_after - report.xi_before) / report.xi_before : 0.0;
        report.below_best_known = best_known <= 0.0 || cost_before < best_known || cost_after < best_known;
        return report;
    }

}  // namespace dri
