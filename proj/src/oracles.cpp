#include "dri/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <tuple>

#include "dri/rng.hpp"

namespace dri::oracle {

    namespace {

        // Recomputes one leg from raw coordinates under the instance's
        // rounding convention, independent of the cached matrices.
        double leg(const Instance& instance, int from, int to) {
            const Vertex& a = instance.vertex(from);
            const Vertex& b = instance.vertex(to);
            const double dx = a.x - b.x;
            const double dy = a.y - b.y;
            double d = std::sqrt(dx * dx + dy * dy);
            switch (instance.convention()) {
                case DistanceConvention::exact: break;
                case DistanceConvention::round_2_decimals: d = std::round(d * 100.0) / 100.0; break;
                case DistanceConvention::truncate_1_decimal: d = std::floor(d * 10.0) / 10.0; break;
            }
            return d;
        }

    }  // namespace

    ScheduleCheck schedule_walk(const Instance& instance, const std::vector<int>& visits) {
        const Vertex& depot = instance.depot();
        ScheduleCheck check;
        double depart = depot.ready;
        double load = 0.0;
        int prev = 0;
        for (int id : visits) {
            const Vertex& v = instance.vertex(id);
            load += v.demand;
            if (load > instance.capacity) return check;
            const double start = std::max(v.ready, depart + leg(instance, prev, id));
            if (start > v.due) return check;
            check.start_times.push_back(start);
            check.distance += leg(instance, prev, id);
            depart = start + v.service;
            prev = id;
        }
        if (depart + leg(instance, prev, 0) > depot.due) return check;
        check.distance += leg(instance, prev, 0);
        check.feasible = true;
        return check;
    }

    double solution_distance(const Instance& instance, const Solution& solution) {
        double total = 0.0;
        for (const ScheduledRoute& route : solution.routes) {
            int prev = 0;
            for (int id : route.visits) {
                total += leg(instance, prev, id);
                prev = id;
            }
            total += leg(instance, prev, 0);
        }
        return total;
    }

    namespace {

        // Depth-first enumeration over canonical route lists: routes are
        // ordered by their first visit, so each unordered set of routes is
        // explored exactly once.
        struct ExhaustiveSearch {
            const Instance& instance;
            int n;
            int max_routes;
            std::uint32_t full;
            double best = std::numeric_limits<double>::infinity();
            std::vector<std::vector<int>> best_routes;
            std::vector<std::vector<int>> current;

            ExhaustiveSearch(const Instance& inst, int cap)
                : instance(inst), n(inst.customers()), max_routes(cap) {
                full = n >= 32 ? 0xFFFFFFFFu : ((1u << n) - 1u);
            }

            // Tries to put `id` right after `last`; returns the service start
            // or nothing when the extension is infeasible.
            std::pair<bool, double> arrive(int last, double depart, int id) const {
                const Vertex& v = instance.vertex(id);
                const double start = std::max(v.ready, depart + instance.travel_time(last, id));
                if (start > v.due) return {false, 0.0};
                if (start + v.service + instance.travel_time(id, 0) > instance.depot().due) return {false, 0.0};
                return {true, start};
            }

            void step(std::uint32_t mask, int last, double depart, double load, double cost) {
                if (cost >= best) return;

                // Extend the open route with any unrouted customer.
                for (int id = 1; id <= n; ++id) {
                    if (mask & (1u << (id - 1))) continue;
                    const Vertex& v = instance.vertex(id);
                    if (load + v.demand > instance.capacity) continue;
                    const auto [ok, start] = arrive(last, depart, id);
                    if (!ok) continue;
                    current.back().push_back(id);
                    step(mask | (1u << (id - 1)), id, start + v.service, load + v.demand,
                         cost + instance.cost(last, id));
                    current.back().pop_back();
                }

                // Close the open route; finish or open the next one. The new
                // first visit must exceed this route's first visit to keep the
                // enumeration canonical.
                const double closed = cost + instance.cost(last, 0);
                if (mask == full) {
                    if (closed < best) {
                        best = closed;
                        best_routes = current;
                    }
                    return;
                }
                if (closed >= best) return;
                if (max_routes >= 0 && static_cast<int>(current.size()) >= max_routes) return;
                for (int id = current.back().front() + 1; id <= n; ++id) {
                    if (mask & (1u << (id - 1))) continue;
                    open(mask, closed, id);
                }
            }

            void open(std::uint32_t mask, double cost, int id) {
                const Vertex& v = instance.vertex(id);
                if (v.demand > instance.capacity) return;
                const auto [ok, start] = arrive(0, instance.depot().ready, id);
                if (!ok) return;
                current.push_back({id});
                step(mask | (1u << (id - 1)), id, start + v.service, v.demand, cost + instance.cost(0, id));
                current.pop_back();
            }
        };

    }  // namespace

    ExhaustiveResult exhaustive_vrptw(const Instance& instance, int max_routes) {
        if (instance.customers() > 20) throw std::invalid_argument("exhaustive search is limited to n <= 20");
        ExhaustiveResult result;
        if (instance.customers() == 0) {
            result.found = true;
            return result;
        }
        ExhaustiveSearch search(instance, max_routes);
        for (int id = 1; id <= search.n; ++id) search.open(0u, 0.0, id);
        if (std::isfinite(search.best)) {
            result.found = true;
            result.cost = search.best;
            result.routes = std::move(search.best_routes);
        }
        return result;
    }

    namespace {

        double fresh_linkage(const SimilarityMatrix& similarity, const std::vector<int>& a,
                             const std::vector<int>& b, Linkage linkage) {
            double value = linkage == Linkage::single ? std::numeric_limits<double>::infinity()
                           : linkage == Linkage::complete ? -std::numeric_limits<double>::infinity()
                                                          : 0.0;
            for (int x : a) {
                for (int y : b) {
                    const double d = similarity.symmetric(x, y);
                    switch (linkage) {
                        case Linkage::single: value = std::min(value, d); break;
                        case Linkage::complete: value = std::max(value, d); break;
                        case Linkage::average: value += d; break;
                    }
                }
            }
            if (linkage == Linkage::average) value /= static_cast<double>(a.size()) * static_cast<double>(b.size());
            return value;
        }

    }  // namespace

    Clustering naive_agglomerative(const SimilarityMatrix& similarity, const ClusteringSpec& spec,
                                   std::vector<MergeStep>* trace) {
        const int n = similarity.customers();
        if (spec.q < 1 || spec.q > n) throw std::invalid_argument("invalid cluster count");

        // Clusters as explicit member lists, kept sorted by representative
        // (their smallest member), mirroring the production scan order.
        std::vector<std::vector<int>> clusters(n);
        for (int i = 1; i <= n; ++i) clusters[i - 1] = {i};
        rng::SplitMix64 random(rng::derive(spec.seed, 0x6167676CU));

        while (static_cast<int>(clusters.size()) > spec.q) {
            double best = std::numeric_limits<double>::infinity();
            std::vector<std::pair<int, int>> ties;  // indices into `clusters`
            for (std::size_t a = 0; a < clusters.size(); ++a) {
                for (std::size_t b = a + 1; b < clusters.size(); ++b) {
                    const double d = fresh_linkage(similarity, clusters[a], clusters[b], spec.linkage);
                    if (d < best) {
                        best = d;
                        ties.clear();
                        ties.emplace_back(static_cast<int>(a), static_cast<int>(b));
                    } else if (d == best) {
                        ties.emplace_back(static_cast<int>(a), static_cast<int>(b));
                    }
                }
            }
            const auto [a, b] =
                ties.size() > 1 ? ties[static_cast<std::size_t>(random.bounded(ties.size()))] : ties.front();
            if (trace) trace->push_back({clusters[a].front(), clusters[b].front(), best});
            clusters[a].insert(clusters[a].end(), clusters[b].begin(), clusters[b].end());
            std::sort(clusters[a].begin(), clusters[a].end());
            clusters.erase(clusters.begin() + b);
        }

        Clustering result;
        result.method = ClusterMethod::agglomerative;
        result.q = spec.q;
        result.assignment.assign(n + 1, -1);
        for (std::size_t p = 0; p < clusters.size(); ++p)
            for (int id : clusters[p]) result.assignment[id] = static_cast<int>(p);
        result.iterations = n - static_cast<int>(clusters.size());
        return result;
    }

    namespace {

        double medoid_set_objective(const SimilarityMatrix& similarity, const std::vector<int>& medoids) {
            double objective = 0.0;
            for (int i = 1; i <= similarity.customers(); ++i) {
                if (std::find(medoids.begin(), medoids.end(), i) != medoids.end()) continue;
                double nearest = std::numeric_limits<double>::infinity();
                for (int m : medoids) nearest = std::min(nearest, similarity.symmetric(i, m));
                objective += nearest;
            }
            return objective;
        }

        void combinations(int n, int q, int from, std::vector<int>& pick,
                          const SimilarityMatrix& similarity, double& best) {
            if (static_cast<int>(pick.size()) == q) {
                best = std::min(best, medoid_set_objective(similarity, pick));
                return;
            }
            for (int i = from; i <= n; ++i) {
                pick.push_back(i);
                combinations(n, q, i + 1, pick, similarity, best);
                pick.pop_back();
            }
        }

    }  // namespace

    double best_medoid_objective(const SimilarityMatrix& similarity, int q) {
        const int n = similarity.customers();
        if (q < 1 || q > n) throw std::invalid_argument("invalid medoid count");
        double best = std::numeric_limits<double>::infinity();
        std::vector<int> pick;
        combinations(n, q, 1, pick, similarity, best);
        return best;
    }

    std::vector<Candidate> naive_candidates(const Solution& solution) {
        std::vector<Candidate> all;
        const int routes = static_cast<int>(solution.routes.size());
        auto origin = [&](int r) {
            return static_cast<std::size_t>(r) < solution.origin.size() ? solution.origin[r] : -1;
        };

        for (int ra = 0; ra < routes; ++ra) {
            const int ka = static_cast<int>(solution.routes[ra].visits.size());
            for (int rb = 0; rb < routes; ++rb) {
                if (rb == ra || origin(rb) == origin(ra)) continue;
                const int kb = static_cast<int>(solution.routes[rb].visits.size());
                for (int u = 0; u < ka; ++u) {
                    for (int v = 0; v < kb; ++v) {
                        all.push_back({MoveOperator::cross_over, ra, u, rb, v});
                        all.push_back({MoveOperator::swap, ra, u, rb, v});
                        all.push_back({MoveOperator::two_opt, ra, u, rb, v});
                    }
                    for (int gap = 0; gap <= kb; ++gap)
                        all.push_back({MoveOperator::relocate, ra, u, rb, gap});
                }
            }
            for (int u = 0; u + 1 < ka; ++u) {
                for (int v = u + 1; v < ka; ++v) {
                    all.push_back({MoveOperator::two_opt_intra, ra, u, ra, v});
                    all.push_back({MoveOperator::swap_intra, ra, u, ra, v});
                }
            }
        }
        return all;
    }

    std::vector<int> naive_route_order(const Instance& instance, const Solution& solution) {
        const int routes = static_cast<int>(solution.routes.size());
        int max_tag = 0;
        for (int tag : solution.origin) max_tag = std::max(max_tag, tag);

        std::vector<double> cost(max_tag + 1, 0.0);
        std::vector<int> count(max_tag + 1, 0);
        auto tag_of = [&](int r) {
            return std::max(0, static_cast<std::size_t>(r) < solution.origin.size() ? solution.origin[r] : 0);
        };
        for (int r = 0; r < routes; ++r) {
            cost[tag_of(r)] += solution.routes[r].distance;
            ++count[tag_of(r)];
        }

        std::vector<int> order(routes);
        for (int r = 0; r < routes; ++r) order[r] = r;
        std::stable_sort(order.begin(), order.end(), [&](int lhs, int rhs) {
            const int tl = tag_of(lhs);
            const int tr = tag_of(rhs);
            const double al = count[tl] > 0 ? cost[tl] / count[tl] : 0.0;
            const double ar = count[tr] > 0 ? cost[tr] / count[tr] : 0.0;
            if (al != ar) return al > ar;  // worst subproblem first
            if (tl != tr) return tl < tr;
            const double ul = solution.routes[lhs].load / instance.capacity;
            const double ur = solution.routes[rhs].load / instance.capacity;
            if (ul != ur) return ul < ur;  // least utilized first
            const int fl = solution.routes[lhs].visits.empty() ? 0 : solution.routes[lhs].visits.front();
            const int fr = solution.routes[rhs].visits.empty() ? 0 : solution.routes[rhs].visits.front();
            return fl < fr;
        });
        return order;
    }

}  // namespace dri::oracle
