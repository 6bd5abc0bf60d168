#include "dri/clustering.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "dri/rng.hpp"

namespace dri {

    std::string to_string(ClusterMethod method) {
        switch (method) {
            case ClusterMethod::k_medoids: return "k-medoids";
            case ClusterMethod::fuzzy_c_medoids: return "fuzzy-c-medoids";
            case ClusterMethod::agglomerative: return "agglomerative";
        }
        return "unknown";
    }

    std::string to_string(Linkage linkage) {
        switch (linkage) {
            case Linkage::single: return "single";
            case Linkage::complete: return "complete";
            case Linkage::average: return "average";
        }
        return "unknown";
    }

    ClusterMethod cluster_method_from_string(const std::string& name) {
        if (name == "k_medoids" || name == "k-medoids") return ClusterMethod::k_medoids;
        if (name == "fuzzy_c_medoids" || name == "fuzzy-c-medoids" || name == "fuzzy")
            return ClusterMethod::fuzzy_c_medoids;
        if (name == "agglomerative") return ClusterMethod::agglomerative;
        throw std::invalid_argument("unknown clustering method: " + name);
    }

    Linkage linkage_from_string(const std::string& name) {
        if (name == "single") return Linkage::single;
        if (name == "complete") return Linkage::complete;
        if (name == "average") return Linkage::average;
        throw std::invalid_argument("unknown linkage: " + name);
    }

    std::vector<std::vector<int>> Clustering::clusters() const {
        std::vector<std::vector<int>> members(q);
        for (int id = 1; id < static_cast<int>(assignment.size()); ++id) members[assignment[id]].push_back(id);
        return members;
    }

    std::vector<int> Clustering::cluster_sizes() const {
        std::vector<int> sizes(q, 0);
        for (int id = 1; id < static_cast<int>(assignment.size()); ++id) ++sizes[assignment[id]];
        return sizes;
    }

    namespace {

        void check_q(int q, int n, int minimum) {
            if (q < minimum)
                throw std::invalid_argument("cluster count must be at least " + std::to_string(minimum));
            if (q > n) throw std::invalid_argument("cluster count exceeds the number of customers");
        }

    }  // namespace

    Clustering kmedoids(const SimilarityMatrix& similarity, const ClusteringSpec& spec) {
        const int n = similarity.customers();
        const int q = spec.q;
        check_q(q, n, 2);
        const int max_iterations = spec.max_iterations > 0 ? spec.max_iterations : 100;

        // Seed scores: customers most similar to all others get picked first.
        // Each distance is normalized by the column's total, so central
        // customers in dense regions score low.
        std::vector<double> column_sum(n + 1, 0.0);
        for (int j = 1; j <= n; ++j) {
            double sum = 0.0;
            for (int l = 1; l <= n; ++l) sum += similarity.symmetric(j, l);
            column_sum[j] = sum;
        }
        std::vector<double> score(n + 1, 0.0);
        for (int i = 1; i <= n; ++i) {
            double s = 0.0;
            for (int j = 1; j <= n; ++j)
                if (column_sum[j] > 0.0) s += similarity.symmetric(i, j) / column_sum[j];
            score[i] = s;
        }
        std::vector<int> order(n);
        std::iota(order.begin(), order.end(), 1);
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            if (score[a] != score[b]) return score[a] < score[b];
            return a < b;
        });
        std::vector<int> medoids(order.begin(), order.begin() + q);
        std::sort(medoids.begin(), medoids.end());

        std::vector<int> assignment(n + 1, -1);
        double previous_objective = std::numeric_limits<double>::infinity();
        int iteration = 0;
        while (iteration < max_iterations) {
            ++iteration;

            // Assignment step: each customer joins its nearest medoid. Medoids
            // claim themselves first so duplicate coordinates cannot leave a
            // cluster empty.
            for (int p = 0; p < q; ++p) assignment[medoids[p]] = p;
            double objective = 0.0;
            for (int i = 1; i <= n; ++i) {
                if (std::find(medoids.begin(), medoids.end(), i) != medoids.end()) continue;
                int best = 0;
                double best_distance = similarity.symmetric(i, medoids[0]);
                for (int p = 1; p < q; ++p) {
                    const double d = similarity.symmetric(i, medoids[p]);
                    if (d < best_distance) {
                        best_distance = d;
                        best = p;
                    }
                }
                assignment[i] = best;
                objective += best_distance;
            }
            assert(objective <= previous_objective + 1e-9 && "k-medoids objective must not increase");
            previous_objective = objective;

            // Update step: the member minimizing the summed distance to its
            // cluster becomes the new medoid; ties fall to the lowest id.
            std::vector<std::vector<int>> members(q);
            for (int i = 1; i <= n; ++i) members[assignment[i]].push_back(i);
            std::vector<int> updated(q);
            for (int p = 0; p < q; ++p) {
                int best = -1;
                double best_sum = std::numeric_limits<double>::infinity();
                for (int candidate : members[p]) {
                    double sum = 0.0;
                    for (int other : members[p]) sum += similarity.symmetric(candidate, other);
                    if (sum < best_sum) {
                        best_sum = sum;
                        best = candidate;
                    }
                }
                updated[p] = best;
            }
            std::sort(updated.begin(), updated.end());
            if (updated == medoids) break;
            medoids = updated;
        }

        // Final assignment against the converged medoids.
        for (int p = 0; p < q; ++p) assignment[medoids[p]] = p;
        double converged_objective = 0.0;
        for (int i = 1; i <= n; ++i) {
            if (std::find(medoids.begin(), medoids.end(), i) != medoids.end()) continue;
            int best = 0;
            double best_distance = similarity.symmetric(i, medoids[0]);
            for (int p = 1; p < q; ++p) {
                const double d = similarity.symmetric(i, medoids[p]);
                if (d < best_distance) {
                    best_distance = d;
                    best = p;
                }
            }
            assignment[i] = best;
            converged_objective += best_distance;
        }

        Clustering result;
        result.method = ClusterMethod::k_medoids;
        result.q = q;
        result.assignment = std::move(assignment);
        result.medoids = std::move(medoids);
        result.iterations = iteration;
        result.objective = converged_objective;
        return result;
    }

    namespace {

        // Exponent applied to distance ratios in the membership update.
        double membership_row(const SimilarityMatrix& similarity, int customer, const std::vector<int>& medoids,
                              double exponent, double* row) {
            const int q = static_cast<int>(medoids.size());
            double max_change = 0.0;
            std::vector<double> distance(q);
            int zero_count = 0;
            for (int p = 0; p < q; ++p) {
                distance[p] = similarity.symmetric(customer, medoids[p]);
                if (distance[p] == 0.0) ++zero_count;
            }
            for (int p = 0; p < q; ++p) {
                double value;
                if (zero_count > 0) {
                    // Sitting exactly on a medoid: all weight goes there (split
                    // evenly if several medoids coincide with the customer).
                    value = distance[p] == 0.0 ? 1.0 / zero_count : 0.0;
                } else {
                    double denom = 0.0;
                    for (int g = 0; g < q; ++g) denom += std::pow(distance[p] / distance[g], exponent);
                    value = 1.0 / denom;
                }
                max_change = std::max(max_change, std::abs(value - row[p]));
                row[p] = value;
            }
            return max_change;
        }

    }  // namespace

    Clustering fuzzy_cmedoids(const SimilarityMatrix& similarity, const ClusteringSpec& spec) {
        const int n = similarity.customers();
        const int q = spec.q;
        check_q(q, n, 2);
        if (spec.kappa <= 1.0) throw std::invalid_argument("fuzziness must be strictly greater than 1");
        const int max_iterations = spec.max_iterations > 0 ? spec.max_iterations : 200;
        const double exponent = 2.0 / (spec.kappa - 1.0);

        // Row-stochastic random initialization of the membership matrix.
        rng::SplitMix64 random(rng::derive(spec.seed, 0x66637A79));
        std::vector<double> membership(static_cast<std::size_t>(n) * q);
        for (int i = 0; i < n; ++i) {
            double sum = 0.0;
            for (int p = 0; p < q; ++p) {
                const double u = random.next_double();
                membership[static_cast<std::size_t>(i) * q + p] = u;
                sum += u;
            }
            if (sum == 0.0) {
                for (int p = 0; p < q; ++p) membership[static_cast<std::size_t>(i) * q + p] = 1.0 / q;
            } else {
                for (int p = 0; p < q; ++p) membership[static_cast<std::size_t>(i) * q + p] /= sum;
            }
        }

        const auto& features = similarity.features();
        std::vector<int> medoids(q, -1);
        int iteration = 0;
        while (iteration < max_iterations) {
            ++iteration;

            // Weighted cluster feature vectors. The weights are normalized so
            // the synthetic point stays inside the customer cloud; the raw
            // weighted sum would scale coordinates by the membership mass and
            // park every center far outside the instance.
            std::vector<FeatureVector> centers(q);
            for (int p = 0; p < q; ++p) {
                FeatureVector acc{};
                double mass = 0.0;
                for (int i = 1; i <= n; ++i) {
                    const double mu = membership[static_cast<std::size_t>(i - 1) * q + p];
                    const FeatureVector& f = features[i];
                    acc.x += mu * f.x;
                    acc.y += mu * f.y;
                    acc.theta += mu * f.theta;
                    acc.ready += mu * f.ready;
                    acc.due += mu * f.due;
                    acc.service += mu * f.service;
                    acc.demand += mu * f.demand;
                    mass += mu;
                }
                if (mass > 0.0) {
                    acc.x /= mass;
                    acc.y /= mass;
                    acc.theta /= mass;
                    acc.ready /= mass;
                    acc.due /= mass;
                    acc.service /= mass;
                    acc.demand /= mass;
                }
                centers[p] = acc;
            }

            // Snap each center to the most similar customer. Medoids are kept
            // distinct within an iteration: coincident medoids would make all
            // membership columns identical and freeze the algorithm.
            std::vector<bool> taken(n + 1, false);
            for (int p = 0; p < q; ++p) {
                int best = -1;
                double best_distance = std::numeric_limits<double>::infinity();
                for (int i = 1; i <= n; ++i) {
                    if (taken[i]) continue;
                    const double forward = std_distance_between(features[i], centers[p], similarity.config(),
                                                                similarity.horizon(), similarity.capacity());
                    const double backward = std_distance_between(centers[p], features[i], similarity.config(),
                                                                 similarity.horizon(), similarity.capacity());
                    const double d = std::min(forward, backward);
                    if (d < best_distance) {
                        best_distance = d;
                        best = i;
                    }
                }
                medoids[p] = best;
                taken[best] = true;
            }

            double max_change = 0.0;
            for (int i = 1; i <= n; ++i) {
                const double change = membership_row(similarity, i, medoids, exponent,
                                                     &membership[static_cast<std::size_t>(i - 1) * q]);
                max_change = std::max(max_change, change);
            }
            if (max_change < spec.epsilon) break;
        }

        // Hard assignment by the largest membership (ties to the lowest
        // cluster index).
        std::vector<int> assignment(n + 1, -1);
        for (int i = 1; i <= n; ++i) {
            const double* row = &membership[static_cast<std::size_t>(i - 1) * q];
            int best = 0;
            for (int p = 1; p < q; ++p)
                if (row[p] > row[best]) best = p;
            assignment[i] = best;
        }

        // The argmax can leave a cluster empty even though its membership
        // column is positive; repair by pulling in the most attached customer
        // from a cluster that can spare one.
        std::vector<int> sizes(q, 0);
        for (int i = 1; i <= n; ++i) ++sizes[assignment[i]];
        for (int p = 0; p < q; ++p) {
            while (sizes[p] == 0) {
                int best = -1;
                for (int i = 1; i <= n; ++i) {
                    if (sizes[assignment[i]] < 2) continue;
                    if (best < 0 || membership[static_cast<std::size_t>(i - 1) * q + p] >
                                        membership[static_cast<std::size_t>(best - 1) * q + p])
                        best = i;
                }
                if (best < 0) throw std::runtime_error("cannot repair an empty fuzzy cluster");
                --sizes[assignment[best]];
                assignment[best] = p;
                ++sizes[p];
            }
        }

        Clustering result;
        result.method = ClusterMethod::fuzzy_c_medoids;
        result.q = q;
        result.assignment = std::move(assignment);
        result.medoids = std::move(medoids);
        result.membership = std::move(membership);
        result.iterations = iteration;
        return result;
    }

    namespace {

        // Shared state of the hierarchical merge: clusters live in the slot of
        // their smallest member id, so slot order is representative order.
        struct Agglomerator {
            int n;
            Linkage linkage;
            std::vector<bool> active;
            std::vector<int> size;
            std::vector<double> link;      // pairwise linkage value per slot pair
            std::vector<double> pair_sum;  // summed member distances (average linkage)

            double& at(std::vector<double>& m, int a, int b) { return m[static_cast<std::size_t>(a) * n + b]; }
            double get(const std::vector<double>& m, int a, int b) const {
                return m[static_cast<std::size_t>(a) * n + b];
            }

            Agglomerator(const SimilarityMatrix& similarity, Linkage linkage_)
                : n(similarity.customers()), linkage(linkage_), active(n, true), size(n, 1) {
                link.assign(static_cast<std::size_t>(n) * n, 0.0);
                if (linkage == Linkage::average) pair_sum.assign(static_cast<std::size_t>(n) * n, 0.0);
                for (int a = 0; a < n; ++a) {
                    for (int b = a + 1; b < n; ++b) {
                        const double d = similarity.symmetric(a + 1, b + 1);
                        at(link, a, b) = d;
                        at(link, b, a) = d;
                        if (linkage == Linkage::average) {
                            at(pair_sum, a, b) = d;
                            at(pair_sum, b, a) = d;
                        }
                    }
                }
            }

            // Merges slot b into slot a (a < b) and refreshes distances.
            void merge(int a, int b) {
                for (int k = 0; k < n; ++k) {
                    if (!active[k] || k == a || k == b) continue;
                    double updated = 0.0;
                    switch (linkage) {
                        case Linkage::single: updated = std::min(get(link, a, k), get(link, b, k)); break;
                        case Linkage::complete: updated = std::max(get(link, a, k), get(link, b, k)); break;
                        case Linkage::average: {
                            const double sum = get(pair_sum, a, k) + get(pair_sum, b, k);
                            at(pair_sum, a, k) = sum;
                            at(pair_sum, k, a) = sum;
                            updated = sum / (static_cast<double>(size[a] + size[b]) * size[k]);
                            break;
                        }
                    }
                    at(link, a, k) = updated;
                    at(link, k, a) = updated;
                }
                size[a] += size[b];
                active[b] = false;
            }
        };

    }  // namespace

    Clustering agglomerative(const SimilarityMatrix& similarity, const ClusteringSpec& spec) {
        return agglomerative(similarity, spec, nullptr);
    }

    Clustering agglomerative(const SimilarityMatrix& similarity, const ClusteringSpec& spec,
                             std::vector<MergeStep>* trace) {
        const int n = similarity.customers();
        const int q = spec.q;
        check_q(q, n, 1);

        Agglomerator state(similarity, spec.linkage);
        rng::SplitMix64 random(rng::derive(spec.seed, 0x6167676CU));
        std::vector<int> owner(n + 1);  // customer id -> owning slot
        for (int i = 1; i <= n; ++i) owner[i] = i - 1;

        int remaining = n;
        while (remaining > q) {
            // Scan active slot pairs in canonical order for the smallest
            // linkage value; exact ties are collected and drawn uniformly.
            double best = std::numeric_limits<double>::infinity();
            std::vector<std::pair<int, int>> ties;
            for (int a = 0; a < n; ++a) {
                if (!state.active[a]) continue;
                for (int b = a + 1; b < n; ++b) {
                    if (!state.active[b]) continue;
                    const double d = state.get(state.link, a, b);
                    if (d < best) {
                        best = d;
                        ties.clear();
                        ties.emplace_back(a, b);
                    } else if (d == best) {
                        ties.emplace_back(a, b);
                    }
                }
            }
            const auto [a, b] =
                ties.size() > 1 ? ties[static_cast<std::size_t>(random.bounded(ties.size()))] : ties.front();
            if (trace) trace->push_back({a + 1, b + 1, best});
            state.merge(a, b);
            for (int i = 1; i <= n; ++i)
                if (owner[i] == b) owner[i] = a;
            --remaining;
        }

        // Compact the surviving slots into cluster indices ordered by
        // representative (slot) id.
        std::vector<int> slot_to_cluster(n, -1);
        int next = 0;
        for (int slot = 0; slot < n; ++slot)
            if (state.active[slot]) slot_to_cluster[slot] = next++;

        Clustering result;
        result.method = ClusterMethod::agglomerative;
        result.q = q;
        result.assignment.assign(n + 1, -1);
        for (int i = 1; i <= n; ++i) result.assignment[i] = slot_to_cluster[owner[i]];
        result.iterations = n - remaining;
        return result;
    }

    int choose_q(const Instance& instance, QPolicy policy, int target_size) {
        const int n = instance.customers();
        int q = 1;
        switch (policy) {
            case QPolicy::solver_based:
                if (target_size < 1) throw std::invalid_argument("target size must be positive");
                q = static_cast<int>(std::ceil(static_cast<double>(n) / target_size));
                break;
            case QPolicy::fleet_based: {
                double demand = 0.0;
                for (int i = 1; i <= n; ++i) demand += instance.vertex(i).demand;
                q = static_cast<int>(std::ceil(demand / instance.capacity));
                break;
            }
        }
        return std::clamp(q, 1, n);
    }

    double medoid_objective(const SimilarityMatrix& similarity, const Clustering& clustering) {
        double objective = 0.0;
        for (int i = 1; i <= similarity.customers(); ++i)
            objective += similarity.symmetric(i, clustering.medoids[clustering.assignment[i]]);
        return objective;
    }

    std::string clustering_to_json(const Clustering& clustering) {
        nlohmann::ordered_json doc;
        doc["method"] = to_string(clustering.method);
        doc["q"] = clustering.q;
        doc["iterations"] = clustering.iterations;
        doc["assignment"] = std::vector<int>(clustering.assignment.begin() + 1, clustering.assignment.end());
        doc["medoids"] = clustering.medoids;
        if (!clustering.membership.empty()) {
            nlohmann::ordered_json rows = nlohmann::ordered_json::array();
            const int n = static_cast<int>(clustering.assignment.size()) - 1;
            for (int i = 1; i <= n; ++i) {
                std::vector<double> row(clustering.membership.begin() + static_cast<std::size_t>(i - 1) * clustering.q,
                                        clustering.membership.begin() + static_cast<std::size_t>(i) * clustering.q);
                rows.push_back(row);
            }
            doc["membership"] = std::move(rows);
        }
        return doc.dump(2) + "\n";
    }

}  // namespace dri
