#include "dri/decompose.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <stdexcept>

#include <json.hpp>

namespace dri {

    std::vector<SubProblem> build_subproblems(const Instance& instance, const Clustering& clustering) {
        const auto members = clustering.clusters();
        double total_demand = 0.0;
        for (int i = 1; i <= instance.customers(); ++i) total_demand += instance.vertex(i).demand;

        std::vector<SubProblem> subproblems;
        subproblems.reserve(members.size());
        for (int p = 0; p < clustering.q; ++p) {
            if (members[p].empty()) throw std::logic_error("clustering produced an empty cluster");

            SubProblem sub;
            sub.index = p;
            sub.customers = members[p];

            sub.instance.name = instance.name + "_p" + std::to_string(p);
            sub.instance.fleet_size = 1;  // placeholder until the fleet share below
            sub.instance.capacity = instance.capacity;
            sub.instance.vertices.push_back(instance.depot());
            sub.to_parent.push_back(0);
            double cluster_demand = 0.0;
            for (int parent_id : sub.customers) {
                Vertex v = instance.vertex(parent_id);
                cluster_demand += v.demand;
                v.id = static_cast<int>(sub.instance.vertices.size());
                sub.instance.vertices.push_back(v);
                sub.to_parent.push_back(parent_id);
            }

            // Fleet share by demand, rounded up.
            const double share = total_demand > 0.0 ? cluster_demand / total_demand : 1.0 / clustering.q;
            sub.fleet = std::max(1, static_cast<int>(std::ceil(instance.fleet_size * share)));
            sub.instance.fleet_size = sub.fleet;
            sub.instance.finalize(instance.convention());
            subproblems.push_back(std::move(sub));
        }
        return subproblems;
    }

    TimeBudget budget_time(double total, double decomposition, double alpha, const std::vector<int>& sizes, int n) {
        if (total <= decomposition)
            throw std::runtime_error("budget exhausted by decomposition (" + std::to_string(decomposition) +
                                     " s of " + std::to_string(total) + " s)");
        if (alpha <= 0.0 || alpha > 1.0) throw std::invalid_argument("alpha must lie in (0, 1]");

        TimeBudget budget;
        budget.total = total;
        budget.decomposition = decomposition;
        const double remaining = total - decomposition;
        budget.routing = alpha * remaining;
        budget.improvement = (1.0 - alpha) * remaining;
        budget.per_subproblem.reserve(sizes.size());
        for (int size : sizes)
            budget.per_subproblem.push_back(std::floor(budget.routing * size / static_cast<double>(n)));
        return budget;
    }

    double edge_reduction(const std::vector<int>& sizes, int n) {
        if (n <= 0) throw std::invalid_argument("instance size must be positive");
        double edges = 0.0;
        for (int size : sizes) edges += static_cast<double>(size) * size;
        return edges / (static_cast<double>(n) * n);
    }

    bool VicinityIndex::subproblem_near(int p, int g) const {
        const auto& near = subproblem_neighbors[p];
        return std::find(near.begin(), near.end(), g) != near.end();
    }

    bool VicinityIndex::customer_near(int i, int j) const {
        const auto& near = customer_neighbors[i];
        return std::find(near.begin(), near.end(), j) != near.end();
    }

    namespace {

        double cluster_linkage(const SimilarityMatrix& similarity, const std::vector<int>& a,
                               const std::vector<int>& b, Linkage linkage) {
            double value = linkage == Linkage::complete ? 0.0 : std::numeric_limits<double>::infinity();
            double sum = 0.0;
            for (int i : a) {
                for (int j : b) {
                    const double d = similarity.symmetric(i, j);
                    switch (linkage) {
                        case Linkage::single: value = std::min(value, d); break;
                        case Linkage::complete: value = std::max(value, d); break;
                        case Linkage::average: sum += d; break;
                    }
                }
            }
            if (linkage == Linkage::average) return sum / (static_cast<double>(a.size()) * b.size());
            return value;
        }

    }  // namespace

    VicinityIndex build_vicinities(const SimilarityMatrix& similarity, const Clustering& clustering,
                                   int neighbor_subproblems, int neighbor_customers, double rho, Linkage linkage) {
        const int n = similarity.customers();
        const int q = clustering.q;

        VicinityIndex index;
        index.q = q;
        index.n = n;
        index.fuzzy_threshold = rho;

        // Nearest subproblems by linkage distance between their member sets.
        const auto members = clustering.clusters();
        index.subproblem_neighbors.resize(q);
        const int keep_subproblems = std::clamp(neighbor_subproblems, 0, q - 1);
        for (int p = 0; p < q; ++p) {
            std::vector<std::pair<double, int>> order;
            order.reserve(q - 1);
            for (int g = 0; g < q; ++g) {
                if (g == p) continue;
                order.emplace_back(cluster_linkage(similarity, members[p], members[g], linkage), g);
            }
            std::sort(order.begin(), order.end());
            for (int k = 0; k < keep_subproblems; ++k) index.subproblem_neighbors[p].push_back(order[k].second);
        }

        // Most similar customers per customer, nearest first; ties by id.
        index.customer_neighbors.resize(n + 1);
        const int keep_customers = std::clamp(neighbor_customers, 0, n - 1);
        std::vector<std::pair<double, int>> order;
        for (int i = 1; i <= n; ++i) {
            order.clear();
            order.reserve(n - 1);
            for (int j = 1; j <= n; ++j) {
                if (j == i) continue;
                order.emplace_back(similarity.symmetric(i, j), j);
            }
            std::sort(order.begin(), order.end());
            auto& neighbors = index.customer_neighbors[i];
            neighbors.reserve(keep_customers);
            for (int k = 0; k < keep_customers; ++k) neighbors.push_back(order[k].second);
        }

        // Fuzzy labels: a customer is a boundary customer when even its best
        // cluster membership does not exceed the threshold.
        if (!clustering.membership.empty()) {
            index.fuzzy.assign(n + 1, 0);
            for (int i = 1; i <= n; ++i) {
                double best = 0.0;
                for (int p = 0; p < q; ++p) best = std::max(best, clustering.membership_of(i, p));
                index.fuzzy[i] = best <= rho ? 1 : 0;
            }
        } else if (rho < 1.0) {
            std::cerr << "warning: fuzzy threshold given without fuzzy clustering; ignored\n";
        }
        return index;
    }

    std::string manifest_to_json(const Instance& instance, const Clustering& clustering,
                                 const std::vector<SubProblem>& subproblems, const VicinityIndex& vicinity,
                                 const TimeBudget& budget) {
        nlohmann::ordered_json doc;
        doc["instance"] = instance.name;
        doc["n"] = instance.customers();
        doc["method"] = to_string(clustering.method);
        doc["q"] = clustering.q;
        doc["assignment"] = std::vector<int>(clustering.assignment.begin() + 1, clustering.assignment.end());

        std::vector<int> sizes;
        nlohmann::ordered_json subs = nlohmann::ordered_json::array();
        for (const SubProblem& sub : subproblems) {
            sizes.push_back(static_cast<int>(sub.customers.size()));
            nlohmann::ordered_json item;
            item["index"] = sub.index;
            item["file"] = sub.instance.name + ".txt";
            item["customers"] = sub.customers;
            item["fleet"] = sub.fleet;
            item["time_budget"] = sub.time_budget;
            subs.push_back(std::move(item));
        }
        doc["subproblems"] = std::move(subs);
        doc["edge_reduction"] = edge_reduction(sizes, instance.customers());

        nlohmann::ordered_json budgets;
        budgets["total"] = budget.total;
        budgets["decomposition"] = budget.decomposition;
        budgets["routing"] = budget.routing;
        budgets["improvement"] = budget.improvement;
        budgets["per_subproblem"] = budget.per_subproblem;
        doc["budgets"] = std::move(budgets);

        nlohmann::ordered_json near;
        near["subproblem_neighbors"] = vicinity.subproblem_neighbors;
        nlohmann::ordered_json customer_lists = nlohmann::ordered_json::array();
        for (int i = 1; i <= vicinity.n; ++i) customer_lists.push_back(vicinity.customer_neighbors[i]);
        near["customer_neighbors"] = std::move(customer_lists);
        if (vicinity.has_fuzzy_labels()) {
            near["fuzzy_threshold"] = vicinity.fuzzy_threshold;
            std::vector<int> flags;
            for (int i = 1; i <= vicinity.n; ++i) flags.push_back(vicinity.fuzzy[i]);
            near["fuzzy"] = std::move(flags);
        }
        doc["vicinity"] = std::move(near);
        return doc.dump(2) + "\n";
    }

}  // namespace dri
