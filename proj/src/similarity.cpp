#include "dri/similarity.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace dri {

    namespace {

        constexpr double PI = 3.14159265358979323846;

        double angle_difference(double a, double b, bool wrap) {
            double diff = a - b;
            if (wrap) {
                // Fold into (-pi, pi] so antipodal angles are not penalized twice.
                while (diff > PI) diff -= 2.0 * PI;
                while (diff <= -PI) diff += 2.0 * PI;
            }
            return diff;
        }

        // FNV-1a over the raw bytes; cheap integrity check for the dump files.
        std::uint64_t fnv1a(const void* data, std::size_t bytes) {
            const auto* p = static_cast<const unsigned char*>(data);
            std::uint64_t hash = 0xCBF29CE484222325ULL;
            for (std::size_t i = 0; i < bytes; ++i) {
                hash ^= p[i];
                hash *= 0x100000001B3ULL;
            }
            return hash;
        }

    }  // namespace

    double polar_angle(const Vertex& vertex, const Vertex& depot) {
        const double dx = vertex.x - depot.x;
        const double dy = vertex.y - depot.y;
        if (dx == 0.0 && dy == 0.0) return 0.0;  // coincident with the depot by convention
        return std::atan2(dy, dx);
    }

    FeatureVector feature_vector(const Vertex& vertex, const Vertex& depot) {
        FeatureVector f;
        f.x = vertex.x;
        f.y = vertex.y;
        f.theta = polar_angle(vertex, depot);
        f.ready = vertex.ready;
        f.due = vertex.due;
        f.service = vertex.service;
        f.demand = vertex.demand;
        return f;
    }

    double spatial_similarity(const FeatureVector& a, const FeatureVector& b, const SimilarityConfig& config) {
        const double dx = b.x - a.x;
        const double dy = b.y - a.y;
        const double dt = angle_difference(b.theta, a.theta, config.wrap_angle_diff);
        return std::sqrt(dx * dx + dy * dy + config.angle_weight * dt * dt);
    }

    double scheduling_flexibility(const FeatureVector& from, const FeatureVector& to, double travel_time) {
        return to.due - (from.ready + from.service + travel_time);
    }

    double min_waiting(const FeatureVector& from, const FeatureVector& to, double travel_time) {
        return std::max(to.ready - (from.due + from.service + travel_time), 0.0);
    }

    double std_distance(double spatial, double flexibility, double waiting, double demand_from, double demand_to,
                        double horizon, double capacity) {
        return spatial * (2.0 - (flexibility - waiting) / horizon + (demand_from + demand_to) / capacity);
    }

    double std_distance_between(const FeatureVector& from, const FeatureVector& to, const SimilarityConfig& config,
                                double horizon, double capacity) {
        const double spatial = spatial_similarity(from, to, config);
        const double travel = std::sqrt((to.x - from.x) * (to.x - from.x) + (to.y - from.y) * (to.y - from.y));
        const double flexibility = scheduling_flexibility(from, to, travel);
        const double waiting = min_waiting(from, to, travel);
        return std_distance(spatial, flexibility, waiting, from.demand, to.demand, horizon, capacity);
    }

    SimilarityMatrix::SimilarityMatrix(int customers, SimilarityConfig config, double horizon, double capacity)
        : n(customers), config_(config), horizon_(horizon), capacity_(capacity) {
        if (horizon_ <= 0.0) throw std::invalid_argument("depot operating window must have positive width");
        const std::size_t cells = static_cast<std::size_t>(n) * n;
        directed_.assign(cells, 0.0);
        symmetric_.assign(cells, 0.0);
        spatial_.assign(cells, 0.0);
        flexibility_.assign(cells, 0.0);
        waiting_.assign(cells, 0.0);
    }

    SimilarityMatrix build_similarity_matrix(const Instance& instance, const SimilarityConfig& config) {
        const int n = instance.customers();
        SimilarityMatrix m(n, config, instance.horizon(), instance.capacity);
        m.features_.reserve(n + 1);
        for (int id = 0; id <= n; ++id) m.features_.push_back(feature_vector(instance.vertex(id), instance.depot()));

        for (int i = 1; i <= n; ++i) {
            const FeatureVector& fi = m.features_[i];
            for (int j = 1; j <= n; ++j) {
                const FeatureVector& fj = m.features_[j];
                const std::size_t at = m.index(i, j);
                const double travel = instance.travel_time(i, j);
                const double spatial = spatial_similarity(fi, fj, config);
                const double flexibility = scheduling_flexibility(fi, fj, travel);
                const double waiting = min_waiting(fi, fj, travel);
                m.spatial_[at] = spatial;
                m.flexibility_[at] = flexibility;
                m.waiting_[at] = waiting;
                m.directed_[at] = std_distance(spatial, flexibility, waiting, fi.demand, fj.demand, m.horizon_,
                                               m.capacity_);
            }
        }
        for (int i = 1; i <= n; ++i)
            for (int j = 1; j <= n; ++j)
                m.symmetric_[m.index(i, j)] = std::min(m.directed_[m.index(i, j)], m.directed_[m.index(j, i)]);
        return m;
    }

    SimilarityMatrix build_cost_similarity_matrix(const Instance& instance) {
        const int n = instance.customers();
        SimilarityMatrix m(n, SimilarityConfig{0.0, false}, instance.horizon(), instance.capacity);
        m.features_.reserve(n + 1);
        for (int id = 0; id <= n; ++id) m.features_.push_back(feature_vector(instance.vertex(id), instance.depot()));

        for (int i = 1; i <= n; ++i) {
            const FeatureVector& fi = m.features_[i];
            for (int j = 1; j <= n; ++j) {
                const FeatureVector& fj = m.features_[j];
                const std::size_t at = m.index(i, j);
                const double travel = instance.travel_time(i, j);
                const double cost = instance.cost(i, j);
                m.spatial_[at] = cost;
                m.flexibility_[at] = scheduling_flexibility(fi, fj, travel);
                m.waiting_[at] = min_waiting(fi, fj, travel);
                m.directed_[at] = cost;
                m.symmetric_[at] = cost;
            }
        }
        return m;
    }

    void dump_similarity(const SimilarityMatrix& matrix, const std::string& binary_path,
                         const std::string& sidecar_path) {
        const int n = matrix.customers();
        std::vector<double> rows(static_cast<std::size_t>(n) * n);
        for (int i = 1; i <= n; ++i)
            for (int j = 1; j <= n; ++j) rows[static_cast<std::size_t>(i - 1) * n + (j - 1)] = matrix.symmetric(i, j);

        std::ofstream out(binary_path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write similarity dump: " + binary_path);
        out.write(reinterpret_cast<const char*>(rows.data()),
                  static_cast<std::streamsize>(rows.size() * sizeof(double)));
        out.close();

        nlohmann::ordered_json sidecar;
        sidecar["n"] = n;
        sidecar["angle_weight"] = matrix.config().angle_weight;
        char checksum[32];
        std::snprintf(checksum, sizeof(checksum), "%016llx",
                      static_cast<unsigned long long>(fnv1a(rows.data(), rows.size() * sizeof(double))));
        sidecar["checksum"] = checksum;
        std::ofstream side(sidecar_path);
        if (!side) throw std::runtime_error("cannot write similarity sidecar: " + sidecar_path);
        side << sidecar.dump(2) << "\n";
    }

    std::vector<double> load_similarity_dump(const std::string& binary_path, const std::string& sidecar_path) {
        std::ifstream side(sidecar_path);
        if (!side) throw std::runtime_error("cannot read similarity sidecar: " + sidecar_path);
        const auto sidecar = nlohmann::json::parse(side);
        const int n = sidecar.at("n").get<int>();
        const std::string expected = sidecar.at("checksum").get<std::string>();

        std::vector<double> rows(static_cast<std::size_t>(n) * n);
        std::ifstream in(binary_path, std::ios::binary);
        if (!in) throw std::runtime_error("cannot read similarity dump: " + binary_path);
        in.read(reinterpret_cast<char*>(rows.data()), static_cast<std::streamsize>(rows.size() * sizeof(double)));
        if (in.gcount() != static_cast<std::streamsize>(rows.size() * sizeof(double)))
            throw std::runtime_error("similarity dump truncated: " + binary_path);

        char actual[32];
        std::snprintf(actual, sizeof(actual), "%016llx",
                      static_cast<unsigned long long>(fnv1a(rows.data(), rows.size() * sizeof(double))));
        if (expected != actual)
            throw std::runtime_error("similarity dump checksum mismatch for " + binary_path);
        return rows;
    }

}  // namespace dri
