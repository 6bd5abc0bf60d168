#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dri/instance.hpp"

// Spatial-temporal-demand (STD) similarity between customers: planar distance
// augmented with a polar-angle term, penalized by scheduling flexibility,
// unavoidable waiting, and relative demand. Smaller values mean "more similar
// / cheaper to serve consecutively". Drives both clustering and the pruning
// of local-search candidates.
namespace dri {

    // Everything the metric needs to know about one vertex.
    struct FeatureVector {
        double x = 0.0;
        double y = 0.0;
        double theta = 0.0;  // polar angle around the depot, radians in (-pi, pi]
        double ready = 0.0;
        double due = 0.0;
        double service = 0.0;
        double demand = 0.0;
    };

    struct SimilarityConfig {
        double angle_weight = 1.0;     // weight of the polar-angle term
        bool wrap_angle_diff = false;  // use circular angle differences (decentral depots)
    };

    // Polar angle of a vertex around the depot via the two-argument
    // arctangent; 0 when the vertex coincides with the depot.
    double polar_angle(const Vertex& vertex, const Vertex& depot);

    FeatureVector feature_vector(const Vertex& vertex, const Vertex& depot);

    // Planar distance extended by the weighted angle difference.
    double spatial_similarity(const FeatureVector& a, const FeatureVector& b, const SimilarityConfig& config);

    // Slack between the latest service start at the head and the earliest
    // possible arrival from the tail; negative marks an infeasible edge.
    double scheduling_flexibility(const FeatureVector& from, const FeatureVector& to, double travel_time);

    // Unavoidable waiting when leaving the tail as late as possible; never negative.
    double min_waiting(const FeatureVector& from, const FeatureVector& to, double travel_time);

    // The directed STD distance assembled from its parts. `horizon` is the
    // width of the depot window, `capacity` the vehicle capacity.
    double std_distance(double spatial, double flexibility, double waiting, double demand_from, double demand_to,
                        double horizon, double capacity);

    // Directed STD distance between two feature vectors, with travel time
    // derived from the spatial distance (unit speed, the benchmark
    // convention). Used for synthetic points such as fuzzy cluster centers.
    double std_distance_between(const FeatureVector& from, const FeatureVector& to, const SimilarityConfig& config,
                                double horizon, double capacity);

    // Dense pairwise similarity structure over the customers of one instance.
    // All accessors take customer ids (1..n).
    class SimilarityMatrix {
    public:
        SimilarityMatrix() = default;
        SimilarityMatrix(int customers, SimilarityConfig config, double horizon, double capacity);

        int customers() const { return n; }
        double horizon() const { return horizon_; }
        double capacity() const { return capacity_; }
        const SimilarityConfig& config() const { return config_; }
        const std::vector<FeatureVector>& features() const { return features_; }
        const FeatureVector& feature(int id) const { return features_[id]; }

        double directed(int i, int j) const { return directed_[index(i, j)]; }
        double symmetric(int i, int j) const { return symmetric_[index(i, j)]; }
        double spatial(int i, int j) const { return spatial_[index(i, j)]; }
        double flexibility(int i, int j) const { return flexibility_[index(i, j)]; }
        double waiting(int i, int j) const { return waiting_[index(i, j)]; }

        friend SimilarityMatrix build_similarity_matrix(const Instance&, const SimilarityConfig&);
        friend SimilarityMatrix build_cost_similarity_matrix(const Instance&);

    private:
        std::size_t index(int i, int j) const {
            return static_cast<std::size_t>(i - 1) * n + (j - 1);
        }

        int n = 0;
        SimilarityConfig config_;
        double horizon_ = 0.0;
        double capacity_ = 0.0;
        std::vector<FeatureVector> features_;  // indexed by vertex id, [0] is the depot
        std::vector<double> directed_;         // n x n, customer ids shifted by one
        std::vector<double> symmetric_;        // min of the two directions
        std::vector<double> spatial_;
        std::vector<double> flexibility_;
        std::vector<double> waiting_;
    };

    // Full STD structure for an instance: O(n^2) time and memory.
    SimilarityMatrix build_similarity_matrix(const Instance& instance, const SimilarityConfig& config);

    // Plain travel-cost stand-in with the same interface: directed, symmetric
    // and spatial entries all equal c_{i,j}. Used as the comparison baseline.
    SimilarityMatrix build_cost_similarity_matrix(const Instance& instance);

    // Writes the symmetrized matrix row-major as raw doubles next to a JSON
    // sidecar (n, angle weight, checksum) for cross-run reuse; the loader
    // verifies the checksum.
    void dump_similarity(const SimilarityMatrix& matrix, const std::string& binary_path,
                         const std::string& sidecar_path);
    std::vector<double> load_similarity_dump(const std::string& binary_path, const std::string& sidecar_path);

}  // namespace dri
