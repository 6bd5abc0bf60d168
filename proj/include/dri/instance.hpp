#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

// VRPTW instance representation: vertices with demands and time windows, a
// homogeneous fleet with capacity, and dense cost/travel-time matrices.
// Index 0 is always the depot; customers are 1..n.
namespace dri {

    // One vertex of the routing graph (depot or customer).
    struct Vertex {
        int id = 0;
        double x = 0.0;
        double y = 0.0;
        double demand = 0.0;
        double ready = 0.0;    // earliest start of service
        double due = 0.0;      // latest start of service
        double service = 0.0;  // service duration
    };

    // How coordinates are turned into costs. Benchmark conventions differ;
    // exact double-precision Euclidean is the default.
    enum class DistanceConvention { exact, round_2_decimals, truncate_1_decimal };

    struct ParseError : std::runtime_error {
        int line;
        ParseError(int line_, const std::string& what_) : std::runtime_error(what_), line(line_) {}
    };

    class Instance {
    public:
        std::string name;
        std::vector<Vertex> vertices;  // [0] depot, [1..n] customers
        int fleet_size = 0;            // available vehicles m
        double capacity = 0.0;         // vehicle capacity Q

        // Total number of vertices (n + 1).
        int size() const { return static_cast<int>(vertices.size()); }

        // Number of customers n.
        int customers() const { return size() - 1; }

        const Vertex& depot() const { return vertices[0]; }
        const Vertex& vertex(int i) const { return vertices[i]; }

        // Width of the depot's operating window, l_w - e_w.
        double horizon() const { return depot().due - depot().ready; }

        double cost(int i, int j) const { return cost_matrix[i * size() + j]; }
        double travel_time(int i, int j) const { return time_matrix[i * size() + j]; }

        double total_demand() const;

        // Fills both matrices from coordinates (cost = travel time = planar
        // distance under the chosen convention) and validates invariants.
        void finalize(DistanceConvention convention = DistanceConvention::exact);

        DistanceConvention convention() const { return convention_used; }

    private:
        std::vector<double> cost_matrix;
        std::vector<double> time_matrix;
        DistanceConvention convention_used = DistanceConvention::exact;
    };

    // Parses the Gehring-Homberger/Solomon text layout. Throws ParseError with
    // a line number on malformed input.
    Instance parse_instance(const std::string& text,
                            DistanceConvention convention = DistanceConvention::exact);

    // Reads and parses an instance file.
    Instance load_instance(const std::string& path,
                           DistanceConvention convention = DistanceConvention::exact);

    // Writes an instance back to the same text layout (full precision).
    std::string instance_to_text(const Instance& instance);

    // A depot-to-depot tour with its forward schedule.
    struct ScheduledRoute {
        int vehicle = 0;
        std::vector<int> visits;       // customer ids, depot implicit at both ends
        std::vector<double> start;     // start of service per visit
        double load = 0.0;             // total demand on board
        double distance = 0.0;         // sum of edge costs including depot legs
        double depot_return = 0.0;     // arrival time back at the depot
    };

    // Why a visit sequence cannot be scheduled.
    struct Infeasibility {
        enum class Kind { time_window, capacity, depot_closing };
        Kind kind;
        int position;  // visit index in the sequence; -1 for the depot return leg
        int customer;  // offending customer id; 0 for the depot return leg
        std::string message() const;
    };

    // Outcome of forward schedule propagation: a route or the first violation.
    struct ScheduleResult {
        std::optional<ScheduledRoute> route;
        std::optional<Infeasibility> reason;
        bool feasible() const { return route.has_value(); }
    };

    // Forward recursion: service at j starts at max(e_j, T_prev + s_prev + t),
    // with the vehicle leaving the depot at e_w. Checks time windows, capacity
    // and the depot closing time, and reports the first violation found.
    ScheduleResult propagate_schedule(const Instance& instance, const std::vector<int>& visits);

    // A complete (or partial) set of routes.
    struct Solution {
        std::string instance_name;
        std::vector<ScheduledRoute> routes;
        std::vector<int> origin;     // subproblem tag per route; -1 when undecomposed
        double total_cost = 0.0;     // cached sum of route distances
        bool fleet_feasible = true;  // route count within the available fleet
        std::vector<std::string> violations;
    };

    // Total distance, recomputed from the routes (not the cached field).
    double solution_cost(const Solution& solution);

    struct FeasibilityReport {
        bool feasible = false;      // all routes schedulable, every customer exactly once
        bool fleet_feasible = false;
        std::vector<std::string> violations;
    };

    // Full re-validation of a solution against its instance: schedules, loads,
    // customer coverage, fleet size.
    FeasibilityReport verify_solution(const Instance& instance, const Solution& solution);

    // Stable-order JSON serialization of a solution (byte-identical for equal
    // solutions) and its inverse.
    std::string solution_to_json(const Solution& solution);
    Solution solution_from_json(const std::string& text);

}  // namespace dri
