#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dri/pipeline.hpp"

// Benchmark harness: batch runs over instance sets, best-known-solution
// comparison, deterministic CSV emission, and the oracle self-check suite.
namespace dri {

    // Best-known costs keyed by instance name, loaded from a user-supplied
    // CSV (`instance,cost` with an optional header).
    struct BksTable {
        std::map<std::string, double> cost;

        std::optional<double> lookup(const std::string& instance) const {
            const auto it = cost.find(instance);
            if (it == cost.end()) return std::nullopt;
            return it->second;
        }
    };

    BksTable parse_bks_csv(const std::string& text);
    BksTable load_bks_csv(const std::string& path);

    // Cartesian experiment description, usually read from a TOML file. Every
    // axis must stay non-empty; single-element axes pin a parameter.
    struct ExperimentGrid {
        std::vector<std::string> instance_patterns;  // glob patterns

        std::vector<int> q_values{0};  // 0 lets the q policy decide
        std::vector<std::string> methods{"k-medoids"};
        std::vector<double> angle_weights{1.0};
        std::vector<double> alphas{0.8};
        std::vector<double> thetas{60.0};
        std::vector<int> subproblem_neighbors{5};
        std::vector<int> customer_neighbors{10};
        std::vector<double> rhos{1.0};
        std::vector<std::string> strategies{"steepest"};
        std::vector<std::string> metrics{"std"};
        std::vector<std::uint64_t> seeds{1};

        // Fixed (non-axis) settings.
        std::string solver;  // empty = built-in baseline
        std::string q_policy = "solver";
        int q_target_size = 500;
        std::string linkage = "average";
        double kappa = 2.0;
        bool concurrent_routing = false;

        // Number of configurations (product of the axis sizes, seeds apart).
        int configurations() const;
    };

    ExperimentGrid parse_grid(const std::string& toml_text);
    ExperimentGrid load_grid(const std::string& path);

    // Expands glob patterns into a sorted, duplicate-free path list.
    std::vector<std::string> expand_patterns(const std::vector<std::string>& patterns);

    // The DriConfig of one grid configuration index (0-based, row-major over
    // the axes in declaration order).
    DriConfig grid_config(const ExperimentGrid& grid, int config_index);

    // One grid cell result. Gap fields are absent when the BKS table has no
    // entry for the instance.
    struct GridRow {
        std::string instance;
        int customers = 0;
        int config = 0;
        std::uint64_t seed = 0;
        RunReport report;
        bool failed = false;
        std::string error;
    };

    struct GridOutput {
        std::vector<GridRow> rows;
        std::string csv;          // deterministic: no wall-clock columns
        std::string summary_csv;  // per-configuration class means of best-of-seeds
        nlohmann::ordered_json sidecar;  // timings and grid echo (not deterministic)
        int failures = 0;
    };

    // Runs every (instance, configuration, seed) cell, optionally across
    // worker threads. Rows come back in deterministic order regardless of
    // scheduling.
    GridOutput run_grid(const ExperimentGrid& grid, const BksTable& bks, int workers = 1);

    // Self-check suite: reference oracles cross-checking the production code
    // on generated fixtures (including one deliberately corrupted negative
    // control).
    struct OracleCheck {
        std::string name;
        bool passed = false;
        std::string detail;
    };

    struct OracleReport {
        std::vector<OracleCheck> checks;
        bool all_passed() const {
            for (const OracleCheck& c : checks)
                if (!c.passed) return false;
            return true;
        }
    };

    OracleReport oracle_suite();
    std::string oracle_report_text(const OracleReport& report);

}  // namespace dri
