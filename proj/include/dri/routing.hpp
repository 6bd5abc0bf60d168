#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "dri/decompose.hpp"
#include "dri/instance.hpp"

// Solves each sub-VRPTW independently within its time budget. Any solver can
// be plugged in through SolverInterface; a self-contained baseline solver
// (insertion construction plus intra-route improvement) ships in-tree.
namespace dri {

    class SolverInterface {
    public:
        virtual ~SolverInterface() = default;

        // Returns a solution for the instance using at most `fleet` vehicles
        // if possible; extra routes are allowed but flag fleet infeasibility.
        virtual Solution solve(const Instance& instance, int fleet, double budget_seconds, std::uint64_t seed) = 0;

        virtual bool respects_budget() const = 0;

        // Whether equal (instance, fleet, seed) yields identical solutions as
        // long as the budget does not cut work short.
        virtual bool deterministic() const = 0;

        virtual std::string name() const = 0;
    };

    struct BaselineSolverConfig {
        enum class Construction { insertion, savings };
        Construction construction = Construction::insertion;
        bool intra_improvement = true;
        int restarts = 3;  // insertion parameter variants tried within the budget
    };

    // Time-window-aware insertion (or savings) construction followed by
    // intra-route 2-opt/swap descent, all deterministic per seed.
    class BaselineSolver : public SolverInterface {
    public:
        explicit BaselineSolver(BaselineSolverConfig config = {});

        Solution solve(const Instance& instance, int fleet, double budget_seconds, std::uint64_t seed) override;
        bool respects_budget() const override { return true; }
        bool deterministic() const override { return true; }
        std::string name() const override { return "baseline"; }

    private:
        BaselineSolverConfig config;
    };

    // Runs an external executable per subproblem: argv = (instance path,
    // fleet, budget seconds, seed), solution JSON on stdout, nonzero exit
    // status means failure.
    class ExternalSolver : public SolverInterface {
    public:
        explicit ExternalSolver(std::string command);

        Solution solve(const Instance& instance, int fleet, double budget_seconds, std::uint64_t seed) override;
        bool respects_budget() const override { return false; }
        bool deterministic() const override { return false; }
        std::string name() const override { return "external:" + command; }

    private:
        std::string command;
    };

    // Solves every subproblem within its budget (clamped to at least one
    // second; the clamp is logged). A failing solver falls back to `fallback`
    // for that subproblem; a second failure aborts with the subproblem index.
    // Per-subproblem seeds are derived from `seed`.
    std::vector<Solution> solve_subproblems(const std::vector<SubProblem>& subproblems, SolverInterface& solver,
                                            const TimeBudget& budget, std::uint64_t seed,
                                            SolverInterface* fallback = nullptr, bool concurrent = false);

    // Re-indexes per-subproblem solutions to parent customer ids, tags route
    // origins, and re-verifies feasibility on the parent instance.
    Solution merge_solutions(const std::vector<Solution>& parts, const std::vector<SubProblem>& subproblems,
                             const Instance& parent);

}  // namespace dri
