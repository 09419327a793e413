#ifndef FCMVRP_BRANCH_AND_BOUND_HPP
#define FCMVRP_BRANCH_AND_BOUND_HPP

#include <optional>
#include <string>
#include <vector>

#include "fcmvrp/milp.hpp"
#include "fcmvrp/simplex.hpp"

namespace fcmvrp {

enum class MipStatus { Optimal, Feasible, Unknown, Infeasible };

const char* to_string(MipStatus s);

struct SolverLimits {
    double time_limit = 3600.0; // seconds
    double rel_gap = 1e-6;
    double abs_gap = 1e-9;
    std::optional<long> node_limit;

    void validate() const;
};

enum class BranchRule { MostFractional, LowestIndex };

struct MipOptions {
    SolverLimits limits;
    BranchRule branch_rule = BranchRule::MostFractional;
    /// When nonempty, every node LP is dumped there as node_<id>.lp.
    std::string node_dump_dir;
};

struct MipResult {
    MipStatus status = MipStatus::Unknown;
    double incumbent_objective = 0.0;
    std::vector<double> incumbent_values; // empty when no incumbent
    double root_lb = 0.0;
    double best_bound = 0.0;
    long nodes_explored = 0;
    double wall_time = 0.0;
    long lp_iterations = 0;
    double integrality_tol = 1e-6;
    double feasibility_tol = 1e-7;
    std::string diagnostic;

    bool has_incumbent() const { return !incumbent_values.empty(); }
};

/// Plain LP-based branch and bound over the binary variables: best-bound
/// node selection (ties to the deeper node, then lower node id) and
/// most-fractional branching (ties to the lower variable id) by default.
/// Single-threaded and deterministic; wall_time is the only
/// run-to-run-varying output.
MipResult solve_mip(const MilpModel& model, const SolverLimits& limits = {});
MipResult solve_mip(const MilpModel& model, const MipOptions& options);

/// Objective of the LP relaxation at the root node.
double root_lb(const MilpModel& model);

} // namespace fcmvrp

#endif
