#include "fcmvrp/branch_and_bound.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <memory>
#include <queue>

#include "fcmvrp/errors.hpp"
#include "fcmvrp/lp_format.hpp"

namespace fcmvrp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kIntTol = 1e-6;

struct Decision {
    int var;
    double value; // 0 or 1
    std::shared_ptr<const Decision> parent;
};

struct Node {
    double bound;
    int depth;
    long id;
    std::shared_ptr<const Decision> decisions;
    std::shared_ptr<const Basis> warm;
};

struct NodeOrder {
    bool operator()(const Node& a, const Node& b) const {
        if (a.bound != b.bound) return a.bound > b.bound; // min-bound first
        if (a.depth != b.depth) return a.depth < b.depth; // deeper first
        return a.id > b.id;                               // older first
    }
};

} // namespace

const char* to_string(MipStatus s) {
    switch (s) {
        case MipStatus::Optimal: return "optimal";
        case MipStatus::Feasible: return "feasible";
        case MipStatus::Unknown: return "unknown";
        case MipStatus::Infeasible: return "infeasible";
    }
    return "?";
}

void SolverLimits::validate() const {
    if (!(time_limit > 0.0)) throw ValidationError("time_limit must be positive");
    if (!(rel_gap > 0.0)) throw ValidationError("rel_gap must be positive");
    if (!(abs_gap > 0.0)) throw ValidationError("abs_gap must be positive");
    if (node_limit && *node_limit <= 0) throw ValidationError("node_limit must be positive");
}

MipResult solve_mip(const MilpModel& model, const SolverLimits& limits) {
    MipOptions options;
    options.limits = limits;
    return solve_mip(model, options);
}

MipResult solve_mip(const MilpModel& model, const MipOptions& options) {
    options.limits.validate();
    const auto t0 = std::chrono::steady_clock::now();
    auto elapsed = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };

    MipResult res;
    const int n = model.num_variables();
    std::vector<int> binaries;
    for (int j = 0; j < n; ++j)
        if (model.variable(j).kind == VarKind::Binary) binaries.push_back(j);

    std::vector<double> root_lo(n), root_up(n);
    for (int j = 0; j < n; ++j) {
        root_lo[j] = model.variable(j).lower;
        root_up[j] = model.variable(j).upper;
    }

    LpEngine engine(model);

    auto node_bounds = [&](const std::shared_ptr<const Decision>& d, std::vector<double>& lo,
                           std::vector<double>& up) {
        lo = root_lo;
        up = root_up;
        for (const Decision* p = d.get(); p; p = p->parent.get()) {
            lo[p->var] = p->value;
            up[p->var] = p->value;
        }
    };

    auto dump_node = [&](long id, const std::vector<double>& lo, const std::vector<double>& up) {
        if (options.node_dump_dir.empty()) return;
        MilpModel m;
        for (const auto& v : model.variables())
            m.add_variable(v.name, v.kind, lo[v.id], up[v.id], v.objective_coeff);
        for (const auto& c : model.constraints()) m.add_constraint(c);
        write_lp_file(m, options.node_dump_dir + "/node_" + std::to_string(id) + ".lp");
    };

    std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
    long next_id = 0;
    double incumbent_obj = kInf;
    std::vector<double> incumbent;
    double best_bound = -kInf;

    open.push(Node{-kInf, 0, next_id++, nullptr, nullptr});
    bool root_solved = false;
    bool interrupted = false;
    std::string stop_reason;

    std::vector<double> lo, up;
    while (!open.empty()) {
        if (elapsed() > options.limits.time_limit) {
            interrupted = true;
            stop_reason = "time limit";
            best_bound = std::max(best_bound, open.top().bound);
            break;
        }
        if (options.limits.node_limit && res.nodes_explored >= *options.limits.node_limit) {
            interrupted = true;
            stop_reason = "node limit";
            best_bound = std::max(best_bound, open.top().bound);
            break;
        }
        Node node = open.top();
        open.pop();

        const double cutoff =
            incumbent_obj -
            std::max(options.limits.abs_gap, options.limits.rel_gap * std::abs(incumbent_obj));
        if (root_solved && node.bound >= cutoff) continue; // pruned by bound

        node_bounds(node.decisions, lo, up);
        dump_node(node.id, lo, up);
        LpEngine::Result lp = engine.solve(lo, up, node.warm.get());
        if (lp.status == LpStatus::IterationLimit || lp.status == LpStatus::NumericalFailure) {
            lp = engine.solve(lo, up, nullptr); // retry cold
        }
        ++res.nodes_explored;
        res.lp_iterations += lp.iterations;

        if (!root_solved) {
            root_solved = true;
            if (lp.status == LpStatus::Infeasible) {
                res.status = MipStatus::Infeasible;
                res.root_lb = kInf;
                res.best_bound = kInf;
                res.wall_time = elapsed();
                return res;
            }
            if (lp.status != LpStatus::Optimal) {
                res.status = MipStatus::Unknown;
                res.diagnostic = "root LP " + std::string(to_string(lp.status)) +
                                 (lp.diagnostic.empty() ? "" : ": " + lp.diagnostic);
                res.wall_time = elapsed();
                return res;
            }
            res.root_lb = lp.objective;
            best_bound = lp.objective;
        }

        if (lp.status == LpStatus::Infeasible) continue;
        if (lp.status != LpStatus::Optimal) {
            res.status = MipStatus::Unknown;
            res.diagnostic = "node " + std::to_string(node.id) + " LP " +
                             std::string(to_string(lp.status)) +
                             (lp.diagnostic.empty() ? "" : ": " + lp.diagnostic);
            res.wall_time = elapsed();
            res.best_bound = best_bound;
            return res;
        }

        const double bound = std::max(node.bound, lp.objective);
        best_bound = std::max(best_bound, open.empty() ? bound : std::min(bound, open.top().bound));
        if (bound >= cutoff) continue;

        // branching candidate
        int branch_var = -1;
        double branch_score = -1.0;
        for (int j : binaries) {
            const double v = lp.values[j];
            const double frac = std::min(v - std::floor(v), std::ceil(v) - v);
            if (frac <= kIntTol) continue;
            const double score = std::min(v, 1.0 - v);
            if (options.branch_rule == BranchRule::LowestIndex) {
                branch_var = j;
                break;
            }
            if (score > branch_score) {
                branch_score = score;
                branch_var = j;
            }
        }

        if (branch_var < 0) {
            // integral: candidate incumbent (LP-feasible by construction)
            if (lp.objective < incumbent_obj - 1e-12) {
                incumbent_obj = lp.objective;
                incumbent = lp.values;
            }
            continue;
        }

        auto warm = std::make_shared<const Basis>(std::move(lp.basis));
        for (double fix : {0.0, 1.0}) {
            auto dec = std::make_shared<const Decision>(Decision{branch_var, fix, node.decisions});
            open.push(Node{bound, node.depth + 1, next_id++, dec, warm});
        }
    }

    res.wall_time = elapsed();
    if (incumbent.empty()) {
        if (interrupted) {
            res.status = MipStatus::Unknown;
            res.diagnostic = stop_reason;
            res.best_bound = best_bound;
        } else {
            res.status = MipStatus::Infeasible;
            res.best_bound = kInf;
        }
        return res;
    }
    res.incumbent_objective = incumbent_obj;
    res.incumbent_values = std::move(incumbent);
    if (interrupted) {
        res.status = MipStatus::Feasible;
        res.diagnostic = stop_reason;
        res.best_bound = std::min(best_bound, incumbent_obj);
    } else {
        res.status = MipStatus::Optimal;
        res.best_bound = incumbent_obj;
    }
    res.best_bound = std::max(res.best_bound, res.root_lb);
    return res;
}

double root_lb(const MilpModel& model) {
    LpSolution s = solve_lp(relax(model));
    if (s.status != LpStatus::Optimal)
        throw Error(std::string("root LP not optimal: ") + to_string(s.status) +
                    (s.diagnostic.empty() ? "" : " (" + s.diagnostic + ")"));
    return s.objective;
}

} // namespace fcmvrp
