#ifndef FCMVRP_SIMPLEX_HPP
#define FCMVRP_SIMPLEX_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "fcmvrp/milp.hpp"

namespace fcmvrp {

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit, NumericalFailure };

const char* to_string(LpStatus s);

/// Optimal solutions carry a dual certificate: row_duals y and
/// reduced_costs d = c - A^T y satisfy dual feasibility, and the bound-dual
/// objective matches the primal objective (weak duality), which is what
/// check_certificate verifies.
struct LpSolution {
    LpStatus status = LpStatus::NumericalFailure;
    double objective = 0.0;
    std::vector<double> values;        // one per structural variable
    std::vector<double> row_duals;     // one per constraint
    std::vector<double> reduced_costs; // one per structural variable
    int iterations = 0;
    std::string diagnostic;            // set on numerical failure
};

struct SimplexOptions {
    double feas_tol = 1e-7;   // row residual tolerance
    double bound_tol = 1e-9;  // variable bound tolerance
    double dual_tol = 1e-9;   // reduced-cost tolerance
    int max_iterations = 0;   // 0 = scale with model size
};

/// Nonbasic variables sit at a bound; free nonbasics sit at zero.
enum class VarStatus : std::uint8_t { AtLower, AtUpper, Basic, FreeNonbasic };
using Basis = std::vector<VarStatus>; // structurals then one slack per row

/// Bounded-variable primal simplex bound to one model's constraint matrix.
/// Binary variables are treated as continuous on their bounds (the caller
/// relaxes or fixes them through the per-solve bound arrays).
///
/// Feasibility search runs in two layers: a composite phase 1 that repairs
/// (warm) bases cheaply, and a definitive artificial-pair LP (fixed costs,
/// so the Bland fallback provably terminates) that is the only component
/// allowed to declare infeasibility. Deterministic: a fixed model, bounds
/// and warm basis always replay the same pivot sequence.
class LpEngine {
public:
    explicit LpEngine(const MilpModel& model, SimplexOptions options = {});

    struct Result {
        LpStatus status = LpStatus::NumericalFailure;
        double objective = 0.0;
        std::vector<double> values; // structural variables only
        std::vector<double> row_duals;
        std::vector<double> reduced_costs;
        Basis basis;
        int iterations = 0;
        std::string diagnostic;
    };

    Result solve(const std::vector<double>& lower, const std::vector<double>& upper,
                 const Basis* warm_start = nullptr);

    /// Bounds as declared on the model.
    Result solve(const Basis* warm_start = nullptr);

    int num_rows() const { return nrows_; }
    int num_structurals() const { return nstruct_; }

private:
    struct Eta {
        int pos;
        double pivot;
        std::vector<std::pair<int, double>> other; // (basis position, value)
    };

    struct Lu {
        int m = 0;
        std::vector<int> Lp, Li;
        std::vector<double> Lx;
        std::vector<int> Up, Ui;
        std::vector<double> Ux;
        std::vector<double> Udiag;
        std::vector<int> prow, rowpos, qcol;
    };

    // immutable problem data; column layout: structurals, slacks (+e_r),
    // plus-artificials (+e_r), minus-artificials (-e_r)
    int nrows_ = 0, nstruct_ = 0, ncols_ = 0;
    std::vector<int> Ap_, Ai_;
    std::vector<double> Ax_; // structural columns, CSC
    std::vector<double> rhs_;
    std::vector<double> slack_lb_, slack_ub_;
    std::vector<double> obj_; // real objective (zero on slacks/artificials)
    std::vector<double> model_lb_, model_ub_;
    SimplexOptions opts_;

    bool is_artificial(int j) const { return j >= nstruct_ + nrows_; }
    int singleton_row(int j) const;      // row of a slack/artificial column
    double singleton_coeff(int j) const; // +1 or -1

    // per-solve state
    std::vector<double> lb_, ub_; // full bounds incl slacks and artificials
    std::vector<VarStatus> vstat_;
    std::vector<int> basic_;
    std::vector<double> xval_;
    Lu lu_;
    std::vector<Eta> etas_;
    bool art_mode_ = false;
    std::vector<double> scratch_a_, scratch_b_; // solve work vectors

    void column(int j, std::vector<std::pair<int, double>>& out) const;
    bool factorize();
    bool refactor();
    void compute_basic_values();
    void start_artificial_phase();
    void close_artificial_phase();
    void ftran(std::vector<double>& v); // original-row-space in, position-space out
    void btran(std::vector<double>& c); // position-space in, original-row-space out
    double infeasibility() const;
    double cost_of(int j, bool phase1) const;
};

LpSolution solve_lp(const MilpModel& model);
LpSolution solve_lp(const MilpModel& model, const SimplexOptions& options);

struct CertificateReport {
    double row_violation = 0.0;
    double bound_violation = 0.0;
    double dual_violation = 0.0;
    double duality_gap = 0.0; // relative
    double residual() const;
};

/// Algebraic optimality check: primal feasibility, dual feasibility of
/// (row_duals, reduced costs), and the weak-duality gap, all computed from
/// the model data alone, independent of the pivot path that produced them.
CertificateReport check_certificate(const MilpModel& model, const LpSolution& solution);

} // namespace fcmvrp

#endif
