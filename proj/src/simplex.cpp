#include "fcmvrp/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "fcmvrp/errors.hpp"

namespace fcmvrp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kRatioPivTol = 1e-11; // entries below this never block a step
constexpr double kWeakPivot = 1e-9;    // pivots below this trigger a refactor retry
constexpr double kLuPivTol = 1e-12;    // LU pivot acceptance threshold
constexpr int kEtaLimit = 96;          // basis updates between refactorizations
constexpr int kStallLimit = 300;       // degenerate iterations before Bland kicks in

} // namespace

const char* to_string(LpStatus s) {
    switch (s) {
        case LpStatus::Optimal: return "optimal";
        case LpStatus::Infeasible: return "infeasible";
        case LpStatus::Unbounded: return "unbounded";
        case LpStatus::IterationLimit: return "iteration_limit";
        case LpStatus::NumericalFailure: return "numerical_failure";
    }
    return "?";
}

LpEngine::LpEngine(const MilpModel& model, SimplexOptions options) : opts_(options) {
    if (model.num_variables() < 1) throw ModelError("LP requires at least one variable");
    nrows_ = model.num_constraints();
    nstruct_ = model.num_variables();
    ncols_ = nstruct_ + 3 * nrows_;

    std::vector<std::vector<std::pair<int, double>>> cols(nstruct_);
    rhs_.resize(nrows_);
    slack_lb_.resize(nrows_);
    slack_ub_.resize(nrows_);
    for (int r = 0; r < nrows_; ++r) {
        const auto& c = model.constraint(r);
        for (const auto& [id, v] : c.terms)
            if (v != 0.0) cols[id].emplace_back(r, v);
        rhs_[r] = c.rhs;
        switch (c.sense) {
            case Sense::Le: slack_lb_[r] = 0.0; slack_ub_[r] = kInf; break;
            case Sense::Ge: slack_lb_[r] = -kInf; slack_ub_[r] = 0.0; break;
            case Sense::Eq: slack_lb_[r] = 0.0; slack_ub_[r] = 0.0; break;
        }
    }
    Ap_.push_back(0);
    for (int j = 0; j < nstruct_; ++j) {
        for (const auto& [r, v] : cols[j]) {
            Ai_.push_back(r);
            Ax_.push_back(v);
        }
        Ap_.push_back(static_cast<int>(Ai_.size()));
    }
    obj_.assign(ncols_, 0.0);
    model_lb_.resize(nstruct_);
    model_ub_.resize(nstruct_);
    for (int j = 0; j < nstruct_; ++j) {
        const Variable& v = model.variable(j);
        obj_[j] = v.objective_coeff;
        model_lb_[j] = v.lower;
        model_ub_[j] = v.upper;
    }
}

int LpEngine::singleton_row(int j) const {
    if (j < nstruct_ + nrows_) return j - nstruct_;
    if (j < nstruct_ + 2 * nrows_) return j - nstruct_ - nrows_;
    return j - nstruct_ - 2 * nrows_;
}

double LpEngine::singleton_coeff(int j) const {
    return j >= nstruct_ + 2 * nrows_ ? -1.0 : 1.0;
}

void LpEngine::column(int j, std::vector<std::pair<int, double>>& out) const {
    out.clear();
    if (j < nstruct_) {
        for (int ii = Ap_[j]; ii < Ap_[j + 1]; ++ii) out.emplace_back(Ai_[ii], Ax_[ii]);
    } else {
        out.emplace_back(singleton_row(j), singleton_coeff(j));
    }
}

double LpEngine::cost_of(int j, bool phase1) const {
    if (art_mode_) return is_artificial(j) ? 1.0 : 0.0;
    if (phase1) return 0.0; // nonbasic phase-1 cost; basics are priced per violation
    return obj_[j];
}

// Left-looking LU with partial pivoting (Gilbert-Peierls style reachability
// DFS). Columns are processed sparsest-first; L rows keep original row ids,
// U rows are pivot steps. Returns false if some columns could not pivot;
// refactor() then swaps unpivotable columns for slacks of unpivoted rows.
bool LpEngine::factorize() {
    const int m = nrows_;
    lu_.m = m;
    lu_.Lp.assign(1, 0);
    lu_.Li.clear();
    lu_.Lx.clear();
    lu_.Up.assign(1, 0);
    lu_.Ui.clear();
    lu_.Ux.clear();
    lu_.Udiag.assign(m, 0.0);
    lu_.prow.assign(m, -1);
    lu_.rowpos.assign(m, -1);
    lu_.qcol.assign(m, -1);
    etas_.clear();
    if (m == 0) return true;

    std::vector<int> order(m);
    std::iota(order.begin(), order.end(), 0);
    auto nnz_of = [&](int pos) {
        const int j = basic_[pos];
        return j < nstruct_ ? Ap_[j + 1] - Ap_[j] : 1;
    };
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return nnz_of(a) < nnz_of(b); });

    std::vector<double> w(m, 0.0);
    std::vector<uint8_t> inpat(m, 0), mark(m, 0);
    std::vector<int> pattern, topo, stack, stack_child;
    pattern.reserve(m);
    topo.reserve(m);

    int steps = 0;
    bool complete = true;
    for (int idx = 0; idx < m; ++idx) {
        const int pos = order[idx];
        const int col = basic_[pos];
        pattern.clear();
        topo.clear();
        if (col < nstruct_) {
            for (int ii = Ap_[col]; ii < Ap_[col + 1]; ++ii) {
                w[Ai_[ii]] = Ax_[ii];
                inpat[Ai_[ii]] = 1;
                pattern.push_back(Ai_[ii]);
            }
        } else {
            const int r = singleton_row(col);
            w[r] = singleton_coeff(col);
            inpat[r] = 1;
            pattern.push_back(r);
        }
        // symbolic: reach all pivot steps whose rows appear, in reverse topo order
        for (size_t pi = 0; pi < pattern.size(); ++pi) { // pattern does not grow here
            const int k0 = lu_.rowpos[pattern[pi]];
            if (k0 < 0 || mark[k0]) continue;
            stack.assign(1, k0);
            stack_child.assign(1, lu_.Lp[k0]);
            mark[k0] = 1;
            while (!stack.empty()) {
                const int k = stack.back();
                bool descended = false;
                while (stack_child.back() < lu_.Lp[k + 1]) {
                    const int kk = lu_.rowpos[lu_.Li[stack_child.back()]];
                    ++stack_child.back();
                    if (kk >= 0 && !mark[kk]) {
                        mark[kk] = 1;
                        stack.push_back(kk);
                        stack_child.push_back(lu_.Lp[kk]);
                        descended = true;
                        break;
                    }
                }
                if (!descended && stack_child.back() >= lu_.Lp[k + 1]) {
                    topo.push_back(k);
                    stack.pop_back();
                    stack_child.pop_back();
                }
            }
        }
        // numeric elimination in topological order
        for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
            const int k = *it;
            const double val = w[lu_.prow[k]];
            if (val != 0.0) {
                lu_.Ui.push_back(k);
                lu_.Ux.push_back(val);
                for (int jj = lu_.Lp[k]; jj < lu_.Lp[k + 1]; ++jj) {
                    const int r = lu_.Li[jj];
                    if (!inpat[r]) {
                        inpat[r] = 1;
                        pattern.push_back(r);
                    }
                    w[r] -= lu_.Lx[jj] * val;
                }
            }
        }
        for (int k : topo) mark[k] = 0;
        // pivot among rows not yet pivoted
        int piv = -1;
        double pmax = 0.0;
        for (int r : pattern) {
            if (lu_.rowpos[r] >= 0) continue;
            const double a = std::abs(w[r]);
            if (a > pmax || (a == pmax && a > 0.0 && r < piv)) {
                pmax = a;
                piv = r;
            }
        }
        if (piv < 0 || pmax < kLuPivTol) {
            // dependent column: drop its U entries, leave the rows unpivoted
            lu_.Ui.resize(lu_.Up.back());
            lu_.Ux.resize(lu_.Up.back());
            complete = false;
            for (int r : pattern) {
                w[r] = 0.0;
                inpat[r] = 0;
            }
            continue;
        }
        const int k = steps++;
        const double pivval = w[piv]; // the cleanup loop below clears w as it goes
        lu_.prow[k] = piv;
        lu_.rowpos[piv] = k;
        lu_.qcol[k] = pos;
        lu_.Udiag[k] = pivval;
        lu_.Up.push_back(static_cast<int>(lu_.Ui.size()));
        for (int r : pattern) {
            if (lu_.rowpos[r] < 0 && w[r] != 0.0) {
                lu_.Li.push_back(r);
                lu_.Lx.push_back(w[r] / pivval);
            }
            w[r] = 0.0;
            inpat[r] = 0;
        }
        lu_.Lp.push_back(static_cast<int>(lu_.Li.size()));
    }
    return complete && steps == m;
}

bool LpEngine::refactor() {
    if (factorize()) return true;
    // swap unpivotable columns for slacks of unpivoted rows, then retry
    auto bound_status = [&](int j) {
        if (lb_[j] > -kInf) return VarStatus::AtLower;
        if (ub_[j] < kInf) return VarStatus::AtUpper;
        return VarStatus::FreeNonbasic;
    };
    std::vector<int> free_rows;
    for (int r = 0; r < nrows_; ++r)
        if (lu_.rowpos[r] < 0) free_rows.push_back(r);
    std::vector<uint8_t> pivoted(nrows_, 0);
    for (int k = 0; k < nrows_; ++k)
        if (lu_.qcol[k] >= 0) pivoted[lu_.qcol[k]] = 1;
    size_t next = 0;
    for (int pos = 0; pos < nrows_ && next < free_rows.size(); ++pos) {
        if (pivoted[pos]) continue;
        const int out = basic_[pos];
        vstat_[out] = bound_status(out);
        const int row = free_rows[next++];
        // prefer the slack; if the slack is already basic elsewhere use the
        // plus-artificial of that row (bounds [0,0] outside art mode)
        int sub = nstruct_ + row;
        if (vstat_[sub] == VarStatus::Basic) sub = nstruct_ + nrows_ + row;
        if (vstat_[sub] == VarStatus::Basic) sub = nstruct_ + 2 * nrows_ + row;
        basic_[pos] = sub;
        vstat_[sub] = VarStatus::Basic;
    }
    return factorize();
}

void LpEngine::ftran(std::vector<double>& v) {
    const int m = nrows_;
    if (m == 0) return;
    scratch_a_.resize(m);
    scratch_b_.assign(m, 0.0);
    std::vector<double>& t = scratch_a_;
    std::vector<double>& out = scratch_b_;
    for (int k = 0; k < m; ++k) t[k] = v[lu_.prow[k]];
    for (int k = 0; k < m; ++k) {
        const double val = t[k];
        if (val == 0.0) continue;
        for (int jj = lu_.Lp[k]; jj < lu_.Lp[k + 1]; ++jj)
            t[lu_.rowpos[lu_.Li[jj]]] -= lu_.Lx[jj] * val;
    }
    for (int k = m - 1; k >= 0; --k) {
        const double val = t[k] / lu_.Udiag[k];
        if (val != 0.0) {
            for (int jj = lu_.Up[k]; jj < lu_.Up[k + 1]; ++jj) t[lu_.Ui[jj]] -= lu_.Ux[jj] * val;
        }
        out[lu_.qcol[k]] = val;
    }
    for (const Eta& e : etas_) {
        const double piv = out[e.pos] / e.pivot;
        if (piv != 0.0)
            for (const auto& [p, val] : e.other) out[p] -= val * piv;
        out[e.pos] = piv;
    }
    v.swap(out);
}

void LpEngine::btran(std::vector<double>& c) {
    const int m = nrows_;
    if (m == 0) return;
    for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
        double t = c[it->pos];
        for (const auto& [p, val] : it->other) t -= val * c[p];
        c[it->pos] = t / it->pivot;
    }
    scratch_a_.resize(m);
    scratch_b_.resize(m);
    std::vector<double>& t = scratch_a_;
    std::vector<double>& y = scratch_b_;
    for (int k = 0; k < m; ++k) t[k] = c[lu_.qcol[k]];
    for (int k = 0; k < m; ++k) {
        double z = t[k];
        for (int jj = lu_.Up[k]; jj < lu_.Up[k + 1]; ++jj) z -= lu_.Ux[jj] * t[lu_.Ui[jj]];
        t[k] = z / lu_.Udiag[k];
    }
    for (int k = m - 1; k >= 0; --k) {
        double z = t[k];
        for (int jj = lu_.Lp[k]; jj < lu_.Lp[k + 1]; ++jj)
            z -= lu_.Lx[jj] * t[lu_.rowpos[lu_.Li[jj]]];
        t[k] = z;
    }
    for (int k = 0; k < m; ++k) y[lu_.prow[k]] = t[k];
    c.swap(y);
}

void LpEngine::compute_basic_values() {
    for (int j = 0; j < ncols_; ++j) {
        switch (vstat_[j]) {
            case VarStatus::AtLower: xval_[j] = lb_[j]; break;
            case VarStatus::AtUpper: xval_[j] = ub_[j]; break;
            case VarStatus::FreeNonbasic: xval_[j] = 0.0; break;
            case VarStatus::Basic: break;
        }
    }
    std::vector<double> r = rhs_;
    for (int j = 0; j < ncols_; ++j) {
        if (vstat_[j] == VarStatus::Basic || xval_[j] == 0.0) continue;
        const double x = xval_[j];
        if (j < nstruct_) {
            for (int ii = Ap_[j]; ii < Ap_[j + 1]; ++ii) r[Ai_[ii]] -= Ax_[ii] * x;
        } else {
            r[singleton_row(j)] -= singleton_coeff(j) * x;
        }
    }
    ftran(r);
    for (int pos = 0; pos < nrows_; ++pos) xval_[basic_[pos]] = r[pos];
}

double LpEngine::infeasibility() const {
    double sum = 0.0;
    for (int pos = 0; pos < nrows_; ++pos) {
        const int j = basic_[pos];
        const double x = xval_[j];
        if (x < lb_[j] - opts_.bound_tol)
            sum += lb_[j] - x;
        else if (x > ub_[j] + opts_.bound_tol)
            sum += x - ub_[j];
    }
    return sum;
}

// Definitive feasibility search: put one artificial per row into the basis
// so the starting point is feasible for the artificial LP (min sum of
// artificials, fixed costs). Its optimum is zero exactly when the original
// bounds admit a solution.
void LpEngine::start_artificial_phase() {
    art_mode_ = true;
    for (int r = 0; r < nrows_; ++r) {
        lb_[nstruct_ + nrows_ + r] = 0.0;
        ub_[nstruct_ + nrows_ + r] = kInf;
        lb_[nstruct_ + 2 * nrows_ + r] = 0.0;
        ub_[nstruct_ + 2 * nrows_ + r] = kInf;
    }
    for (int j = 0; j < ncols_; ++j) {
        if (is_artificial(j)) {
            vstat_[j] = VarStatus::AtLower;
            xval_[j] = 0.0;
            continue;
        }
        if (vstat_[j] != VarStatus::Basic) continue;
        // park ex-basics at their nearest finite bound
        if (lb_[j] > -kInf && ub_[j] < kInf)
            vstat_[j] = xval_[j] - lb_[j] <= ub_[j] - xval_[j] ? VarStatus::AtLower
                                                               : VarStatus::AtUpper;
        else if (lb_[j] > -kInf)
            vstat_[j] = VarStatus::AtLower;
        else if (ub_[j] < kInf)
            vstat_[j] = VarStatus::AtUpper;
        else
            vstat_[j] = VarStatus::FreeNonbasic;
    }
    // residuals decide which sign of artificial starts basic in each row
    std::vector<double> resid = rhs_;
    for (int j = 0; j < nstruct_ + nrows_; ++j) {
        double x = 0.0;
        switch (vstat_[j]) {
            case VarStatus::AtLower: x = lb_[j]; break;
            case VarStatus::AtUpper: x = ub_[j]; break;
            default: x = 0.0; break;
        }
        xval_[j] = x;
        if (x == 0.0) continue;
        if (j < nstruct_) {
            for (int ii = Ap_[j]; ii < Ap_[j + 1]; ++ii) resid[Ai_[ii]] -= Ax_[ii] * x;
        } else {
            resid[j - nstruct_] -= x;
        }
    }
    basic_.assign(nrows_, -1);
    for (int r = 0; r < nrows_; ++r) {
        const int art = resid[r] >= 0.0 ? nstruct_ + nrows_ + r : nstruct_ + 2 * nrows_ + r;
        basic_[r] = art;
        vstat_[art] = VarStatus::Basic;
        xval_[art] = std::abs(resid[r]);
    }
}

void LpEngine::close_artificial_phase() {
    art_mode_ = false;
    for (int r = 0; r < nrows_; ++r) {
        lb_[nstruct_ + nrows_ + r] = ub_[nstruct_ + nrows_ + r] = 0.0;
        lb_[nstruct_ + 2 * nrows_ + r] = ub_[nstruct_ + 2 * nrows_ + r] = 0.0;
    }
    for (int j = nstruct_ + nrows_; j < ncols_; ++j) {
        if (vstat_[j] != VarStatus::Basic) {
            vstat_[j] = VarStatus::AtLower;
            xval_[j] = 0.0;
        }
        // basic artificials sit at value ~0 and are pinned by their bounds
    }
}

LpEngine::Result LpEngine::solve(const Basis* warm_start) {
    return solve(model_lb_, model_ub_, warm_start);
}

LpEngine::Result LpEngine::solve(const std::vector<double>& lower,
                                 const std::vector<double>& upper, const Basis* warm_start) {
    if (static_cast<int>(lower.size()) != nstruct_ || static_cast<int>(upper.size()) != nstruct_)
        throw ModelError("bound arrays must cover every structural variable");
    lb_.assign(lower.begin(), lower.end());
    ub_.assign(upper.begin(), upper.end());
    lb_.insert(lb_.end(), slack_lb_.begin(), slack_lb_.end());
    ub_.insert(ub_.end(), slack_ub_.begin(), slack_ub_.end());
    lb_.insert(lb_.end(), 2 * nrows_, 0.0); // artificials closed outside art mode
    ub_.insert(ub_.end(), 2 * nrows_, 0.0);
    art_mode_ = false;
    for (int j = 0; j < nstruct_ + nrows_; ++j)
        if (lb_[j] > ub_[j])
            return Result{LpStatus::Infeasible, 0.0, {}, {}, {}, {}, 0, "inverted bounds"};

    auto bound_status = [&](int j) {
        if (lb_[j] > -kInf) return VarStatus::AtLower;
        if (ub_[j] < kInf) return VarStatus::AtUpper;
        return VarStatus::FreeNonbasic;
    };

    bool warm_ok = false;
    if (warm_start && (static_cast<int>(warm_start->size()) == ncols_ ||
                       static_cast<int>(warm_start->size()) == nstruct_ + nrows_)) {
        vstat_ = *warm_start;
        vstat_.resize(ncols_, VarStatus::AtLower);
        int nbasic = 0;
        for (int j = 0; j < ncols_; ++j) {
            if (vstat_[j] == VarStatus::Basic) {
                ++nbasic;
                continue;
            }
            // normalize statuses against the current bounds
            if (vstat_[j] == VarStatus::AtLower && lb_[j] == -kInf) vstat_[j] = bound_status(j);
            if (vstat_[j] == VarStatus::AtUpper && ub_[j] == kInf) vstat_[j] = bound_status(j);
            if (vstat_[j] == VarStatus::FreeNonbasic && (lb_[j] > -kInf || ub_[j] < kInf))
                vstat_[j] = bound_status(j);
        }
        warm_ok = (nbasic == nrows_);
    }
    if (!warm_ok) {
        vstat_.assign(ncols_, VarStatus::AtLower);
        for (int j = 0; j < nstruct_; ++j) vstat_[j] = bound_status(j);
        for (int r = 0; r < nrows_; ++r) vstat_[nstruct_ + r] = VarStatus::Basic;
    }
    basic_.clear();
    basic_.reserve(nrows_);
    for (int j = 0; j < ncols_; ++j)
        if (vstat_[j] == VarStatus::Basic) basic_.push_back(j);

    xval_.assign(ncols_, 0.0);

    Result res;
    if (!refactor()) {
        res.status = LpStatus::NumericalFailure;
        res.diagnostic = "basis factorization failed even after slack repair";
        return res;
    }
    compute_basic_values();

    const int max_iters =
        opts_.max_iterations > 0 ? opts_.max_iterations : 20000 + 12 * (nstruct_ + 2 * nrows_);
    // composite phase-1 pivots allowed before the artificial LP takes over
    const int composite_budget = 200 + nrows_;
    int iter = 0;
    int composite_phase1_iters = 0;
    int art_rounds = 0;
    bool bland = false;
    int stall = 0;
    double best_measure = kInf;
    int measure_state = -1; // 1 composite phase 1, 2 real objective, 3 artificial LP
    int weak_pivot_retries = 0;
    int cleanup_rounds = 0;

    std::vector<double> y(nrows_), wcol(nrows_), cb(nrows_);
    std::vector<std::pair<int, double>> colbuf;

    while (true) {
        if (iter >= max_iters) {
            res.status = LpStatus::IterationLimit;
            res.diagnostic = "iteration limit " + std::to_string(max_iters) + " reached";
            break;
        }
        if (static_cast<int>(etas_.size()) >= kEtaLimit) {
            if (!refactor()) {
                res.status = LpStatus::NumericalFailure;
                res.diagnostic = "refactorization failed";
                break;
            }
            compute_basic_values();
        }

        const double infeas = art_mode_ ? 0.0 : infeasibility();
        const bool phase1 = infeas > 0.0;
        if (phase1 && ++composite_phase1_iters > composite_budget && art_rounds < 2) {
            ++art_rounds;
            composite_phase1_iters = 0;
            start_artificial_phase();
            if (!refactor()) {
                res.status = LpStatus::NumericalFailure;
                res.diagnostic = "artificial basis factorization failed";
                break;
            }
            compute_basic_values();
            continue;
        }

        // stall detection drives the Bland fallback
        double measure;
        int state;
        if (art_mode_ || !phase1) {
            measure = 0.0;
            if (art_mode_) {
                for (int j = nstruct_ + nrows_; j < ncols_; ++j)
                    if (vstat_[j] == VarStatus::Basic) measure += xval_[j];
                state = 3;
            } else {
                for (int j = 0; j < nstruct_; ++j)
                    if (obj_[j] != 0.0) measure += obj_[j] * xval_[j];
                state = 2;
            }
        } else {
            measure = infeas;
            state = 1;
        }
        if (state != measure_state) {
            measure_state = state;
            best_measure = kInf;
            stall = 0;
            bland = false;
        }
        if (measure < best_measure - 1e-10) {
            best_measure = measure;
            stall = 0;
            bland = false;
        } else if (++stall > kStallLimit) {
            bland = true;
        }

        for (int pos = 0; pos < nrows_; ++pos) {
            const int j = basic_[pos];
            if (!art_mode_ && phase1) {
                if (xval_[j] < lb_[j] - opts_.bound_tol)
                    cb[pos] = -1.0;
                else if (xval_[j] > ub_[j] + opts_.bound_tol)
                    cb[pos] = 1.0;
                else
                    cb[pos] = 0.0;
            } else {
                cb[pos] = cost_of(j, false);
            }
        }
        y = cb;
        btran(y);

        // pricing (Dantzig with lowest-index ties; Bland under stall)
        int enter = -1, dir = 0;
        double best_score = opts_.dual_tol;
        for (int j = 0; j < ncols_; ++j) {
            const VarStatus st = vstat_[j];
            if (st == VarStatus::Basic || lb_[j] == ub_[j]) continue;
            double d = cost_of(j, phase1);
            if (j < nstruct_) {
                for (int ii = Ap_[j]; ii < Ap_[j + 1]; ++ii) d -= y[Ai_[ii]] * Ax_[ii];
            } else {
                d -= singleton_coeff(j) * y[singleton_row(j)];
            }
            int cand_dir = 0;
            if (st == VarStatus::AtLower) {
                if (d < -best_score) cand_dir = 1;
            } else if (st == VarStatus::AtUpper) {
                if (d > best_score) cand_dir = -1;
            } else { // free at zero
                if (d < -best_score)
                    cand_dir = 1;
                else if (d > best_score)
                    cand_dir = -1;
            }
            if (cand_dir != 0) {
                enter = j;
                dir = cand_dir;
                if (bland) break;
                best_score = std::abs(d);
            }
        }

        if (enter < 0) {
            if (art_mode_) {
                double art_sum = 0.0;
                for (int j = nstruct_ + nrows_; j < ncols_; ++j)
                    if (vstat_[j] == VarStatus::Basic) art_sum += std::max(xval_[j], 0.0);
                if (art_sum > std::max(1e-7, nrows_ * 1e-10)) {
                    res.status = LpStatus::Infeasible;
                    break;
                }
                close_artificial_phase();
                continue;
            }
            if (phase1) {
                if (infeas > std::max(1e-7, nrows_ * 1e-10)) {
                    // composite phase 1 is stuck; let the artificial LP decide
                    if (art_rounds < 2) {
                        ++art_rounds;
                        composite_phase1_iters = 0;
                        start_artificial_phase();
                        if (!refactor()) {
                            res.status = LpStatus::NumericalFailure;
                            res.diagnostic = "artificial basis factorization failed";
                            break;
                        }
                        compute_basic_values();
                        continue;
                    }
                    res.status = LpStatus::NumericalFailure;
                    res.diagnostic = "feasibility undecided after artificial restarts";
                    break;
                }
                // dust-level infeasibility: accept the point as feasible
            }
            // candidate optimum: refresh the factorization and re-verify
            if (!etas_.empty() || cleanup_rounds == 0) {
                if (!refactor()) {
                    res.status = LpStatus::NumericalFailure;
                    res.diagnostic = "refactorization failed at optimum";
                    break;
                }
                compute_basic_values();
                if (++cleanup_rounds <= 3 && infeasibility() > 0.0) continue;
            }
            res.status = LpStatus::Optimal;
            break;
        }

        // direction column
        std::fill(wcol.begin(), wcol.end(), 0.0);
        column(enter, colbuf);
        for (const auto& [r, v] : colbuf) wcol[r] = v;
        ftran(wcol);

        // ratio test
        double theta = kInf;
        bool flip = false;
        if (vstat_[enter] != VarStatus::FreeNonbasic && lb_[enter] > -kInf && ub_[enter] < kInf) {
            theta = ub_[enter] - lb_[enter];
            flip = true;
        }
        double theta_min = kInf;
        for (int pos = 0; pos < nrows_; ++pos) {
            const double wp = wcol[pos];
            if (std::abs(wp) <= kRatioPivTol) continue;
            const int j = basic_[pos];
            const double rho = -dir * wp;
            const double x = xval_[j];
            double limit = kInf;
            if (x < lb_[j] - opts_.bound_tol) {
                if (rho > 0.0) limit = (lb_[j] - x) / rho;
            } else if (x > ub_[j] + opts_.bound_tol) {
                if (rho < 0.0) limit = (x - ub_[j]) / (-rho);
            } else if (rho > 0.0) {
                if (ub_[j] < kInf) limit = (ub_[j] - x) / rho;
            } else {
                if (lb_[j] > -kInf) limit = (x - lb_[j]) / (-rho);
            }
            if (limit < theta_min) theta_min = limit;
        }
        if (theta_min < 0.0) theta_min = 0.0;

        if (theta_min == kInf && !flip) {
            if (phase1 || art_mode_) {
                res.status = LpStatus::NumericalFailure;
                res.diagnostic = "unblocked direction while infeasible";
            } else {
                res.status = LpStatus::Unbounded;
            }
            break;
        }

        if (flip && theta <= theta_min) {
            const double dx = dir * theta;
            for (int pos = 0; pos < nrows_; ++pos)
                if (wcol[pos] != 0.0) xval_[basic_[pos]] -= wcol[pos] * dx;
            vstat_[enter] =
                vstat_[enter] == VarStatus::AtLower ? VarStatus::AtUpper : VarStatus::AtLower;
            xval_[enter] = vstat_[enter] == VarStatus::AtLower ? lb_[enter] : ub_[enter];
            ++iter;
            continue;
        }

        // pick the leaving row among near-ties: largest pivot for stability,
        // lowest variable id under Bland
        int leave_pos = -1;
        double leave_abs = 0.0;
        for (int pos = 0; pos < nrows_; ++pos) {
            const double wp = wcol[pos];
            if (std::abs(wp) <= kRatioPivTol) continue;
            const int j = basic_[pos];
            const double rho = -dir * wp;
            const double x = xval_[j];
            double limit = kInf;
            if (x < lb_[j] - opts_.bound_tol) {
                if (rho > 0.0) limit = (lb_[j] - x) / rho;
            } else if (x > ub_[j] + opts_.bound_tol) {
                if (rho < 0.0) limit = (x - ub_[j]) / (-rho);
            } else if (rho > 0.0) {
                if (ub_[j] < kInf) limit = (ub_[j] - x) / rho;
            } else {
                if (lb_[j] > -kInf) limit = (x - lb_[j]) / (-rho);
            }
            if (limit > theta_min + 1e-9) continue;
            if (bland) {
                if (leave_pos < 0 || basic_[pos] < basic_[leave_pos]) {
                    leave_pos = pos;
                    leave_abs = std::abs(wp);
                }
            } else if (std::abs(wp) > leave_abs) {
                leave_pos = pos;
                leave_abs = std::abs(wp);
            }
        }
        if (leave_pos < 0) {
            res.status = LpStatus::NumericalFailure;
            res.diagnostic = "ratio test found no leaving row";
            break;
        }
        bool weak_pivot = leave_abs < kWeakPivot;
        if (weak_pivot && !etas_.empty()) {
            // weak pivot on a stale factorization: rebuild and re-derive the
            // direction first; if it stays weak on a fresh basis, take it and
            // refactorize straight afterwards so the error cannot compound
            if (++weak_pivot_retries <= 16) {
                if (!refactor()) {
                    res.status = LpStatus::NumericalFailure;
                    res.diagnostic = "refactorization failed";
                    break;
                }
                compute_basic_values();
                continue;
            }
        }

        const int leave = basic_[leave_pos];
        const double wr = wcol[leave_pos];
        const double rho_leave = -dir * wr;
        const double xl = xval_[leave];
        bool leave_to_upper;
        if (xl < lb_[leave] - opts_.bound_tol)
            leave_to_upper = false;
        else if (xl > ub_[leave] + opts_.bound_tol)
            leave_to_upper = true;
        else
            leave_to_upper = rho_leave > 0.0;

        const double dx = dir * theta_min;
        for (int pos = 0; pos < nrows_; ++pos)
            if (wcol[pos] != 0.0) xval_[basic_[pos]] -= wcol[pos] * dx;
        const double enter_val = xval_[enter] + dx;

        vstat_[leave] = leave_to_upper ? VarStatus::AtUpper : VarStatus::AtLower;
        xval_[leave] = leave_to_upper ? ub_[leave] : lb_[leave];
        vstat_[enter] = VarStatus::Basic;
        basic_[leave_pos] = enter;
        xval_[enter] = enter_val;

        Eta eta;
        eta.pos = leave_pos;
        eta.pivot = wr;
        for (int pos = 0; pos < nrows_; ++pos)
            if (pos != leave_pos && wcol[pos] != 0.0) eta.other.emplace_back(pos, wcol[pos]);
        etas_.push_back(std::move(eta));
        ++iter;
        if (weak_pivot) {
            weak_pivot_retries = 0;
            if (!refactor()) {
                res.status = LpStatus::NumericalFailure;
                res.diagnostic = "refactorization failed";
                break;
            }
            compute_basic_values();
        }
    }

    res.iterations = iter;
    res.basis = vstat_;
    res.basis.resize(nstruct_ + nrows_); // artificial statuses are not reusable
    if (res.status == LpStatus::Optimal) {
        // final residual audit; a silent wrong answer is never acceptable
        double obj = 0.0;
        for (int j = 0; j < nstruct_; ++j) obj += obj_[j] * xval_[j];
        res.objective = obj;
        res.values.assign(xval_.begin(), xval_.begin() + nstruct_);
        for (int pos = 0; pos < nrows_; ++pos) cb[pos] = obj_[basic_[pos]];
        y = cb;
        btran(y);
        res.row_duals = y;
        res.reduced_costs.resize(nstruct_);
        for (int j = 0; j < nstruct_; ++j) {
            double d = obj_[j];
            for (int ii = Ap_[j]; ii < Ap_[j + 1]; ++ii) d -= y[Ai_[ii]] * Ax_[ii];
            res.reduced_costs[j] = d;
        }
        std::vector<double> act(nrows_, 0.0);
        for (int j = 0; j < ncols_; ++j) {
            if (xval_[j] == 0.0) continue;
            if (j < nstruct_) {
                for (int ii = Ap_[j]; ii < Ap_[j + 1]; ++ii) act[Ai_[ii]] += Ax_[ii] * xval_[j];
            } else {
                act[singleton_row(j)] += singleton_coeff(j) * xval_[j];
            }
        }
        double maxres = 0.0;
        for (int r = 0; r < nrows_; ++r) maxres = std::max(maxres, std::abs(act[r] - rhs_[r]));
        double maxbound = 0.0;
        for (int j = 0; j < ncols_; ++j) {
            maxbound = std::max(maxbound, lb_[j] - xval_[j]);
            maxbound = std::max(maxbound, xval_[j] - ub_[j]);
        }
        if (maxres > opts_.feas_tol || maxbound > 10.0 * opts_.bound_tol) {
            res.status = LpStatus::NumericalFailure;
            res.diagnostic = "residuals above tolerance: row " + std::to_string(maxres) +
                             ", bound " + std::to_string(std::max(maxbound, 0.0));
        }
    }
    return res;
}

LpSolution solve_lp(const MilpModel& model) { return solve_lp(model, SimplexOptions{}); }

LpSolution solve_lp(const MilpModel& model, const SimplexOptions& options) {
    LpEngine engine(model, options);
    LpEngine::Result r = engine.solve();
    LpSolution s;
    s.status = r.status;
    s.objective = r.objective;
    s.values = std::move(r.values);
    s.row_duals = std::move(r.row_duals);
    s.reduced_costs = std::move(r.reduced_costs);
    s.iterations = r.iterations;
    s.diagnostic = std::move(r.diagnostic);
    return s;
}

double CertificateReport::residual() const {
    return std::max(std::max(row_violation, bound_violation),
                    std::max(dual_violation, duality_gap));
}

CertificateReport check_certificate(const MilpModel& model, const LpSolution& sol) {
    CertificateReport rep;
    if (sol.status != LpStatus::Optimal)
        throw ModelError("certificate check requires an optimal solution");
    const int n = model.num_variables();
    const int m = model.num_constraints();
    if (static_cast<int>(sol.values.size()) != n || static_cast<int>(sol.row_duals.size()) != m)
        throw ModelError("solution arrays do not match the model");

    for (int j = 0; j < n; ++j) {
        const Variable& v = model.variable(j);
        rep.bound_violation = std::max(rep.bound_violation, v.lower - sol.values[j]);
        rep.bound_violation = std::max(rep.bound_violation, sol.values[j] - v.upper);
    }
    rep.bound_violation = std::max(rep.bound_violation, 0.0);
    rep.row_violation = model.max_constraint_violation(sol.values);

    // reduced costs recomputed from y so the check is independent of the solver
    std::vector<double> d(n);
    for (int j = 0; j < n; ++j) d[j] = model.variable(j).objective_coeff;
    for (int r = 0; r < m; ++r) {
        const double yr = sol.row_duals[r];
        if (yr == 0.0) continue;
        for (const auto& [id, coeff] : model.constraint(r).terms) d[id] -= yr * coeff;
    }

    double dual_obj = 0.0;
    for (int r = 0; r < m; ++r) {
        const auto& c = model.constraint(r);
        const double yr = sol.row_duals[r];
        dual_obj += yr * c.rhs;
        // slack dual feasibility by sense: <= rows need y <= 0, >= rows y >= 0
        if (c.sense == Sense::Le && yr > 0.0) rep.dual_violation = std::max(rep.dual_violation, yr);
        if (c.sense == Sense::Ge && yr < 0.0)
            rep.dual_violation = std::max(rep.dual_violation, -yr);
    }
    for (int j = 0; j < n; ++j) {
        const Variable& v = model.variable(j);
        if (v.lower == v.upper) {
            dual_obj += d[j] * v.lower;
            continue;
        }
        if (d[j] >= 0.0) {
            if (v.lower == -kInf)
                rep.dual_violation = std::max(rep.dual_violation, d[j]);
            else
                dual_obj += d[j] * v.lower;
        } else {
            if (v.upper == kInf)
                rep.dual_violation = std::max(rep.dual_violation, -d[j]);
            else
                dual_obj += d[j] * v.upper;
        }
    }
    const double primal_obj = model.objective_value(sol.values);
    rep.duality_gap = std::abs(primal_obj - dual_obj) / (1.0 + std::abs(primal_obj));
    return rep;
}

} // namespace fcmvrp
