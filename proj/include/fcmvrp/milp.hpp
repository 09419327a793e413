#ifndef FCMVRP_MILP_HPP
#define FCMVRP_MILP_HPP

#include <string>
#include <utility>
#include <vector>

namespace fcmvrp {

enum class VarKind { Binary, Continuous };
enum class Sense { Le, Ge, Eq };

struct Variable {
    int id = -1;
    std::string name;
    VarKind kind = VarKind::Continuous;
    double lower = 0.0;
    double upper = 0.0;
    double objective_coeff = 0.0;
};

/// One linear row. Coupling bounds such as l*x <= z <= u*x are stored as
/// two-term rows, never as variable bounds. The tag names the equation
/// family the row belongs to ("eq1" ... "eq16", "eq5dd") so model dumps and
/// per-family test assertions stay auditable.
struct LinearConstraint {
    std::vector<std::pair<int, double>> terms; // (variable id, coefficient)
    Sense sense = Sense::Le;
    double rhs = 0.0;
    std::string tag;
};

/// A minimization MILP over binary and bounded continuous variables.
/// Mutable while one owner builds it; treat as immutable once handed to a
/// solver.
class MilpModel {
public:
    int add_variable(const std::string& name, VarKind kind, double lower, double upper,
                     double objective_coeff);
    int add_constraint(LinearConstraint constraint);

    int num_variables() const { return static_cast<int>(variables_.size()); }
    int num_constraints() const { return static_cast<int>(constraints_.size()); }
    const Variable& variable(int id) const { return variables_[id]; }
    const LinearConstraint& constraint(int idx) const { return constraints_[idx]; }
    const std::vector<Variable>& variables() const { return variables_; }
    const std::vector<LinearConstraint>& constraints() const { return constraints_; }

    int count_tag(const std::string& tag) const;

    double objective_value(const std::vector<double>& values) const;

    /// Max row violation of the given point (0 when all rows hold).
    double max_constraint_violation(const std::vector<double>& values) const;

private:
    std::vector<Variable> variables_;
    std::vector<LinearConstraint> constraints_;
};

/// LP relaxation: every binary becomes continuous on [0,1]; rows, bounds and
/// objective are untouched. Idempotent.
MilpModel relax(const MilpModel& model);

} // namespace fcmvrp

#endif
