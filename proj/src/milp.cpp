#include "fcmvrp/milp.hpp"

#include <cmath>
#include <unordered_set>

#include "fcmvrp/errors.hpp"

namespace fcmvrp {

int MilpModel::add_variable(const std::string& name, VarKind kind, double lower, double upper,
                            double objective_coeff) {
    if (std::isnan(lower) || std::isnan(upper) || !std::isfinite(objective_coeff))
        throw ModelError("variable '" + name + "' has non-finite data");
    if (lower > upper)
        throw ModelError("variable '" + name + "' has inverted bounds [" + std::to_string(lower) +
                         ", " + std::to_string(upper) + "]");
    if (kind == VarKind::Binary && (lower < 0.0 || upper > 1.0))
        throw ModelError("binary variable '" + name + "' must have bounds within [0,1]");
    const int id = static_cast<int>(variables_.size());
    variables_.push_back({id, name, kind, lower, upper, objective_coeff});
    return id;
}

int MilpModel::add_constraint(LinearConstraint constraint) {
    std::unordered_set<int> seen;
    for (const auto& [id, coeff] : constraint.terms) {
        if (id < 0 || id >= num_variables())
            throw ModelError("constraint references unknown variable id " + std::to_string(id));
        if (!seen.insert(id).second)
            throw ModelError("constraint has duplicate terms for variable id " + std::to_string(id));
        if (!std::isfinite(coeff))
            throw ModelError("constraint coefficient for variable id " + std::to_string(id) +
                             " is not finite");
    }
    if (!std::isfinite(constraint.rhs)) throw ModelError("constraint rhs is not finite");
    constraints_.push_back(std::move(constraint));
    return static_cast<int>(constraints_.size()) - 1;
}

int MilpModel::count_tag(const std::string& tag) const {
    int n = 0;
    for (const auto& c : constraints_)
        if (c.tag == tag) ++n;
    return n;
}

double MilpModel::objective_value(const std::vector<double>& values) const {
    double obj = 0.0;
    for (const auto& v : variables_) obj += v.objective_coeff * values[v.id];
    return obj;
}

double MilpModel::max_constraint_violation(const std::vector<double>& values) const {
    double worst = 0.0;
    for (const auto& c : constraints_) {
        double lhs = 0.0;
        for (const auto& [id, coeff] : c.terms) lhs += coeff * values[id];
        double v = 0.0;
        switch (c.sense) {
            case Sense::Le: v = lhs - c.rhs; break;
            case Sense::Ge: v = c.rhs - lhs; break;
            case Sense::Eq: v = std::abs(lhs - c.rhs); break;
        }
        if (v > worst) worst = v;
    }
    return worst;
}

MilpModel relax(const MilpModel& model) {
    // Kind flip only; [0,1] (or tighter) bounds are already in place.
    MilpModel fresh;
    for (const auto& v : model.variables())
        fresh.add_variable(v.name, VarKind::Continuous, v.lower, v.upper, v.objective_coeff);
    for (const auto& c : model.constraints()) fresh.add_constraint(c);
    return fresh;
}

} // namespace fcmvrp
