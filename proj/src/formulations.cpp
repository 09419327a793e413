#include "fcmvrp/formulations.hpp"

#include <limits>

#include "fcmvrp/errors.hpp"

namespace fcmvrp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string pair_name(const char* stem, int i, int j) {
    return std::string(stem) + "_" + std::to_string(i) + "_" + std::to_string(j);
}

struct Builder {
    const Instance& inst;
    VertexFuelBounds bounds;
    std::set<std::pair<int, int>> fixed;
    BuiltModel out;

    Builder(const Instance& instance, FormulationId id, const BuildOptions& options)
        : inst(instance), bounds(compute_bounds(instance)) {
        out.formulation = id;
        if (options.apply_edge_fixing) fixed = fix_infeasible_edges(instance, bounds);
        out.fixed_edges = fixed;
        const int n = inst.num_vertices();
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                if (i == j || fixed.count({i, j})) continue;
                const int id_x = out.model.add_variable(pair_name("x", i, j), VarKind::Binary, 0.0,
                                                        1.0, inst.cost(i, j));
                out.x_index[{i, j}] = id_x;
            }
    }

    bool kept(int i, int j) const { return out.x_index.count({i, j}) != 0; }
    int x(int i, int j) const { return out.x_index.at({i, j}); }

    // Eq family 1-2: depot flow balance and unit target degrees.
    void add_degree_rows() {
        const int n = inst.num_vertices();
        for (int d = 0; d < inst.num_depots(); ++d) {
            LinearConstraint c;
            c.tag = "eq1";
            c.sense = Sense::Eq;
            c.rhs = 0.0;
            for (int i = 0; i < n; ++i) {
                if (kept(d, i)) c.terms.emplace_back(x(d, i), 1.0);
            }
            for (int i = 0; i < n; ++i) {
                if (kept(i, d)) c.terms.emplace_back(x(i, d), -1.0);
            }
            out.model.add_constraint(std::move(c));
        }
        for (int j = inst.num_depots(); j < n; ++j) {
            LinearConstraint in;
            in.tag = "eq2";
            in.sense = Sense::Eq;
            in.rhs = 1.0;
            for (int i = 0; i < n; ++i)
                if (kept(i, j)) in.terms.emplace_back(x(i, j), 1.0);
            out.model.add_constraint(std::move(in));
            LinearConstraint outdeg;
            outdeg.tag = "eq2";
            outdeg.sense = Sense::Eq;
            outdeg.rhs = 1.0;
            for (int i = 0; i < n; ++i)
                if (kept(j, i)) outdeg.terms.emplace_back(x(j, i), 1.0);
            out.model.add_constraint(std::move(outdeg));
        }
    }

    void add_z_variables() {
        for (const auto& [pair, xid] : out.x_index) {
            (void)xid;
            out.z_index[pair] = out.model.add_variable(pair_name("z", pair.first, pair.second),
                                                       VarKind::Continuous, 0.0, kInf, 0.0);
        }
    }

    // Eq 3: fuel-flow balance at targets; with Eq 5 it pins z to cumulative
    // consumption since the last refuel.
    void add_flow_balance() {
        const int n = inst.num_vertices();
        for (int i = inst.num_depots(); i < n; ++i) {
            LinearConstraint c;
            c.tag = "eq3";
            c.sense = Sense::Eq;
            c.rhs = 0.0;
            for (int j = 0; j < n; ++j) {
                if (kept(i, j)) c.terms.emplace_back(out.z_index.at({i, j}), 1.0);
            }
            for (int j = 0; j < n; ++j) {
                if (kept(j, i)) c.terms.emplace_back(out.z_index.at({j, i}), -1.0);
            }
            for (int j = 0; j < n; ++j) {
                if (kept(i, j)) c.terms.emplace_back(x(i, j), -inst.fuel(i, j));
            }
            out.model.add_constraint(std::move(c));
        }
    }

    // Eq 5 plus the depot-depot extension: leaving a depot, the cumulative
    // consumption at the head equals the edge fuel exactly (refuel reset).
    void add_depot_tail_rows() {
        for (const auto& [pair, zid] : out.z_index) {
            const auto [i, j] = pair;
            if (!inst.is_depot(i)) continue;
            LinearConstraint c;
            c.tag = inst.is_depot(j) ? "eq5dd" : "eq5";
            c.sense = Sense::Eq;
            c.rhs = 0.0;
            c.terms.emplace_back(zid, 1.0);
            c.terms.emplace_back(x(i, j), -inst.fuel(i, j));
            out.model.add_constraint(std::move(c));
        }
    }

    void add_u_variables() {
        const int n = inst.num_vertices();
        for (int i = inst.num_depots(); i < n; ++i)
            out.u_index[i] = out.model.add_variable("u_" + std::to_string(i), VarKind::Continuous,
                                                    0.0, inst.fuel_capacity(), 0.0);
    }
};

} // namespace

const char* to_string(FormulationId f) {
    switch (f) {
        case FormulationId::F1: return "f1";
        case FormulationId::F2: return "f2";
        case FormulationId::F3: return "f3";
        case FormulationId::F4: return "f4";
    }
    return "?";
}

FormulationId parse_formulation(const std::string& text) {
    if (text == "f1" || text == "F1") return FormulationId::F1;
    if (text == "f2" || text == "F2") return FormulationId::F2;
    if (text == "f3" || text == "F3") return FormulationId::F3;
    if (text == "f4" || text == "F4") return FormulationId::F4;
    throw ValidationError("unknown formulation '" + text + "' (expected f1|f2|f3|f4)");
}

std::set<std::pair<int, int>> fix_infeasible_edges(const Instance& instance,
                                                   const VertexFuelBounds& bounds) {
    std::set<std::pair<int, int>> fixed;
    const int n = instance.num_vertices();
    const double F = instance.fuel_capacity();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            if (bounds.s[i] + instance.fuel(i, j) + bounds.t[j] > F) fixed.insert({i, j});
        }
    return fixed;
}

double big_m(const Instance& instance, const VertexFuelBounds& bounds) {
    const int n = instance.num_vertices();
    const double F = instance.fuel_capacity();
    double m = -kInf;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            m = std::max(m, F - bounds.s[j] - bounds.t[i] + instance.fuel(i, j));
        }
    return m;
}

BuiltModel build_f1(const Instance& instance, const BuildOptions& options) {
    Builder b(instance, FormulationId::F1, options);
    b.add_z_variables();
    b.add_degree_rows();
    b.add_flow_balance();
    const double F = instance.fuel_capacity();
    for (const auto& [pair, zid] : b.out.z_index) { // Eq 4 upper links
        LinearConstraint c;
        c.tag = "eq4";
        c.sense = Sense::Le;
        c.rhs = 0.0;
        c.terms.emplace_back(zid, 1.0);
        c.terms.emplace_back(b.x(pair.first, pair.second), -F);
        b.out.model.add_constraint(std::move(c));
    }
    b.add_depot_tail_rows();
    return std::move(b.out);
}

BuiltModel build_f2(const Instance& instance, const BuildOptions& options) {
    Builder b(instance, FormulationId::F2, options);
    b.add_z_variables();
    b.add_degree_rows();
    b.add_flow_balance();
    const double F = instance.fuel_capacity();
    for (const auto& [pair, zid] : b.out.z_index) {
        const auto [i, j] = pair;
        if (instance.is_target(j)) { // Eq 7: z_ij <= (F - t_j) x_ij
            LinearConstraint c;
            c.tag = "eq7";
            c.sense = Sense::Le;
            c.rhs = 0.0;
            c.terms.emplace_back(zid, 1.0);
            c.terms.emplace_back(b.x(i, j), -(F - b.bounds.t[j]));
            b.out.model.add_constraint(std::move(c));
        } else if (instance.is_target(i)) { // Eq 8: z_id <= F x_id
            LinearConstraint c;
            c.tag = "eq8";
            c.sense = Sense::Le;
            c.rhs = 0.0;
            c.terms.emplace_back(zid, 1.0);
            c.terms.emplace_back(b.x(i, j), -F);
            b.out.model.add_constraint(std::move(c));
        }
        if (instance.is_target(i)) { // Eq 9: z_ij >= (s_i + f_ij) x_ij
            LinearConstraint c;
            c.tag = "eq9";
            c.sense = Sense::Ge;
            c.rhs = 0.0;
            c.terms.emplace_back(zid, 1.0);
            c.terms.emplace_back(b.x(i, j), -(b.bounds.s[i] + instance.fuel(i, j)));
            b.out.model.add_constraint(std::move(c));
        }
    }
    b.add_depot_tail_rows();
    return std::move(b.out);
}

BuiltModel build_f3(const Instance& instance, const BuildOptions& options) {
    Builder b(instance, FormulationId::F3, options);
    b.add_degree_rows();
    b.add_u_variables();
    const double F = instance.fuel_capacity();
    const double M = big_m(instance, b.bounds);
    const int n = instance.num_vertices();
    // Eq 10: u_i - u_j + M x_ij <= M - f_ij for every kept edge into a
    // target; u is substituted by 0 at depot tails.
    for (int i = 0; i < n; ++i)
        for (int j = instance.num_depots(); j < n; ++j) {
            if (i == j || !b.kept(i, j)) continue;
            LinearConstraint c;
            c.tag = "eq10";
            c.sense = Sense::Le;
            c.rhs = M - instance.fuel(i, j);
            if (instance.is_target(i)) c.terms.emplace_back(b.out.u_index.at(i), 1.0);
            c.terms.emplace_back(b.out.u_index.at(j), -1.0);
            c.terms.emplace_back(b.x(i, j), M);
            b.out.model.add_constraint(std::move(c));
        }
    for (int i = instance.num_depots(); i < n; ++i) {
        LinearConstraint lo; // Eq 11: u_i >= s_i + sum_d (f_di - s_i) x_di
        lo.tag = "eq11";
        lo.sense = Sense::Ge;
        lo.rhs = b.bounds.s[i];
        lo.terms.emplace_back(b.out.u_index.at(i), 1.0);
        for (int d = 0; d < instance.num_depots(); ++d)
            if (b.kept(d, i)) lo.terms.emplace_back(b.x(d, i), -(instance.fuel(d, i) - b.bounds.s[i]));
        b.out.model.add_constraint(std::move(lo));

        LinearConstraint hi; // Eq 12: u_i <= F - t_i - sum_d (f_id - t_i) x_id
        hi.tag = "eq12";
        hi.sense = Sense::Le;
        hi.rhs = F - b.bounds.t[i];
        hi.terms.emplace_back(b.out.u_index.at(i), 1.0);
        for (int d = 0; d < instance.num_depots(); ++d)
            if (b.kept(i, d)) hi.terms.emplace_back(b.x(i, d), instance.fuel(i, d) - b.bounds.t[i]);
        b.out.model.add_constraint(std::move(hi));
    }
    return std::move(b.out);
}

BuiltModel build_f4(const Instance& instance, const BuildOptions& options) {
    Builder b(instance, FormulationId::F4, options);
    b.add_degree_rows();
    b.add_u_variables();
    const double F = instance.fuel_capacity();
    const double M = big_m(instance, b.bounds);
    const int n = instance.num_vertices();
    // Eq 13: the x_ji-lifted MTZ rows, target pairs only.
    for (int i = instance.num_depots(); i < n; ++i)
        for (int j = instance.num_depots(); j < n; ++j) {
            if (i == j) continue;
            const bool fwd = b.kept(i, j), rev = b.kept(j, i);
            if (!fwd && !rev) continue;
            LinearConstraint c;
            c.tag = "eq13";
            c.sense = Sense::Le;
            c.rhs = M - instance.fuel(i, j);
            c.terms.emplace_back(b.out.u_index.at(i), 1.0);
            c.terms.emplace_back(b.out.u_index.at(j), -1.0);
            if (fwd) c.terms.emplace_back(b.x(i, j), M);
            if (rev)
                c.terms.emplace_back(b.x(j, i), M - instance.fuel(i, j) - instance.fuel(j, i));
            b.out.model.add_constraint(std::move(c));
        }
    for (int i = instance.num_depots(); i < n; ++i) {
        LinearConstraint lo; // Eq 14: u_i >= sum_j (s_j + f_ji) x_ji
        lo.tag = "eq14";
        lo.sense = Sense::Ge;
        lo.rhs = 0.0;
        lo.terms.emplace_back(b.out.u_index.at(i), 1.0);
        for (int j = 0; j < n; ++j)
            if (b.kept(j, i))
                lo.terms.emplace_back(b.x(j, i), -(b.bounds.s[j] + instance.fuel(j, i)));
        b.out.model.add_constraint(std::move(lo));

        LinearConstraint hi; // Eq 15: u_i <= F - sum_j (t_j + f_ij) x_ij
        hi.tag = "eq15";
        hi.sense = Sense::Le;
        hi.rhs = F;
        hi.terms.emplace_back(b.out.u_index.at(i), 1.0);
        for (int j = 0; j < n; ++j)
            if (b.kept(i, j)) hi.terms.emplace_back(b.x(i, j), b.bounds.t[j] + instance.fuel(i, j));
        b.out.model.add_constraint(std::move(hi));

        LinearConstraint first; // Eq 16: u_i <= F - t_i - sum_d (F - t_i - f_di) x_di
        first.tag = "eq16";
        first.sense = Sense::Le;
        first.rhs = F - b.bounds.t[i];
        first.terms.emplace_back(b.out.u_index.at(i), 1.0);
        for (int d = 0; d < instance.num_depots(); ++d)
            if (b.kept(d, i))
                first.terms.emplace_back(b.x(d, i), F - b.bounds.t[i] - instance.fuel(d, i));
        b.out.model.add_constraint(std::move(first));
    }
    return std::move(b.out);
}

BuiltModel build_formulation(FormulationId id, const Instance& instance,
                             const BuildOptions& options) {
    switch (id) {
        case FormulationId::F1: return build_f1(instance, options);
        case FormulationId::F2: return build_f2(instance, options);
        case FormulationId::F3: return build_f3(instance, options);
        case FormulationId::F4: return build_f4(instance, options);
    }
    throw ValidationError("invalid formulation id");
}

} // namespace fcmvrp
