#ifndef FCMVRP_FORMULATIONS_HPP
#define FCMVRP_FORMULATIONS_HPP

#include <map>
#include <set>
#include <string>
#include <utility>

#include "fcmvrp/instance.hpp"
#include "fcmvrp/milp.hpp"

namespace fcmvrp {

/// The four model variants: F1/F2 track fuel on edges (flow variables z),
/// F3/F4 on vertices (potentials u, MTZ-style big-M coupling); F2 and F4
/// are the strengthened versions of F1 and F3.
enum class FormulationId { F1, F2, F3, F4 };

const char* to_string(FormulationId f);
FormulationId parse_formulation(const std::string& text);

struct BuildOptions {
    /// Drop every edge with s_i + f_ij + t_j > F before building. Valid
    /// preprocessing for all four variants; turn off to dump the literal
    /// textbook models.
    bool apply_edge_fixing = true;
};

struct BuiltModel {
    FormulationId formulation = FormulationId::F1;
    MilpModel model;
    std::map<std::pair<int, int>, int> x_index; // ordered pair -> variable id
    std::map<std::pair<int, int>, int> z_index; // F1/F2 only
    std::map<int, int> u_index;                 // F3/F4 only, targets
    std::set<std::pair<int, int>> fixed_edges;
};

/// Ordered pairs that can never be traversed: any vehicle crossing (i,j)
/// burns at least s_i + f_ij + t_j fuel between refuels. Depot ends
/// contribute zero, so depot-depot edges longer than F are dropped too.
std::set<std::pair<int, int>> fix_infeasible_edges(const Instance& instance,
                                                   const VertexFuelBounds& bounds);

/// Big-M for the node-based variants: max over all ordered pairs of
/// F - s_j - t_i + f_ij. Always >= F because s and t vanish at depots.
double big_m(const Instance& instance, const VertexFuelBounds& bounds);

BuiltModel build_f1(const Instance& instance, const BuildOptions& options = {});
BuiltModel build_f2(const Instance& instance, const BuildOptions& options = {});
BuiltModel build_f3(const Instance& instance, const BuildOptions& options = {});
BuiltModel build_f4(const Instance& instance, const BuildOptions& options = {});

BuiltModel build_formulation(FormulationId id, const Instance& instance,
                             const BuildOptions& options = {});

} // namespace fcmvrp

#endif
