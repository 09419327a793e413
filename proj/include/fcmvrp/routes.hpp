#ifndef FCMVRP_ROUTES_HPP
#define FCMVRP_ROUTES_HPP

#include <map>
#include <string>
#include <vector>

#include "fcmvrp/instance.hpp"

namespace fcmvrp {

/// One closed walk per depot (possibly empty). Walks start and end at their
/// own depot and may pass through other depots, which act as refuels, not
/// hand-offs.
struct RouteSet {
    std::map<int, std::vector<int>> routes; // depot id -> vertex sequence
    double total_cost = 0.0;
};

struct SegmentViolation {
    int depot;       // route the segment belongs to
    int start_index; // index in the walk where the segment starts
    double fuel;
    double capacity;
};

struct FeasibilityReport {
    bool feasible = false;
    std::vector<SegmentViolation> violations;
};

/// Decode an integral degree-feasible x-vector into depot-anchored closed
/// walks. order_hint (arrival-fuel per vertex, e.g. u values or z heads)
/// orders the trips concatenated at a depot of degree > 2.
/// Throws on non-integral values, degree violations, or target subtours.
RouteSet extract_routes(const Instance& instance,
                        const std::map<std::pair<int, int>, double>& x_values,
                        const std::vector<double>* order_hint = nullptr);

/// Check a route set against fuel semantics: each depot-to-depot segment
/// must burn at most F (+1e-6); every target exactly once; costs re-added.
/// Structural problems (open walks, unknown or repeated targets, wrong
/// total) throw; capacity breaches are reported, not thrown.
FeasibilityReport validate_routes(const Instance& instance, const RouteSet& routes);

struct OracleResult {
    bool feasible = false;
    double cost = 0.0;
    RouteSet routes;
};

/// Exhaustive optimum for small instances (|T| <= 8): every assignment of
/// targets to vehicles, every visiting order, and refuel detours through up
/// to max_consecutive_depots depots between consecutive visits.
OracleResult brute_force_opt(const Instance& instance, int max_consecutive_depots = 2);

std::string route_set_to_json(const RouteSet& routes);
RouteSet route_set_from_json(const std::string& text);

} // namespace fcmvrp

#endif
