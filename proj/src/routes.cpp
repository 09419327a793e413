#include "fcmvrp/routes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <json.hpp>

#include "fcmvrp/errors.hpp"

namespace fcmvrp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kIntTol = 1e-6;
constexpr double kFuelTol = 1e-6;   // validator capacity slack
constexpr double kOracleTol = 1e-9; // oracle capacity slack (pre-rounding safety)

struct Segment {
    int from = 0, to = 0;
    std::vector<int> seq; // full vertex path including both depots
};

} // namespace

RouteSet extract_routes(const Instance& instance,
                        const std::map<std::pair<int, int>, double>& x_values,
                        const std::vector<double>* order_hint) {
    const int n = instance.num_vertices();
    std::vector<std::vector<int>> succ(n);
    std::vector<int> indeg(n, 0), outdeg(n, 0);
    for (const auto& [pair, v] : x_values) {
        const auto [i, j] = pair;
        if (i < 0 || i >= n || j < 0 || j >= n || i == j)
            throw ValidationError("x value on invalid pair (" + std::to_string(i) + "," +
                                  std::to_string(j) + ")");
        if (v > 1.0 - kIntTol) {
            succ[i].push_back(j);
            ++outdeg[i];
            ++indeg[j];
        } else if (v > kIntTol) {
            throw ValidationError("x[" + std::to_string(i) + "," + std::to_string(j) +
                                  "] = " + std::to_string(v) + " is not integral");
        }
    }
    for (auto& s : succ) std::sort(s.begin(), s.end());
    for (int t = instance.num_depots(); t < n; ++t) {
        if (indeg[t] != 1 || outdeg[t] != 1)
            throw ValidationError("target " + std::to_string(t) + " has in-degree " +
                                  std::to_string(indeg[t]) + " and out-degree " +
                                  std::to_string(outdeg[t]) + " (must be 1/1)");
    }
    for (int d = 0; d < instance.num_depots(); ++d) {
        if (indeg[d] != outdeg[d])
            throw ValidationError("depot " + std::to_string(d) + " has in-degree " +
                                  std::to_string(indeg[d]) + " != out-degree " +
                                  std::to_string(outdeg[d]));
    }

    // peel off depot-anchored segments by following unique target successors
    std::vector<bool> target_used(n, false);
    std::vector<std::vector<Segment>> seg_at(instance.num_depots());
    int targets_covered = 0;
    for (int d = 0; d < instance.num_depots(); ++d) {
        for (int h : succ[d]) {
            Segment seg;
            seg.from = d;
            seg.seq = {d, h};
            int cur = h;
            while (instance.is_target(cur)) {
                if (target_used[cur])
                    throw ValidationError("target " + std::to_string(cur) +
                                          " reached by two segments");
                target_used[cur] = true;
                ++targets_covered;
                cur = succ[cur].front();
                seg.seq.push_back(cur);
            }
            seg.to = cur;
            seg_at[d].push_back(std::move(seg));
        }
    }
    if (targets_covered != instance.num_targets())
        throw ValidationError(
            "selected edges contain a target-only subtour (not depot-decomposable)");

    // trips out of a depot are taken in hint order (arrival fuel of the first
    // target), falling back to the head vertex id
    for (auto& list : seg_at) {
        std::stable_sort(list.begin(), list.end(), [&](const Segment& a, const Segment& b) {
            double ha = kInf, hb = kInf;
            if (order_hint) {
                if (instance.is_target(a.seq[1])) ha = (*order_hint)[a.seq[1]];
                if (instance.is_target(b.seq[1])) hb = (*order_hint)[b.seq[1]];
            }
            if (ha != hb) return ha < hb;
            return a.seq[1] < b.seq[1];
        });
    }
    std::vector<size_t> seg_next(instance.num_depots(), 0);
    auto take_segment = [&](int d) -> const Segment* {
        auto& list = seg_at[d];
        auto& pos = seg_next[d];
        return pos < list.size() ? &list[pos++] : nullptr;
    };

    RouteSet out;
    for (int d = 0; d < instance.num_depots(); ++d) out.routes[d] = {};
    for (int d = 0; d < instance.num_depots(); ++d) {
        std::vector<int>& walk = out.routes[d];
        while (seg_next[d] < seg_at[d].size()) {
            if (walk.empty()) walk.push_back(d);
            int cur = d;
            do {
                const Segment* seg = take_segment(cur);
                if (!seg)
                    throw ValidationError("walk stranded at depot " + std::to_string(cur) +
                                          " (flow imbalance)");
                walk.insert(walk.end(), seg->seq.begin() + 1, seg->seq.end());
                cur = seg->to;
            } while (cur != d);
        }
    }
    double cost = 0.0;
    for (const auto& [d, walk] : out.routes)
        for (size_t i = 1; i < walk.size(); ++i) cost += instance.cost(walk[i - 1], walk[i]);
    out.total_cost = cost;
    return out;
}

FeasibilityReport validate_routes(const Instance& instance, const RouteSet& routes) {
    const int n = instance.num_vertices();
    std::vector<int> visits(n, 0);
    double cost = 0.0;
    FeasibilityReport rep;
    for (const auto& [d, walk] : routes.routes) {
        if (d < 0 || d >= instance.num_depots())
            throw ValidationError("route key " + std::to_string(d) + " is not a depot");
        if (walk.empty()) continue;
        if (walk.front() != d || walk.back() != d)
            throw ValidationError("route of depot " + std::to_string(d) +
                                  " does not start and end there");
        if (walk.size() < 2) throw ValidationError("route of depot " + std::to_string(d) +
                                                   " is not a closed walk");
        double fuel = 0.0;
        int seg_start = 0;
        for (size_t m = 1; m < walk.size(); ++m) {
            const int a = walk[m - 1], b = walk[m];
            if (b < 0 || b >= n)
                throw ValidationError("route of depot " + std::to_string(d) +
                                      " visits unknown vertex " + std::to_string(b));
            if (a == b)
                throw ValidationError("route of depot " + std::to_string(d) +
                                      " repeats vertex " + std::to_string(b) + " consecutively");
            fuel += instance.fuel(a, b);
            cost += instance.cost(a, b);
            if (instance.is_target(b)) ++visits[b];
            if (instance.is_depot(b)) {
                if (fuel > instance.fuel_capacity() + kFuelTol)
                    rep.violations.push_back(
                        {d, seg_start, fuel, instance.fuel_capacity()});
                fuel = 0.0;
                seg_start = static_cast<int>(m);
            }
        }
    }
    for (int t = instance.num_depots(); t < n; ++t)
        if (visits[t] != 1)
            throw ValidationError("target " + std::to_string(t) + " visited " +
                                  std::to_string(visits[t]) + " times (must be exactly 1)");
    if (std::abs(cost - routes.total_cost) > 1e-6)
        throw ValidationError("total_cost " + std::to_string(routes.total_cost) +
                              " does not match recomputed " + std::to_string(cost));
    rep.feasible = rep.violations.empty();
    return rep;
}

namespace {

// Cheapest closed walk for one vehicle over a fixed visiting order, with
// refuel detours of up to maxc consecutive depots inserted between visits.
// Returns infinity when no feasible insertion exists.
double best_walk_for_order(const Instance& inst, int depot, const std::vector<int>& order,
                           int maxc, std::vector<int>* walk_out) {
    const int k = inst.num_depots();
    const int p = static_cast<int>(order.size());
    const double F = inst.fuel_capacity() + kOracleTol;
    // dp[i][r][c]: i visits done, at depot r, c consecutive depot stops
    const auto idx = [&](int i, int r, int c) { return (i * k + r) * maxc + (c - 1); };
    std::vector<double> dp(static_cast<size_t>(p + 1) * k * maxc, kInf);
    struct Step {
        int pi = -1, pr = -1, pc = -1;
    };
    std::vector<Step> par(dp.size());
    dp[idx(0, depot, 1)] = 0.0;
    for (int i = 0; i <= p; ++i) {
        for (int c = 1; c < maxc; ++c) { // depot hops within a chain
            for (int r = 0; r < k; ++r) {
                const double base = dp[idx(i, r, c)];
                if (base == kInf) continue;
                for (int r2 = 0; r2 < k; ++r2) {
                    if (r2 == r || inst.fuel(r, r2) > F) continue;
                    const double cand = base + inst.cost(r, r2);
                    if (cand < dp[idx(i, r2, c + 1)] - 1e-12) {
                        dp[idx(i, r2, c + 1)] = cand;
                        par[idx(i, r2, c + 1)] = {i, r, c};
                    }
                }
            }
        }
        if (i == p) break;
        for (int c = 1; c <= maxc; ++c) { // serve a block of visits, then refuel
            for (int r = 0; r < k; ++r) {
                const double base = dp[idx(i, r, c)];
                if (base == kInf) continue;
                double path = inst.fuel(r, order[i]);
                for (int j = i + 1; j <= p; ++j) {
                    if (j > i + 1) path += inst.fuel(order[j - 2], order[j - 1]);
                    if (path > F) break; // further blocks only get longer
                    for (int r2 = 0; r2 < k; ++r2) {
                        const double seg = path + inst.fuel(order[j - 1], r2);
                        if (seg > F) continue;
                        const double cand = base + seg * inst.cost_per_fuel();
                        if (cand < dp[idx(j, r2, 1)] - 1e-12) {
                            dp[idx(j, r2, 1)] = cand;
                            par[idx(j, r2, 1)] = {i, r, c};
                        }
                    }
                }
            }
        }
    }
    double best = kInf;
    int best_c = -1;
    for (int c = 1; c <= maxc; ++c) {
        if (dp[idx(p, depot, c)] < best - 1e-12) {
            best = dp[idx(p, depot, c)];
            best_c = c;
        }
    }
    if (best == kInf) return kInf;
    if (walk_out) {
        std::vector<int> rev; // walk rebuilt backwards from the final state
        int ci = p, cr = depot, cc = best_c;
        while (!(ci == 0 && cr == depot && cc == 1)) {
            const Step s = par[idx(ci, cr, cc)];
            rev.push_back(cr);
            if (s.pi == ci) { // depot hop
            } else {          // block of visits
                for (int j = ci - 1; j >= s.pi; --j) rev.push_back(order[j]);
            }
            ci = s.pi;
            cr = s.pr;
            cc = s.pc;
        }
        rev.push_back(depot);
        std::reverse(rev.begin(), rev.end());
        if (rev.size() == 1) rev.clear(); // vehicle never moved
        *walk_out = std::move(rev);
    }
    return best;
}

} // namespace

OracleResult brute_force_opt(const Instance& instance, int max_consecutive_depots) {
    const int nt = instance.num_targets();
    const int k = instance.num_depots();
    if (nt > 8)
        throw ValidationError("brute_force_opt is guarded to |T| <= 8, got " + std::to_string(nt));
    if (max_consecutive_depots < 1)
        throw ValidationError("max_consecutive_depots must be >= 1");

    // best cost and walk per (depot, target subset); orders enumerated
    // lexicographically so ties resolve to the smallest encoding
    const int full = (1 << nt) - 1;
    std::vector<std::vector<double>> best(k, std::vector<double>(full + 1, kInf));
    std::vector<std::vector<std::vector<int>>> walk(k);
    for (int d = 0; d < k; ++d) walk[d].assign(full + 1, {});
    for (int d = 0; d < k; ++d) best[d][0] = 0.0;

    std::vector<int> members, order, cand_walk;
    for (int mask = 1; mask <= full; ++mask) {
        members.clear();
        for (int t = 0; t < nt; ++t)
            if (mask & (1 << t)) members.push_back(instance.num_depots() + t);
        for (int d = 0; d < k; ++d) {
            order = members;
            do {
                const double c =
                    best_walk_for_order(instance, d, order, max_consecutive_depots, &cand_walk);
                if (c < best[d][mask] - 1e-12) {
                    best[d][mask] = c;
                    walk[d][mask] = cand_walk;
                } else if (c < kInf && std::abs(c - best[d][mask]) <= 1e-12 &&
                           cand_walk < walk[d][mask]) {
                    walk[d][mask] = cand_walk;
                }
            } while (std::next_permutation(order.begin(), order.end()));
        }
    }

    // partition the target set across vehicles, depots in id order
    std::vector<std::vector<double>> part(k + 1, std::vector<double>(full + 1, kInf));
    std::vector<std::vector<int>> choice(k + 1, std::vector<int>(full + 1, -1));
    part[0][0] = 0.0;
    for (int d = 0; d < k; ++d) {
        for (int mask = 0; mask <= full; ++mask) {
            if (part[d][mask] == kInf) continue;
            const int rest = full & ~mask;
            int sub = rest;
            while (true) { // all submasks of rest, including empty
                if (best[d][sub] < kInf) {
                    const double cand = part[d][mask] + best[d][sub];
                    if (cand < part[d + 1][mask | sub] - 1e-12) {
                        part[d + 1][mask | sub] = cand;
                        choice[d + 1][mask | sub] = sub;
                    }
                }
                if (sub == 0) break;
                sub = (sub - 1) & rest;
            }
        }
    }

    OracleResult res;
    if (part[k][full] == kInf) return res; // infeasible
    res.feasible = true;
    res.cost = part[k][full];
    int mask = full;
    std::vector<int> chosen(k, 0);
    for (int d = k - 1; d >= 0; --d) {
        chosen[d] = choice[d + 1][mask];
        mask &= ~chosen[d];
    }
    for (int d = 0; d < k; ++d) res.routes.routes[d] = walk[d][chosen[d]];
    res.routes.total_cost = res.cost;
    return res;
}

std::string route_set_to_json(const RouteSet& routes) {
    nlohmann::ordered_json j;
    j["schema_version"] = 1;
    j["total_cost"] = routes.total_cost;
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& [d, walk] : routes.routes)
        arr.push_back(nlohmann::ordered_json{{"depot", d}, {"walk", walk}});
    j["routes"] = std::move(arr);
    return j.dump(2) + "\n";
}

RouteSet route_set_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("route file is not valid JSON: ") + e.what());
    }
    RouteSet out;
    if (!j.contains("total_cost") || !j.contains("routes"))
        throw ParseError("route file needs total_cost and routes fields");
    out.total_cost = j["total_cost"].get<double>();
    for (const auto& r : j["routes"]) {
        if (!r.contains("depot") || !r.contains("walk"))
            throw ParseError("route entries need depot and walk fields");
        out.routes[r["depot"].get<int>()] = r["walk"].get<std::vector<int>>();
    }
    return out;
}

} // namespace fcmvrp
