// Acceptance suite: runs every shipped guarantee end to end and prints one
// PASS/FAIL line per criterion. Exit code 0 only when all criteria hold.
//
// Heavy phases write their artifacts (CSV tables) into ./acceptance_out for
// inspection. The only tunable is FCMVRP_ACCEPT_EXTRA_MIP_SECONDS, the
// per-instance budget used to gather incumbents on the large sizes for the
// capacity-monotonicity bracket checks (default 15; raising it tightens the
// check, it never loosens a criterion).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <vector>

#include "fcmvrp/bench.hpp"
#include "fcmvrp/branch_and_bound.hpp"
#include "fcmvrp/formulations.hpp"
#include "fcmvrp/instance.hpp"
#include "fcmvrp/rng.hpp"
#include "fcmvrp/routes.hpp"
#include "fcmvrp/simplex.hpp"

using namespace fcmvrp;
namespace fs = std::filesystem;

namespace {

constexpr double kAgreeTol = 1e-6;
constexpr double kDominanceTol = 1e-6;
constexpr double kCertTol = 1e-6;
constexpr std::uint64_t kSmallSuiteSeed = 982451653ULL;
constexpr std::uint64_t kDefaultSuiteSeed = 1ULL;

struct Criterion {
    Criterion(int id_, std::string name_) : id(id_), name(std::move(name_)) {}
    int id;
    std::string name;
    bool pass = true;
    std::string detail;
};

double now_seconds() {
    static const auto t0 = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct SmallCase {
    std::string id;
    Instance instance;
    double oracle_cost = 0.0;
};

struct SmallRunResult {
    // indexed per (case, formulation)
    std::vector<std::string> csv_rows; // deterministic, no wall-time columns
    int mismatches = 0;
    int route_failures = 0;
    int cert_failures = 0;
    std::map<std::string, std::vector<double>> solved_objectives; // per instance id
    std::vector<std::string> notes;
};

std::vector<SmallCase> small_suite() {
    std::vector<SmallCase> cases;
    for (int nt : {3, 4, 5, 6, 7})
        for (int nd : {1, 2, 3})
            for (double mult : {2.25, 3.0}) {
                GeneratorParams p;
                p.num_targets = nt;
                p.num_depots = nd;
                p.fuel_multiplier = mult;
                p.seed = Rng::mix(kSmallSuiteSeed, static_cast<std::uint64_t>(nt * 10 + nd),
                                  static_cast<std::uint64_t>(mult * 100));
                std::ostringstream id;
                id << "t" << nt << "_d" << nd << "_m" << format_multiplier(mult);
                Instance inst = generate(p);
                const OracleResult oracle = brute_force_opt(inst);
                if (!oracle.feasible)
                    throw std::runtime_error("small-suite instance " + id.str() +
                                             " is infeasible; generator guarantee broken");
                cases.push_back({id.str(), std::move(inst), oracle.cost});
            }
    return cases;
}

std::string fmt9(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9f", v);
    return buf;
}

// One full pass over the small suite: solve all four formulations on every
// case, compare to the oracle, validate routes, check root certificates.
SmallRunResult run_small_suite(const std::vector<SmallCase>& cases) {
    SmallRunResult out;
    SolverLimits limits;
    limits.time_limit = 300.0;
    limits.rel_gap = 1e-12;
    limits.abs_gap = 1e-9;
    for (const SmallCase& sc : cases) {
        for (FormulationId f : {FormulationId::F1, FormulationId::F2, FormulationId::F3,
                                FormulationId::F4}) {
            const BuiltModel built = build_formulation(f, sc.instance);
            const LpSolution root = solve_lp(relax(built.model));
            if (root.status == LpStatus::Optimal) {
                if (check_certificate(relax(built.model), root).residual() >= kCertTol)
                    ++out.cert_failures;
            } else {
                ++out.cert_failures;
            }
            const MipResult r = solve_mip(built.model, limits);
            bool agree = false;
            bool routes_ok = false;
            if (r.status == MipStatus::Optimal) {
                agree = std::abs(r.incumbent_objective - sc.oracle_cost) <= kAgreeTol;
                try {
                    std::map<std::pair<int, int>, double> xv;
                    for (const auto& [pair, id] : built.x_index)
                        xv[pair] = r.incumbent_values[id];
                    std::vector<double> hint(sc.instance.num_vertices(), 0.0);
                    for (const auto& [pair, id] : built.z_index)
                        if (xv[pair] > 0.5) hint[pair.second] = r.incumbent_values[id];
                    for (const auto& [vertex, id] : built.u_index)
                        hint[vertex] = r.incumbent_values[id];
                    const RouteSet routes = extract_routes(sc.instance, xv, &hint);
                    routes_ok = validate_routes(sc.instance, routes).feasible;
                } catch (const std::exception& e) {
                    routes_ok = false;
                }
                out.solved_objectives[sc.id].push_back(r.incumbent_objective);
            }
            if (!agree) {
                ++out.mismatches;
                out.notes.push_back(sc.id + "/" + to_string(f) + ": mip " +
                                    (r.status == MipStatus::Optimal
                                         ? fmt9(r.incumbent_objective)
                                         : to_string(r.status)) +
                                    " vs oracle " + fmt9(sc.oracle_cost));
            }
            if (!routes_ok) ++out.route_failures;
            out.csv_rows.push_back(sc.id + "," + to_string(f) + "," +
                                   fmt9(r.incumbent_objective) + "," + fmt9(r.root_lb) + "," +
                                   std::to_string(r.nodes_explored));
        }
    }
    return out;
}

struct LbTable {
    // per instance id: root LBs of F1..F4
    struct Row {
        std::string id;
        int n;
        int replicate;
        double multiplier;
        double lb[4];
    };
    std::vector<Row> rows;
    int cert_failures = 0;
};

LbTable compute_default_lbs(const ExperimentConfig& cfg) {
    LbTable table;
    for (const SuiteEntry& e : suite_entries(cfg)) {
        const Instance inst = generate(e.params);
        LbTable::Row row;
        row.id = e.id;
        row.n = e.n;
        row.replicate = e.replicate;
        row.multiplier = e.multiplier;
        for (int f = 0; f < 4; ++f) {
            const BuiltModel built = build_formulation(static_cast<FormulationId>(f), inst);
            const MilpModel relaxed = relax(built.model);
            const LpSolution s = solve_lp(relaxed);
            if (s.status != LpStatus::Optimal ||
                check_certificate(relaxed, s).residual() >= kCertTol) {
                ++table.cert_failures;
                row.lb[f] = std::nan("");
            } else {
                row.lb[f] = s.objective;
            }
        }
        table.rows.push_back(row);
        std::cerr << "  [lp] " << e.id << " lb1 " << row.lb[0] << " lb2 " << row.lb[1]
                  << " lb3 " << row.lb[2] << " lb4 " << row.lb[3] << "\n";
    }
    return table;
}

struct MipCell {
    bool ran = false;
    bool solved = false;
    bool has_incumbent = false;
    double objective = 0.0;
    double best_bound = 0.0;
    long nodes = 0;
    double wall = 0.0;
    bool routes_ok = true;
};

MipCell run_mip_cell(const Instance& inst, FormulationId f, double time_limit) {
    MipCell cell;
    cell.ran = true;
    SolverLimits limits;
    limits.time_limit = time_limit;
    limits.rel_gap = 1e-12;
    limits.abs_gap = 1e-9;
    const BuiltModel built = build_formulation(f, inst);
    const MipResult r = solve_mip(built.model, limits);
    cell.solved = r.status == MipStatus::Optimal;
    cell.has_incumbent = r.has_incumbent();
    cell.objective = r.incumbent_objective;
    cell.best_bound = r.best_bound;
    cell.nodes = r.nodes_explored;
    cell.wall = r.wall_time;
    if (r.has_incumbent()) {
        try {
            std::map<std::pair<int, int>, double> xv;
            for (const auto& [pair, id] : built.x_index) xv[pair] = r.incumbent_values[id];
            std::vector<double> hint(inst.num_vertices(), 0.0);
            for (const auto& [pair, id] : built.z_index)
                if (xv[pair] > 0.5) hint[pair.second] = r.incumbent_values[id];
            for (const auto& [vertex, id] : built.u_index) hint[vertex] = r.incumbent_values[id];
            const RouteSet routes = extract_routes(inst, xv, &hint);
            cell.routes_ok = validate_routes(inst, routes).feasible;
        } catch (const std::exception&) {
            cell.routes_ok = false;
        }
    }
    return cell;
}

// Random LPs for the certificate stress test (anchored to stay feasible in
// most draws; infeasible draws simply don't produce certificates).
MilpModel random_lp(Rng& rng) {
    constexpr double kInf = std::numeric_limits<double>::infinity();
    MilpModel m;
    const int n = 2 + static_cast<int>(rng.below(12));
    std::vector<double> x0(n);
    for (int j = 0; j < n; ++j) {
        const int shape = static_cast<int>(rng.below(4));
        double lo = 0.0, up = kInf;
        switch (shape) {
            case 0: lo = 0.0; up = 1.0 + rng.uniform(9.0); break;
            case 1: lo = -rng.uniform(5.0); up = lo + rng.uniform(12.0); break;
            case 2: lo = 0.0; up = kInf; break;
            case 3: lo = -kInf; up = kInf; break;
        }
        m.add_variable("v" + std::to_string(j), VarKind::Continuous, lo, up,
                       std::round(8.0 * (rng.uniform(2.0) - 1.0)) / 4.0);
        const double lo_eff = lo == -kInf ? -4.0 : lo;
        const double up_eff = up == kInf ? lo_eff + 8.0 : up;
        x0[j] = lo_eff + rng.uniform01() * (up_eff - lo_eff);
    }
    const int rows = 1 + static_cast<int>(rng.below(12));
    for (int r = 0; r < rows; ++r) {
        LinearConstraint c;
        double act = 0.0;
        for (int j = 0; j < n; ++j)
            if (rng.below(3) != 2) {
                const double coeff = std::round(6.0 * (rng.uniform(2.0) - 1.0)) / 2.0;
                if (coeff == 0.0) continue;
                c.terms.emplace_back(j, coeff);
                act += coeff * x0[j];
            }
        if (c.terms.empty()) {
            const int j = static_cast<int>(rng.below(n));
            c.terms.emplace_back(j, 1.0);
            act += x0[j];
        }
        c.sense = static_cast<Sense>(rng.below(3));
        const double slackiness = rng.uniform(3.0);
        switch (c.sense) {
            case Sense::Le: c.rhs = act + slackiness; break;
            case Sense::Ge: c.rhs = act - slackiness; break;
            case Sense::Eq: c.rhs = act; break;
        }
        m.add_constraint(c);
    }
    return m;
}

void write_text(const fs::path& p, const std::string& content) {
    std::ofstream out(p);
    out << content;
}

} // namespace

int main() {
    const fs::path out_dir = "acceptance_out";
    fs::create_directories(out_dir);
    std::vector<Criterion> crit = {
        {1, "oracle equivalence on the small suite"},
        {2, "LP dominance F2>=F1 and F4>=F3 on the default suite"},
        {3, "cross-formulation agreement on solved instances"},
        {4, "fuel feasibility of every incumbent"},
        {5, "capacity monotonicity across multipliers"},
        {6, "node-based bound wins on a strict subset only"},
        {7, "F2 solves all n=10 instances within 600 s"},
        {8, "dual certificates on random LPs and all relaxations"},
        {9, "byte-level determinism of the small-suite run"},
    };
    auto& c1 = crit[0];
    auto& c2 = crit[1];
    auto& c3 = crit[2];
    auto& c4 = crit[3];
    auto& c5 = crit[4];
    auto& c6 = crit[5];
    auto& c7 = crit[6];
    auto& c8 = crit[7];
    auto& c9 = crit[8];

    int total_route_failures = 0;
    int total_cert_failures = 0;
    std::map<std::string, std::vector<double>> solved_objectives;

    // ---- phase A: small suite vs the exhaustive oracle (criteria 1, 9) ----
    std::cerr << "[phase A] small oracle suite (t=" << now_seconds() << "s)\n";
    const std::vector<SmallCase> cases = small_suite();
    const SmallRunResult runA = run_small_suite(cases);
    const SmallRunResult runB = run_small_suite(cases); // determinism replay
    total_route_failures += runA.route_failures + runB.route_failures;
    total_cert_failures += runA.cert_failures + runB.cert_failures;
    for (const auto& [id, objs] : runA.solved_objectives)
        for (double o : objs) solved_objectives[id].push_back(o);

    c1.pass = runA.mismatches == 0 && runA.route_failures == 0;
    {
        std::ostringstream d;
        d << cases.size() << " instances x 4 formulations; " << runA.mismatches
          << " objective mismatches, " << runA.route_failures << " route failures";
        c1.detail = d.str();
        for (const auto& n : runA.notes) std::cerr << "  [c1] " << n << "\n";
    }
    {
        std::ostringstream csvA, csvB;
        csvA << "instance,formulation,objective,root_lb,nodes\n";
        csvB << "instance,formulation,objective,root_lb,nodes\n";
        for (const auto& r : runA.csv_rows) csvA << r << "\n";
        for (const auto& r : runB.csv_rows) csvB << r << "\n";
        write_text(out_dir / "small_suite_run1.csv", csvA.str());
        write_text(out_dir / "small_suite_run2.csv", csvB.str());
        c9.pass = csvA.str() == csvB.str();
        c9.detail = c9.pass ? "two full replays produced identical bytes"
                            : "replay diverged; see small_suite_run*.csv";
    }

    // ---- phase B: root LBs of all four formulations on the 140 suite ----
    std::cerr << "[phase B] default-suite relaxations (t=" << now_seconds() << "s)\n";
    ExperimentConfig cfg;
    cfg.seed = kDefaultSuiteSeed;
    cfg.limits.time_limit = 3600.0;
    const LbTable lbs = compute_default_lbs(cfg);
    total_cert_failures += lbs.cert_failures;
    {
        int viol = 0, f4wins = 0, comparable = 0, n40_comparable = 0, n40_wins = 0;
        std::ostringstream csv;
        csv << "instance,n,multiplier,lb_f1,lb_f2,lb_f3,lb_f4\n";
        for (const auto& r : lbs.rows) {
            csv << r.id << ',' << r.n << ',' << format_multiplier(r.multiplier) << ','
                << fmt9(r.lb[0]) << ',' << fmt9(r.lb[1]) << ',' << fmt9(r.lb[2]) << ','
                << fmt9(r.lb[3]) << "\n";
            if (std::isnan(r.lb[0]) || std::isnan(r.lb[1]) || std::isnan(r.lb[2]) ||
                std::isnan(r.lb[3]))
                continue;
            ++comparable;
            if (r.lb[1] < r.lb[0] - kDominanceTol) ++viol;
            if (r.lb[3] < r.lb[2] - kDominanceTol) ++viol;
            const bool win = r.lb[3] > r.lb[1] + kDominanceTol;
            if (win) ++f4wins;
            if (r.n == 40) {
                ++n40_comparable;
                if (win) ++n40_wins;
            }
        }
        write_text(out_dir / "default_suite_lbs.csv", csv.str());
        c2.pass = comparable == static_cast<int>(lbs.rows.size()) && viol == 0;
        std::ostringstream d2;
        d2 << comparable << "/" << lbs.rows.size() << " instances compared, " << viol
           << " dominance violations";
        c2.detail = d2.str();

        c6.pass = comparable > 0 && f4wins > 0 && f4wins < comparable;
        std::ostringstream d6;
        d6 << "F4 LP beats F2 on " << f4wins << "/" << comparable << " instances ("
           << std::fixed << std::setprecision(1) << 100.0 * f4wins / std::max(comparable, 1)
           << "%); n=40 subset: " << n40_wins << "/" << n40_comparable;
        c6.detail = d6.str();
    }

    // ---- phase C: MIP runs for the success bars and monotonicity ----
    std::cerr << "[phase C] benchmark MIPs (t=" << now_seconds() << "s)\n";
    // cells[(n, rep, mult)][formulation]
    std::map<std::tuple<int, int, double>, std::map<int, MipCell>> cells;
    const double extra_budget = [] {
        if (const char* env = std::getenv("FCMVRP_ACCEPT_EXTRA_MIP_SECONDS"))
            return std::max(1.0, std::atof(env));
        return 15.0;
    }();
    {
        ExperimentConfig mip_cfg = cfg;
        const auto entries = suite_entries(mip_cfg);
        bool f4_n15_viable = true;
        for (const SuiteEntry& e : entries) {
            const bool want_f2 = e.n <= 15;
            const bool want_f4 = e.n == 10 || (e.n == 15 && f4_n15_viable);
            const bool want_extra = e.n >= 20;
            if (!want_f2 && !want_f4 && !want_extra) continue;
            const Instance inst = generate(e.params);
            const auto key = std::make_tuple(e.n, e.replicate, e.multiplier);
            if (want_f2 || want_extra) {
                const double budget = e.n <= 15 ? 600.0 : extra_budget;
                MipCell cell = run_mip_cell(inst, FormulationId::F2, budget);
                if (!cell.routes_ok) ++total_route_failures;
                if (cell.solved)
                    solved_objectives[e.id].push_back(cell.objective);
                std::cerr << "  [mip] " << e.id << " f2 solved=" << cell.solved
                          << " nodes=" << cell.nodes << " t=" << cell.wall << "\n";
                cells[key][1] = cell;
            }
            if (want_f4) {
                MipCell cell = run_mip_cell(inst, FormulationId::F4, 600.0);
                if (!cell.routes_ok) ++total_route_failures;
                if (cell.solved)
                    solved_objectives[e.id].push_back(cell.objective);
                std::cerr << "  [mip] " << e.id << " f4 solved=" << cell.solved
                          << " nodes=" << cell.nodes << " t=" << cell.wall << "\n";
                cells[key][3] = cell;
                if (e.n == 15 && !cell.solved) f4_n15_viable = false;
            }
        }
    }

    // criterion 7: the n=10 bar plus the reported comparisons
    {
        std::map<int, std::map<int, std::pair<int, int>>> succ; // n -> f -> (solved, ran)
        std::map<int, std::map<int, std::pair<long, int>>> nodes_solved;
        for (const auto& [key, fc] : cells) {
            const int n = std::get<0>(key);
            for (const auto& [f, cell] : fc) {
                if (!cell.ran) continue;
                auto& s = succ[n][f];
                ++s.second;
                if (cell.solved) {
                    ++s.first;
                    auto& ns = nodes_solved[n][f];
                    ns.first += cell.nodes;
                    ++ns.second;
                }
            }
        }
        const auto n10f2 = succ[10][1];
        const auto n10f4 = succ[10][3];
        const auto n15f2 = succ[15][1];
        const auto n15f4 = succ[15][3];
        c7.pass = n10f2.second == 20 && n10f2.first == 20;
        std::ostringstream d;
        d << "succ n10: f2 " << n10f2.first << "/" << n10f2.second << ", f4 " << n10f4.first
          << "/" << n10f4.second << "; n15: f2 " << n15f2.first << "/" << n15f2.second
          << " (bar >=16 " << (n15f2.first >= 16 ? "met" : "MISSED") << "), f4 "
          << n15f4.first << "/" << n15f4.second;
        for (int n : {10, 15}) {
            const auto f2 = succ[n][1];
            const auto f4 = succ[n][3];
            if (f2.second > 0 && f2.first == f2.second && f4.second == f2.second &&
                f4.first == f4.second) {
                const double avg2 =
                    static_cast<double>(nodes_solved[n][1].first) / nodes_solved[n][1].second;
                const double avg4 =
                    static_cast<double>(nodes_solved[n][3].first) / nodes_solved[n][3].second;
                d << "; n" << n << " avg nodes f2 " << std::fixed << std::setprecision(1)
                  << avg2 << (avg2 <= avg4 ? " <= " : " > ") << "f4 " << avg4;
            }
        }
        c7.detail = d.str();
    }

    // criterion 5: per geometry, costs non-increasing across multipliers
    {
        int exact_checked = 0, bracket_checked = 0, vacuous = 0, violations = 0;
        ExperimentConfig mcfg = cfg;
        for (int n : mcfg.sizes) {
            for (int rep = 0; rep < mcfg.instances_per_size; ++rep) {
                for (size_t k = 0; k + 1 < mcfg.multipliers.size(); ++k) {
                    const auto a = std::make_tuple(n, rep, mcfg.multipliers[k]);
                    const auto b = std::make_tuple(n, rep, mcfg.multipliers[k + 1]);
                    const MipCell* ca = cells.count(a) && cells[a].count(1) ? &cells[a][1]
                                                                            : nullptr;
                    const MipCell* cb = cells.count(b) && cells[b].count(1) ? &cells[b][1]
                                                                            : nullptr;
                    if (ca && cb && ca->solved && cb->solved) {
                        ++exact_checked;
                        if (cb->objective > ca->objective + kAgreeTol) ++violations;
                    } else if (ca && cb && ca->has_incumbent && cb->ran) {
                        ++bracket_checked;
                        if (cb->best_bound > ca->objective + kAgreeTol) ++violations;
                    } else {
                        ++vacuous;
                    }
                }
            }
        }
        c5.pass = violations == 0;
        std::ostringstream d;
        d << exact_checked << " pairs exact, " << bracket_checked << " bracket, " << vacuous
          << " without incumbent data; " << violations << " violations";
        c5.detail = d.str();
    }

    // criterion 3: agreement wherever >= 2 formulations solved one instance
    {
        int compared = 0, disagreements = 0;
        for (const auto& [id, objs] : solved_objectives) {
            if (objs.size() < 2) continue;
            ++compared;
            const double ref = objs.front();
            for (double o : objs)
                if (std::abs(o - ref) > kAgreeTol * std::max(1.0, std::abs(ref)))
                    ++disagreements;
        }
        c3.pass = disagreements == 0;
        std::ostringstream d;
        d << compared << " instances with multiple optima compared, " << disagreements
          << " disagreements";
        c3.detail = d.str();
    }

    // criterion 4: zero route-validation failures across every phase
    {
        c4.pass = total_route_failures == 0;
        std::ostringstream d;
        d << total_route_failures << " incumbent route validations failed";
        c4.detail = d.str();
    }

    // ---- phase D: certificate stress (criterion 8) ----
    std::cerr << "[phase D] certificate stress (t=" << now_seconds() << "s)\n";
    {
        Rng rng(271828182845ULL);
        int optimal = 0;
        int failures = 0;
        for (int trial = 0; trial < 1000; ++trial) {
            const MilpModel m = random_lp(rng);
            const LpSolution s = solve_lp(m);
            if (s.status != LpStatus::Optimal) continue;
            ++optimal;
            if (check_certificate(m, s).residual() >= kCertTol) ++failures;
        }
        total_cert_failures += failures;
        c8.pass = total_cert_failures == 0 && optimal >= 500;
        std::ostringstream d;
        d << optimal << "/1000 random LPs optimal with " << failures
          << " certificate failures; " << (total_cert_failures - failures)
          << " failures among formulation relaxations";
        c8.detail = d.str();
    }

    std::cout << "\n";
    bool all_pass = true;
    for (const auto& c : crit) {
        all_pass = all_pass && c.pass;
        std::cout << (c.pass ? "[PASS]" : "[FAIL]") << " criterion " << c.id << ": " << c.name
                  << " -- " << c.detail << "\n";
    }
    std::cout << (all_pass ? "ACCEPTANCE OK" : "ACCEPTANCE FAILED") << " (wall "
              << std::fixed << std::setprecision(1) << now_seconds() << "s)\n";
    return all_pass ? 0 : 1;
}
