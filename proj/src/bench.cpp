#include "fcmvrp/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <thread>

#include "fcmvrp/errors.hpp"
#include "fcmvrp/rng.hpp"
#include "fcmvrp/routes.hpp"
#include "fcmvrp/simplex.hpp"

namespace fcmvrp {

namespace {

std::string fmt(double v, const char* spec = "%.6f") {
    char buf[64];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

void log_line(const std::function<void(const std::string&)>& log, const std::string& msg) {
    if (log) log(msg);
}

} // namespace

void ExperimentConfig::validate() const {
    if (sizes.empty()) throw ValidationError("config needs at least one size");
    if (multipliers.empty()) throw ValidationError("config needs at least one multiplier");
    if (formulations.empty()) throw ValidationError("config needs at least one formulation");
    if (instances_per_size < 1) throw ValidationError("instances_per_size must be >= 1");
    if (num_depots < 1) throw ValidationError("num_depots must be >= 1");
    if (threads < 1) throw ValidationError("threads must be >= 1");
    limits.validate();
    for (double m : multipliers)
        if (!(m > 2.0)) throw ValidationError("multipliers must exceed 2");
    for (int s : sizes)
        if (s < 1) throw ValidationError("sizes must be >= 1");
}

std::string format_multiplier(double m) { return fmt(m, "%.2f"); }

std::vector<SuiteEntry> suite_entries(const ExperimentConfig& config) {
    config.validate();
    std::vector<SuiteEntry> out;
    for (int n : config.sizes) {
        for (int rep = 0; rep < config.instances_per_size; ++rep) {
            const std::uint64_t geom_seed = Rng::mix(config.seed, static_cast<std::uint64_t>(n),
                                                     static_cast<std::uint64_t>(rep));
            for (double mult : config.multipliers) {
                SuiteEntry e;
                e.n = n;
                e.replicate = rep;
                e.multiplier = mult;
                e.id = "n" + std::to_string(n) + "_r" + std::to_string(rep) + "_m" +
                       format_multiplier(mult);
                e.params.num_targets = n;
                e.params.num_depots = config.num_depots;
                e.params.grid_side = 100.0;
                e.params.fuel_multiplier = mult;
                e.params.seed = geom_seed;
                out.push_back(std::move(e));
            }
        }
    }
    return out;
}

std::string record_csv_header() {
    return "instance,n,multiplier,formulation,root_lb,opt_or_best,pct_lb,status,wall_time,nodes";
}

std::string record_csv_row(const ExperimentRecord& r) {
    std::ostringstream os;
    os << r.instance_id << ',' << r.n << ',' << format_multiplier(r.multiplier) << ','
       << to_string(r.formulation) << ',' << fmt(r.root_lb) << ',';
    if (r.has_incumbent)
        os << fmt(r.opt_or_best) << ',' << fmt(r.pct_lb);
    else
        os << ',';
    os << ',' << (r.solved ? 1 : 0) << ',' << fmt(r.wall_time) << ',' << r.nodes;
    return os.str();
}

ExperimentRecord solve_to_record(const Instance& instance, const SuiteEntry& entry,
                                 FormulationId formulation, const SolverLimits& limits) {
    ExperimentRecord rec;
    rec.instance_id = entry.id;
    rec.n = entry.n;
    rec.multiplier = entry.multiplier;
    rec.formulation = formulation;
    const BuiltModel built = build_formulation(formulation, instance);
    const MipResult mip = solve_mip(built.model, limits);
    rec.root_lb = mip.root_lb;
    rec.best_bound = mip.best_bound;
    rec.nodes = mip.nodes_explored;
    rec.wall_time = mip.wall_time;
    rec.solved = mip.status == MipStatus::Optimal;
    rec.status_detail = to_string(mip.status);
    if (mip.status == MipStatus::Infeasible) {
        rec.root_lb = 0.0;
        return rec;
    }
    if (mip.has_incumbent()) {
        rec.has_incumbent = true;
        rec.opt_or_best = mip.incumbent_objective;
        rec.pct_lb = 100.0 * rec.root_lb / rec.opt_or_best;
        // hard fuel post-check: decode and validate before accepting the record
        std::map<std::pair<int, int>, double> xv;
        for (const auto& [pair, id] : built.x_index) xv[pair] = mip.incumbent_values[id];
        std::vector<double> hint(instance.num_vertices(), 0.0);
        if (!built.z_index.empty()) {
            for (const auto& [pair, id] : built.z_index)
                if (xv[pair] > 0.5) hint[pair.second] = mip.incumbent_values[id];
        } else {
            for (const auto& [vertex, id] : built.u_index)
                hint[vertex] = mip.incumbent_values[id];
        }
        const RouteSet routes = extract_routes(instance, xv, &hint);
        const FeasibilityReport rep = validate_routes(instance, routes);
        if (!rep.feasible) {
            rec.solved = false;
            rec.status_detail = "fuel-validation-failed";
        }
    }
    return rec;
}

CompareReport run_compare(const ExperimentConfig& config,
                          const std::function<void(const std::string&)>& log) {
    const std::vector<SuiteEntry> entries = suite_entries(config);
    // one row per instance: four root LBs
    std::vector<CompareRow> rows(entries.size());
    std::atomic<size_t> next{0};
    auto worker = [&]() {
        while (true) {
            const size_t i = next.fetch_add(1);
            if (i >= entries.size()) return;
            const SuiteEntry& e = entries[i];
            CompareRow row;
            row.instance_id = e.id;
            row.n = e.n;
            row.multiplier = e.multiplier;
            try {
                const Instance inst = generate(e.params);
                for (int f = 0; f < 4; ++f) {
                    const BuiltModel built =
                        build_formulation(static_cast<FormulationId>(f), inst);
                    row.lb[f] = root_lb(built.model);
                }
                row.ok = true;
            } catch (const std::exception& ex) {
                row.ok = false;
                row.error = ex.what();
            }
            rows[i] = std::move(row);
            log_line(log, "compare " + e.id + (rows[i].ok ? "" : " FAILED"));
        }
    };
    if (config.threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < config.threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    CompareReport rep;
    rep.rows = std::move(rows);
    for (const auto& row : rep.rows) {
        if (!row.ok) continue;
        ++rep.comparable;
        if (row.lb[1] < row.lb[0] - 1e-6) ++rep.dominance_violations;
        if (row.lb[3] < row.lb[2] - 1e-6) ++rep.dominance_violations;
        if (row.lb[3] > row.lb[1] + 1e-6) ++rep.f4_beats_f2;
    }
    return rep;
}

std::string CompareReport::to_csv() const {
    std::ostringstream os;
    os << "instance,n,multiplier,lb_f1,lb_f2,lb_f3,lb_f4,f2_ge_f1,f4_ge_f3,f4_gt_f2,ok\n";
    for (const auto& r : rows) {
        os << r.instance_id << ',' << r.n << ',' << format_multiplier(r.multiplier) << ',';
        if (r.ok) {
            os << fmt(r.lb[0]) << ',' << fmt(r.lb[1]) << ',' << fmt(r.lb[2]) << ','
               << fmt(r.lb[3]) << ',' << (r.lb[1] >= r.lb[0] - 1e-6 ? 1 : 0) << ','
               << (r.lb[3] >= r.lb[2] - 1e-6 ? 1 : 0) << ','
               << (r.lb[3] > r.lb[1] + 1e-6 ? 1 : 0) << ",1";
        } else {
            std::string msg = r.error;
            std::replace(msg.begin(), msg.end(), ',', ';');
            os << ",,,,,,," << msg;
        }
        os << '\n';
    }
    return os.str();
}

std::string CompareReport::summary() const {
    std::ostringstream os;
    os << "instances: " << rows.size() << "\n";
    os << "comparable: " << comparable << "\n";
    os << "dominance_violations: " << dominance_violations << "\n";
    os << "f4_beats_f2: " << f4_beats_f2;
    if (comparable > 0)
        os << " (" << fmt(100.0 * f4_beats_f2 / comparable, "%.1f") << "% of instances)";
    os << "\n";
    return os.str();
}

BenchReport run_bench(const ExperimentConfig& config,
                      const std::function<void(const std::string&)>& log) {
    const std::vector<SuiteEntry> entries = suite_entries(config);
    struct Task {
        size_t entry;
        FormulationId formulation;
    };
    std::vector<Task> tasks;
    for (size_t i = 0; i < entries.size(); ++i)
        for (FormulationId f : config.formulations) tasks.push_back({i, f});

    std::vector<ExperimentRecord> records(tasks.size());
    std::atomic<size_t> next{0};
    auto worker = [&]() {
        while (true) {
            const size_t i = next.fetch_add(1);
            if (i >= tasks.size()) return;
            const SuiteEntry& e = entries[tasks[i].entry];
            ExperimentRecord rec;
            try {
                const Instance inst = generate(e.params);
                rec = solve_to_record(inst, e, tasks[i].formulation, config.limits);
            } catch (const std::exception& ex) {
                rec.instance_id = e.id;
                rec.n = e.n;
                rec.multiplier = e.multiplier;
                rec.formulation = tasks[i].formulation;
                rec.status_detail = std::string("error: ") + ex.what();
            }
            records[i] = std::move(rec);
            log_line(log, "bench " + e.id + " " + to_string(tasks[i].formulation) + " " +
                              records[i].status_detail);
        }
    };
    if (config.threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < config.threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    std::stable_sort(records.begin(), records.end(),
                     [](const ExperimentRecord& a, const ExperimentRecord& b) {
                         if (a.n != b.n) return a.n < b.n;
                         if (a.instance_id != b.instance_id) return a.instance_id < b.instance_id;
                         return static_cast<int>(a.formulation) < static_cast<int>(b.formulation);
                     });
    BenchReport rep;
    rep.records = std::move(records);
    return rep;
}

std::string BenchReport::records_csv() const {
    std::ostringstream os;
    os << record_csv_header() << '\n';
    for (const auto& r : records) os << record_csv_row(r) << '\n';
    return os.str();
}

namespace {

struct SizeAgg {
    int total = 0;
    std::map<FormulationId, int> succ;
    std::map<FormulationId, double> time_sum;
    std::map<FormulationId, int> time_count;
    std::map<FormulationId, double> pct_sum;
    std::map<FormulationId, int> pct_count;
};

std::map<int, SizeAgg> aggregate(const std::vector<ExperimentRecord>& records) {
    std::map<int, SizeAgg> by_size;
    std::map<int, std::map<FormulationId, int>> counts;
    for (const auto& r : records) {
        SizeAgg& agg = by_size[r.n];
        ++counts[r.n][r.formulation];
        if (r.solved) {
            ++agg.succ[r.formulation];
            agg.time_sum[r.formulation] += r.wall_time;
            ++agg.time_count[r.formulation];
        }
        if (r.has_incumbent) {
            agg.pct_sum[r.formulation] += r.pct_lb;
            ++agg.pct_count[r.formulation];
        }
    }
    for (auto& [n, agg] : by_size) {
        int total = 0;
        for (const auto& [f, c] : counts[n]) total = std::max(total, c);
        agg.total = total;
    }
    return by_size;
}

} // namespace

std::string BenchReport::succ_csv(const std::vector<FormulationId>& fs) const {
    auto by_size = aggregate(records);
    std::ostringstream os;
    os << "n,total";
    for (FormulationId f : fs) os << ",succ_" << to_string(f);
    os << '\n';
    for (auto& [n, agg] : by_size) {
        os << n << ',' << agg.total;
        for (FormulationId f : fs) os << ',' << agg.succ[f];
        os << '\n';
    }
    return os.str();
}

std::string BenchReport::time_csv(const std::vector<FormulationId>& fs) const {
    auto by_size = aggregate(records);
    std::ostringstream os;
    os << "n";
    for (FormulationId f : fs) os << ",avg_time_" << to_string(f);
    os << '\n';
    for (auto& [n, agg] : by_size) {
        os << n;
        for (FormulationId f : fs) {
            os << ',';
            if (agg.time_count[f] > 0) os << fmt(agg.time_sum[f] / agg.time_count[f]);
        }
        os << '\n';
    }
    return os.str();
}

std::string BenchReport::pct_lb_csv(const std::vector<FormulationId>& fs) const {
    auto by_size = aggregate(records);
    std::ostringstream os;
    os << "n";
    for (FormulationId f : fs) os << ",avg_pct_lb_" << to_string(f);
    os << '\n';
    for (auto& [n, agg] : by_size) {
        os << n;
        for (FormulationId f : fs) {
            os << ',';
            if (agg.pct_count[f] > 0) os << fmt(agg.pct_sum[f] / agg.pct_count[f]);
        }
        os << '\n';
    }
    return os.str();
}

std::string BenchReport::plot_data(const std::vector<FormulationId>& fs) const {
    auto by_size = aggregate(records);
    std::ostringstream os;
    os << "# n";
    for (FormulationId f : fs) os << " avg_time_" << to_string(f);
    for (FormulationId f : fs) os << " avg_pct_lb_" << to_string(f);
    os << '\n';
    for (auto& [n, agg] : by_size) {
        os << n;
        for (FormulationId f : fs)
            os << ' ' << (agg.time_count[f] > 0 ? fmt(agg.time_sum[f] / agg.time_count[f]) : "nan");
        for (FormulationId f : fs)
            os << ' ' << (agg.pct_count[f] > 0 ? fmt(agg.pct_sum[f] / agg.pct_count[f]) : "nan");
        os << '\n';
    }
    return os.str();
}

} // namespace fcmvrp
