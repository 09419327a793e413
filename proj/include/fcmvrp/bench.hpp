#ifndef FCMVRP_BENCH_HPP
#define FCMVRP_BENCH_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "fcmvrp/branch_and_bound.hpp"
#include "fcmvrp/formulations.hpp"
#include "fcmvrp/instance.hpp"

namespace fcmvrp {

struct ExperimentConfig {
    std::vector<int> sizes = {10, 15, 20, 25, 30, 35, 40};
    std::vector<double> multipliers = {2.25, 2.5, 2.75, 3.0};
    int instances_per_size = 5;
    int num_depots = 5;
    std::uint64_t seed = 1;
    std::vector<FormulationId> formulations = {FormulationId::F2, FormulationId::F4};
    SolverLimits limits;
    std::string output_dir = "out";
    int threads = 1;

    void validate() const;
};

struct SuiteEntry {
    std::string id; // e.g. n10_r0_m2.25
    int n = 0;
    int replicate = 0;
    double multiplier = 0.0;
    GeneratorParams params;
};

/// The deterministic instance suite of a config: one geometry per
/// (size, replicate), reissued under every multiplier. Geometry seeds are
/// mixed from the master seed, the size and the replicate index.
std::vector<SuiteEntry> suite_entries(const ExperimentConfig& config);

std::string format_multiplier(double m); // fixed 2-decimal form used in ids

struct ExperimentRecord {
    std::string instance_id;
    int n = 0;
    double multiplier = 0.0;
    FormulationId formulation = FormulationId::F2;
    double root_lb = 0.0;
    double opt_or_best = 0.0; // incumbent (optimal when solved)
    double pct_lb = 0.0;      // 100 * root_lb / opt_or_best
    bool solved = false;
    bool has_incumbent = false;
    double wall_time = 0.0;
    long nodes = 0;
    double best_bound = 0.0;
    std::string status_detail;
};

/// records.csv column layout (wall_time excluded from determinism checks).
std::string record_csv_header();
std::string record_csv_row(const ExperimentRecord& r);

struct CompareRow {
    std::string instance_id;
    int n = 0;
    double multiplier = 0.0;
    bool ok = false;
    double lb[4] = {0, 0, 0, 0}; // root LB per formulation F1..F4
    std::string error;
};

struct CompareReport {
    std::vector<CompareRow> rows;
    int dominance_violations = 0; // F2 >= F1 - eps and F4 >= F3 - eps breaches
    int f4_beats_f2 = 0;          // strict wins of the node-based bound
    int comparable = 0;           // rows with all four LBs
    std::string to_csv() const;
    std::string summary() const;
};

/// Root-LP comparison of all four formulations over the suite.
CompareReport run_compare(const ExperimentConfig& config,
                          const std::function<void(const std::string&)>& log = nullptr);

struct BenchReport {
    std::vector<ExperimentRecord> records;
    std::string records_csv() const;
    std::string succ_csv(const std::vector<FormulationId>& formulations) const;
    std::string time_csv(const std::vector<FormulationId>& formulations) const;
    std::string pct_lb_csv(const std::vector<FormulationId>& formulations) const;
    std::string plot_data(const std::vector<FormulationId>& formulations) const;
};

/// Solve the suite with the configured formulations and limits. Every
/// incumbent is decoded and fuel-validated before its record is accepted.
BenchReport run_bench(const ExperimentConfig& config,
                      const std::function<void(const std::string&)>& log = nullptr);

/// Solve one built model and wrap the outcome as a record (route-validated).
ExperimentRecord solve_to_record(const Instance& instance, const SuiteEntry& entry,
                                 FormulationId formulation, const SolverLimits& limits);

} // namespace fcmvrp

#endif
