// Command-line front end: instance generation, solving, relaxation
// comparisons, the benchmark harness and route validation.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include <CLI11.hpp>
#include <json.hpp>

#include "fcmvrp/bench.hpp"
#include "fcmvrp/branch_and_bound.hpp"
#include "fcmvrp/errors.hpp"
#include "fcmvrp/formulations.hpp"
#include "fcmvrp/instance.hpp"
#include "fcmvrp/lp_format.hpp"
#include "fcmvrp/routes.hpp"
#include "fcmvrp/simplex.hpp"

namespace fs = std::filesystem;
using namespace fcmvrp;

namespace {

std::string default_out() {
    if (const char* env = std::getenv("FCMVRP_OUT")) return env;
    return "out";
}

void write_file(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    std::ofstream out(path);
    if (!out) throw Error("cannot open '" + path.string() + "' for writing");
    out << content;
}

std::vector<FormulationId> parse_formulations(const std::string& text) {
    if (text == "all") return {FormulationId::F1, FormulationId::F2, FormulationId::F3,
                               FormulationId::F4};
    std::vector<FormulationId> out;
    std::string cur;
    for (char c : text + ",") {
        if (c == ',') {
            if (!cur.empty()) out.push_back(parse_formulation(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (out.empty()) throw ValidationError("no formulation given");
    return out;
}

int status_exit_code(MipStatus s) {
    switch (s) {
        case MipStatus::Optimal: return 0;
        case MipStatus::Feasible: return 2;
        case MipStatus::Unknown: return 3;
        case MipStatus::Infeasible: return 4;
    }
    return 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"FCMVRP solver toolkit"};
    app.require_subcommand(1);

    // shared options
    std::uint64_t seed = 1;
    std::vector<int> sizes;
    std::vector<double> multipliers = {2.25, 2.5, 2.75, 3.0};
    int replicates = 5;
    int depots = 5;
    std::string formulation_arg = "f2";
    double time_limit = 3600.0;
    int threads = 1;
    std::string out_dir = default_out();

    auto add_suite_opts = [&](CLI::App* cmd) {
        cmd->add_option("--seed", seed, "master seed for the instance suite");
        cmd->add_option("--sizes", sizes, "target counts")->delimiter(',');
        cmd->add_option("--multipliers", multipliers, "fuel capacity multipliers")
            ->delimiter(',');
        cmd->add_option("--replicates", replicates, "instances per size");
        cmd->add_option("--depots", depots, "depot count");
        cmd->add_option("--out", out_dir, "output directory (env FCMVRP_OUT)");
    };

    auto* cmd_generate = app.add_subcommand("generate", "write a seeded instance suite");
    add_suite_opts(cmd_generate);

    auto* cmd_solve = app.add_subcommand("solve", "solve one instance file");
    std::string instance_path, dump_nodes;
    bool no_fixing = false;
    cmd_solve->add_option("instance", instance_path, "instance JSON file")->required();
    cmd_solve->add_option("--formulation", formulation_arg, "f1|f2|f3|f4");
    cmd_solve->add_option("--time-limit", time_limit, "seconds");
    cmd_solve->add_option("--out", out_dir, "output directory");
    cmd_solve->add_option("--dump-nodes", dump_nodes, "directory for per-node LP dumps");
    cmd_solve->add_flag("--no-edge-fixing", no_fixing, "build the literal textbook model");

    auto* cmd_relax = app.add_subcommand("relax", "root LP relaxation values");
    std::string dump_lp;
    std::string relax_formulation_arg = "all";
    cmd_relax->add_option("instance", instance_path, "instance JSON file")->required();
    cmd_relax->add_option("--formulation", relax_formulation_arg, "f1|f2|f3|f4|all or list");
    cmd_relax->add_option("--dump-lp", dump_lp, "directory for LP-format model dumps");
    cmd_relax->add_flag("--no-edge-fixing", no_fixing, "build the literal textbook model");

    auto* cmd_compare = app.add_subcommand("compare", "root-LB table for all four formulations");
    add_suite_opts(cmd_compare);
    cmd_compare->add_option("--threads", threads, "parallel workers");

    auto* cmd_bench = app.add_subcommand("bench", "formulation benchmark (records + aggregates)");
    add_suite_opts(cmd_bench);
    cmd_bench->add_option("--formulation", formulation_arg, "f1|f2|f3|f4|all or list")
        ->default_val("f2,f4");
    cmd_bench->add_option("--time-limit", time_limit, "seconds per solve")->default_val(600.0);
    cmd_bench->add_option("--threads", threads, "parallel workers");

    auto* cmd_validate = app.add_subcommand("validate", "check a solution file");
    std::string solution_path;
    cmd_validate->add_option("instance", instance_path, "instance JSON file")->required();
    cmd_validate->add_option("solution", solution_path, "solution JSON file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_generate->parsed()) {
            ExperimentConfig cfg;
            cfg.seed = seed;
            if (!sizes.empty()) cfg.sizes = sizes;
            cfg.multipliers = multipliers;
            cfg.instances_per_size = replicates;
            cfg.num_depots = depots;
            cfg.output_dir = out_dir;
            int count = 0;
            for (const SuiteEntry& e : suite_entries(cfg)) {
                const Instance inst = generate(e.params);
                fs::create_directories(cfg.output_dir);
                save_instance(inst, (fs::path(cfg.output_dir) / ("inst_" + e.id + ".json")).string());
                ++count;
            }
            std::cout << "wrote " << count << " instances to " << cfg.output_dir << "\n";
            return 0;
        }

        if (cmd_solve->parsed()) {
            const Instance inst = load_instance(instance_path);
            const FormulationId f = parse_formulation(formulation_arg);
            BuildOptions bo;
            bo.apply_edge_fixing = !no_fixing;
            const BuiltModel built = build_formulation(f, inst, bo);
            MipOptions mo;
            mo.limits.time_limit = time_limit;
            mo.node_dump_dir = dump_nodes;
            if (!dump_nodes.empty()) fs::create_directories(dump_nodes);
            const MipResult mip = solve_mip(built.model, mo);

            nlohmann::ordered_json j;
            j["instance"] = instance_path;
            j["formulation"] = to_string(f);
            j["status"] = to_string(mip.status);
            j["root_lb"] = mip.root_lb;
            j["best_bound"] = mip.best_bound;
            j["nodes"] = mip.nodes_explored;
            j["lp_iterations"] = mip.lp_iterations;
            j["wall_time"] = mip.wall_time;
            j["integrality_tol"] = mip.integrality_tol;
            j["feasibility_tol"] = mip.feasibility_tol;
            if (mip.has_incumbent()) {
                j["objective"] = mip.incumbent_objective;
                std::map<std::pair<int, int>, double> xv;
                for (const auto& [pair, id] : built.x_index) xv[pair] = mip.incumbent_values[id];
                std::vector<double> hint(inst.num_vertices(), 0.0);
                for (const auto& [pair, id] : built.z_index)
                    if (xv[pair] > 0.5) hint[pair.second] = mip.incumbent_values[id];
                for (const auto& [vertex, id] : built.u_index)
                    hint[vertex] = mip.incumbent_values[id];
                const RouteSet routes = extract_routes(inst, xv, &hint);
                const FeasibilityReport rep = validate_routes(inst, routes);
                if (!rep.feasible) {
                    std::cerr << "FATAL: incumbent failed fuel validation\n";
                    return 1;
                }
                j["routes"] = nlohmann::ordered_json::parse(route_set_to_json(routes));
            }
            fs::create_directories(out_dir);
            const fs::path out_path =
                fs::path(out_dir) /
                (fs::path(instance_path).stem().string() + "_" + to_string(f) + ".json");
            write_file(out_path, j.dump(2) + "\n");
            std::cout << "status=" << to_string(mip.status);
            if (mip.has_incumbent()) std::cout << " objective=" << mip.incumbent_objective;
            std::cout << " best_bound=" << mip.best_bound << " nodes=" << mip.nodes_explored
                      << " time=" << mip.wall_time << "s -> " << out_path.string() << "\n";
            return status_exit_code(mip.status);
        }

        if (cmd_relax->parsed()) {
            const Instance inst = load_instance(instance_path);
            BuildOptions bo;
            bo.apply_edge_fixing = !no_fixing;
            const std::vector<FormulationId> fs_list = parse_formulations(relax_formulation_arg);
            for (FormulationId f : fs_list) {
                const BuiltModel built = build_formulation(f, inst, bo);
                if (!dump_lp.empty()) {
                    fs::create_directories(dump_lp);
                    write_lp_file(built.model,
                                  (fs::path(dump_lp) /
                                   (fs::path(instance_path).stem().string() + "_" +
                                    to_string(f) + ".lp"))
                                      .string());
                }
                std::cout << to_string(f) << " root_lb=" << root_lb(built.model) << "\n";
            }
            return 0;
        }

        if (cmd_compare->parsed()) {
            ExperimentConfig cfg;
            cfg.seed = seed;
            if (!sizes.empty()) cfg.sizes = sizes;
            cfg.multipliers = multipliers;
            cfg.instances_per_size = replicates;
            cfg.num_depots = depots;
            cfg.threads = threads;
            cfg.output_dir = out_dir;
            const CompareReport rep =
                run_compare(cfg, [](const std::string& m) { std::cerr << m << "\n"; });
            write_file(fs::path(out_dir) / "compare.csv", rep.to_csv());
            write_file(fs::path(out_dir) / "compare_summary.txt", rep.summary());
            std::cout << rep.summary();
            return rep.dominance_violations == 0 ? 0 : 1;
        }

        if (cmd_bench->parsed()) {
            ExperimentConfig cfg;
            cfg.seed = seed;
            cfg.sizes = sizes.empty() ? std::vector<int>{10, 15, 20} : sizes;
            cfg.multipliers = multipliers;
            cfg.instances_per_size = replicates;
            cfg.num_depots = depots;
            cfg.formulations = parse_formulations(formulation_arg);
            cfg.limits.time_limit = time_limit;
            cfg.threads = threads;
            cfg.output_dir = out_dir;
            const BenchReport rep =
                run_bench(cfg, [](const std::string& m) { std::cerr << m << "\n"; });
            write_file(fs::path(out_dir) / "records.csv", rep.records_csv());
            write_file(fs::path(out_dir) / "bench_succ.csv", rep.succ_csv(cfg.formulations));
            write_file(fs::path(out_dir) / "bench_time.csv", rep.time_csv(cfg.formulations));
            write_file(fs::path(out_dir) / "bench_pctlb.csv", rep.pct_lb_csv(cfg.formulations));
            write_file(fs::path(out_dir) / "bench_plot.dat", rep.plot_data(cfg.formulations));
            std::cout << rep.succ_csv(cfg.formulations);
            return 0;
        }

        if (cmd_validate->parsed()) {
            const Instance inst = load_instance(instance_path);
            std::ifstream in(solution_path);
            if (!in) throw Error("cannot open solution file '" + solution_path + "'");
            std::string text((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
            // accept either a bare RouteSet or a solver output with a routes field
            RouteSet routes;
            const auto j = nlohmann::json::parse(text);
            if (j.contains("routes") && j["routes"].is_object())
                routes = route_set_from_json(j["routes"].dump());
            else
                routes = route_set_from_json(text);
            const FeasibilityReport rep = validate_routes(inst, routes);
            if (rep.feasible) {
                std::cout << "feasible: all segments within capacity "
                          << inst.fuel_capacity() << "\n";
                return 0;
            }
            for (const auto& v : rep.violations)
                std::cout << "violation: route of depot " << v.depot << ", segment at index "
                          << v.start_index << " uses " << v.fuel << " fuel > capacity "
                          << v.capacity << "\n";
            return 2;
        }
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 1;
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
