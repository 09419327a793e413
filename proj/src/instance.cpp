#include "fcmvrp/instance.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "fcmvrp/errors.hpp"
#include "fcmvrp/rng.hpp"

namespace fcmvrp {

namespace {

constexpr double kTriangleEps = 1e-9;

std::vector<std::vector<double>> euclidean_matrix(const std::vector<Vertex>& vs) {
    const int n = static_cast<int>(vs.size());
    std::vector<std::vector<double>> m(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double d = std::hypot(vs[i].x - vs[j].x, vs[i].y - vs[j].y);
            m[i][j] = m[j][i] = d;
        }
    return m;
}

} // namespace

Instance::Instance(std::vector<Vertex> vertices, double fuel_capacity, double cost_per_fuel)
    : vertices_(std::move(vertices)),
      fuel_capacity_(fuel_capacity),
      cost_per_fuel_(cost_per_fuel),
      euclidean_(true) {
    fuel_ = euclidean_matrix(vertices_);
    const int n = num_vertices();
    cost_.assign(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) cost_[i][j] = cost_per_fuel_ * fuel_[i][j];
    num_depots_ = static_cast<int>(
        std::count_if(vertices_.begin(), vertices_.end(),
                      [](const Vertex& v) { return v.kind == VertexKind::Depot; }));
    validate();
}

Instance::Instance(std::vector<Vertex> vertices, std::vector<std::vector<double>> fuel_matrix,
                   double fuel_capacity, double cost_per_fuel)
    : vertices_(std::move(vertices)),
      fuel_(std::move(fuel_matrix)),
      fuel_capacity_(fuel_capacity),
      cost_per_fuel_(cost_per_fuel),
      euclidean_(false) {
    const int n = num_vertices();
    if (static_cast<int>(fuel_.size()) != n)
        throw ValidationError("fuel matrix size " + std::to_string(fuel_.size()) +
                              " does not match vertex count " + std::to_string(n));
    for (int i = 0; i < n; ++i)
        if (static_cast<int>(fuel_[i].size()) != n)
            throw ValidationError("fuel matrix row " + std::to_string(i) + " has wrong length");
    cost_.assign(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) cost_[i][j] = cost_per_fuel_ * fuel_[i][j];
    num_depots_ = static_cast<int>(
        std::count_if(vertices_.begin(), vertices_.end(),
                      [](const Vertex& v) { return v.kind == VertexKind::Depot; }));
    validate();
}

void Instance::validate() const {
    const int n = num_vertices();
    if (num_depots_ < 1) throw ValidationError("instance needs at least one depot");
    if (num_targets() < 1) throw ValidationError("instance needs at least one target");
    if (!(fuel_capacity_ > 0.0)) throw ValidationError("fuel_capacity must be positive");
    if (!(cost_per_fuel_ > 0.0)) throw ValidationError("cost_per_fuel must be positive");
    for (int i = 0; i < n; ++i) {
        if (vertices_[i].id != i)
            throw ValidationError("vertex ids must be contiguous and 0-based; vertex " +
                                  std::to_string(i) + " has id " + std::to_string(vertices_[i].id));
        const bool depot = vertices_[i].kind == VertexKind::Depot;
        if (depot != (i < num_depots_))
            throw ValidationError("depots must precede targets; vertex " + std::to_string(i) +
                                  " is out of order");
    }
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j) continue; // diagonal is treated as absent
            if (!std::isfinite(fuel_[i][j]) || fuel_[i][j] < 0.0)
                throw ValidationError("fuel[" + std::to_string(i) + "][" + std::to_string(j) +
                                      "] must be finite and nonnegative");
            if (std::abs(fuel_[i][j] - fuel_[j][i]) > kTriangleEps)
                throw ValidationError("fuel matrix is asymmetric at pair (" + std::to_string(i) +
                                      "," + std::to_string(j) + "): " + std::to_string(fuel_[i][j]) +
                                      " vs " + std::to_string(fuel_[j][i]));
        }
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            for (int k = 0; k < n; ++k) {
                if (k == i || k == j) continue;
                if (fuel_[i][j] + fuel_[j][k] < fuel_[i][k] - kTriangleEps)
                    throw ValidationError("triangle inequality violated on (" + std::to_string(i) +
                                          "," + std::to_string(j) + "," + std::to_string(k) + ")");
            }
        }
}

VertexFuelBounds compute_bounds(const Instance& instance) {
    const int n = instance.num_vertices();
    VertexFuelBounds b;
    b.s.assign(n, 0.0);
    b.t.assign(n, 0.0);
    for (int i = instance.num_depots(); i < n; ++i) {
        double s = std::numeric_limits<double>::infinity();
        double t = std::numeric_limits<double>::infinity();
        for (int d = 0; d < instance.num_depots(); ++d) {
            s = std::min(s, instance.fuel(d, i));
            t = std::min(t, instance.fuel(i, d));
        }
        b.s[i] = s;
        b.t[i] = t;
    }
    return b;
}

double lambda_value(const Instance& instance) {
    if (instance.num_targets() < 1) throw ValidationError("lambda requires at least one target");
    const VertexFuelBounds b = compute_bounds(instance);
    double lambda = 0.0;
    for (int i = instance.num_depots(); i < instance.num_vertices(); ++i)
        lambda = std::max(lambda, b.s[i]);
    return lambda;
}

Instance generate(const GeneratorParams& params) {
    if (params.num_targets < 1) throw ValidationError("num_targets must be >= 1");
    if (params.num_depots < 1) throw ValidationError("num_depots must be >= 1");
    if (!(params.grid_side > 0.0)) throw ValidationError("grid_side must be positive");
    if (!(params.fuel_multiplier > 2.0))
        throw ValidationError("fuel_multiplier must exceed 2 (round trips must be coverable)");

    Rng rng(params.seed);
    std::vector<Vertex> vs;
    vs.reserve(params.num_depots + params.num_targets);
    for (int d = 0; d < params.num_depots; ++d) {
        const double x = rng.uniform(params.grid_side);
        const double y = rng.uniform(params.grid_side);
        vs.push_back({static_cast<int>(vs.size()), VertexKind::Depot, x, y});
    }
    for (int t = 0; t < params.num_targets; ++t) {
        const double x = rng.uniform(params.grid_side);
        const double y = rng.uniform(params.grid_side);
        vs.push_back({static_cast<int>(vs.size()), VertexKind::Target, x, y});
    }

    // F depends on the geometry only through lambda, so one geometry can be
    // reissued under several multipliers. Capacity needs a throwaway value
    // to construct the instance for the lambda computation.
    Instance probe(vs, 1.0, 1.0);
    const double lambda = lambda_value(probe);
    if (!(lambda > 0.0))
        throw ValidationError("degenerate geometry: every target coincides with a depot");

    Instance out(std::move(vs), params.fuel_multiplier * lambda, 1.0);
    out.seed = params.seed;
    out.grid_side = params.grid_side;
    out.fuel_multiplier = params.fuel_multiplier;
    return out;
}

using ordered_json = nlohmann::ordered_json;

std::string instance_to_json(const Instance& instance) {
    ordered_json j;
    j["schema_version"] = 1;
    j["rng_algorithm"] = Rng::algorithm_id();
    j["seed"] = instance.seed;
    if (instance.grid_side > 0.0) j["grid_side"] = instance.grid_side;
    if (instance.fuel_multiplier > 0.0) j["fuel_multiplier"] = instance.fuel_multiplier;
    if (instance.euclidean()) {
        ordered_json depots = ordered_json::array();
        ordered_json targets = ordered_json::array();
        for (const Vertex& v : instance.vertices()) {
            ordered_json pt = ordered_json::array({v.x, v.y});
            if (v.kind == VertexKind::Depot)
                depots.push_back(std::move(pt));
            else
                targets.push_back(std::move(pt));
        }
        j["depots"] = std::move(depots);
        j["targets"] = std::move(targets);
    } else {
        j["num_depots"] = instance.num_depots();
        j["num_targets"] = instance.num_targets();
        j["matrices"] = ordered_json{{"fuel", instance.fuel_matrix()}};
    }
    j["fuel_capacity"] = instance.fuel_capacity();
    j["cost_per_fuel"] = instance.cost_per_fuel();
    return j.dump(2) + "\n";
}

namespace {

const nlohmann::json& require_field(const nlohmann::json& j, const char* name) {
    auto it = j.find(name);
    if (it == j.end()) throw ParseError(std::string("missing required field '") + name + "'");
    return *it;
}

} // namespace

Instance instance_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("instance file is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ParseError("instance file root must be a JSON object");
    const int schema = require_field(j, "schema_version").get<int>();
    if (schema != 1) throw ParseError("unsupported schema_version " + std::to_string(schema));
    const double capacity = require_field(j, "fuel_capacity").get<double>();
    const double k = require_field(j, "cost_per_fuel").get<double>();

    Instance result = [&]() -> Instance {
        if (j.contains("depots") || j.contains("targets")) {
            const auto& depots = require_field(j, "depots");
            const auto& targets = require_field(j, "targets");
            std::vector<Vertex> vs;
            for (const auto& pt : depots) {
                if (!pt.is_array() || pt.size() != 2) throw ParseError("depot entries must be [x,y]");
                vs.push_back({static_cast<int>(vs.size()), VertexKind::Depot, pt[0].get<double>(),
                              pt[1].get<double>()});
            }
            for (const auto& pt : targets) {
                if (!pt.is_array() || pt.size() != 2)
                    throw ParseError("target entries must be [x,y]");
                vs.push_back({static_cast<int>(vs.size()), VertexKind::Target, pt[0].get<double>(),
                              pt[1].get<double>()});
            }
            return Instance(std::move(vs), capacity, k);
        }
        if (j.contains("matrices")) {
            const auto& m = require_field(j, "matrices");
            auto fuel = require_field(m, "fuel").get<std::vector<std::vector<double>>>();
            const int nd = require_field(j, "num_depots").get<int>();
            const int nt = require_field(j, "num_targets").get<int>();
            std::vector<Vertex> vs;
            for (int i = 0; i < nd + nt; ++i)
                vs.push_back({i, i < nd ? VertexKind::Depot : VertexKind::Target, 0.0, 0.0});
            return Instance(std::move(vs), std::move(fuel), capacity, k);
        }
        throw ParseError("instance file needs either depots/targets coordinates or a matrices field");
    }();
    if (j.contains("seed")) result.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("grid_side")) result.grid_side = j["grid_side"].get<double>();
    if (j.contains("fuel_multiplier")) result.fuel_multiplier = j["fuel_multiplier"].get<double>();
    return result;
}

void save_instance(const Instance& instance, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    out << instance_to_json(instance);
    if (!out) throw Error("write to '" + path + "' failed");
}

Instance load_instance(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open instance file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return instance_from_json(buf.str());
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    } catch (const ValidationError& e) {
        throw ValidationError(path + ": " + e.what());
    }
}

} // namespace fcmvrp
