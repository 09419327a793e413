#ifndef FCMVRP_INSTANCE_HPP
#define FCMVRP_INSTANCE_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace fcmvrp {

enum class VertexKind { Depot, Target };

struct Vertex {
    int id = 0;
    VertexKind kind = VertexKind::Target;
    double x = 0.0;
    double y = 0.0;
};

/// A FCMVRP instance: depots (ids 0..k-1) followed by targets, a fuel
/// capacity F shared by all vehicles, and dense symmetric fuel / cost
/// matrices with cost = cost_per_fuel * fuel. Immutable after construction;
/// the constructor validates all structural invariants.
class Instance {
public:
    /// Euclidean instance from coordinates; fuel = pairwise distances.
    Instance(std::vector<Vertex> vertices, double fuel_capacity, double cost_per_fuel);

    /// Explicit-matrix instance (non-Euclidean). The matrix must be square,
    /// symmetric, nonnegative, zero-diagonal and satisfy the triangle
    /// inequality; vertices carry ids/kinds (coordinates unused).
    Instance(std::vector<Vertex> vertices, std::vector<std::vector<double>> fuel_matrix,
             double fuel_capacity, double cost_per_fuel);

    int num_vertices() const { return static_cast<int>(vertices_.size()); }
    int num_depots() const { return num_depots_; }
    int num_targets() const { return num_vertices() - num_depots_; }
    bool is_depot(int i) const { return i < num_depots_; }
    bool is_target(int i) const { return i >= num_depots_; }
    const Vertex& vertex(int i) const { return vertices_[i]; }
    const std::vector<Vertex>& vertices() const { return vertices_; }

    double fuel(int i, int j) const { return fuel_[i][j]; }
    double cost(int i, int j) const { return cost_[i][j]; }
    const std::vector<std::vector<double>>& fuel_matrix() const { return fuel_; }
    double fuel_capacity() const { return fuel_capacity_; }
    double cost_per_fuel() const { return cost_per_fuel_; }
    bool euclidean() const { return euclidean_; }

    /// Generator provenance, kept for instance-file round trips (0 = none).
    std::uint64_t seed = 0;
    double grid_side = 0.0;
    double fuel_multiplier = 0.0;

private:
    void validate() const;

    std::vector<Vertex> vertices_;
    int num_depots_ = 0;
    std::vector<std::vector<double>> fuel_;
    std::vector<std::vector<double>> cost_;
    double fuel_capacity_ = 0.0;
    double cost_per_fuel_ = 1.0;
    bool euclidean_ = true;
};

/// Per-vertex fuel bounds: s[i] = min fuel from any depot to i,
/// t[i] = min fuel from i to any depot; zero at depots.
struct VertexFuelBounds {
    std::vector<double> s;
    std::vector<double> t;
};

struct GeneratorParams {
    int num_targets = 0;
    int num_depots = 5;
    double grid_side = 100.0;
    double fuel_multiplier = 2.25;
    std::uint64_t seed = 0;
};

VertexFuelBounds compute_bounds(const Instance& instance);

/// Largest nearest-depot distance over all targets (max-min). Fuel
/// capacities of generated instances are multiples of this value.
double lambda_value(const Instance& instance);

/// Seeded uniform placement on the grid; fuel = Euclidean distances,
/// cost = fuel (K = 1), F = fuel_multiplier * lambda. Pure function of
/// params: the same seed always yields the same instance, and the geometry
/// does not depend on the multiplier.
Instance generate(const GeneratorParams& params);

void save_instance(const Instance& instance, const std::string& path);
Instance load_instance(const std::string& path);

/// JSON round-trip without touching the filesystem.
std::string instance_to_json(const Instance& instance);
Instance instance_from_json(const std::string& text);

} // namespace fcmvrp

#endif
