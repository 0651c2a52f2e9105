#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cga/fea.hpp"
#include "cga/field_net.hpp"
#include "cga/mesh.hpp"
#include "cga/optimizer.hpp"

namespace cga {

enum class BcKind { Fixed, Load, Temperature, Flux };

struct BcSpec {
    BcKind kind = BcKind::Fixed;
    RegionSpec region;
    bool fix_x = false, fix_y = false;
    double value = 0.0;  // displacement / temperature / heat
    double fx = 0.0, fy = 0.0;
};

enum class MaterialKind { LinearSingle, Rbf };

enum class RunMode { Neural, Baseline };

// Fully validated run description. Produced only by parse_config (or tests);
// unknown keys and malformed values are rejected with the offending key named.
struct ProblemConfig {
    // grid
    int nx = 120, ny = 60;
    double lx = 2.0, ly = 1.0;
    // material
    MaterialKind material = MaterialKind::LinearSingle;
    double E0 = 1.0, lambda0 = 1.0, kappa0 = 1.0, alpha0 = 0.0;
    std::filesystem::path dataset;  // rbf anchors, resolved against the config dir
    double rbf_epsilon = 1.0;
    // network
    int n_layers = 3;
    int width = 100;
    double bandwidth_x = 5.0, bandwidth_y = 5.0;
    std::uint64_t seed = 0;
    std::optional<int> components;  // cross-checked against the material
    // constraints
    double mass_budget = 1.0;
    double lse_t = 10.0;
    double tau0 = 3.0;
    double tau_growth = 1.04;
    // physics
    double nu = 0.3;
    double t_ref = 0.0;
    double body_heat = 0.0;
    double body_fx = 0.0, body_fy = 0.0;
    double floor_scale = 1e-6;
    LinearSolverKind solver = LinearSolverKind::Direct;
    // run
    double learning_rate = 1e-2;
    double clip_norm = 1.0;
    int max_iter = 500;
    double loss_tol = 1e-3;
    RunMode mode = RunMode::Neural;
    bool deterministic = true;
    std::filesystem::path out_dir = "out";
    // boundary conditions, in file order
    std::vector<BcSpec> bcs;
};

ProblemConfig parse_config(const std::filesystem::path& path);

// Assembled pieces ready for the optimizer.
Grid2D make_grid(const ProblemConfig& cfg);
BoundaryConditions make_bcs(const ProblemConfig& cfg, const Grid2D& grid);
std::unique_ptr<MaterialModel> make_material(const ProblemConfig& cfg);
ThermoElasticProblem make_problem(const ProblemConfig& cfg);
MfnConfig make_net_config(const ProblemConfig& cfg, int components);
RunConfig make_run_config(const ProblemConfig& cfg);

}  // namespace cga
