#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "cga/constraints.hpp"
#include "cga/fea.hpp"
#include "cga/field_net.hpp"
#include "cga/materials.hpp"

namespace cga {

struct AdamState {
    Eigen::VectorXd m;
    Eigen::VectorXd v;
    std::int64_t step = 0;
    double lr = 1e-2;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

AdamState make_adam(long size, double lr);

// Scales g to the threshold when ||g||_2 exceeds it. Throws on non-finite input.
Eigen::VectorXd clip_gradient(const Eigen::VectorXd& g, double threshold);

// Bias-corrected Adam update in place. Throws on non-finite update.
void adam_step(AdamState& state, Eigen::VectorXd& params, const Eigen::VectorXd& grad);

struct RunConfig {
    int max_iter = 500;
    double loss_tol = 1e-3;   // stop when |L_k - L_{k-1}| <= loss_tol
    double clip_norm = 1.0;
    double learning_rate = 1e-2;
    double tau0 = 3.0;
    double tau_growth = 1.04;
    double lse_t = 10.0;
    bool deterministic = true;
};

struct IterationRecord {
    int iteration = 0;
    double J = 0.0;
    double J_over_J0 = 0.0;
    double loss = 0.0;
    double g_m = 0.0, g_u = 0.0, g_l = 0.0, g_p = 0.0;
    double max_partition_deviation = 0.0;
    double tau = 0.0;
    double grad_norm = 0.0;  // before clipping
    double wall_time_s = 0.0;
};

struct OptimizationResult {
    CompositionField field;           // final composition at element centers
    double J = 0.0;
    double J0 = 0.0;
    int iterations = 0;               // number of parameter updates
    bool converged = false;           // loss_tol rule fired before max_iter
    bool solver_failed = false;
    std::string failure;
    std::vector<IterationRecord> history;  // length iterations + 1
    MfnParams params;                 // neural mode
    Eigen::VectorXd element_vars;     // baseline mode (N_e * S, element-major)
    bool neural = true;
    ThermalSolution final_thermal;
    StructuralSolution final_structural;
    Eigen::VectorXd final_compliance_density;
};

// Barrier-penalized compliance minimization with the coordinate network as
// the design parameterization.
OptimizationResult run_optimization(const ThermoElasticProblem& problem, const MfnConfig& net,
                                    const MaterialModel& material, const RunConfig& run);

// Same loss machinery with per-element compositions as the design variables:
// no network, no gradation limit.
OptimizationResult run_baseline_element(const ThermoElasticProblem& problem,
                                        const MaterialModel& material, const RunConfig& run);

}  // namespace cga
