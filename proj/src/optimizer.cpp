#include "cga/optimizer.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>

#include "cga/errors.hpp"

namespace cga {

AdamState make_adam(long size, double lr) {
    AdamState s;
    s.m = Eigen::VectorXd::Zero(size);
    s.v = Eigen::VectorXd::Zero(size);
    s.lr = lr;
    return s;
}

Eigen::VectorXd clip_gradient(const Eigen::VectorXd& g, double threshold) {
    if (!g.allFinite()) throw std::runtime_error("clip_gradient: non-finite gradient entries");
    const double norm = g.norm();
    if (norm > threshold) return g * (threshold / norm);
    return g;
}

void adam_step(AdamState& state, Eigen::VectorXd& params, const Eigen::VectorXd& grad) {
    if (params.size() != grad.size() || state.m.size() != grad.size()) {
        throw std::invalid_argument("adam_step: shape mismatch");
    }
    ++state.step;
    state.m = state.beta1 * state.m + (1.0 - state.beta1) * grad;
    state.v = state.beta2 * state.v + (1.0 - state.beta2) * grad.cwiseProduct(grad);
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
    const Eigen::VectorXd update =
        (state.m / bc1).cwiseQuotient(((state.v / bc2).cwiseSqrt().array() + state.eps).matrix());
    if (!update.allFinite()) {
        throw std::runtime_error("adam_step: non-finite update at step " +
                                 std::to_string(state.step));
    }
    params -= state.lr * update;
}

namespace {

struct Evaluation {
    CompositionField rho;
    double J = 0.0;
    LossBreakdown loss;
    ThermalSolution thermal;
    StructuralSolution structural;
    ElementProps props;
};

// One pass of the analysis pipeline for a given composition field. J0 <= 0
// signals the first iteration (loss normalizer not yet captured).
Evaluation evaluate_field(ThermoElasticFea& fea, const ThermoElasticProblem& problem,
                          const MaterialModel& material, const RunConfig& run,
                          const CompositionField& rho, double tau, double j0,
                          bool include_partition) {
    Evaluation ev;
    ev.rho = rho;
    ev.props = evaluate_element_props(material, rho, problem.floor_scale);
    ev.thermal = fea.solve_thermal(ev.props.kappa);
    const Eigen::VectorXd f_th = fea.thermal_force(ev.props, ev.thermal);
    ev.structural = fea.solve_structural(ev.props, f_th);
    ev.J = ev.structural.compliance;

    const double j_norm = j0 > 0.0 ? j0 : ev.J;
    const Eigen::MatrixXd dj_drho = fea.sensitivity(ev.props, ev.thermal, ev.structural);
    const ConstraintResult mass =
        mass_constraint(ev.props, problem.grid.element_area(), problem.mass_budget);
    const LseBounds bounds = lse_bounds(rho, run.lse_t);
    const PartitionResult partition = partition_constraint(rho);
    ev.loss = total_loss(ev.J, j_norm, dj_drho, mass, bounds, partition, tau, include_partition);
    return ev;
}

// Shared Adam/barrier/continuation loop. The two modes differ only in how the
// flat design vector maps to a composition field and how dL/drho pulls back to
// the design gradient.
OptimizationResult optimize_loop(
    const ThermoElasticProblem& problem, const MaterialModel& material, const RunConfig& run,
    Eigen::VectorXd design, const std::function<CompositionField(const Eigen::VectorXd&)>& to_field,
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&, const Eigen::MatrixXd&)>& pullback) {
    OptimizationResult result;
    ThermoElasticFea fea(problem.grid, problem.bcs, problem.nu, problem.t_ref, problem.solver);
    const bool include_partition = material.components() >= 2;

    AdamState adam = make_adam(design.size(), run.learning_rate);
    const auto t_start = std::chrono::steady_clock::now();
    auto elapsed = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    };

    double j0 = 0.0;
    double prev_loss = 0.0;
    int k = 0;
    while (true) {
        const double tau = run.tau0 * std::pow(run.tau_growth, static_cast<double>(k));
        Evaluation ev;
        try {
            ev = evaluate_field(fea, problem, material, run, to_field(design), tau, j0,
                                include_partition);
        } catch (const SolverError& err) {
            result.solver_failed = true;
            result.failure = err.what();
            break;
        } catch (const IllPosedError& err) {
            result.solver_failed = true;
            result.failure = err.what();
            break;
        }
        if (k == 0) j0 = ev.J;

        const Eigen::VectorXd grad = pullback(design, ev.loss.dL_drho);

        IterationRecord rec;
        rec.iteration = k;
        rec.J = ev.J;
        rec.J_over_J0 = ev.loss.J_over_J0;
        rec.loss = ev.loss.loss;
        rec.g_m = ev.loss.g_m;
        rec.g_u = ev.loss.g_u;
        rec.g_l = ev.loss.g_l;
        rec.g_p = ev.loss.g_p;
        rec.max_partition_deviation = ev.loss.max_partition_deviation;
        rec.tau = tau;
        rec.grad_norm = grad.norm();
        rec.wall_time_s = elapsed();
        result.history.push_back(rec);

        result.field = ev.rho;
        result.J = ev.J;
        result.J0 = j0;
        result.final_thermal = ev.thermal;
        result.final_structural = ev.structural;
        result.final_compliance_density = fea.compliance_density(ev.props, ev.structural);

        if (k >= 1 && std::abs(ev.loss.loss - prev_loss) <= run.loss_tol) {
            result.converged = true;
            break;
        }
        if (k >= run.max_iter) break;
        prev_loss = ev.loss.loss;

        adam_step(adam, design, clip_gradient(grad, run.clip_norm));
        ++k;
    }

    result.iterations = k;
    result.element_vars = design;
    return result;
}

}  // namespace

OptimizationResult run_optimization(const ThermoElasticProblem& problem, const MfnConfig& net,
                                    const MaterialModel& material, const RunConfig& run) {
    MfnConfig config = net;
    config.outputs = material.components();
    MfnParams params = init_mfn(config);
    const Eigen::MatrixX2d centers = element_centers(problem.grid);

    auto to_field = [&](const Eigen::VectorXd& flat) {
        trainable_load(params, flat);
        return forward(params, centers);
    };
    auto pullback = [&](const Eigen::VectorXd& flat, const Eigen::MatrixXd& dl_drho) {
        trainable_load(params, flat);
        return backward(params, centers, dl_drho);
    };

    OptimizationResult result =
        optimize_loop(problem, material, run, trainable_flatten(params), to_field, pullback);
    trainable_load(params, result.element_vars);
    result.params = params;
    result.neural = true;
    return result;
}

OptimizationResult run_baseline_element(const ThermoElasticProblem& problem,
                                        const MaterialModel& material, const RunConfig& run) {
    const int ne = problem.grid.num_elements();
    const int s = material.components();
    Eigen::VectorXd design = Eigen::VectorXd::Constant(ne * s, 1.0 / s);

    auto to_field = [ne, s](const Eigen::VectorXd& flat) {
        CompositionField rho(ne, s);
        for (int e = 0; e < ne; ++e)
            for (int j = 0; j < s; ++j) rho(e, j) = flat(e * s + j);
        return rho;
    };
    auto pullback = [ne, s](const Eigen::VectorXd&, const Eigen::MatrixXd& dl_drho) {
        Eigen::VectorXd grad(ne * s);
        for (int e = 0; e < ne; ++e)
            for (int j = 0; j < s; ++j) grad(e * s + j) = dl_drho(e, j);
        return grad;
    };

    OptimizationResult result = optimize_loop(problem, material, run, design, to_field, pullback);
    result.neural = false;
    return result;
}

}  // namespace cga
