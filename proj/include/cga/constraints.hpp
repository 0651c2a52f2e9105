#pragma once

#include <Eigen/Dense>

#include "cga/fea.hpp"

namespace cga {

struct ConstraintResult {
    double value = 0.0;
    Eigen::MatrixXd grad;  // N_e x S
};

// g_m = (sum_e lambda_e A_e) / m* - 1.
ConstraintResult mass_constraint(const ElementProps& props, double element_area, double m_star);

// Smooth aggregated bounds over all field entries:
//   g_u = (1/t) log sum exp(t rho)  - 1          (LSE max <= 1)
//   g_l = (1/t) log sum exp(-t rho)               (negated LSE min >= 0)
// Both stabilized by max shift.
struct LseBounds {
    double g_u = 0.0;
    double g_l = 0.0;
    Eigen::MatrixXd grad_u;
    Eigen::MatrixXd grad_l;
};
LseBounds lse_bounds(const Eigen::MatrixXd& rho, double t);

// Element-averaged partition-of-unity deviation plus a max-deviation
// diagnostic (signed averaging can cancel).
struct PartitionResult {
    double g_p = 0.0;
    double max_deviation = 0.0;
    Eigen::MatrixXd grad;
};
PartitionResult partition_constraint(const Eigen::MatrixXd& rho);

// Log-barrier with linear extension:
//   psi = -(1/tau) ln(-g)                      for g <= -1/tau^2
//   psi = tau g - (1/tau) ln(1/tau^2) + 1/tau  otherwise
// C1 across the branch point.
struct BarrierValue {
    double psi = 0.0;
    double dpsi = 0.0;
};
BarrierValue barrier(double g, double tau);

struct LossBreakdown {
    double loss = 0.0;
    double J_over_J0 = 0.0;
    double g_m = 0.0, g_u = 0.0, g_l = 0.0, g_p = 0.0;
    double max_partition_deviation = 0.0;
    Eigen::MatrixXd dL_drho;  // N_e x S
};

// L = J/J0 + psi(g_m) + psi(g_u) + psi(g_l) [+ psi(g_p) + psi(-g_p)].
// The partition terms are included only when include_partition is set (a
// single-component design cannot satisfy partition of unity and a mass budget
// simultaneously). Throws on non-finite loss.
LossBreakdown total_loss(double J, double J0, const Eigen::MatrixXd& dJ_drho,
                         const ConstraintResult& mass, const LseBounds& bounds,
                         const PartitionResult& partition, double tau, bool include_partition);

}  // namespace cga
