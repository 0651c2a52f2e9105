#include "cga/constraints.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace cga {

ConstraintResult mass_constraint(const ElementProps& props, double element_area, double m_star) {
    if (!(m_star > 0.0)) throw std::invalid_argument("mass_constraint: m* must be positive");
    ConstraintResult out;
    out.value = props.lambda.sum() * element_area / m_star - 1.0;
    out.grad = props.dlambda * (element_area / m_star);
    return out;
}

LseBounds lse_bounds(const Eigen::MatrixXd& rho, double t) {
    if (!rho.allFinite()) throw std::invalid_argument("lse_bounds: non-finite field values");
    LseBounds out;

    const double hi = rho.maxCoeff();
    const Eigen::ArrayXXd e_up = ((rho.array() - hi) * t).exp();
    const double sum_up = e_up.sum();
    out.g_u = hi + std::log(sum_up) / t - 1.0;
    out.grad_u = (e_up / sum_up).matrix();

    const double lo = rho.minCoeff();
    const Eigen::ArrayXXd e_dn = ((lo - rho.array()) * t).exp();
    const double sum_dn = e_dn.sum();
    // g_l = -smoothmin(rho); smoothmin = lo - log(sum_dn)/t
    out.g_l = -lo + std::log(sum_dn) / t;
    out.grad_l = (-e_dn / sum_dn).matrix();
    return out;
}

PartitionResult partition_constraint(const Eigen::MatrixXd& rho) {
    const long ne = rho.rows();
    PartitionResult out;
    const Eigen::ArrayXd row_dev = rho.rowwise().sum().array() - 1.0;
    out.g_p = row_dev.sum() / static_cast<double>(ne);
    out.max_deviation = row_dev.abs().maxCoeff();
    out.grad = Eigen::MatrixXd::Constant(ne, rho.cols(), 1.0 / static_cast<double>(ne));
    return out;
}

BarrierValue barrier(double g, double tau) {
    if (!(tau > 0.0)) throw std::invalid_argument("barrier: tau must be positive");
    BarrierValue out;
    const double branch = -1.0 / (tau * tau);
    if (g <= branch) {
        out.psi = -std::log(-g) / tau;
        out.dpsi = -1.0 / (tau * g);
    } else {
        out.psi = tau * g - std::log(1.0 / (tau * tau)) / tau + 1.0 / tau;
        out.dpsi = tau;
    }
    return out;
}

LossBreakdown total_loss(double J, double J0, const Eigen::MatrixXd& dJ_drho,
                         const ConstraintResult& mass, const LseBounds& bounds,
                         const PartitionResult& partition, double tau, bool include_partition) {
    if (!(J0 > 0.0)) throw std::invalid_argument("total_loss: J0 must be positive");

    LossBreakdown out;
    out.J_over_J0 = J / J0;
    out.g_m = mass.value;
    out.g_u = bounds.g_u;
    out.g_l = bounds.g_l;
    out.g_p = partition.g_p;
    out.max_partition_deviation = partition.max_deviation;

    const BarrierValue bm = barrier(mass.value, tau);
    const BarrierValue bu = barrier(bounds.g_u, tau);
    const BarrierValue bl = barrier(bounds.g_l, tau);

    out.loss = out.J_over_J0 + bm.psi + bu.psi + bl.psi;
    out.dL_drho = dJ_drho / J0 + bm.dpsi * mass.grad + bu.dpsi * bounds.grad_u +
                  bl.dpsi * bounds.grad_l;
    if (include_partition) {
        const BarrierValue bp = barrier(partition.g_p, tau);
        const BarrierValue bn = barrier(-partition.g_p, tau);
        out.loss += bp.psi + bn.psi;
        out.dL_drho += (bp.dpsi - bn.dpsi) * partition.grad;
    }

    if (!std::isfinite(out.loss) || !out.dL_drho.allFinite()) {
        std::ostringstream msg;
        msg << "total_loss: non-finite loss (J/J0 = " << out.J_over_J0 << ", g_m = " << out.g_m
            << ", g_u = " << out.g_u << ", g_l = " << out.g_l << ", g_p = " << out.g_p
            << ", tau = " << tau << ")";
        throw std::runtime_error(msg.str());
    }
    return out;
}

}  // namespace cga
