#include "cga/fea.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "cga/errors.hpp"

namespace cga {

namespace {

constexpr double kGauss = 0.5773502691896257;  // 1/sqrt(3)

struct GaussPoint {
    double xi, eta;
    Eigen::Vector4d n;      // shape functions
    Eigen::Vector4d dn_dx;  // physical derivatives
    Eigen::Vector4d dn_dy;
};

// Node order matches Grid2D connectivity: (-,-), (+,-), (+,+), (-,+).
std::array<GaussPoint, 4> gauss_points(double dx, double dy) {
    const double sx = 2.0 / dx;
    const double sy = 2.0 / dy;
    std::array<GaussPoint, 4> gps;
    const double pos[2] = {-kGauss, kGauss};
    int g = 0;
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            const double xi = pos[a];
            const double eta = pos[b];
            GaussPoint gp;
            gp.xi = xi;
            gp.eta = eta;
            gp.n << 0.25 * (1 - xi) * (1 - eta), 0.25 * (1 + xi) * (1 - eta),
                0.25 * (1 + xi) * (1 + eta), 0.25 * (1 - xi) * (1 + eta);
            Eigen::Vector4d dn_dxi, dn_deta;
            dn_dxi << -0.25 * (1 - eta), 0.25 * (1 - eta), 0.25 * (1 + eta), -0.25 * (1 + eta);
            dn_deta << -0.25 * (1 - xi), -0.25 * (1 + xi), 0.25 * (1 + xi), 0.25 * (1 - xi);
            gp.dn_dx = dn_dxi * sx;
            gp.dn_dy = dn_deta * sy;
            gps[g++] = gp;
        }
    }
    return gps;
}

Eigen::Matrix3d plane_stress_d(double nu) {
    Eigen::Matrix3d d;
    d << 1.0, nu, 0.0, nu, 1.0, 0.0, 0.0, 0.0, 0.5 * (1.0 - nu);
    return d / (1.0 - nu * nu);
}

Eigen::Matrix<double, 3, 8> b_matrix(const GaussPoint& gp) {
    Eigen::Matrix<double, 3, 8> b = Eigen::Matrix<double, 3, 8>::Zero();
    for (int a = 0; a < 4; ++a) {
        b(0, 2 * a) = gp.dn_dx(a);
        b(1, 2 * a + 1) = gp.dn_dy(a);
        b(2, 2 * a) = gp.dn_dy(a);
        b(2, 2 * a + 1) = gp.dn_dx(a);
    }
    return b;
}

}  // namespace

ElementProps evaluate_element_props(const MaterialModel& material, const CompositionField& rho,
                                    double floor_scale) {
    const int ne = static_cast<int>(rho.rows());
    const int s = static_cast<int>(rho.cols());
    if (s != material.components()) {
        throw std::invalid_argument("evaluate_element_props: field component count mismatch");
    }
    const double e_floor = floor_scale * material.reference_modulus();
    const double k_floor = floor_scale * material.reference_conductivity();

    ElementProps props;
    props.E.resize(ne);
    props.kappa.resize(ne);
    props.alpha.resize(ne);
    props.lambda.resize(ne);
    props.dE.resize(ne, s);
    props.dkappa.resize(ne, s);
    props.dalpha.resize(ne, s);
    props.dlambda.resize(ne, s);
    for (int e = 0; e < ne; ++e) {
        const Eigen::VectorXd r = rho.row(e).transpose();
        const PropValues v = material.eval(r);
        const PropGrads g = material.grads(r);
        const bool e_clamped = v.E < e_floor;
        const bool k_clamped = v.kappa < k_floor;
        props.E(e) = e_clamped ? e_floor : v.E;
        props.kappa(e) = k_clamped ? k_floor : v.kappa;
        props.alpha(e) = v.alpha;
        props.lambda(e) = v.lambda;
        props.dE.row(e) = e_clamped ? Eigen::RowVectorXd::Zero(s) : g.E.transpose();
        props.dkappa.row(e) = k_clamped ? Eigen::RowVectorXd::Zero(s) : g.kappa.transpose();
        props.dalpha.row(e) = g.alpha.transpose();
        props.dlambda.row(e) = g.lambda.transpose();
    }
    return props;
}

ThermoElasticFea::ThermoElasticFea(const Grid2D& grid, const BoundaryConditions& bcs, double nu,
                                   double t_ref, LinearSolverKind solver)
    : grid_(grid), bcs_(bcs), nu_(nu), t_ref_(t_ref), solver_(solver) {
    validate_bcs(grid, bcs);
    thermal_active_ = bcs.has_thermal();

    const auto gps = gauss_points(grid.dx(), grid.dy());
    const double w_det = grid.element_area() / 4.0;  // weight * |J| per Gauss point
    const Eigen::Matrix3d d_unit = plane_stress_d(nu);
    const Eigen::Vector3d thermal_dir(1.0, 1.0, 0.0);

    k_unit_.setZero();
    kt_unit_.setZero();
    m_th_.setZero();
    for (const auto& gp : gps) {
        const auto b = b_matrix(gp);
        k_unit_ += b.transpose() * d_unit * b * w_det;
        Eigen::Matrix<double, 2, 4> bt;
        bt.row(0) = gp.dn_dx.transpose();
        bt.row(1) = gp.dn_dy.transpose();
        kt_unit_ += bt.transpose() * bt * w_det;
        m_th_ += (b.transpose() * d_unit * thermal_dir) * gp.n.transpose() * w_det;
    }

    setup_structural_maps();
    if (thermal_active_) setup_thermal_maps();
}

void ThermoElasticFea::setup_structural_maps() {
    const int ndof = 2 * grid_.num_nodes();
    u_free_index_.assign(ndof, 0);
    u_fixed_values_ = Eigen::VectorXd::Zero(ndof);
    std::vector<bool> is_fixed(ndof, false);
    for (const auto& bc : bcs_.fixed_disp) {
        for (int n : bc.nodes) {
            if (bc.fix_x) {
                is_fixed[2 * n] = true;
                u_fixed_values_(2 * n) = bc.ux;
            }
            if (bc.fix_y) {
                is_fixed[2 * n + 1] = true;
                u_fixed_values_(2 * n + 1) = bc.uy;
            }
        }
    }
    int nfixed = 0;
    n_u_free_ = 0;
    for (int d = 0; d < ndof; ++d) {
        if (is_fixed[d]) {
            u_free_index_[d] = -1;
            ++nfixed;
        } else {
            u_free_index_[d] = n_u_free_++;
        }
    }
    if (nfixed < 3) {
        throw IllPosedError("structural problem: fewer than 3 fixed DOFs, rigid-body modes remain");
    }

    f_mech_ = Eigen::VectorXd::Zero(ndof);
    for (const auto& load : bcs_.loads) {
        if (load.nodes.empty()) continue;
        const double share = 1.0 / static_cast<double>(load.nodes.size());
        for (int n : load.nodes) {
            f_mech_(2 * n) += load.fx * share;
            f_mech_(2 * n + 1) += load.fy * share;
        }
    }
    if (bcs_.body_force.squaredNorm() > 0.0) {
        const double quarter_area = grid_.element_area() / 4.0;
        for (int e = 0; e < grid_.num_elements(); ++e) {
            for (int a = 0; a < 4; ++a) {
                const int n = grid_.conn(e, a);
                f_mech_(2 * n) += bcs_.body_force(0) * quarter_area;
                f_mech_(2 * n + 1) += bcs_.body_force(1) * quarter_area;
            }
        }
    }
}

void ThermoElasticFea::setup_thermal_maps() {
    const int nn = grid_.num_nodes();
    t_free_index_.assign(nn, 0);
    t_fixed_values_ = Eigen::VectorXd::Zero(nn);
    std::vector<bool> is_fixed(nn, false);
    for (const auto& bc : bcs_.fixed_temp) {
        for (int n : bc.nodes) {
            is_fixed[n] = true;
            t_fixed_values_(n) = bc.value;
        }
    }
    int nfixed = 0;
    n_t_free_ = 0;
    for (int n = 0; n < nn; ++n) {
        if (is_fixed[n]) {
            t_free_index_[n] = -1;
            ++nfixed;
        } else {
            t_free_index_[n] = n_t_free_++;
        }
    }
    if (nfixed == 0) {
        throw IllPosedError("thermal problem: no fixed-temperature nodes, system is singular");
    }

    q_loads_ = Eigen::VectorXd::Zero(nn);
    for (const auto& load : bcs_.heat_loads) {
        if (load.nodes.empty()) continue;
        const double share = load.q / static_cast<double>(load.nodes.size());
        for (int n : load.nodes) q_loads_(n) += share;
    }
    if (bcs_.body_heat != 0.0) {
        const double quarter_area = grid_.element_area() / 4.0;
        for (int e = 0; e < grid_.num_elements(); ++e) {
            for (int a = 0; a < 4; ++a) q_loads_(grid_.conn(e, a)) += bcs_.body_heat * quarter_area;
        }
    }
}

template <typename Factorization>
Eigen::VectorXd ThermoElasticFea::solve_reduced(Factorization& fact,
                                                const Eigen::SparseMatrix<double>& mat,
                                                const Eigen::VectorXd& rhs, bool& analyzed,
                                                const char* what, bool reuse_factorization) {
    if (solver_ == LinearSolverKind::ConjugateGradient) {
        Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper> cg;
        cg.setTolerance(1e-10);
        cg.setMaxIterations(20000);
        cg.compute(mat);
        Eigen::VectorXd x = cg.solve(rhs);
        if (cg.info() != Eigen::Success) {
            std::ostringstream msg;
            msg << what << ": CG did not converge (error " << cg.error() << " after "
                << cg.iterations() << " iterations)";
            throw SolverError(msg.str());
        }
        return x;
    }

    if (!reuse_factorization) {
        if (!analyzed) {
            fact.analyzePattern(mat);
            analyzed = true;
        }
        fact.factorize(mat);
        if (fact.info() != Eigen::Success) {
            throw IllPosedError(std::string(what) +
                                ": factorization failed (singular or indefinite system)");
        }
    }
    Eigen::VectorXd x = fact.solve(rhs);
    // one step of iterative refinement keeps the residual tight when the
    // stiffness floor stretches the conditioning
    x += fact.solve(rhs - mat * x);
    const double rhs_norm = rhs.norm();
    if (rhs_norm > 0.0) {
        const double rel = (mat * x - rhs).norm() / rhs_norm;
        if (!(rel < 1e-8)) {
            std::ostringstream msg;
            msg << what << ": solve residual " << rel << " exceeds 1e-8";
            throw SolverError(msg.str());
        }
    }
    return x;
}

ThermalSolution ThermoElasticFea::solve_thermal(const Eigen::VectorXd& kappa_e) {
    ThermalSolution sol;
    sol.t_ref = t_ref_;
    if (!thermal_active_) {
        sol.T = Eigen::VectorXd::Constant(grid_.num_nodes(), t_ref_);
        last_T_ = sol.T;
        return sol;
    }
    sol.active = true;

    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<std::size_t>(grid_.num_elements()) * 16);
    Eigen::VectorXd rhs(n_t_free_);
    for (int n = 0; n < grid_.num_nodes(); ++n) {
        const int idx = t_free_index_[n];
        if (idx >= 0) rhs(idx) = q_loads_(n);
    }
    for (int e = 0; e < grid_.num_elements(); ++e) {
        const double k = kappa_e(e);
        for (int a = 0; a < 4; ++a) {
            const int ra = t_free_index_[grid_.conn(e, a)];
            if (ra < 0) continue;
            for (int b = 0; b < 4; ++b) {
                const int nb = grid_.conn(e, b);
                const int cb = t_free_index_[nb];
                const double v = k * kt_unit_(a, b);
                if (cb >= 0) {
                    trips.emplace_back(ra, cb, v);
                } else {
                    rhs(ra) -= v * t_fixed_values_(nb);
                }
            }
        }
    }
    kt_red_.resize(n_t_free_, n_t_free_);
    kt_red_.setFromTriplets(trips.begin(), trips.end());

    const Eigen::VectorXd t_free =
        solve_reduced(thermal_ldlt_, kt_red_, rhs, thermal_analyzed_, "thermal solve");
    sol.T = t_fixed_values_;
    for (int n = 0; n < grid_.num_nodes(); ++n) {
        const int idx = t_free_index_[n];
        if (idx >= 0) sol.T(n) = t_free(idx);
    }
    last_T_ = sol.T;
    return sol;
}

Eigen::VectorXd ThermoElasticFea::thermal_force(const ElementProps& props,
                                                const ThermalSolution& thermal) const {
    Eigen::VectorXd f = Eigen::VectorXd::Zero(2 * grid_.num_nodes());
    if (!thermal.active) return f;
    for (int e = 0; e < grid_.num_elements(); ++e) {
        const double scale = props.E(e) * props.alpha(e);
        if (scale == 0.0) continue;
        Eigen::Vector4d dT;
        for (int a = 0; a < 4; ++a) dT(a) = thermal.T(grid_.conn(e, a)) - thermal.t_ref;
        const Eigen::Matrix<double, 8, 1> fe = scale * (m_th_ * dT);
        for (int a = 0; a < 4; ++a) {
            const int n = grid_.conn(e, a);
            f(2 * n) += fe(2 * a);
            f(2 * n + 1) += fe(2 * a + 1);
        }
    }
    return f;
}

StructuralSolution ThermoElasticFea::solve_structural(const ElementProps& props,
                                                      const Eigen::VectorXd& f_th) {
    const int ndof = 2 * grid_.num_nodes();
    StructuralSolution sol;
    sol.f = f_mech_ + f_th;

    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<std::size_t>(grid_.num_elements()) * 64);
    Eigen::VectorXd rhs(n_u_free_);
    for (int d = 0; d < ndof; ++d) {
        const int idx = u_free_index_[d];
        if (idx >= 0) rhs(idx) = sol.f(d);
    }
    std::array<int, 8> dofs;
    for (int e = 0; e < grid_.num_elements(); ++e) {
        const double young = props.E(e);
        for (int a = 0; a < 4; ++a) {
            dofs[2 * a] = 2 * grid_.conn(e, a);
            dofs[2 * a + 1] = 2 * grid_.conn(e, a) + 1;
        }
        for (int a = 0; a < 8; ++a) {
            const int ra = u_free_index_[dofs[a]];
            if (ra < 0) continue;
            for (int b = 0; b < 8; ++b) {
                const double v = young * k_unit_(a, b);
                const int cb = u_free_index_[dofs[b]];
                if (cb >= 0) {
                    trips.emplace_back(ra, cb, v);
                } else {
                    rhs(ra) -= v * u_fixed_values_(dofs[b]);
                }
            }
        }
    }
    k_red_.resize(n_u_free_, n_u_free_);
    k_red_.setFromTriplets(trips.begin(), trips.end());

    const Eigen::VectorXd u_free =
        solve_reduced(struct_ldlt_, k_red_, rhs, struct_analyzed_, "structural solve");
    sol.u = u_fixed_values_;
    for (int d = 0; d < ndof; ++d) {
        const int idx = u_free_index_[d];
        if (idx >= 0) sol.u(d) = u_free(idx);
    }
    sol.compliance = sol.f.dot(sol.u);
    return sol;
}

// J = f.u with f = f_m + f_th(rho, T), K_m(rho) u = f, K_T(rho) T = q.
// Differentiating the quadratic form J = u.K_m u and eliminating du, dT:
//   dJ/drho_e = 2 u.(d f_th/drho_e) - u.(d K_m/drho_e) u - lam_T.(d K_T/drho_e) T
// with the thermal adjoint solving K_T lam_T = 2 (d f_th/dT)^T u on the free
// temperature DOFs. All element matrices are scalar multiples of the unit
// geometry matrices, so every term reduces to small per-element dot products.
Eigen::MatrixXd ThermoElasticFea::sensitivity(const ElementProps& props,
                                              const ThermalSolution& thermal,
                                              const StructuralSolution& structural) {
    const int ne = grid_.num_elements();
    const int s = static_cast<int>(props.dE.cols());
    Eigen::MatrixXd djdrho = Eigen::MatrixXd::Zero(ne, s);

    Eigen::VectorXd lam_t;
    if (thermal.active) {
        // adjoint RHS: per element 2 * E * alpha * M_th^T u_e
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n_t_free_);
        for (int e = 0; e < ne; ++e) {
            const double scale = 2.0 * props.E(e) * props.alpha(e);
            if (scale == 0.0) continue;
            Eigen::Matrix<double, 8, 1> ue;
            for (int a = 0; a < 4; ++a) {
                ue(2 * a) = structural.u(2 * grid_.conn(e, a));
                ue(2 * a + 1) = structural.u(2 * grid_.conn(e, a) + 1);
            }
            const Eigen::Vector4d re = scale * (m_th_.transpose() * ue);
            for (int a = 0; a < 4; ++a) {
                const int idx = t_free_index_[grid_.conn(e, a)];
                if (idx >= 0) rhs(idx) += re(a);
            }
        }
        // kt_red_ was factorized by solve_thermal in this iteration
        const Eigen::VectorXd lam_free = solve_reduced(thermal_ldlt_, kt_red_, rhs,
                                                       thermal_analyzed_, "thermal adjoint",
                                                       solver_ == LinearSolverKind::Direct);
        lam_t = Eigen::VectorXd::Zero(grid_.num_nodes());
        for (int n = 0; n < grid_.num_nodes(); ++n) {
            const int idx = t_free_index_[n];
            if (idx >= 0) lam_t(n) = lam_free(idx);
        }
    }

    for (int e = 0; e < ne; ++e) {
        Eigen::Matrix<double, 8, 1> ue;
        Eigen::Vector4d te = Eigen::Vector4d::Zero();
        Eigen::Vector4d lte = Eigen::Vector4d::Zero();
        for (int a = 0; a < 4; ++a) {
            const int n = grid_.conn(e, a);
            ue(2 * a) = structural.u(2 * n);
            ue(2 * a + 1) = structural.u(2 * n + 1);
            if (thermal.active) {
                te(a) = thermal.T(n);
                lte(a) = lam_t(n);
            }
        }
        const double u_ku_u = ue.dot(k_unit_ * ue);

        double u_vth = 0.0;   // u_e . M_th (T_e - T0)
        double lt_kt_t = 0.0;  // lam_T,e . KT_unit T_e
        if (thermal.active) {
            const Eigen::Vector4d dT = te.array() - thermal.t_ref;
            u_vth = ue.dot(m_th_ * dT);
            lt_kt_t = lte.dot(kt_unit_ * te);
        }

        for (int j = 0; j < s; ++j) {
            double g = -props.dE(e, j) * u_ku_u;
            if (thermal.active) {
                g += 2.0 * (props.dE(e, j) * props.alpha(e) + props.E(e) * props.dalpha(e, j)) * u_vth;
                g -= props.dkappa(e, j) * lt_kt_t;
            }
            djdrho(e, j) = g;
        }
    }
    return djdrho;
}

Eigen::VectorXd ThermoElasticFea::compliance_density(const ElementProps& props,
                                                     const StructuralSolution& structural) const {
    Eigen::VectorXd density(grid_.num_elements());
    for (int e = 0; e < grid_.num_elements(); ++e) {
        Eigen::Matrix<double, 8, 1> ue;
        for (int a = 0; a < 4; ++a) {
            ue(2 * a) = structural.u(2 * grid_.conn(e, a));
            ue(2 * a + 1) = structural.u(2 * grid_.conn(e, a) + 1);
        }
        density(e) = props.E(e) * ue.dot(k_unit_ * ue);
    }
    return density;
}

ThermalSolution assemble_and_solve_thermal(const Grid2D& grid, const BoundaryConditions& bcs,
                                           const Eigen::VectorXd& kappa_e, double t_ref) {
    ThermoElasticFea fea(grid, bcs, 0.3, t_ref);
    return fea.solve_thermal(kappa_e);
}

Eigen::VectorXd thermal_force(const Grid2D& grid, const BoundaryConditions& bcs,
                              const ElementProps& props, const ThermalSolution& thermal,
                              double nu) {
    ThermoElasticFea fea(grid, bcs, nu, thermal.t_ref);
    return fea.thermal_force(props, thermal);
}

StructuralSolution assemble_and_solve_structural(const Grid2D& grid, const BoundaryConditions& bcs,
                                                 const ElementProps& props,
                                                 const Eigen::VectorXd& f_th, double nu) {
    ThermoElasticFea fea(grid, bcs, nu);
    return fea.solve_structural(props, f_th);
}

}  // namespace cga
