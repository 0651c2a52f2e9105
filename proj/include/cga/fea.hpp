#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <memory>
#include <vector>

#include "cga/field_net.hpp"
#include "cga/materials.hpp"
#include "cga/mesh.hpp"

namespace cga {

enum class LinearSolverKind { Direct, ConjugateGradient };

// Everything the analysis needs besides the design itself.
struct ThermoElasticProblem {
    Grid2D grid;
    BoundaryConditions bcs;
    double nu = 0.3;            // Poisson ratio, composition independent
    double t_ref = 0.0;         // reference temperature T0
    double mass_budget = 1.0;   // m*
    double floor_scale = 1e-6;  // stiffness/conductivity floor relative to reference
    LinearSolverKind solver = LinearSolverKind::Direct;
};

// Per-element properties and their composition gradients after flooring.
// Gradients are zeroed where the floor clamps.
struct ElementProps {
    Eigen::VectorXd E, kappa, alpha, lambda;     // length N_e
    Eigen::MatrixXd dE, dkappa, dalpha, dlambda; // N_e x S
};

ElementProps evaluate_element_props(const MaterialModel& material, const CompositionField& rho,
                                    double floor_scale);

struct ThermalSolution {
    Eigen::VectorXd T;  // nodal temperatures
    double t_ref = 0.0;
    bool active = false;  // false when the problem has no thermal data; T == t_ref
};

struct StructuralSolution {
    Eigen::VectorXd u;  // nodal displacements, 2 per node
    Eigen::VectorXd f;  // total applied force, mechanical + thermal
    double compliance = 0.0;
};

// Assembles and solves both physics on bilinear quads (plane stress, unit
// thickness, 2x2 Gauss quadrature). Geometry-dependent element matrices are
// built once; factorization sparsity patterns are reused across calls.
class ThermoElasticFea {
public:
    ThermoElasticFea(const Grid2D& grid, const BoundaryConditions& bcs, double nu,
                     double t_ref = 0.0, LinearSolverKind solver = LinearSolverKind::Direct);

    ThermalSolution solve_thermal(const Eigen::VectorXd& kappa_e);
    Eigen::VectorXd thermal_force(const ElementProps& props, const ThermalSolution& thermal) const;
    StructuralSolution solve_structural(const ElementProps& props, const Eigen::VectorXd& f_th);

    // Coupled adjoint dJ/drho (N_e x S) for J = f.u with design-dependent
    // thermal force; assumes homogeneous Dirichlet data on the primal solves.
    Eigen::MatrixXd sensitivity(const ElementProps& props, const ThermalSolution& thermal,
                                const StructuralSolution& structural);

    // Per-element compliance density u_e . K_e u_e; sums to the compliance.
    Eigen::VectorXd compliance_density(const ElementProps& props,
                                       const StructuralSolution& structural) const;

    bool thermal_active() const { return thermal_active_; }
    const Eigen::Matrix<double, 8, 8>& unit_stiffness() const { return k_unit_; }
    const Eigen::Matrix<double, 4, 4>& unit_conduction() const { return kt_unit_; }

private:
    void setup_structural_maps();
    void setup_thermal_maps();
    template <typename Factorization>
    Eigen::VectorXd solve_reduced(Factorization& fact, const Eigen::SparseMatrix<double>& mat,
                                  const Eigen::VectorXd& rhs, bool& analyzed, const char* what,
                                  bool reuse_factorization = false);

    const Grid2D& grid_;
    const BoundaryConditions& bcs_;
    double nu_;
    double t_ref_;
    LinearSolverKind solver_;
    bool thermal_active_ = false;

    // geometry-level element matrices (uniform grid: identical for all elements)
    Eigen::Matrix<double, 8, 8> k_unit_;   // stiffness at E = 1
    Eigen::Matrix<double, 4, 4> kt_unit_;  // conduction at kappa = 1
    Eigen::Matrix<double, 8, 4> m_th_;     // thermal force map at E*alpha = 1

    // structural dof bookkeeping
    std::vector<int> u_free_index_;  // dof -> reduced index or -1
    int n_u_free_ = 0;
    Eigen::VectorXd u_fixed_values_;  // full-length, zero on free dofs
    Eigen::VectorXd f_mech_;          // full-length applied mechanical load

    // thermal dof bookkeeping
    std::vector<int> t_free_index_;
    int n_t_free_ = 0;
    Eigen::VectorXd t_fixed_values_;
    Eigen::VectorXd q_loads_;  // full-length nodal heat input

    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> struct_ldlt_;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> thermal_ldlt_;
    bool struct_analyzed_ = false;
    bool thermal_analyzed_ = false;
    Eigen::SparseMatrix<double> k_red_;   // last reduced stiffness
    Eigen::SparseMatrix<double> kt_red_;  // last reduced conduction
    Eigen::VectorXd last_T_;              // cached for sensitivity
};

// Single-call conveniences matching the class methods.
ThermalSolution assemble_and_solve_thermal(const Grid2D& grid, const BoundaryConditions& bcs,
                                           const Eigen::VectorXd& kappa_e, double t_ref = 0.0);
Eigen::VectorXd thermal_force(const Grid2D& grid, const BoundaryConditions& bcs,
                              const ElementProps& props, const ThermalSolution& thermal,
                              double nu);
StructuralSolution assemble_and_solve_structural(const Grid2D& grid, const BoundaryConditions& bcs,
                                                 const ElementProps& props,
                                                 const Eigen::VectorXd& f_th, double nu);

}  // namespace cga
