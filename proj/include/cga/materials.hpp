#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <memory>
#include <vector>

namespace cga {

// Material data at one reference composition.
struct PropertyAnchor {
    Eigen::VectorXd rho;  // length S, entries in [0,1] summing to 1
    double E = 0.0;
    double lambda = 0.0;  // mass density
    double kappa = 0.0;   // thermal conductivity
    double alpha = 0.0;   // thermal expansion coefficient
};

struct PropValues {
    double E = 0.0, lambda = 0.0, kappa = 0.0, alpha = 0.0;
};

struct PropGrads {
    Eigen::VectorXd E, lambda, kappa, alpha;  // each length S
};

// Composition-to-property model evaluated per element center.
class MaterialModel {
public:
    virtual ~MaterialModel() = default;
    virtual int components() const = 0;
    virtual PropValues eval(const Eigen::VectorXd& rho) const = 0;
    virtual PropGrads grads(const Eigen::VectorXd& rho) const = 0;
    // Scale used for the stiffness/conductivity floor.
    virtual double reference_modulus() const = 0;
    virtual double reference_conductivity() const = 0;
};

// Gaussian RBF interpolation of E, lambda, kappa, alpha over composition
// space: value(rho) = sum_j coeff_j * exp(-(eps * |rho - rho_j*|)^2).
class RbfMaterial final : public MaterialModel {
public:
    int components() const override { return static_cast<int>(anchors_[0].rho.size()); }
    PropValues eval(const Eigen::VectorXd& rho) const override;
    PropGrads grads(const Eigen::VectorXd& rho) const override;
    double reference_modulus() const override { return e_ref_; }
    double reference_conductivity() const override { return kappa_ref_; }

    const std::vector<PropertyAnchor>& anchors() const { return anchors_; }
    double epsilon() const { return epsilon_; }
    const Eigen::VectorXd& coeffs_E() const { return coeff_e_; }

    friend RbfMaterial fit_rbf(const std::vector<PropertyAnchor>& anchors, double epsilon);

private:
    std::vector<PropertyAnchor> anchors_;
    double epsilon_ = 1.0;
    Eigen::VectorXd coeff_e_, coeff_lambda_, coeff_kappa_, coeff_alpha_;
    double e_ref_ = 0.0, kappa_ref_ = 0.0;
};

// Solves the M x M interpolation system per property. Throws FitError when
// the kernel matrix condition number exceeds 1e12.
RbfMaterial fit_rbf(const std::vector<PropertyAnchor>& anchors, double epsilon);

// Single component with E(rho) = E0*rho, lambda(rho) = lambda0*rho; kappa
// scales the same way and alpha is composition independent.
class LinearSingleMaterial final : public MaterialModel {
public:
    LinearSingleMaterial(double E0, double lambda0, double kappa0 = 1.0, double alpha0 = 0.0)
        : e0_(E0), lambda0_(lambda0), kappa0_(kappa0), alpha0_(alpha0) {}

    int components() const override { return 1; }
    PropValues eval(const Eigen::VectorXd& rho) const override;
    PropGrads grads(const Eigen::VectorXd& rho) const override;
    double reference_modulus() const override { return e0_; }
    double reference_conductivity() const override { return kappa0_; }

private:
    double e0_, lambda0_, kappa0_, alpha0_;
};

// Plain-text anchor table: one row per anchor, S composition entries followed
// by E, lambda, kappa, alpha. '#' starts a comment. S is inferred from the
// column count.
std::vector<PropertyAnchor> load_anchor_table(const std::filesystem::path& path);

}  // namespace cga
