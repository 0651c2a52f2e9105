#include "cga/materials.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "cga/errors.hpp"

namespace cga {

namespace {

Eigen::MatrixXd kernel_matrix(const std::vector<PropertyAnchor>& anchors, double epsilon) {
    const int m = static_cast<int>(anchors.size());
    Eigen::MatrixXd phi(m, m);
    for (int j = 0; j < m; ++j) {
        for (int k = 0; k < m; ++k) {
            const double r2 = (anchors[j].rho - anchors[k].rho).squaredNorm();
            phi(j, k) = std::exp(-epsilon * epsilon * r2);
        }
    }
    return phi;
}

}  // namespace

RbfMaterial fit_rbf(const std::vector<PropertyAnchor>& anchors, double epsilon) {
    if (anchors.empty()) throw std::invalid_argument("fit_rbf: need at least one anchor");
    const int s = static_cast<int>(anchors[0].rho.size());
    for (const auto& a : anchors) {
        if (a.rho.size() != s) throw std::invalid_argument("fit_rbf: inconsistent anchor dimensions");
    }

    const Eigen::MatrixXd phi = kernel_matrix(anchors, epsilon);
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(phi, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double smax = svd.singularValues()(0);
    const double smin = svd.singularValues()(svd.singularValues().size() - 1);
    const double cond = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
    if (!(cond < 1e12)) {
        std::ostringstream msg;
        msg << "fit_rbf: kernel matrix ill-conditioned (cond ~ " << cond
            << ", M = " << anchors.size() << ", epsilon = " << epsilon
            << "); check for duplicate or near-duplicate anchor compositions";
        throw FitError(msg.str());
    }

    const int m = static_cast<int>(anchors.size());
    Eigen::VectorXd ve(m), vl(m), vk(m), va(m);
    for (int j = 0; j < m; ++j) {
        ve(j) = anchors[j].E;
        vl(j) = anchors[j].lambda;
        vk(j) = anchors[j].kappa;
        va(j) = anchors[j].alpha;
    }

    RbfMaterial mat;
    mat.anchors_ = anchors;
    mat.epsilon_ = epsilon;
    mat.coeff_e_ = svd.solve(ve);
    mat.coeff_lambda_ = svd.solve(vl);
    mat.coeff_kappa_ = svd.solve(vk);
    mat.coeff_alpha_ = svd.solve(va);
    mat.e_ref_ = ve.cwiseAbs().maxCoeff();
    mat.kappa_ref_ = vk.cwiseAbs().maxCoeff();
    return mat;
}

PropValues RbfMaterial::eval(const Eigen::VectorXd& rho) const {
    PropValues out;
    for (std::size_t j = 0; j < anchors_.size(); ++j) {
        const double r2 = (rho - anchors_[j].rho).squaredNorm();
        const double phi = std::exp(-epsilon_ * epsilon_ * r2);
        out.E += coeff_e_(j) * phi;
        out.lambda += coeff_lambda_(j) * phi;
        out.kappa += coeff_kappa_(j) * phi;
        out.alpha += coeff_alpha_(j) * phi;
    }
    return out;
}

PropGrads RbfMaterial::grads(const Eigen::VectorXd& rho) const {
    const int s = components();
    PropGrads g;
    g.E = Eigen::VectorXd::Zero(s);
    g.lambda = Eigen::VectorXd::Zero(s);
    g.kappa = Eigen::VectorXd::Zero(s);
    g.alpha = Eigen::VectorXd::Zero(s);
    for (std::size_t j = 0; j < anchors_.size(); ++j) {
        const Eigen::VectorXd diff = rho - anchors_[j].rho;
        const double phi = std::exp(-epsilon_ * epsilon_ * diff.squaredNorm());
        // d phi / d rho = -2 eps^2 (rho - rho_j*) phi
        const Eigen::VectorXd dphi = -2.0 * epsilon_ * epsilon_ * phi * diff;
        g.E += coeff_e_(j) * dphi;
        g.lambda += coeff_lambda_(j) * dphi;
        g.kappa += coeff_kappa_(j) * dphi;
        g.alpha += coeff_alpha_(j) * dphi;
    }
    return g;
}

PropValues LinearSingleMaterial::eval(const Eigen::VectorXd& rho) const {
    if (rho.size() != 1) throw std::invalid_argument("LinearSingleMaterial: expected S=1");
    PropValues out;
    out.E = e0_ * rho(0);
    out.lambda = lambda0_ * rho(0);
    out.kappa = kappa0_ * rho(0);
    out.alpha = alpha0_;
    return out;
}

PropGrads LinearSingleMaterial::grads(const Eigen::VectorXd& rho) const {
    if (rho.size() != 1) throw std::invalid_argument("LinearSingleMaterial: expected S=1");
    PropGrads g;
    g.E = Eigen::VectorXd::Constant(1, e0_);
    g.lambda = Eigen::VectorXd::Constant(1, lambda0_);
    g.kappa = Eigen::VectorXd::Constant(1, kappa0_);
    g.alpha = Eigen::VectorXd::Zero(1);
    return g;
}

std::vector<PropertyAnchor> load_anchor_table(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open anchor table " + path.string());
    std::vector<PropertyAnchor> anchors;
    std::string line;
    int columns = -1;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream row(line);
        std::vector<double> values;
        double v;
        while (row >> v) values.push_back(v);
        if (values.empty()) continue;
        if (columns < 0) {
            columns = static_cast<int>(values.size());
            if (columns < 5) {
                throw std::runtime_error(path.string() +
                                         ": expected at least 5 columns (S compositions + E lambda kappa alpha)");
            }
        } else if (static_cast<int>(values.size()) != columns) {
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                     ": inconsistent column count");
        }
        const int s = columns - 4;
        PropertyAnchor a;
        a.rho = Eigen::Map<Eigen::VectorXd>(values.data(), s);
        a.E = values[s];
        a.lambda = values[s + 1];
        a.kappa = values[s + 2];
        a.alpha = values[s + 3];
        anchors.push_back(std::move(a));
    }
    if (anchors.empty()) throw std::runtime_error(path.string() + ": no anchor rows");
    return anchors;
}

}  // namespace cga
