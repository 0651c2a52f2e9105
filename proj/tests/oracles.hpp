// Test-only oracles kept independent of the library implementation paths they
// check: plain central differences, a dense 3x3-Gauss quad assembly, and a
// tiny deterministic RNG for reproducible random instances.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

namespace oracles {

inline double central_diff(const std::function<double(double)>& f, double x, double h) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

// Relative error with an absolute fallback near zero.
inline double rel_err(double got, double want, double floor = 1e-12) {
    const double scale = std::max(std::abs(want), floor);
    return std::abs(got - want) / scale;
}

class TestRng {
public:
    explicit TestRng(std::uint64_t seed) : gen_(seed) {}
    double uniform(double lo, double hi) {
        std::uniform_real_distribution<double> dist(lo, hi);
        return dist(gen_);
    }
    Eigen::VectorXd vector(long n, double lo, double hi) {
        Eigen::VectorXd v(n);
        for (long i = 0; i < n; ++i) v(i) = uniform(lo, hi);
        return v;
    }
    Eigen::MatrixXd matrix(long r, long c, double lo, double hi) {
        Eigen::MatrixXd m(r, c);
        for (long i = 0; i < r; ++i)
            for (long j = 0; j < c; ++j) m(i, j) = uniform(lo, hi);
        return m;
    }

private:
    std::mt19937_64 gen_;
};

// Dense plane-stress stiffness of one bilinear rectangle via 3x3 Gauss
// quadrature, written straight from shape-function calculus (no shared code
// with the library's 2x2 path).
inline Eigen::MatrixXd dense_quad_stiffness(double dx, double dy, double E, double nu) {
    Eigen::Matrix3d D;
    D << 1.0, nu, 0.0, nu, 1.0, 0.0, 0.0, 0.0, (1.0 - nu) / 2.0;
    D *= E / (1.0 - nu * nu);

    const double gp3[3] = {-std::sqrt(3.0 / 5.0), 0.0, std::sqrt(3.0 / 5.0)};
    const double gw3[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
    Eigen::MatrixXd ke = Eigen::MatrixXd::Zero(8, 8);
    for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
            const double xi = gp3[a];
            const double eta = gp3[b];
            const double dndxi[4] = {-(1 - eta) / 4, (1 - eta) / 4, (1 + eta) / 4, -(1 + eta) / 4};
            const double dndeta[4] = {-(1 - xi) / 4, -(1 + xi) / 4, (1 + xi) / 4, (1 - xi) / 4};
            Eigen::MatrixXd B = Eigen::MatrixXd::Zero(3, 8);
            for (int n = 0; n < 4; ++n) {
                const double dndx = dndxi[n] * 2.0 / dx;
                const double dndy = dndeta[n] * 2.0 / dy;
                B(0, 2 * n) = dndx;
                B(1, 2 * n + 1) = dndy;
                B(2, 2 * n) = dndy;
                B(2, 2 * n + 1) = dndx;
            }
            ke += B.transpose() * D * B * gw3[a] * gw3[b] * (dx * dy / 4.0);
        }
    }
    return ke;
}

// Dense global assembly + dense solve for a structured nx x ny rectangle
// grid with per-element moduli, clamped DOFs, and nodal loads. Returns the
// compliance f.u.
inline double dense_compliance(int nx, int ny, double lx, double ly,
                               const Eigen::VectorXd& young, double nu,
                               const std::vector<int>& fixed_dofs, const Eigen::VectorXd& loads) {
    const int nn = (nx + 1) * (ny + 1);
    const int ndof = 2 * nn;
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(ndof, ndof);
    const Eigen::MatrixXd ke_unit = dense_quad_stiffness(lx / nx, ly / ny, 1.0, nu);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const int e = j * nx + i;
            const int n0 = j * (nx + 1) + i;
            const int nodes[4] = {n0, n0 + 1, n0 + nx + 2, n0 + nx + 1};
            for (int a = 0; a < 8; ++a) {
                for (int b = 0; b < 8; ++b) {
                    const int ra = 2 * nodes[a / 2] + a % 2;
                    const int cb = 2 * nodes[b / 2] + b % 2;
                    K(ra, cb) += young(e) * ke_unit(a, b);
                }
            }
        }
    }
    std::vector<bool> fixed(ndof, false);
    for (int d : fixed_dofs) fixed[d] = true;
    std::vector<int> free_dofs;
    for (int d = 0; d < ndof; ++d) {
        if (!fixed[d]) free_dofs.push_back(d);
    }
    const int nf = static_cast<int>(free_dofs.size());
    Eigen::MatrixXd Kff(nf, nf);
    Eigen::VectorXd ff(nf);
    for (int a = 0; a < nf; ++a) {
        ff(a) = loads(free_dofs[a]);
        for (int b = 0; b < nf; ++b) Kff(a, b) = K(free_dofs[a], free_dofs[b]);
    }
    const Eigen::VectorXd uf = Kff.fullPivLu().solve(ff);
    return ff.dot(uf);
}

}  // namespace oracles
