#pragma once

#include <Eigen/Dense>
#include <vector>

#include "cga/field_net.hpp"
#include "cga/mesh.hpp"

namespace cga {

// 2D magnitude spectrum of a scalar field sampled on an nx x ny lattice over
// an lx x ly window. Frequencies are in cycles per unit length with
// resolution 1/lx and 1/ly; bin (kx, ky) maps to signed frequencies by the
// usual wraparound.
struct SpectrumReport {
    int nx = 0, ny = 0;
    double lx = 0.0, ly = 0.0;
    std::vector<Eigen::MatrixXd> magnitude;  // per component, ny x nx

    double freq_x(int kx) const { return (kx <= nx / 2 ? kx : kx - nx) / lx; }
    double freq_y(int ky) const { return (ky <= ny / 2 ? ky : ky - ny) / ly; }
    // Spectral energy normalized so that it matches the spatial sum of squares.
    double total_energy(int component) const;
    double ac_energy(int component) const;  // DC bin excluded
};

// field holds one column per component, rows in lattice order (x fastest).
SpectrumReport dft2(const Eigen::MatrixXd& field, int nx, int ny, double lx, double ly);

enum class BandAxis { X, Y, Joint };

// Fraction of AC energy outside the band, 0 when there is no AC energy.
// Joint counts bins with |f_x| > B_x or |f_y| > B_y.
double band_energy_ratio(const SpectrumReport& report, int component, double bx, double by,
                         BandAxis axis = BandAxis::Joint);
// Worst component.
double band_energy_ratio(const SpectrumReport& report, double bx, double by,
                         BandAxis axis = BandAxis::Joint);

// Gradation audit against the derivative bound for band-limited signals:
// max |d rho_j / d x_d| <= 2 pi B_d M_j (1 + slack) with M_j the sampled
// max |rho_j|.
struct ComponentAudit {
    double max_rho = 0.0;  // M
    double max_grad_x = 0.0, max_grad_y = 0.0;
    Eigen::Vector2d argmax_grad_x{0, 0}, argmax_grad_y{0, 0};
    double bound_x = 0.0, bound_y = 0.0;  // 2 pi B_d M (1 + slack)
    bool pass_x = true, pass_y = true;
};

struct GradationAudit {
    std::vector<ComponentAudit> components;
    double bandwidth_x = 0.0, bandwidth_y = 0.0;
    double slack = 0.05;
    int samples_x = 0, samples_y = 0;
    bool pass = true;
};

// Samples the analytic spatial Jacobian on a lattice `oversample` times finer
// than the analysis mesh.
GradationAudit bernstein_audit(const MfnParams& params, const Grid2D& grid, double slack = 0.05,
                               int oversample = 2);

}  // namespace cga
