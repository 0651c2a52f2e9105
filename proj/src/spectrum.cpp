#include "cga/spectrum.hpp"

#include <fftw3.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cga {

double SpectrumReport::total_energy(int component) const {
    const auto& m = magnitude[component];
    return m.array().square().sum() / (static_cast<double>(nx) * ny);
}

double SpectrumReport::ac_energy(int component) const {
    const auto& m = magnitude[component];
    return (m.array().square().sum() - m(0, 0) * m(0, 0)) / (static_cast<double>(nx) * ny);
}

SpectrumReport dft2(const Eigen::MatrixXd& field, int nx, int ny, double lx, double ly) {
    if (field.rows() != static_cast<long>(nx) * ny) {
        throw std::invalid_argument("dft2: field rows must equal nx*ny");
    }
    SpectrumReport report;
    report.nx = nx;
    report.ny = ny;
    report.lx = lx;
    report.ly = ly;

    std::vector<fftw_complex> in(static_cast<std::size_t>(nx) * ny);
    std::vector<fftw_complex> out(static_cast<std::size_t>(nx) * ny);
    // row-major (ny, nx): y is the slow axis, matching lattice order x-fastest
    fftw_plan plan = fftw_plan_dft_2d(ny, nx, in.data(), out.data(), FFTW_FORWARD, FFTW_ESTIMATE);

    for (int comp = 0; comp < field.cols(); ++comp) {
        for (long i = 0; i < field.rows(); ++i) {
            in[i][0] = field(i, comp);
            in[i][1] = 0.0;
        }
        fftw_execute(plan);
        Eigen::MatrixXd mag(ny, nx);
        for (int ky = 0; ky < ny; ++ky) {
            for (int kx = 0; kx < nx; ++kx) {
                const auto& c = out[static_cast<std::size_t>(ky) * nx + kx];
                mag(ky, kx) = std::hypot(c[0], c[1]);
            }
        }
        report.magnitude.push_back(std::move(mag));
    }
    fftw_destroy_plan(plan);
    return report;
}

double band_energy_ratio(const SpectrumReport& report, int component, double bx, double by,
                         BandAxis axis) {
    const auto& mag = report.magnitude[component];
    double out_energy = 0.0;
    double ac_energy = 0.0;
    for (int ky = 0; ky < report.ny; ++ky) {
        for (int kx = 0; kx < report.nx; ++kx) {
            if (kx == 0 && ky == 0) continue;
            const double e = mag(ky, kx) * mag(ky, kx);
            ac_energy += e;
            const bool out_x = std::abs(report.freq_x(kx)) > bx;
            const bool out_y = std::abs(report.freq_y(ky)) > by;
            const bool outside = axis == BandAxis::X ? out_x
                                 : axis == BandAxis::Y ? out_y
                                                       : (out_x || out_y);
            if (outside) out_energy += e;
        }
    }
    if (ac_energy == 0.0) return 0.0;
    return out_energy / ac_energy;
}

double band_energy_ratio(const SpectrumReport& report, double bx, double by, BandAxis axis) {
    double worst = 0.0;
    for (std::size_t c = 0; c < report.magnitude.size(); ++c) {
        worst = std::max(worst, band_energy_ratio(report, static_cast<int>(c), bx, by, axis));
    }
    return worst;
}

GradationAudit bernstein_audit(const MfnParams& params, const Grid2D& grid, double slack,
                               int oversample) {
    if (oversample < 1) throw std::invalid_argument("bernstein_audit: oversample must be >= 1");
    const int sx = grid.nx * oversample;
    const int sy = grid.ny * oversample;
    const double dx = grid.lx / sx;
    const double dy = grid.ly / sy;

    Eigen::MatrixX2d coords(static_cast<long>(sx) * sy, 2);
    long row = 0;
    for (int j = 0; j < sy; ++j) {
        for (int i = 0; i < sx; ++i) {
            coords(row, 0) = (i + 0.5) * dx;
            coords(row, 1) = (j + 0.5) * dy;
            ++row;
        }
    }

    const CompositionField rho = forward(params, coords);
    const auto [jac_x, jac_y] = spatial_jacobian(params, coords);

    GradationAudit audit;
    audit.bandwidth_x = params.config.bandwidth_x;
    audit.bandwidth_y = params.config.bandwidth_y;
    audit.slack = slack;
    audit.samples_x = sx;
    audit.samples_y = sy;
    const double two_pi = 2.0 * std::numbers::pi;
    for (int c = 0; c < rho.cols(); ++c) {
        ComponentAudit ca;
        ca.max_rho = rho.col(c).cwiseAbs().maxCoeff();
        long ix = 0, iy = 0;
        ca.max_grad_x = jac_x.col(c).cwiseAbs().maxCoeff(&ix);
        ca.max_grad_y = jac_y.col(c).cwiseAbs().maxCoeff(&iy);
        ca.argmax_grad_x = coords.row(ix).transpose();
        ca.argmax_grad_y = coords.row(iy).transpose();
        ca.bound_x = two_pi * audit.bandwidth_x * ca.max_rho * (1.0 + slack);
        ca.bound_y = two_pi * audit.bandwidth_y * ca.max_rho * (1.0 + slack);
        ca.pass_x = ca.max_grad_x <= ca.bound_x;
        ca.pass_y = ca.max_grad_y <= ca.bound_y;
        audit.pass = audit.pass && ca.pass_x && ca.pass_y;
        audit.components.push_back(ca);
    }
    return audit;
}

}  // namespace cga
