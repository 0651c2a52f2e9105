#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

namespace cga {

// Per-element composition fractions, one row per point, one column per component.
// Raw network output is unbounded; bounds and partition of unity are enforced
// by the constraint machinery, not here.
using CompositionField = Eigen::MatrixXd;

struct MfnConfig {
    int n_layers = 3;        // number of sine filter stages
    int width = 100;         // neurons per stage
    int input_dim = 2;
    int outputs = 1;         // S
    double bandwidth_x = 5.0;  // cycles per unit length
    double bandwidth_y = 5.0;
    std::uint64_t seed = 0;

    void validate() const;
    double bandwidth(int axis) const { return axis == 0 ? bandwidth_x : bandwidth_y; }
};

// Sine filter frequencies/phases are frozen after initialization; only the
// linear weights train. Each stage i contributes an equal per-axis budget
// B_i = bandwidth / n_layers, and every omega entry on axis d lies in
// (-2*pi*B_{i,d}, 2*pi*B_{i,d}) radians per unit length, so the Hadamard
// chain can only produce frequencies within the summed budget.
struct MfnParams {
    MfnConfig config;
    std::vector<Eigen::MatrixXd> omega;    // n_layers of width x input_dim, frozen
    std::vector<Eigen::VectorXd> phase;    // n_layers of width, frozen
    std::vector<Eigen::MatrixXd> weights;  // n_layers-1 of width x width
    std::vector<Eigen::VectorXd> biases;   // n_layers-1 of width
    Eigen::MatrixXd w_out;                 // outputs x width
    Eigen::VectorXd b_out;                 // outputs
};

// Deterministic for a fixed seed. W_out = 0 and b_out = 1/S, so the fresh
// network evaluates to the uniform composition everywhere.
MfnParams init_mfn(const MfnConfig& config);

// rho = W_out z_{L-1} + b_out with z_0 = sin(omega_0 x + phi_0) and
// z_i = sin(omega_i x + phi_i) .* (W_i z_{i-1} + b_i).
CompositionField forward(const MfnParams& params, const Eigen::MatrixX2d& coords);

// Reverse-mode gradient of sum_{e,j} dL_drho(e,j) * rho(e,j) with respect to
// the trainable parameters, returned flat in trainable_flatten order.
// Frozen omega/phase get no gradient storage.
Eigen::VectorXd backward(const MfnParams& params, const Eigen::MatrixX2d& coords,
                         const Eigen::MatrixXd& dL_drho);

// Analytic d rho / d x_d, one N x S matrix per input axis.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> spatial_jacobian(const MfnParams& params,
                                                             const Eigen::MatrixX2d& coords);

// Flat layout: W_1, b_1, ..., W_{L-1}, b_{L-1}, W_out, b_out, matrices
// row-major. Length = (L-1)(w^2 + w) + S*w + S.
int trainable_size(const MfnConfig& config);
Eigen::VectorXd trainable_flatten(const MfnParams& params);
void trainable_load(MfnParams& params, const Eigen::VectorXd& flat);

// Binary checkpoint: the full parameter set plus config header.
// Layout is documented in the README.
void save_checkpoint(const MfnParams& params, const std::filesystem::path& path);
MfnParams load_checkpoint(const std::filesystem::path& path);

}  // namespace cga
