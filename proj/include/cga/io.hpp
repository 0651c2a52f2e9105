#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "cga/mesh.hpp"
#include "cga/optimizer.hpp"
#include "cga/spectrum.hpp"

namespace cga {
namespace io {

// One column per component, one row per element in grid order. Doubles are
// written with 17 significant digits so the round trip is exact.
void write_composition_csv(const std::filesystem::path& path, const Eigen::MatrixXd& field);
Eigen::MatrixXd read_composition_csv(const std::filesystem::path& path);

void write_convergence_csv(const std::filesystem::path& path,
                           const std::vector<IterationRecord>& history);

// Per-node temperature and displacement.
void write_nodal_fields_csv(const std::filesystem::path& path, const Grid2D& grid,
                            const Eigen::VectorXd& T, const Eigen::VectorXd& u);
// Per-element compliance density.
void write_element_fields_csv(const std::filesystem::path& path, const Grid2D& grid,
                              const Eigen::VectorXd& compliance_density);

// 8-bit binary PGM; values clamped to [0,1] and mapped linearly to black..white.
void write_pgm(const std::filesystem::path& path, const Eigen::VectorXd& values, int nx, int ny);

// key = value report lines.
void write_report(const std::filesystem::path& path,
                  const std::vector<std::pair<std::string, std::string>>& entries);

std::string format_double(double v);

}  // namespace io
}  // namespace cga
