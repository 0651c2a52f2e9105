#include "cga/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cga {
namespace io {

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_composition_csv(const std::filesystem::path& path, const Eigen::MatrixXd& field) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    for (long c = 0; c < field.cols(); ++c) out << (c ? "," : "") << "rho_" << c;
    out << "\n";
    for (long r = 0; r < field.rows(); ++r) {
        for (long c = 0; c < field.cols(); ++c) {
            out << (c ? "," : "") << format_double(field(r, c));
        }
        out << "\n";
    }
}

Eigen::MatrixXd read_composition_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path.string() + ": empty file");
    const long cols = std::count(line.begin(), line.end(), ',') + 1;
    std::vector<double> values;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string cell;
        long got = 0;
        while (std::getline(row, cell, ',')) {
            values.push_back(std::stod(cell));
            ++got;
        }
        if (got != cols) throw std::runtime_error(path.string() + ": ragged row");
    }
    const long rows = static_cast<long>(values.size()) / cols;
    Eigen::MatrixXd field(rows, cols);
    for (long r = 0; r < rows; ++r)
        for (long c = 0; c < cols; ++c) field(r, c) = values[r * cols + c];
    return field;
}

void write_convergence_csv(const std::filesystem::path& path,
                           const std::vector<IterationRecord>& history) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "iteration,J,J_over_J0,loss,g_m,g_u,g_l,g_p,max_partition_dev,tau,grad_norm,"
           "wall_time_s\n";
    for (const auto& rec : history) {
        out << rec.iteration << ',' << format_double(rec.J) << ',' << format_double(rec.J_over_J0)
            << ',' << format_double(rec.loss) << ',' << format_double(rec.g_m) << ','
            << format_double(rec.g_u) << ',' << format_double(rec.g_l) << ','
            << format_double(rec.g_p) << ',' << format_double(rec.max_partition_deviation) << ','
            << format_double(rec.tau) << ',' << format_double(rec.grad_norm) << ','
            << format_double(rec.wall_time_s) << "\n";
    }
}

void write_nodal_fields_csv(const std::filesystem::path& path, const Grid2D& grid,
                            const Eigen::VectorXd& T, const Eigen::VectorXd& u) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "node,x,y,T,ux,uy\n";
    for (int n = 0; n < grid.num_nodes(); ++n) {
        out << n << ',' << format_double(grid.nodes(n, 0)) << ',' << format_double(grid.nodes(n, 1))
            << ',' << format_double(T(n)) << ',' << format_double(u(2 * n)) << ','
            << format_double(u(2 * n + 1)) << "\n";
    }
}

void write_element_fields_csv(const std::filesystem::path& path, const Grid2D& grid,
                              const Eigen::VectorXd& compliance_density) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    const Eigen::MatrixX2d centers = element_centers(grid);
    out << "element,xc,yc,J_density\n";
    for (int e = 0; e < grid.num_elements(); ++e) {
        out << e << ',' << format_double(centers(e, 0)) << ',' << format_double(centers(e, 1))
            << ',' << format_double(compliance_density(e)) << "\n";
    }
}

void write_pgm(const std::filesystem::path& path, const Eigen::VectorXd& values, int nx, int ny) {
    if (values.size() != static_cast<long>(nx) * ny) {
        throw std::invalid_argument("write_pgm: value count must equal nx*ny");
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "P5\n" << nx << " " << ny << "\n255\n";
    // image rows run top to bottom; the lattice runs bottom to top
    for (int j = ny - 1; j >= 0; --j) {
        for (int i = 0; i < nx; ++i) {
            const double v = std::clamp(values(static_cast<long>(j) * nx + i), 0.0, 1.0);
            const unsigned char pixel = static_cast<unsigned char>(std::lround(v * 255.0));
            out.put(static_cast<char>(pixel));
        }
    }
}

void write_report(const std::filesystem::path& path,
                  const std::vector<std::pair<std::string, std::string>>& entries) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    for (const auto& [key, value] : entries) out << key << " = " << value << "\n";
}

}  // namespace io
}  // namespace cga
