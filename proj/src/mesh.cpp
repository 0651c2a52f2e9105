#include "cga/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <map>
#include <stdexcept>

namespace cga {

Grid2D build_grid(int nx, int ny, double lx, double ly) {
    if (nx < 1 || ny < 1) {
        throw std::invalid_argument("build_grid: element counts must be >= 1");
    }
    if (!(lx > 0.0) || !(ly > 0.0)) {
        throw std::invalid_argument("build_grid: domain size must be positive");
    }
    Grid2D g;
    g.nx = nx;
    g.ny = ny;
    g.lx = lx;
    g.ly = ly;
    const double dx = lx / nx;
    const double dy = ly / ny;
    g.nodes.resize((nx + 1) * (ny + 1), 2);
    for (int j = 0; j <= ny; ++j) {
        for (int i = 0; i <= nx; ++i) {
            const int n = g.node_id(i, j);
            g.nodes(n, 0) = i * dx;
            g.nodes(n, 1) = j * dy;
        }
    }
    g.conn.resize(nx * ny, 4);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const int e = g.element_id(i, j);
            g.conn(e, 0) = g.node_id(i, j);
            g.conn(e, 1) = g.node_id(i + 1, j);
            g.conn(e, 2) = g.node_id(i + 1, j + 1);
            g.conn(e, 3) = g.node_id(i, j + 1);
        }
    }
    return g;
}

Eigen::MatrixX2d element_centers(const Grid2D& grid) {
    Eigen::MatrixX2d centers(grid.num_elements(), 2);
    const double dx = grid.dx();
    const double dy = grid.dy();
    for (int j = 0; j < grid.ny; ++j) {
        for (int i = 0; i < grid.nx; ++i) {
            const int e = grid.element_id(i, j);
            centers(e, 0) = (i + 0.5) * dx;
            centers(e, 1) = (j + 0.5) * dy;
        }
    }
    return centers;
}

std::vector<int> select_nodes(const Grid2D& grid, const RegionSpec& region) {
    const double tol = 1e-9 * std::max(grid.lx, grid.ly);
    std::vector<int> out;
    for (int n = 0; n < grid.num_nodes(); ++n) {
        const double x = grid.nodes(n, 0);
        const double y = grid.nodes(n, 1);
        if (x >= region.xmin - tol && x <= region.xmax + tol &&
            y >= region.ymin - tol && y <= region.ymax + tol) {
            out.push_back(n);
        }
    }
    if (out.empty()) {
        std::cerr << "warning: region [" << region.xmin << "," << region.xmax
                  << "]x[" << region.ymin << "," << region.ymax
                  << "] selects no nodes\n";
    }
    return out;  // node loop order is already sorted and unique
}

void validate_bcs(const Grid2D& grid, const BoundaryConditions& bcs) {
    const int nn = grid.num_nodes();
    auto check_node = [&](int n, const char* what) {
        if (n < 0 || n >= nn) {
            throw std::invalid_argument(std::string(what) + ": node index out of range");
        }
    };

    // dof -> prescribed value; dof = 2*node + axis
    std::map<int, double> fixed;
    for (const auto& bc : bcs.fixed_disp) {
        for (int n : bc.nodes) {
            check_node(n, "fixed_disp");
            for (int axis = 0; axis < 2; ++axis) {
                const bool on = axis == 0 ? bc.fix_x : bc.fix_y;
                if (!on) continue;
                const double val = axis == 0 ? bc.ux : bc.uy;
                auto [it, inserted] = fixed.emplace(2 * n + axis, val);
                if (!inserted && it->second != val) {
                    throw std::invalid_argument(
                        "conflicting fixed displacement values on node " + std::to_string(n));
                }
            }
        }
    }
    for (const auto& load : bcs.loads) {
        for (int n : load.nodes) {
            check_node(n, "load");
            if ((load.fx != 0.0 && fixed.count(2 * n)) ||
                (load.fy != 0.0 && fixed.count(2 * n + 1))) {
                throw std::invalid_argument(
                    "node " + std::to_string(n) + " carries both a fixed displacement and a load");
            }
        }
    }

    std::map<int, double> fixed_t;
    for (const auto& bc : bcs.fixed_temp) {
        for (int n : bc.nodes) {
            check_node(n, "fixed_temp");
            auto [it, inserted] = fixed_t.emplace(n, bc.value);
            if (!inserted && it->second != bc.value) {
                throw std::invalid_argument(
                    "conflicting fixed temperature values on node " + std::to_string(n));
            }
        }
    }
    for (const auto& load : bcs.heat_loads) {
        for (int n : load.nodes) {
            check_node(n, "heat_load");
            if (load.q != 0.0 && fixed_t.count(n)) {
                throw std::invalid_argument(
                    "node " + std::to_string(n) + " carries both a fixed temperature and a heat load");
            }
        }
    }
}

}  // namespace cga
