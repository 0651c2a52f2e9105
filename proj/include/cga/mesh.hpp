#pragma once

#include <Eigen/Dense>
#include <vector>

namespace cga {

// Structured grid of bilinear quads on [0,lx] x [0,ly].
// Node (i,j) has index j*(nx+1)+i, element (i,j) has index j*nx+i.
// Element connectivity is counterclockwise: (i,j), (i+1,j), (i+1,j+1), (i,j+1).
struct Grid2D {
    int nx = 0;
    int ny = 0;
    double lx = 0.0;
    double ly = 0.0;
    Eigen::MatrixX2d nodes;                    // (nx+1)*(ny+1) x 2
    Eigen::Matrix<int, Eigen::Dynamic, 4> conn;  // num_elements x 4

    int num_elements() const { return nx * ny; }
    int num_nodes() const { return (nx + 1) * (ny + 1); }
    double dx() const { return lx / nx; }
    double dy() const { return ly / ny; }
    double element_area() const { return dx() * dy(); }
    int node_id(int i, int j) const { return j * (nx + 1) + i; }
    int element_id(int i, int j) const { return j * nx + i; }
};

Grid2D build_grid(int nx, int ny, double lx, double ly);

// Center of element e = ((i+0.5)*dx, (j+0.5)*dy), one row per element.
Eigen::MatrixX2d element_centers(const Grid2D& grid);

// Axis-aligned selection box in domain units. Nodes are captured inclusively
// with tolerance 1e-9 * max(lx, ly).
struct RegionSpec {
    double xmin = 0.0, xmax = 0.0, ymin = 0.0, ymax = 0.0;
};

// Sorted unique node indices inside the box. Empty selections only warn.
std::vector<int> select_nodes(const Grid2D& grid, const RegionSpec& region);

struct DisplacementBC {
    std::vector<int> nodes;
    bool fix_x = false;
    bool fix_y = false;
    double ux = 0.0;
    double uy = 0.0;
};

// Total force (fx, fy) split equally over the node set.
struct PointLoad {
    std::vector<int> nodes;
    double fx = 0.0;
    double fy = 0.0;
};

struct TemperatureBC {
    std::vector<int> nodes;
    double value = 0.0;
};

// Total heat input q split equally over the node set (positive = into domain).
struct HeatLoad {
    std::vector<int> nodes;
    double q = 0.0;
};

struct BoundaryConditions {
    std::vector<DisplacementBC> fixed_disp;
    std::vector<PointLoad> loads;
    std::vector<TemperatureBC> fixed_temp;
    std::vector<HeatLoad> heat_loads;
    double body_heat = 0.0;            // volumetric source s
    Eigen::Vector2d body_force{0.0, 0.0};

    bool has_thermal() const {
        return !fixed_temp.empty() || !heat_loads.empty() || body_heat != 0.0;
    }
};

// Throws std::invalid_argument if a DOF carries both a fixed value and a load,
// or two contradictory fixed values.
void validate_bcs(const Grid2D& grid, const BoundaryConditions& bcs);

}  // namespace cga
