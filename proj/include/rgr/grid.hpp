#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "rgr/types.hpp"

namespace rgr {

// Constant (Eulerian) structured grid. 2D grids are tensor products; nodes
// are flattened x-fastest: node = ix + nx*iy.
struct ReferenceGrid {
    int dim = 1;
    std::vector<Vector> axis;  // per-axis coordinates, strictly increasing

    Eigen::Index num_nodes() const;
    int axis_size(int a) const { return static_cast<int>(axis[a].size()); }
    double domain_length(int a) const { return axis[a][axis[a].size() - 1] - axis[a][0]; }
    // Coordinates of all nodes, N x dim.
    Matrix coords() const;
    bool is_boundary(Eigen::Index node) const;

    static ReferenceGrid uniform_1d(double a, double b, int n);
    static ReferenceGrid uniform_2d(double ax, double bx, int nx, double ay, double by, int ny);
    static ReferenceGrid from_axes(std::vector<Vector> axes);
};

struct VolumeReport {
    struct Violation {
        int step;
        int cell;
        double volume;
    };
    std::vector<double> per_step_min;
    double global_min = 0.0;
    double v_min = 0.0;
    bool passed = false;
    std::vector<Violation> violations;
};

// Low-rank parameter/time-varying grid: one factor pair per coordinate
// component, defined on a down-sampled control grid and expanded to the fine
// grid on assembly (piecewise cubic in space, linear in the step direction).
struct MovingGrid {
    ReferenceGrid reference;
    int rank = 0;
    int num_steps = 0;       // K fine steps covered by training
    int upsample_degree = 3;
    bool boundary_pinned = true;

    std::vector<Matrix> basis;   // per component: N_c x r
    std::vector<Matrix> coeffs;  // per component: r x K_c
    std::vector<Vector> control_axis;  // per spatial axis: uniform control coords
    Vector control_steps;        // K_c positions in fine-step units

    int control_axis_size(int a) const { return static_cast<int>(control_axis[a].size()); }

    std::vector<Matrix> upsample;  // cached per-axis operators, n_fine x n_ctrl

    int num_control_nodes() const;
    int num_control_steps() const { return static_cast<int>(control_steps.size()); }
    void rebuild_upsample();

    // Step coefficients v_x[n] for component c (linear in the step direction,
    // extrapolated past the last control column).
    Vector step_coeffs(int c, double n) const;

    // Fine-grid coordinates at step n, N x dim.
    Matrix assemble(int n) const;
};

MovingGrid init_from_reference(const ReferenceGrid& ref, int r, int K, double perturb_scale,
                               std::uint64_t seed, std::vector<int> control_counts = {},
                               int control_steps = 0, int upsample_degree = 3,
                               bool boundary_pinned = true);

// Raw signed cell volumes of one assembled step: successive differences in
// 1D, shoelace quad areas in 2D (cells x-fastest).
Vector cell_volumes(const Matrix& coords, const ReferenceGrid& ref);

VolumeReport validate_diffeomorphism(const MovingGrid& g, double v_min);

}  // namespace rgr
