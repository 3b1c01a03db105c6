#pragma once

#include "rgr/grid.hpp"

namespace rgr {

struct PdeRunConfig {
    double x_min = 0.0;
    double x_max = 1.0;
    double final_time = 1.0;
    double dx = 1e-2;
    double dt = 1e-3;
    double reynolds = 1000.0;  // Burgers only
    int snapshot_stride = 1;
    // Initial condition: "gaussian" is offset + amp * exp(-((x-x0)/width)^2),
    // "sine" is offset + amp * sin(pi * mode * (x-x_a)/(x_b-x_a)).
    std::string ic_shape = "gaussian";
    double ic_offset = 0.0;
    double ic_amplitude = 1.0;
    double ic_center = 0.5;
    double ic_width = 0.1;
    int ic_mode = 1;
};

struct Dataset {
    Matrix snapshots;
    ReferenceGrid reference;
    Vector times;  // parameter/time value per column
};

// Anti-aliased glyph rotated about the image center, one column per angle
// (0 degrees included). glyph: "A" (default) or "cross".
Dataset rotated_glyph(int size, double total_degrees, double increment,
                      const std::string& glyph = "A");

// Viscous Burgers with homogeneous Dirichlet boundaries, Crank-Nicolson in
// time with Newton inner iterations, central second-order differences.
Dataset burgers_solve(const PdeRunConfig& cfg);

// Linear wave equation, Newmark average-acceleration stepping, homogeneous
// Dirichlet boundaries, zero initial velocity.
Dataset wave_solve(const PdeRunConfig& cfg);

struct AdvectionOracle {
    Dataset data;
    MovingGrid true_grid;  // exact rank-2 grid x[n] = x_ref + c*t_n
};

// Analytic advecting Gaussian sampled exactly; num_steps columns spanning
// [0, final_time].
AdvectionOracle advecting_gaussian(double speed, const PdeRunConfig& cfg, int num_steps);

}  // namespace rgr
