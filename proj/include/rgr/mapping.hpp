#pragma once

#include "rgr/grid.hpp"
#include "rgr/interp.hpp"

namespace rgr {

struct InterpConfig {
    int degree = 1;  // 1 = piecewise linear/bilinear, 3 = piecewise cubic
};

// Reusable state for the 2D inverse map: last known containing cell per
// reference node and step. Warm seeds make repeated inversions on nearby
// grids cheap.
struct InverseMapWorkspace {
    std::vector<std::vector<int>> cell_seed;  // [step][node] -> cell id, -1 unknown
};

// G: sample each snapshot column (values on the reference grid) at the
// moving-grid node locations of its step. Out-of-domain nodes clamp to the
// boundary value.
Matrix map_forward(const Matrix& m, const MovingGrid& g, const InterpConfig& cfg);

// G^-1: values given at the moving nodes of each step, interpolated back to
// the reference nodes. In 2D each reference node is located inside a deformed
// cell (grid walk) and the bilinear map of that cell is inverted by Newton
// iteration. Reference nodes left outside the deformed grid take the nearest
// moving-node value; their count is reported through clamped_count.
Matrix map_inverse(const Matrix& latent, const MovingGrid& g, const InterpConfig& cfg,
                   InverseMapWorkspace* ws = nullptr, int* clamped_count = nullptr);

// Single-step inverse map: values at the moving nodes of step n, interpolated
// back to the reference nodes. Used by the forecasting decode path where only
// the extended steps are needed.
Vector map_inverse_at(const Vector& values, const MovingGrid& g, int step, const InterpConfig& cfg,
                      std::vector<int>* cell_seed = nullptr, int* clamped_count = nullptr);

// n x n second-difference stencil scaled by `scale`; the endpoint rows use
// one-sided second differences.
Matrix second_difference(int n, double scale);

}  // namespace rgr
