#pragma once

#include "rgr/lowrank.hpp"
#include "rgr/mapping.hpp"

namespace rgr {

struct LatentSeries {
    Matrix coords;  // k_r x K latent coordinates over steps
    Vector times;   // strictly increasing, uniform spacing
};

// Ridge-regularized vector autoregression z_n = sum_i A_i z_{n-i} + b.
struct ArModel {
    int order = 1;
    std::vector<Matrix> coeff;  // q matrices, k_r x k_r
    Vector bias;
    double fit_residual = 0.0;  // RMS one-step residual on the training series
};

// Appends control columns to V_x by linear extrapolation of each row from the
// last two control columns; the extended grid covers extra_steps more fine
// steps and must still be diffeomorphic.
MovingGrid extend_grid(const MovingGrid& g, int extra_steps, double v_min = 0.0);

ArModel fit_ar(const LatentSeries& series, int order, double ridge);

// Closed-loop rollout for `horizon` steps past the series.
LatentSeries predict(const ArModel& model, const LatentSeries& series, int horizon);

// Decode path: U z_n on the moving grid at each predicted step, mapped back
// to the reference grid. pred columns correspond to steps first_step,
// first_step+1, ... of g_ext.
Matrix reconstruct_prediction(const MovingGrid& g_ext, const Matrix& left_factor,
                              const LatentSeries& pred, int first_step, const InterpConfig& cfg);

}  // namespace rgr
