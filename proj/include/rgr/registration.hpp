#pragma once

#include <cstdint>

#include "rgr/lowrank.hpp"
#include "rgr/mapping.hpp"

namespace rgr {

struct RegistrationProblem {
    Matrix snapshots;  // N x K
    ReferenceGrid reference;
    int grid_rank = 1;    // r
    int latent_rank = 1;  // k_r
    double gamma1 = 0.0;  // scale of the spatial second-difference penalty
    double gamma2 = 0.0;  // scale of the step-direction second-difference penalty
    double v_min = 0.0;
    bool boundary_pinned = true;
    std::vector<int> control_counts;  // per axis; empty = no down-sampling
    int control_steps = 0;            // K_c; 0 = K
    InterpConfig interp;
    int max_iters = 100;
    double perturb_scale = 1e-3;
    std::uint64_t seed = 0;
    bool squared_norms = false;  // experimentation toggle; all defaults use unsquared norms
    int threads = 0;             // FD-gradient workers; 0 = RGR_THREADS env or hardware
};

struct ObjectiveParts {
    double total = 0.0;
    double data = 0.0;
    double reg1 = 0.0;
    double reg2 = 0.0;
    double penalty = 0.0;
    double min_volume = 0.0;
};

struct RegistrationResult {
    MovingGrid grid;
    LowRankFactors latent;  // rank-k_r factors of G(M) on the trained grid
    std::vector<ObjectiveParts> trace;
    double data_error = 0.0;
    double data_error_rel = 0.0;
    VolumeReport volumes;
    int iterations = 0;
    bool converged = false;
};

// Grid produced by Algorithm step 1 for this problem (down-sampled reference
// factors plus the seeded perturbation).
MovingGrid initialize_grid(const RegistrationProblem& p);

// Free optimization variables of the grid: every entry of the coefficient
// matrices plus the basis rows not eliminated by the boundary constraint.
Vector pack_parameters(const RegistrationProblem& p, const MovingGrid& g);
void unpack_parameters(const RegistrationProblem& p, const Vector& x, MovingGrid& g);

// Full objective: ||M - G^-1(UV(G(M)))||_F + ||Gamma1 Ux||_F + ||Vx Gamma2^T||_F
// plus the quadratic volume penalty scaled by penalty_rho.
ObjectiveParts evaluate_objective(const RegistrationProblem& p, const MovingGrid& g,
                                  double penalty_rho = 0.0, InverseMapWorkspace* ws = nullptr);

// Finite-difference gradient of the total objective over the free parameters.
Vector gradient_fd(const RegistrationProblem& p, const MovingGrid& g, double h,
                   double penalty_rho = 0.0, bool central = true);

RegistrationResult train(const RegistrationProblem& p);

}  // namespace rgr
