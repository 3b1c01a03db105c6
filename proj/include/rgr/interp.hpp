#pragma once

#include "rgr/types.hpp"

namespace rgr {

// Piecewise polynomial interpolation on a strictly increasing node set.
// degree 1: the two bracketing nodes; degree 3: four-point Lagrange stencil
// (clamped at the ends). Queries outside [xs.front, xs.back] are clamped to
// the boundary value.

struct InterpStencil {
    int first = 0;    // index of first node in the stencil
    int count = 0;    // 2 or 4 (fewer when the node set is short)
    double w[4] = {0, 0, 0, 0};
};

// Index i with xs[i] <= x < xs[i+1], clamped to [0, n-2].
int bracket(const Vector& xs, double x);

InterpStencil interp_stencil(const Vector& xs, double x, int degree);

double interp1(const Vector& xs, const Vector& ys, double x, int degree);

// Dense operator W (xq.size() x xs.size()) with (W*ys)[i] = interp at xq[i].
Matrix interp_matrix(const Vector& xs, const Vector& xq, int degree);

}  // namespace rgr
