#pragma once

#include "rgr/types.hpp"

namespace rgr {

// Rank-k factor pair of a snapshot matrix. Columns of `left` are orthonormal;
// the singular values are absorbed into the rows of `right`, so the
// reconstruction is simply left * right.
struct LowRankFactors {
    Matrix left;             // N x k, orthonormal columns
    Matrix right;            // k x K, row i = sigma_i * v_i^T
    Vector singular_values;  // k leading singular values, descending
    int rank = 0;
};

// Eckart-Young optimal rank-k factors of m, computed by eigendecomposition of
// the smaller Gram matrix (method of snapshots). Sign convention: the first
// nonzero entry of each left singular vector is non-negative.
LowRankFactors truncated_svd(const Matrix& m, int k);

// The product left * right.
Matrix reconstruct(const LowRankFactors& f);

// ||a - b||_F, divided by ||a||_F when relative.
double frobenius_error(const Matrix& a, const Matrix& b, bool relative = false);

// Full singular spectrum of m, descending.
Vector singular_values(const Matrix& m);

}  // namespace rgr
