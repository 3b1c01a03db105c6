#include "rgr/lowrank.hpp"

#include <algorithm>
#include <cmath>

namespace rgr {

namespace {

void fix_sign(Matrix& left, Matrix& right, int i) {
    const double tol = 1e-12 * left.col(i).cwiseAbs().maxCoeff();
    for (Eigen::Index r = 0; r < left.rows(); ++r) {
        if (std::abs(left(r, i)) > tol) {
            if (left(r, i) < 0.0) {
                left.col(i) = -left.col(i);
                right.row(i) = -right.row(i);
            }
            return;
        }
    }
}

// Deterministic completion of an orthonormal set: Gram-Schmidt of canonical
// basis vectors against the existing columns.
void complete_orthonormal(Matrix& u, int from) {
    const Eigen::Index n = u.rows();
    Eigen::Index cand = 0;
    for (int j = from; j < u.cols(); ++j) {
        while (true) {
            if (cand >= n) throw NumericalError("truncated_svd: cannot complete orthonormal basis");
            Vector e = Vector::Zero(n);
            e[cand++] = 1.0;
            for (int i = 0; i < j; ++i) e -= u.col(i).dot(e) * u.col(i);
            const double nrm = e.norm();
            if (nrm > 1e-8) {
                u.col(j) = e / nrm;
                break;
            }
        }
    }
}

}  // namespace

LowRankFactors truncated_svd(const Matrix& m, int k) {
    const Eigen::Index n = m.rows(), kk = m.cols();
    if (n < 1 || kk < 1) throw std::invalid_argument("truncated_svd: empty matrix");
    if (!m.allFinite()) throw InvalidDataError("truncated_svd: non-finite entry in snapshot matrix");
    if (k < 1 || k > std::min(n, kk))
        throw std::invalid_argument("truncated_svd: rank out of range [1, min(N,K)]");

    const bool gram_right = (kk <= n);  // eigendecompose M^T M, else M M^T
    const Matrix gram = gram_right ? Matrix(m.transpose() * m) : Matrix(m * m.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
    if (eig.info() != Eigen::Success) throw NumericalError("truncated_svd: eigensolver failed");

    const Eigen::Index g = gram.rows();
    LowRankFactors f;
    f.rank = k;
    f.singular_values.resize(k);
    f.left.resize(n, k);
    f.right.resize(k, kk);

    const double sigma_max = std::sqrt(std::max(0.0, eig.eigenvalues()[g - 1]));
    const double tiny = 1e-14 * std::max(1.0, sigma_max);
    int deficient_from = k;
    for (int i = 0; i < k; ++i) {
        const double lam = std::max(0.0, eig.eigenvalues()[g - 1 - i]);  // descending
        const double sigma = std::sqrt(lam);
        f.singular_values[i] = sigma;
        const Vector w = eig.eigenvectors().col(g - 1 - i);
        if (sigma > tiny) {
            if (gram_right) {
                f.left.col(i) = m * w / sigma;
                f.right.row(i) = sigma * w.transpose();
            } else {
                f.left.col(i) = w;
                f.right.row(i) = w.transpose() * m;
            }
        } else {
            // Null direction: the right factor row is zero, the left column is
            // filled afterwards so orthonormality still holds.
            f.singular_values[i] = 0.0;
            f.right.row(i).setZero();
            f.left.col(i).setZero();
            if (deficient_from == k) deficient_from = i;
        }
    }
    if (deficient_from < k) complete_orthonormal(f.left, deficient_from);
    for (int i = 0; i < k; ++i) fix_sign(f.left, f.right, i);
    return f;
}

Matrix reconstruct(const LowRankFactors& f) {
    if (f.left.cols() != f.right.rows())
        throw std::invalid_argument("reconstruct: factor shapes do not match");
    return f.left * f.right;
}

double frobenius_error(const Matrix& a, const Matrix& b, bool relative) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw std::invalid_argument("frobenius_error: shape mismatch");
    const double err = (a - b).norm();
    if (!relative) return err;
    const double denom = a.norm();
    if (denom == 0.0) throw InvalidDataError("frobenius_error: relative error with ||a||_F = 0");
    return err / denom;
}

Vector singular_values(const Matrix& m) {
    const Eigen::Index g = std::min(m.rows(), m.cols());
    const Matrix gram = (m.cols() <= m.rows()) ? Matrix(m.transpose() * m) : Matrix(m * m.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
    Vector s(g);
    for (Eigen::Index i = 0; i < g; ++i) s[i] = std::sqrt(std::max(0.0, eig.eigenvalues()[g - 1 - i]));
    return s;
}

}  // namespace rgr
