#include "rgr/interp.hpp"

#include <algorithm>

namespace rgr {

int bracket(const Vector& xs, double x) {
    const int n = static_cast<int>(xs.size());
    int i = static_cast<int>(std::upper_bound(xs.data(), xs.data() + n, x) - xs.data()) - 1;
    return std::clamp(i, 0, n - 2);
}

InterpStencil interp_stencil(const Vector& xs, double x, int degree) {
    const int n = static_cast<int>(xs.size());
    InterpStencil st;
    if (n == 1) {
        st.first = 0;
        st.count = 1;
        st.w[0] = 1.0;
        return st;
    }
    x = std::clamp(x, xs[0], xs[n - 1]);
    const int i = bracket(xs, x);
    if (degree == 1 || n < 4) {
        st.first = i;
        st.count = 2;
        const double t = (x - xs[i]) / (xs[i + 1] - xs[i]);
        st.w[0] = 1.0 - t;
        st.w[1] = t;
        return st;
    }
    if (degree != 3) throw std::invalid_argument("interp_stencil: degree must be 1 or 3");
    // Cubic Hermite on the bracket interval with node slopes estimated from
    // the neighboring three-point quadratic. Unlike a piecewise Lagrange
    // cubic this interpolant is C1 across nodes, so objectives built on it
    // have continuous derivatives in both the query point and the node
    // positions; stencil support stays at four nodes.
    st.first = std::clamp(i - 1, 0, n - 4);
    st.count = 4;
    const double h = xs[i + 1] - xs[i];
    const double t = (x - xs[i]) / h;
    const double h00 = (1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t);
    const double h10 = t * (1.0 - t) * (1.0 - t);
    const double h01 = t * t * (3.0 - 2.0 * t);
    const double h11 = t * t * (t - 1.0);
    // Derivative weights of the quadratic through nodes {j-1, j, j+1} at
    // xs[j]; at the ends the one-sided quadratic is used instead.
    const auto add_slope = [&](int j, double amount) {
        const int lo = std::clamp(j - 1, 0, n - 3);
        const double a = xs[lo], b = xs[lo + 1], c = xs[lo + 2];
        const double xj = xs[j];
        st.w[lo - st.first] += amount * (2.0 * xj - b - c) / ((a - b) * (a - c));
        st.w[lo + 1 - st.first] += amount * (2.0 * xj - a - c) / ((b - a) * (b - c));
        st.w[lo + 2 - st.first] += amount * (2.0 * xj - a - b) / ((c - a) * (c - b));
    };
    st.w[i - st.first] += h00;
    st.w[i + 1 - st.first] += h01;
    add_slope(i, h10 * h);
    add_slope(i + 1, h11 * h);
    return st;
}

double interp1(const Vector& xs, const Vector& ys, double x, int degree) {
    const InterpStencil st = interp_stencil(xs, x, degree);
    double v = 0.0;
    for (int a = 0; a < st.count; ++a) v += st.w[a] * ys[st.first + a];
    return v;
}

Matrix interp_matrix(const Vector& xs, const Vector& xq, int degree) {
    Matrix w = Matrix::Zero(xq.size(), xs.size());
    for (Eigen::Index i = 0; i < xq.size(); ++i) {
        const InterpStencil st = interp_stencil(xs, xq[i], degree);
        for (int a = 0; a < st.count; ++a) w(i, st.first + a) = st.w[a];
    }
    return w;
}

}  // namespace rgr
