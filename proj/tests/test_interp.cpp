#include <doctest.h>

#include <cmath>

#include "rgr/interp.hpp"

using namespace rgr;

TEST_CASE("bracket clamps and locates") {
    Vector xs = Vector::LinSpaced(5, 0.0, 1.0);
    CHECK(bracket(xs, -1.0) == 0);
    CHECK(bracket(xs, 0.0) == 0);
    CHECK(bracket(xs, 0.3) == 1);
    CHECK(bracket(xs, 1.0) == 3);
    CHECK(bracket(xs, 2.0) == 3);
}

TEST_CASE("degree-1 reproduces affine data exactly") {
    Vector xs = Vector::LinSpaced(11, 0.0, 1.0);
    Vector ys = 2.0 * xs.array() + 1.0;
    for (double x : {0.05, 0.31, 0.77, 0.999}) {
        CHECK(interp1(xs, ys, x, 1) == doctest::Approx(2.0 * x + 1.0).epsilon(1e-14));
    }
}

TEST_CASE("degree-3 reproduces quadratics exactly") {
    // The Hermite form uses three-point slope estimates, which are exact for
    // quadratics (including the one-sided estimates at the ends).
    Vector xs(9);
    xs << -1.0, -0.8, -0.55, -0.3, 0.0, 0.2, 0.5, 0.8, 1.0;  // nonuniform
    auto f = [](double x) { return 1.5 * x * x + 2.0 * x - 3.0; };
    Vector ys(9);
    for (int i = 0; i < 9; ++i) ys[i] = f(xs[i]);
    for (double x : {-0.93, -0.2, 0.11, 0.64, 0.99}) {
        CHECK(interp1(xs, ys, x, 3) == doctest::Approx(f(x)).epsilon(1e-12));
    }
}

TEST_CASE("degree-3 interpolant is C1 across nodes") {
    Vector xs = Vector::LinSpaced(9, 0.0, 1.0);
    Vector ys(9);
    for (int i = 0; i < 9; ++i) ys[i] = std::sin(7.0 * xs[i]);
    const double d = 1e-7;
    for (int j = 1; j < 8; ++j) {
        const double left = (interp1(xs, ys, xs[j] - d, 3) - interp1(xs, ys, xs[j] - 2 * d, 3)) / d;
        const double right = (interp1(xs, ys, xs[j] + 2 * d, 3) - interp1(xs, ys, xs[j] + d, 3)) / d;
        CHECK(left == doctest::Approx(right).epsilon(1e-4));
    }
}

TEST_CASE("queries outside the nodes clamp to boundary values") {
    Vector xs = Vector::LinSpaced(5, 0.0, 1.0);
    Vector ys(5);
    ys << 3, 1, 4, 1, 5;
    CHECK(interp1(xs, ys, -0.5, 1) == 3.0);
    CHECK(interp1(xs, ys, 1.5, 1) == 5.0);
    CHECK(interp1(xs, ys, -0.5, 3) == 3.0);
    CHECK(interp1(xs, ys, 1.5, 3) == 5.0);
}

TEST_CASE("interp_matrix agrees with pointwise evaluation") {
    Vector xs = Vector::LinSpaced(7, 0.0, 2.0);
    Vector ys(7);
    ys << 0, 1, 0.5, 2, 1.5, 3, 2.5;
    Vector xq = Vector::LinSpaced(23, -0.1, 2.1);
    for (int degree : {1, 3}) {
        Matrix w = interp_matrix(xs, xq, degree);
        Vector via_matrix = w * ys;
        for (int i = 0; i < xq.size(); ++i) {
            CHECK(via_matrix[i] == doctest::Approx(interp1(xs, ys, xq[i], degree)).epsilon(1e-13));
        }
    }
}

TEST_CASE("stencil weights sum to one") {
    Vector xs = Vector::LinSpaced(6, 0.0, 1.0);
    for (int degree : {1, 3}) {
        for (double x : {0.01, 0.35, 0.5, 0.83}) {
            InterpStencil s = interp_stencil(xs, x, degree);
            double sum = 0.0;
            for (int i = 0; i < s.count; ++i) sum += s.w[i];
            CHECK(sum == doctest::Approx(1.0).epsilon(1e-13));
        }
    }
}

TEST_CASE("convergence order of degree-1 interpolation") {
    auto err_at = [](int n) {
        Vector xs = Vector::LinSpaced(n, 0.0, 1.0);
        Vector ys(n);
        for (int i = 0; i < n; ++i) ys[i] = std::sin(6.0 * xs[i]);
        double emax = 0.0;
        for (int i = 0; i < 1000; ++i) {
            const double x = (i + 0.5) / 1000.0;
            emax = std::max(emax, std::abs(interp1(xs, ys, x, 1) - std::sin(6.0 * x)));
        }
        return emax;
    };
    const double ratio = err_at(51) / err_at(101);
    CHECK(ratio > 2.5);  // second order: halving h divides the error by ~4
    CHECK(ratio < 5.5);
}
