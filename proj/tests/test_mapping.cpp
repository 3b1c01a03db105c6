#include <doctest.h>

#include <cmath>

#include "rgr/lowrank.hpp"
#include "rgr/mapping.hpp"

using namespace rgr;

namespace {

Matrix sample_1d(const ReferenceGrid& ref, int cols, double (*f)(double, int)) {
    Matrix m(ref.num_nodes(), cols);
    for (int j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = f(ref.axis[0][i], j);
    return m;
}

}  // namespace

TEST_CASE("identity grid maps both ways exactly") {
    ReferenceGrid ref = ReferenceGrid::uniform_1d(0.0, 1.0, 21);
    MovingGrid g = init_from_reference(ref, 1, 4, 0.0, 0);
    Matrix m = sample_1d(ref, 4, [](double x, int j) { return std::sin(3 * x) + 0.1 * j; });
    InterpConfig cfg{1};
    Matrix fwd = map_forward(m, g, cfg);
    CHECK((fwd - m).cwiseAbs().maxCoeff() < 1e-12);
    Matrix back = map_inverse(fwd, g, cfg);
    CHECK((back - m).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("degree-1 forward map reproduces affine fields on a moving grid") {
    ReferenceGrid ref = ReferenceGrid::uniform_1d(0.0, 1.0, 21);
    MovingGrid g = init_from_reference(ref, 1, 3, 0.0, 0, {}, 0, 1, false);
    for (int j = 0; j < g.num_control_steps(); ++j) g.coeffs[0](0, j) *= 0.9;
    Matrix m = sample_1d(ref, 3, [](double x, int) { return 2.0 * x + 1.0; });
    Matrix fwd = map_forward(m, g, InterpConfig{1});
    for (int n = 0; n < 3; ++n) {
        Matrix x = g.assemble(n);
        for (Eigen::Index i = 0; i < x.rows(); ++i)
            CHECK(fwd(i, n) == doctest::Approx(2.0 * x(i, 0) + 1.0).epsilon(1e-12));
    }
}

TEST_CASE("node-coincident translation makes all forward columns identical") {
    // Speed times the step interval equals the grid spacing, so moving nodes
    // land exactly on reference nodes and interpolation is exact.
    ReferenceGrid ref = ReferenceGrid::uniform_1d(0.0, 2.5, 51);  // dx = 0.05
    const int K = 11;
    const double c = 0.05;
    MovingGrid g = init_from_reference(ref, 2, K, 0.0, 0, {}, 0, 1, false);
    g.basis[0].col(1) = Vector::Ones(g.control_axis_size(0));
    for (int j = 0; j < g.num_control_steps(); ++j) {
        g.coeffs[0](0, j) = 1.0;
        g.coeffs[0](1, j) = c * g.control_steps[j];
    }
    Matrix m(ref.num_nodes(), K);
    for (int n = 0; n < K; ++n)
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            const double x = ref.axis[0][i];
            m(i, n) = std::exp(-std::pow((x - 0.5 - c * n) / 0.1, 2));
        }
    Matrix fwd = map_forward(m, g, InterpConfig{1});
    for (int n = 1; n < K; ++n) CHECK((fwd.col(n) - fwd.col(0)).cwiseAbs().maxCoeff() < 1e-12);
    Eigen::JacobiSVD<Matrix> svd(fwd);
    CHECK(svd.singularValues()[1] / svd.singularValues()[0] < 1e-12);
}

TEST_CASE("round trip on a stretched grid is second-order accurate") {
    const int n = 101;
    ReferenceGrid ref = ReferenceGrid::uniform_1d(0.0, 1.0, n);
    MovingGrid g = init_from_reference(ref, 1, 3, 0.0, 0, {}, 0, 1, false);
    // Smoothly stretched node set x = xi^1.2 (normalized to [0,1]).
    for (int i = 0; i < g.control_axis_size(0); ++i)
        g.basis[0](i, 0) = std::pow(g.control_axis[0][i], 1.2);
    Matrix m = sample_1d(ref, 3, [](double x, int) { return std::exp(-std::pow((x - 0.4) / 0.15, 2)); });
    InterpConfig cfg{1};
    Matrix rt = map_inverse(map_forward(m, g, cfg), g, cfg);
    CHECK(frobenius_error(m, rt, true) <= 5e-3);
}

TEST_CASE("round-trip error converges at order p+1") {
    auto rt_err = [](int n, int degree) {
        ReferenceGrid ref = ReferenceGrid::uniform_1d(0.0, 1.0, n);
        MovingGrid g = init_from_reference(ref, 1, 3, 0.0, 0, {}, 0, 1, false);
        for (int i = 0; i < g.control_axis_size(0); ++i)
            g.basis[0](i, 0) = std::pow(g.control_axis[0][i], 1.2);
        Matrix m(ref.num_nodes(), 3);
        for (int j = 0; j < 3; ++j)
            for (Eigen::Index i = 0; i < m.rows(); ++i)
                m(i, j) = std::sin(5.0 * ref.axis[0][i] + j);
        InterpConfig cfg{degree};
        return frobenius_error(m, map_inverse(map_forward(m, g, cfg), g, cfg), true);
    };
    // Halving the spacing must reduce the error by about 2^(p+1).
    const double ratio1 = rt_err(101, 1) / rt_err(201, 1);
    CHECK(ratio1 > 4.0 * 0.7);
    CHECK(ratio1 < 4.0 * 1.3);
}

TEST_CASE("2D identity and rotation round trip") {
    ReferenceGrid ref = ReferenceGrid::uniform_2d(-1.0, 1.0, 25, -1.0, 1.0, 25);
    MovingGrid g = init_from_reference(ref, 2, 3, 0.0, 0, {}, 0, 1, false);
    Matrix m(ref.num_nodes(), 3);
    Matrix rc = ref.coords();
    for (int j = 0; j < 3; ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            m(i, j) = std::exp(-(rc(i, 0) * rc(i, 0) + rc(i, 1) * rc(i, 1)) / 0.2);
    InterpConfig cfg{1};
    Matrix fwd = map_forward(m, g, cfg);
    CHECK((fwd - m).cwiseAbs().maxCoeff() < 1e-12);
    Matrix back = map_inverse(fwd, g, cfg);
    CHECK((back - m).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("degree-1 locality: one input node affects few outputs") {
    ReferenceGrid ref = ReferenceGrid::uniform_1d(0.0, 1.0, 41);
    MovingGrid g = init_from_reference(ref, 1, 2, 0.0, 0, {}, 0, 1, false);
    for (int i = 0; i < g.control_axis_size(0); ++i)
        g.basis[0](i, 0) = std::pow(g.control_axis[0][i], 1.1);
    Matrix m = Matrix::Zero(41, 2);
    InterpConfig cfg{1};
    Matrix base = map_forward(m, g, cfg);
    m(20, 0) = 1.0;
    m(20, 1) = 1.0;
    Matrix bumped = map_forward(m, g, cfg);
    int changed = 0;
    for (int i = 0; i < 41; ++i)
        if (std::abs(bumped(i, 0) - base(i, 0)) > 0.0) ++changed;
    CHECK(changed <= 2);  // at most p+1 moving nodes see the bumped reference node
}

TEST_CASE("second_difference annihilates affine and detects curvature") {
    Matrix d = second_difference(5, 1.0);
    Vector affine(5);
    affine << 0, 1, 2, 3, 4;
    CHECK((d * affine).cwiseAbs().maxCoeff() < 1e-12);
    Vector quad(5);
    quad << 0, 1, 4, 9, 16;
    Vector r = d * quad;
    for (int i = 1; i < 4; ++i) CHECK(r[i] == doctest::Approx(2.0));

    Matrix big = second_difference(50, 100.0);
    CHECK(big.rows() == 50);
    CHECK(big(25, 25) == doctest::Approx(-200.0));
    CHECK_THROWS_AS(second_difference(2, 1.0), std::invalid_argument);
}
