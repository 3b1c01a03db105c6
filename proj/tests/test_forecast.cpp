#include <doctest.h>

#include <cmath>

#include "rgr/datagen.hpp"
#include "rgr/forecast.hpp"
#include "rgr/registration.hpp"

using namespace rgr;

namespace {

LatentSeries make_series(const Matrix& coords) {
    LatentSeries s;
    s.coords = coords;
    s.times = Vector::LinSpaced(coords.cols(), 0.0, coords.cols() - 1.0);
    return s;
}

}  // namespace

TEST_CASE("extend_grid continues rows linearly") {
    ReferenceGrid ref = ReferenceGrid::uniform_1d(0.0, 1.0, 11);
    MovingGrid g = init_from_reference(ref, 1, 3, 0.0, 0, {}, 0, 1, false);
    g.coeffs[0].row(0) << 1.0, 2.0, 3.0;
    MovingGrid ext = extend_grid(g, 2);
    REQUIRE(ext.num_control_steps() == 5);
    CHECK(ext.coeffs[0](0, 3) == doctest::Approx(4.0));
    CHECK(ext.coeffs[0](0, 4) == doctest::Approx(5.0));
    CHECK(ext.num_steps == 5);

    MovingGrid gc = init_from_reference(ref, 1, 3, 0.0, 0, {}, 0, 1, false);
    MovingGrid extc = extend_grid(gc, 3);
    for (int j = 0; j < extc.num_control_steps(); ++j)
        CHECK(extc.coeffs[0](0, j) == doctest::Approx(extc.coeffs[0](0, 0)));
}

TEST_CASE("extended columns are affine in the step index") {
    ReferenceGrid ref = ReferenceGrid::uniform_1d(0.0, 2.0, 21);
    MovingGrid g = init_from_reference(ref, 2, 6, 1e-3, 4, {9}, 4, 1, true);
    MovingGrid ext = extend_grid(g, 3);
    const int kc = ext.num_control_steps();
    // The appended columns continue the last slope, so every second
    // difference that includes a new column vanishes exactly; differences
    // entirely inside the original perturbed columns do not.
    for (int i = 0; i < ext.rank; ++i) {
        for (int j = kc - 2; j < kc; ++j) {
            const double second = ext.coeffs[0](i, j) - 2 * ext.coeffs[0](i, j - 1) +
                                  ext.coeffs[0](i, j - 2);
            CHECK(std::abs(second) < 1e-12);
        }
    }
}

TEST_CASE("infeasible extension is rejected") {
    ReferenceGrid ref = ReferenceGrid::uniform_1d(0.0, 1.0, 11);
    MovingGrid g = init_from_reference(ref, 1, 3, 0.0, 0, {}, 0, 1, false);
    g.coeffs[0].row(0) << 1.0, 0.7, 0.4;  // collapses soon after extension
    CHECK_THROWS_AS(extend_grid(g, 4, 1e-3), InfeasibleError);
}

TEST_CASE("fit_ar recovers exact low-order models") {
    // Constant series.
    Matrix c = Matrix::Ones(1, 10) * 3.5;
    ArModel m = fit_ar(make_series(c), 1, 0.0);
    CHECK(m.fit_residual < 1e-10);
    LatentSeries pred = predict(m, make_series(c), 4);
    for (int j = 0; j < 4; ++j) CHECK(pred.coords(0, j) == doctest::Approx(3.5).epsilon(1e-10));

    // Geometric series z_n = rho^n is an exact AR(1) with A = rho, bias 0.
    Matrix geo(1, 12);
    for (int j = 0; j < 12; ++j) geo(0, j) = std::pow(0.9, j);
    ArModel g = fit_ar(make_series(geo), 1, 0.0);
    CHECK(g.coeff[0](0, 0) == doctest::Approx(0.9).epsilon(1e-10));
    CHECK(std::abs(g.bias[0]) < 1e-10);
    CHECK(g.fit_residual < 1e-12);

    LatentSeries cont = predict(g, make_series(geo), 10);
    for (int j = 0; j < 10; ++j)
        CHECK(cont.coords(0, j) == doctest::Approx(std::pow(0.9, 12 + j)).epsilon(1e-8));
}

TEST_CASE("constant latent series of the static oracle predicts exactly") {
    PdeRunConfig pc;
    pc.x_min = 0.0;
    pc.x_max = 2.5;
    pc.final_time = 1.0;
    pc.dx = 0.05;
    pc.ic_center = 1.0;
    pc.ic_width = 0.1;
    AdvectionOracle o = advecting_gaussian(0.0, pc, 12);
    LowRankFactors f = truncated_svd(o.data.snapshots, 1);
    ArModel m = fit_ar(make_series(f.right), 2, 0.0);
    LatentSeries pred = predict(m, make_series(f.right), 3);
    for (int j = 0; j < 3; ++j)
        CHECK(std::abs(pred.coords(0, j) - f.right(0, 0)) < 1e-10);
}

TEST_CASE("reconstruct_prediction zero latents give zero fields") {
    ReferenceGrid ref = ReferenceGrid::uniform_1d(0.0, 1.0, 11);
    MovingGrid g = init_from_reference(ref, 1, 4, 0.0, 0, {}, 0, 1, false);
    Matrix u = Matrix::Ones(11, 1);
    LatentSeries z = make_series(Matrix::Zero(1, 2));
    Matrix out = reconstruct_prediction(g, u, z, 2, InterpConfig{1});
    CHECK(out.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("extended ground-truth advection grid reproduces the analytic field") {
    PdeRunConfig pc;
    pc.x_min = 0.0;
    pc.x_max = 2.5;
    pc.final_time = 0.8;
    pc.dx = 0.01;
    pc.ic_center = 0.5;
    pc.ic_width = 0.1;
    const double c = 1.0;
    AdvectionOracle o = advecting_gaussian(c, pc, 33);  // t in [0, 0.8]
    const int train_k = 33;
    const int extra = 8;  // continue to t = 1.0 in the same step size
    MovingGrid ext = extend_grid(o.true_grid, extra);
    LowRankFactors f = truncated_svd(map_forward(o.data.snapshots, o.true_grid, InterpConfig{1}),
                                     1);
    // Exact latents are constant; continue them as such.
    LatentSeries z;
    z.coords = Matrix::Ones(1, extra);
    for (int j = 0; j < extra; ++j) z.coords(0, j) = f.right(0, train_k - 1);
    z.times = Vector::LinSpaced(extra, train_k, train_k + extra - 1.0);
    Matrix pred = reconstruct_prediction(ext, f.left, z, train_k, InterpConfig{1});
    const double dt = 0.8 / 32.0;
    double emax = 0.0;
    for (int j = 0; j < extra; ++j) {
        const double t = (train_k + j) * dt;
        for (int i = 0; i < pred.rows(); ++i) {
            const double x = i * pc.dx;
            const double exact = std::exp(-std::pow((x - 0.5 - c * t) / 0.1, 2));
            emax = std::max(emax, std::abs(pred(i, j) - exact));
        }
    }
    CHECK(emax < 1e-2);
}
