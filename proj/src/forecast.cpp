#include "rgr/forecast.hpp"

#include <cmath>

namespace rgr {

MovingGrid extend_grid(const MovingGrid& g, int extra_steps, double v_min) {
    if (extra_steps < 0) throw std::invalid_argument("extend_grid: negative extension");
    const int kc = g.num_control_steps();
    if (kc < 2) throw std::invalid_argument("extend_grid: need at least 2 control steps");
    MovingGrid ext = g;
    if (extra_steps == 0) return ext;

    const double spacing = g.control_steps[kc - 1] - g.control_steps[kc - 2];
    const double target = g.num_steps - 1 + extra_steps;
    const int extra_cols =
        static_cast<int>(std::ceil((target - g.control_steps[kc - 1]) / spacing - 1e-12));

    ext.num_steps = g.num_steps + extra_steps;
    ext.control_steps.resize(kc + extra_cols);
    ext.control_steps.head(kc) = g.control_steps;
    for (int j = 0; j < extra_cols; ++j)
        ext.control_steps[kc + j] = g.control_steps[kc - 1] + (j + 1) * spacing;
    for (int c = 0; c < g.reference.dim; ++c) {
        Matrix v(g.rank, kc + extra_cols);
        v.leftCols(kc) = g.coeffs[c];
        const Vector slope = g.coeffs[c].col(kc - 1) - g.coeffs[c].col(kc - 2);
        for (int j = 0; j < extra_cols; ++j)
            v.col(kc + j) = g.coeffs[c].col(kc - 1) + (j + 1) * slope;
        ext.coeffs[c] = std::move(v);
    }

    const VolumeReport rep = validate_diffeomorphism(ext, v_min);
    if (!rep.passed) {
        int first = ext.num_steps;
        for (const auto& viol : rep.violations)
            if (viol.step >= g.num_steps) first = std::min(first, viol.step);
        if (first < ext.num_steps)
            throw InfeasibleError("extend_grid: extension violates minimum volume at step " +
                                  std::to_string(first));
    }
    return ext;
}

ArModel fit_ar(const LatentSeries& series, int order, double ridge) {
    const int k = static_cast<int>(series.coords.rows());
    const int n = static_cast<int>(series.coords.cols());
    if (order < 1) throw std::invalid_argument("fit_ar: order must be >= 1");
    if (ridge < 0) throw std::invalid_argument("fit_ar: negative ridge");
    if (n <= order + k) throw std::invalid_argument("fit_ar: series too short for least squares");

    const int rows = n - order;
    const int p = order * k;  // regressors excluding bias
    Matrix design(rows, p + 1);
    Matrix target(rows, k);
    for (int s = 0; s < rows; ++s) {
        const int t = s + order;
        for (int lag = 1; lag <= order; ++lag)
            design.block(s, (lag - 1) * k, 1, k) = series.coords.col(t - lag).transpose();
        design(s, p) = 1.0;
        target.row(s) = series.coords.col(t).transpose();
    }

    // Normal equations with ridge on the coefficient block only.
    Matrix lhs = design.transpose() * design;
    for (int i = 0; i < p; ++i) lhs(i, i) += ridge;
    Eigen::LDLT<Matrix> solver(lhs);
    if (solver.info() != Eigen::Success)
        throw NumericalError("fit_ar: normal equations are ill-conditioned; try a larger ridge");
    const Matrix theta = solver.solve(design.transpose() * target);  // (p+1) x k
    if (ridge == 0.0) {
        const double residual_check = (lhs * theta - design.transpose() * target).norm();
        if (!(residual_check < 1e-6 * (1.0 + target.norm())))
            throw NumericalError("fit_ar: rank-deficient normal equations; try ridge > 0");
    }

    ArModel model;
    model.order = order;
    for (int lag = 1; lag <= order; ++lag)
        model.coeff.push_back(theta.block((lag - 1) * k, 0, k, k).transpose());
    model.bias = theta.row(p).transpose();
    model.fit_residual = std::sqrt((design * theta - target).squaredNorm() / (rows * k));
    return model;
}

LatentSeries predict(const ArModel& model, const LatentSeries& series, int horizon) {
    const int k = static_cast<int>(series.coords.rows());
    const int n = static_cast<int>(series.coords.cols());
    if (n < model.order) throw std::invalid_argument("predict: series shorter than model order");
    const double dt = n >= 2 ? series.times[1] - series.times[0] : 1.0;

    LatentSeries out;
    out.coords.resize(k, horizon);
    out.times.resize(horizon);
    std::vector<Vector> hist;
    for (int i = 0; i < model.order; ++i) hist.push_back(series.coords.col(n - 1 - i));
    for (int h = 0; h < horizon; ++h) {
        Vector z = model.bias;
        for (int lag = 1; lag <= model.order; ++lag) z += model.coeff[lag - 1] * hist[lag - 1];
        out.coords.col(h) = z;
        out.times[h] = series.times[n - 1] + (h + 1) * dt;
        for (int i = model.order - 1; i > 0; --i) hist[i] = hist[i - 1];
        hist[0] = z;
    }
    return out;
}

Matrix reconstruct_prediction(const MovingGrid& g_ext, const Matrix& left_factor,
                              const LatentSeries& pred, int first_step, const InterpConfig& cfg) {
    const int horizon = static_cast<int>(pred.coords.cols());
    if (first_step < 0 || first_step + horizon > g_ext.num_steps)
        throw std::invalid_argument("reconstruct_prediction: steps outside the extended grid");
    Matrix out(g_ext.reference.num_nodes(), horizon);
    for (int h = 0; h < horizon; ++h) {
        const Vector moving_vals = left_factor * pred.coords.col(h);
        out.col(h) = map_inverse_at(moving_vals, g_ext, first_step + h, cfg);
    }
    return out;
}

}  // namespace rgr
