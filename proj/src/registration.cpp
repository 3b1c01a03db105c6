#include "rgr/registration.hpp"

#include <cmath>
#include <deque>
#include <limits>
#include <mutex>

#include "rgr/parallel.hpp"

namespace rgr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Control-lattice rows kept free when the boundary is pinned.
std::vector<int> free_basis_rows(const MovingGrid& g, bool pinned) {
    std::vector<int> rows;
    const int nc = g.num_control_nodes();
    if (!pinned) {
        rows.resize(nc);
        for (int i = 0; i < nc; ++i) rows[i] = i;
        return rows;
    }
    if (g.reference.dim == 1) {
        for (int i = 1; i + 1 < nc; ++i) rows.push_back(i);
        return rows;
    }
    const int ncx = g.control_axis_size(0);
    const int ncy = g.control_axis_size(1);
    for (int j = 1; j + 1 < ncy; ++j)
        for (int i = 1; i + 1 < ncx; ++i) rows.push_back(i + ncx * j);
    return rows;
}

bool feasible(double min_volume, double v_min) {
    return (v_min == 0.0) ? (min_volume > 0.0) : (min_volume >= v_min);
}

double norm_term(double sq_sum, bool squared) { return squared ? sq_sum : std::sqrt(sq_sum); }

}  // namespace

MovingGrid initialize_grid(const RegistrationProblem& p) {
    const int K = static_cast<int>(p.snapshots.cols());
    return init_from_reference(p.reference, p.grid_rank, K, p.perturb_scale, p.seed,
                               p.control_counts, p.control_steps, 3, p.boundary_pinned);
}

Vector pack_parameters(const RegistrationProblem& p, const MovingGrid& g) {
    const auto rows = free_basis_rows(g, p.boundary_pinned);
    const int r = g.rank, kc = g.num_control_steps(), dim = g.reference.dim;
    Vector x(dim * (static_cast<int>(rows.size()) * r + r * kc));
    Eigen::Index t = 0;
    for (int c = 0; c < dim; ++c) {
        for (int j = 0; j < r; ++j)
            for (int i : rows) x[t++] = g.basis[c](i, j);
        for (int j = 0; j < kc; ++j)
            for (int i = 0; i < r; ++i) x[t++] = g.coeffs[c](i, j);
    }
    return x;
}

void unpack_parameters(const RegistrationProblem& p, const Vector& x, MovingGrid& g) {
    const auto rows = free_basis_rows(g, p.boundary_pinned);
    const int r = g.rank, kc = g.num_control_steps(), dim = g.reference.dim;
    if (x.size() != dim * (static_cast<Eigen::Index>(rows.size()) * r + r * kc))
        throw std::invalid_argument("unpack_parameters: size mismatch");
    Eigen::Index t = 0;
    for (int c = 0; c < dim; ++c) {
        for (int j = 0; j < r; ++j)
            for (int i : rows) g.basis[c](i, j) = x[t++];
        for (int j = 0; j < kc; ++j)
            for (int i = 0; i < r; ++i) g.coeffs[c](i, j) = x[t++];
    }
}

ObjectiveParts evaluate_objective(const RegistrationProblem& p, const MovingGrid& g,
                                  double penalty_rho, InverseMapWorkspace* ws) {
    if (p.snapshots.rows() != g.reference.num_nodes() ||
        p.snapshots.cols() != g.num_steps)
        throw std::invalid_argument("evaluate_objective: snapshot shape does not match grid");

    ObjectiveParts parts;
    parts.min_volume = kInf;
    double deficit_sq = 0.0;
    for (int n = 0; n < g.num_steps; ++n) {
        const Vector v = cell_volumes(g.assemble(n), g.reference);
        parts.min_volume = std::min(parts.min_volume, v.minCoeff());
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            const double d = p.v_min - v[i];
            if (d > 0.0) deficit_sq += d * d;
        }
    }
    parts.penalty = penalty_rho * deficit_sq;

    const Matrix mapped = map_forward(p.snapshots, g, p.interp);
    const LowRankFactors f = truncated_svd(mapped, p.latent_rank);
    const Matrix back = map_inverse(reconstruct(f), g, p.interp, ws);
    parts.data = norm_term((p.snapshots - back).squaredNorm(), p.squared_norms);

    double reg1_sq = 0.0, reg2_sq = 0.0;
    if (p.gamma1 > 0.0) {
        if (g.reference.dim == 1) {
            const Matrix d1 = second_difference(g.num_control_nodes(), p.gamma1);
            for (int c = 0; c < g.reference.dim; ++c) reg1_sq += (d1 * g.basis[c]).squaredNorm();
        } else {
            const int ncx = g.control_axis_size(0);
            const int ncy = g.control_axis_size(1);
            const Matrix dx = second_difference(ncx, p.gamma1);
            const Matrix dy = second_difference(ncy, p.gamma1);
            for (int c = 0; c < g.reference.dim; ++c)
                for (int j = 0; j < g.rank; ++j) {
                    const Eigen::Map<const Matrix> col(g.basis[c].col(j).data(), ncx, ncy);
                    reg1_sq += (dx * col).squaredNorm() + (col * dy.transpose()).squaredNorm();
                }
        }
    }
    if (p.gamma2 > 0.0) {
        const Matrix d2 = second_difference(g.num_control_steps(), p.gamma2);
        for (int c = 0; c < g.reference.dim; ++c)
            reg2_sq += (g.coeffs[c] * d2.transpose()).squaredNorm();
    }
    parts.reg1 = norm_term(reg1_sq, p.squared_norms);
    parts.reg2 = norm_term(reg2_sq, p.squared_norms);
    parts.total = parts.data + parts.reg1 + parts.reg2 + parts.penalty;
    return parts;
}

namespace {

// FD gradient over a subset of the packed parameters; entries outside the
// subset stay zero.
Vector gradient_fd_subset(const RegistrationProblem& p, const MovingGrid& g, double h,
                          double penalty_rho, bool central, const std::vector<int>& idx) {
    if (!(h > 0.0)) throw std::invalid_argument("gradient_fd: h must be positive");
    const Vector x0 = pack_parameters(p, g);
    Vector grad = Vector::Zero(x0.size());

    InverseMapWorkspace ws_base;
    double f0 = 0.0;
    const ObjectiveParts base = evaluate_objective(p, g, penalty_rho, &ws_base);
    if (!central) f0 = base.total;

    std::string failure;
    std::mutex failure_mutex;
    parallel_for(static_cast<int>(idx.size()), p.threads, [&](int lo, int hi) {
        MovingGrid probe = g;
        InverseMapWorkspace ws = ws_base;  // warm cell seeds per worker
        Vector x = x0;
        for (int t = lo; t < hi; ++t) {
            const int i = idx[t];
            const double xi = x[i];
            try {
                x[i] = xi + h;
                unpack_parameters(p, x, probe);
                const double fp = evaluate_objective(p, probe, penalty_rho, &ws).total;
                if (central) {
                    x[i] = xi - h;
                    unpack_parameters(p, x, probe);
                    const double fm = evaluate_objective(p, probe, penalty_rho, &ws).total;
                    grad[i] = (fp - fm) / (2.0 * h);
                } else {
                    grad[i] = (fp - f0) / h;
                }
            } catch (const NumericalError& e) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (failure.empty())
                    failure = "gradient_fd: objective failed at parameter " + std::to_string(i) +
                              ": " + e.what();
                return;
            }
            x[i] = xi;
        }
    });
    if (!failure.empty()) throw NumericalError(failure);
    return grad;
}

}  // namespace

Vector gradient_fd(const RegistrationProblem& p, const MovingGrid& g, double h,
                   double penalty_rho, bool central) {
    std::vector<int> all(pack_parameters(p, g).size());
    for (size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
    return gradient_fd_subset(p, g, h, penalty_rho, central, all);
}

RegistrationResult train(const RegistrationProblem& p) {
    if (p.latent_rank < 1 ||
        p.latent_rank > std::min(p.snapshots.rows(), p.snapshots.cols()))
        throw std::invalid_argument("train: latent rank out of range");

    MovingGrid g = initialize_grid(p);
    Vector x = pack_parameters(p, g);
    InverseMapWorkspace ws;

    // Penalty scale: a deficit of one reference cell should dominate the
    // initial objective.
    const Vector ref_vols = cell_volumes(g.reference.coords(), g.reference);
    const double vref = ref_vols.minCoeff();
    double rho = 0.0;
    int escalations = 0;

    ObjectiveParts cur = evaluate_objective(p, g, rho, &ws);
    rho = 100.0 * std::max(cur.total, 1e-8) / (vref * vref);
    cur = evaluate_objective(p, g, rho, &ws);

    double domain = 0.0;
    for (int a = 0; a < p.reference.dim; ++a) domain = std::max(domain, p.reference.domain_length(a));
    const double h = 1e-6 * domain;

    RegistrationResult res;
    res.trace.push_back(cur);

    bool have_best = false;
    Vector best_x = x;
    double best_total = kInf;
    auto consider = [&](const Vector& xi, const ObjectiveParts& parts) {
        if (feasible(parts.min_volume, p.v_min) && parts.total < best_total) {
            best_total = parts.total;
            best_x = xi;
            have_best = true;
        }
    };
    consider(x, cur);

    struct Pair {
        Vector s, y;
        double rho_inv;
    };
    std::deque<Pair> mem;
    const size_t mem_max = 8;
    Vector grad;
    bool have_grad = false;
    int stall = 0;

    // Parameter-index sets. The first phase moves only the coefficient
    // matrices: the basis stays at its smooth initialization, so the
    // curvature penalties sit at their minimum and do not fight the data
    // term while the bulk transport is being found.
    std::vector<int> coeff_idx, all_idx;
    {
        const auto rows = free_basis_rows(g, p.boundary_pinned);
        const int r = g.rank, kc = g.num_control_steps(), nb = static_cast<int>(rows.size());
        int t = 0;
        for (int c = 0; c < p.reference.dim; ++c) {
            for (int i = 0; i < nb * r; ++i) all_idx.push_back(t++);
            for (int i = 0; i < r * kc; ++i) {
                coeff_idx.push_back(t);
                all_idx.push_back(t++);
            }
        }
    }
    bool coeff_phase = coeff_idx.size() < all_idx.size();
    const std::vector<int>* active = coeff_phase ? &coeff_idx : &all_idx;

    // Fallback direction for the conical kinks of the unsquared regularizers:
    // the negative gradient projected onto the operators' nullspace (affine in
    // the step index; bilinear in the control lattice), along which the
    // penalties stay at zero to first order.
    const auto basis_rows = free_basis_rows(g, p.boundary_pinned);
    auto project_nullspace = [&](const Vector& gvec) -> Vector {
        Vector d = -gvec;
        const int r = g.rank, kc = g.num_control_steps(), dim = p.reference.dim;
        const int nb = static_cast<int>(basis_rows.size());
        const int blk = nb * r + r * kc;
        auto fit = [](const Matrix& B, Eigen::Ref<Vector> seg) {
            seg = B * (B.transpose() * B).ldlt().solve(B.transpose() * seg);
        };
        Matrix bnull;  // affine (1D) or bilinear (2D) modes over the lattice
        if (p.gamma1 > 0.0) {
            const int ncx = g.control_axis_size(0);
            bnull.resize(nb, dim == 1 ? 2 : 4);
            for (int t = 0; t < nb; ++t) {
                const int i = dim == 1 ? basis_rows[t] : basis_rows[t] % ncx;
                const int j = dim == 1 ? 0 : basis_rows[t] / ncx;
                bnull(t, 0) = 1.0;
                bnull(t, 1) = i;
                if (dim == 2) {
                    bnull(t, 2) = j;
                    bnull(t, 3) = static_cast<double>(i) * j;
                }
            }
        }
        Matrix cnull(kc, 2);  // affine in the step position
        cnull.col(0).setOnes();
        cnull.col(1) = g.control_steps;
        for (int c = 0; c < dim; ++c) {
            if (p.gamma1 > 0.0 && !coeff_phase)
                for (int j = 0; j < r; ++j) fit(bnull, d.segment(c * blk + j * nb, nb));
            if (p.gamma2 > 0.0) {
                for (int i = 0; i < r; ++i) {
                    Vector row(kc);
                    for (int j = 0; j < kc; ++j) row[j] = d[c * blk + nb * r + j * r + i];
                    Vector out = cnull * (cnull.transpose() * cnull).ldlt().solve(
                                     cnull.transpose() * row);
                    for (int j = 0; j < kc; ++j) d[c * blk + nb * r + j * r + i] = out[j];
                }
            }
        }
        if (coeff_phase)
            for (int c = 0; c < dim; ++c) d.segment(c * blk, nb * r).setZero();
        return d;
    };

    MovingGrid trial = g;
    auto eval_at = [&](const Vector& xi) -> ObjectiveParts {
        unpack_parameters(p, xi, trial);
        return evaluate_objective(p, trial, rho, &ws);
    };

    int it = 0;
    while (it < p.max_iters) {
        if (!have_grad) {
            try {
                unpack_parameters(p, x, g);
                grad = gradient_fd_subset(p, g, h, rho, true, *active);
            } catch (const NumericalError&) {
                break;
            }
            have_grad = true;
        }

        // Two-loop L-BFGS direction.
        Vector d = -grad;
        if (!mem.empty()) {
            std::vector<double> alpha(mem.size());
            for (size_t i = mem.size(); i-- > 0;) {
                alpha[i] = mem[i].rho_inv * mem[i].s.dot(d);
                d -= alpha[i] * mem[i].y;
            }
            const auto& last = mem.back();
            d *= last.s.dot(last.y) / last.y.squaredNorm();
            for (size_t i = 0; i < mem.size(); ++i) {
                const double beta = mem[i].rho_inv * mem[i].y.dot(d);
                d += (alpha[i] - beta) * mem[i].s;
            }
        }
        double gd = grad.dot(d);
        if (!(gd < 0.0)) {
            mem.clear();
            d = -grad;
            gd = grad.dot(d);
            if (!(gd < 0.0)) {
                if (coeff_phase) {
                    coeff_phase = false;
                    active = &all_idx;
                    have_grad = false;
                    stall = 0;
                    continue;
                }
                break;  // stationary
            }
        }

        // Cap the very first step to a fraction of the domain scale.
        double alpha = 1.0;
        if (mem.empty()) {
            const double dinf = d.cwiseAbs().maxCoeff();
            if (dinf > 0.0) alpha = std::min(1.0, 0.05 * std::max(domain, 1.0) / dinf);
        }

        auto line_search = [&](const Vector& dir, double slope, double a0, Vector& xout,
                               ObjectiveParts& fout) -> bool {
            double a = a0;
            for (int bt = 0; bt < 40; ++bt) {
                xout = x + a * dir;
                double val;
                try {
                    fout = eval_at(xout);
                    // Filter: never accept an iterate that violates the volume
                    // constraint, so the recorded trace stays monotone and the
                    // penalty term stays inactive along the accepted path.
                    val = feasible(fout.min_volume, p.v_min) ? fout.total : kInf;
                } catch (const NumericalError&) {
                    val = kInf;
                }
                if (val <= cur.total + 1e-4 * a * slope) return true;
                a *= 0.5;
            }
            return false;
        };

        Vector xn;
        ObjectiveParts fn;
        bool accepted = line_search(d, gd, alpha, xn, fn);
        // When the regular step fails, or only achieves a token decrease,
        // probe the direction projected onto the nullspace of both
        // regularizers: the unsquared penalty norms are conical at zero, so
        // any generic direction pays a first-order cost there, while descent
        // modes such as rigid rotation or uniform translation lie exactly
        // where the penalties stay zero.
        const bool token_step = accepted && cur.total - fn.total < 1e-4 * std::abs(cur.total);
        if ((!accepted || token_step) && (p.gamma1 > 0.0 || p.gamma2 > 0.0)) {
            const Vector d2 = project_nullspace(grad);
            const double gd2 = grad.dot(d2);
            if (gd2 < 0.0) {
                double a0 = 1.0;
                const double dinf = d2.cwiseAbs().maxCoeff();
                if (dinf > 0.0) a0 = std::min(1.0, 0.2 * std::max(domain, 1.0) / dinf);
                Vector xalt;
                ObjectiveParts falt;
                if (line_search(d2, gd2, a0, xalt, falt) && (!accepted || falt.total < fn.total)) {
                    xn = xalt;
                    fn = falt;
                    accepted = true;
                }
            }
        }
        ++it;
        if (!accepted) {
            if (!mem.empty()) {
                mem.clear();
                continue;
            }
            if (coeff_phase) {
                coeff_phase = false;
                active = &all_idx;
                mem.clear();
                have_grad = false;
                stall = 0;
                continue;
            }
            break;
        }

        Vector grad_n;
        try {
            unpack_parameters(p, xn, g);
            grad_n = gradient_fd_subset(p, g, h, rho, true, *active);
        } catch (const NumericalError&) {
            grad_n = grad;  // keep descending without a curvature update
        }
        Pair pr{xn - x, grad_n - grad, 0.0};
        const double sy = pr.s.dot(pr.y);
        if (sy > 1e-12 * pr.s.norm() * pr.y.norm()) {
            pr.rho_inv = 1.0 / sy;
            mem.push_back(std::move(pr));
            if (mem.size() > mem_max) mem.pop_front();
        }

        const double rel_dec = (cur.total - fn.total) / std::max(std::abs(cur.total), 1e-300);
        stall = (rel_dec < 1e-6) ? stall + 1 : 0;

        x = xn;
        grad = grad_n;
        have_grad = true;
        cur = fn;
        res.trace.push_back(cur);
        consider(x, cur);

        if (!feasible(cur.min_volume, p.v_min) && escalations < 5 &&
            (!have_best || cur.total < best_total)) {
            rho *= 10.0;
            ++escalations;
            mem.clear();
            have_grad = false;
            unpack_parameters(p, x, trial);
            cur = evaluate_objective(p, trial, rho, &ws);
        }

        if (stall >= 5) {
            if (coeff_phase) {
                coeff_phase = false;
                active = &all_idx;
                mem.clear();
                have_grad = false;
                stall = 0;
                continue;
            }
            res.converged = true;
            break;
        }
    }

    if (!have_best) throw InfeasibleError("train: no feasible iterate found");

    unpack_parameters(p, best_x, g);
    res.grid = g;
    res.iterations = it;
    res.volumes = validate_diffeomorphism(g, p.v_min);
    const Matrix mapped = map_forward(p.snapshots, g, p.interp);
    res.latent = truncated_svd(mapped, p.latent_rank);
    const Matrix back = map_inverse(reconstruct(res.latent), g, p.interp);
    res.data_error = (p.snapshots - back).norm();
    const double mn = p.snapshots.norm();
    res.data_error_rel = mn > 0.0 ? res.data_error / mn : res.data_error;
    return res;
}

}  // namespace rgr
