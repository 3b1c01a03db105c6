#include "rgr/mapping.hpp"

#include <cmath>
#include <limits>

namespace rgr {

namespace {

void check_cfg(const InterpConfig& cfg) {
    if (cfg.degree != 1 && cfg.degree != 3)
        throw std::invalid_argument("interpolation degree must be 1 or 3");
}

using CMRef = Eigen::Ref<const Matrix>;

double tensor_sample(const CMRef& vals, const ReferenceGrid& ref, double x, double y, int degree) {
    const InterpStencil sx = interp_stencil(ref.axis[0], x, degree);
    const InterpStencil sy = interp_stencil(ref.axis[1], y, degree);
    double v = 0.0;
    for (int b = 0; b < sy.count; ++b)
        for (int a = 0; a < sx.count; ++a)
            v += sx.w[a] * sy.w[b] * vals(sx.first + a, sy.first + b);
    return v;
}

struct BilinearCell {
    double ax, ay, bx, by, cx, cy, dx, dy;  // F(u,v) = A + B u + C v + D u v

    BilinearCell(const CMRef& X, const CMRef& Y, int i, int j) {
        const double x00 = X(i, j), x10 = X(i + 1, j), x01 = X(i, j + 1), x11 = X(i + 1, j + 1);
        const double y00 = Y(i, j), y10 = Y(i + 1, j), y01 = Y(i, j + 1), y11 = Y(i + 1, j + 1);
        ax = x00;
        ay = y00;
        bx = x10 - x00;
        by = y10 - y00;
        cx = x01 - x00;
        cy = y01 - y00;
        dx = x11 - x10 - x01 + x00;
        dy = y11 - y10 - y01 + y00;
    }

    // Newton inversion of the bilinear map; returns false on non-convergence.
    bool invert(double px, double py, double& u, double& v) const {
        u = 0.5;
        v = 0.5;
        const double scale = std::max({std::abs(bx), std::abs(by), std::abs(cx), std::abs(cy), 1e-300});
        for (int it = 0; it < 25; ++it) {
            const double rx = ax + bx * u + cx * v + dx * u * v - px;
            const double ry = ay + by * u + cy * v + dy * u * v - py;
            if (std::abs(rx) + std::abs(ry) < 1e-12 * scale) return true;
            const double j11 = bx + dx * v, j12 = cx + dx * u;
            const double j21 = by + dy * v, j22 = cy + dy * u;
            const double det = j11 * j22 - j12 * j21;
            if (std::abs(det) < 1e-300) return false;
            u -= (rx * j22 - ry * j12) / det;
            v -= (ry * j11 - rx * j21) / det;
            if (!std::isfinite(u) || !std::isfinite(v)) return false;
        }
        return false;
    }
};

enum class LocateStatus { found, hull, unknown };

// Locate the deformed cell containing (px,py) by walking from a seed cell,
// with a brute-force fallback. A point that escapes through the hull of the
// deformed grid reports the hull cell it exited with the out-of-range local
// coordinates so the caller can clamp there.
LocateStatus locate_cell(const CMRef& X, const CMRef& Y, double px, double py, int seed,
                         int& cell_id, double& u, double& v) {
    const int ncx = static_cast<int>(X.rows()) - 1, ncy = static_cast<int>(X.cols()) - 1;
    int ci = seed % ncx, cj = seed / ncx;
    const double eps = 1e-10;
    bool scan_needed = true;
    for (int walk = 0; walk < 2 * (ncx + ncy); ++walk) {
        const BilinearCell cell(X, Y, ci, cj);
        if (!cell.invert(px, py, u, v)) break;  // fall through to scan
        const int si = (u < -eps) ? -1 : (u > 1.0 + eps ? 1 : 0);
        const int sj = (v < -eps) ? -1 : (v > 1.0 + eps ? 1 : 0);
        if (si == 0 && sj == 0) {
            cell_id = ci + ncx * cj;
            return LocateStatus::found;
        }
        const int ni = std::clamp(ci + si, 0, ncx - 1);
        const int nj = std::clamp(cj + sj, 0, ncy - 1);
        if (ni == ci && nj == cj) {  // pushed against the hull
            cell_id = ci + ncx * cj;
            // Trust the hull exit only for small overshoots; a large one can
            // mean a concave region where another cell still holds the point.
            scan_needed = !(u > -1.0 && u < 2.0 && v > -1.0 && v < 2.0);
            break;
        }
        ci = ni;
        cj = nj;
    }
    // Brute-force scan with a bounding-box prefilter; needed only when the
    // walk died on a Newton failure (grid locally tangled or far seed).
    if (scan_needed) {
        for (int j = 0; j < ncy; ++j)
            for (int i = 0; i < ncx; ++i) {
                const double xlo = std::min({X(i, j), X(i + 1, j), X(i, j + 1), X(i + 1, j + 1)});
                const double xhi = std::max({X(i, j), X(i + 1, j), X(i, j + 1), X(i + 1, j + 1)});
                const double ylo = std::min({Y(i, j), Y(i + 1, j), Y(i, j + 1), Y(i + 1, j + 1)});
                const double yhi = std::max({Y(i, j), Y(i + 1, j), Y(i, j + 1), Y(i + 1, j + 1)});
                if (px < xlo - eps || px > xhi + eps || py < ylo - eps || py > yhi + eps) continue;
                const BilinearCell cell(X, Y, i, j);
                if (!cell.invert(px, py, u, v)) continue;
                if (u >= -eps && u <= 1.0 + eps && v >= -eps && v <= 1.0 + eps) {
                    cell_id = i + ncx * j;
                    return LocateStatus::found;
                }
            }
        return LocateStatus::unknown;
    }
    return LocateStatus::hull;
}

}  // namespace

Matrix map_forward(const Matrix& m, const MovingGrid& g, const InterpConfig& cfg) {
    check_cfg(cfg);
    const Eigen::Index nn = g.reference.num_nodes();
    if (m.rows() != nn || m.cols() != g.num_steps)
        throw std::invalid_argument("map_forward: snapshot shape does not match grid");
    Matrix out(nn, m.cols());
    if (g.reference.dim == 1) {
        for (int n = 0; n < g.num_steps; ++n) {
            const Matrix coords = g.assemble(n);
            const Vector col = m.col(n);
            for (Eigen::Index i = 0; i < nn; ++i)
                out(i, n) = interp1(g.reference.axis[0], col, coords(i, 0), cfg.degree);
        }
    } else {
        const int nx = g.reference.axis_size(0), ny = g.reference.axis_size(1);
        for (int n = 0; n < g.num_steps; ++n) {
            const Matrix coords = g.assemble(n);
            const Eigen::Map<const Matrix> vals(m.col(n).data(), nx, ny);
            for (Eigen::Index i = 0; i < nn; ++i)
                out(i, n) = tensor_sample(vals, g.reference, coords(i, 0), coords(i, 1), cfg.degree);
        }
    }
    return out;
}

Vector map_inverse_at(const Vector& values, const MovingGrid& g, int step, const InterpConfig& cfg,
                      std::vector<int>* cell_seed, int* clamped_count) {
    check_cfg(cfg);
    const Eigen::Index nn = g.reference.num_nodes();
    if (values.size() != nn) throw std::invalid_argument("map_inverse: value count mismatch");
    const Matrix coords = g.assemble(step);
    Vector out(nn);
    int clamped = 0;

    if (g.reference.dim == 1) {
        const Vector xs = coords.col(0);
        for (Eigen::Index i = 1; i < nn; ++i)
            if (!(xs[i] > xs[i - 1]))
                throw NumericalError("map_inverse: moving grid not monotone at step " +
                                     std::to_string(step));
        for (Eigen::Index i = 0; i < nn; ++i) {
            const double xq = g.reference.axis[0][i];
            if (xq < xs[0] || xq > xs[nn - 1]) ++clamped;
            out[i] = interp1(xs, values, xq, cfg.degree);
        }
        if (clamped_count) *clamped_count += clamped;
        return out;
    }

    const int nx = g.reference.axis_size(0), ny = g.reference.axis_size(1);
    const int ncx = nx - 1;
    const Eigen::Map<const Matrix> X(coords.col(0).data(), nx, ny);
    const Eigen::Map<const Matrix> Y(coords.col(1).data(), nx, ny);
    const Eigen::Map<const Matrix> vals(values.data(), nx, ny);
    const Vector index_x = Vector::LinSpaced(nx, 0.0, nx - 1.0);
    const Vector index_y = Vector::LinSpaced(ny, 0.0, ny - 1.0);
    int last_found = -1;
    for (Eigen::Index q = 0; q < nn; ++q) {
        const int qi = static_cast<int>(q % nx), qj = static_cast<int>(q / nx);
        const double px = g.reference.axis[0][qi], py = g.reference.axis[1][qj];
        int seed = -1;
        if (cell_seed) seed = (*cell_seed)[q];
        if (seed < 0) seed = last_found;
        if (seed < 0) seed = std::min(qi, nx - 2) + ncx * std::min(qj, ny - 2);
        double u = 0, v = 0;
        int cell = -1;
        const LocateStatus st = locate_cell(X, Y, px, py, seed, cell, u, v);
        if (st == LocateStatus::unknown) {
            // Outside the deformed grid with no usable hull cell: clamp to the
            // nearest moving node.
            ++clamped;
            Eigen::Index best = 0;
            double bd = std::numeric_limits<double>::infinity();
            for (Eigen::Index t = 0; t < nn; ++t) {
                const double d = (coords(t, 0) - px) * (coords(t, 0) - px) +
                                 (coords(t, 1) - py) * (coords(t, 1) - py);
                if (d < bd) {
                    bd = d;
                    best = t;
                }
            }
            out[q] = values[best];
            continue;
        }
        if (st == LocateStatus::hull) {
            // Just outside: clamp the local coordinates onto the hull cell.
            ++clamped;
            u = std::clamp(u, 0.0, 1.0);
            v = std::clamp(v, 0.0, 1.0);
        }
        last_found = cell;
        if (cell_seed) (*cell_seed)[q] = cell;
        const int ci = cell % ncx, cj = cell / ncx;
        if (cfg.degree == 1) {
            out[q] = (1 - u) * (1 - v) * vals(ci, cj) + u * (1 - v) * vals(ci + 1, cj) +
                     (1 - u) * v * vals(ci, cj + 1) + u * v * vals(ci + 1, cj + 1);
        } else {
            // Cubic in fractional index space of the moving node lattice.
            const InterpStencil sx = interp_stencil(index_x, ci + u, 3);
            const InterpStencil sy = interp_stencil(index_y, cj + v, 3);
            double acc = 0.0;
            for (int b = 0; b < sy.count; ++b)
                for (int a = 0; a < sx.count; ++a)
                    acc += sx.w[a] * sy.w[b] * vals(sx.first + a, sy.first + b);
            out[q] = acc;
        }
    }
    if (clamped_count) *clamped_count += clamped;
    return out;
}

Matrix map_inverse(const Matrix& latent, const MovingGrid& g, const InterpConfig& cfg,
                   InverseMapWorkspace* ws, int* clamped_count) {
    check_cfg(cfg);
    const Eigen::Index nn = g.reference.num_nodes();
    if (latent.rows() != nn || latent.cols() != g.num_steps)
        throw std::invalid_argument("map_inverse: latent shape does not match grid");
    if (ws && ws->cell_seed.empty())
        ws->cell_seed.assign(g.num_steps, std::vector<int>(nn, -1));
    Matrix out(nn, latent.cols());
    int clamped = 0;
    for (int n = 0; n < g.num_steps; ++n)
        out.col(n) = map_inverse_at(latent.col(n), g, n, cfg, ws ? &ws->cell_seed[n] : nullptr,
                                    &clamped);
    if (clamped_count) *clamped_count = clamped;
    return out;
}

Matrix second_difference(int n, double scale) {
    if (n < 3) throw std::invalid_argument("second_difference: need n >= 3");
    if (scale < 0) throw std::invalid_argument("second_difference: negative scale");
    Matrix d = Matrix::Zero(n, n);
    for (int i = 1; i + 1 < n; ++i) {
        d(i, i - 1) = scale;
        d(i, i) = -2.0 * scale;
        d(i, i + 1) = scale;
    }
    d(0, 0) = scale;
    d(0, 1) = -2.0 * scale;
    d(0, 2) = scale;
    d(n - 1, n - 3) = scale;
    d(n - 1, n - 2) = -2.0 * scale;
    d(n - 1, n - 1) = scale;
    return d;
}

}  // namespace rgr
