#include "rgr/datagen.hpp"

#include <cmath>

namespace rgr {

namespace {

struct Segment {
    double x0, y0, x1, y1;
};

double dist_to_segment(double px, double py, const Segment& s) {
    const double dx = s.x1 - s.x0, dy = s.y1 - s.y0;
    const double len2 = dx * dx + dy * dy;
    double t = len2 > 0 ? ((px - s.x0) * dx + (py - s.y0) * dy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const double qx = s.x0 + t * dx, qy = s.y0 + t * dy;
    return std::hypot(px - qx, py - qy);
}

std::vector<Segment> glyph_segments(const std::string& glyph) {
    if (glyph == "A") {
        // Apex, two legs and a crossbar in [-1,1]^2 coordinates.
        const double ax = 0.0, ay = 0.8, blx = -0.55, brx = 0.55, by = -0.8;
        const double t = (ay - (-0.25)) / (ay - by);  // crossbar height -0.25
        const double clx = ax + t * (blx - ax), crx = ax + t * (brx - ax);
        return {{ax, ay, blx, by}, {ax, ay, brx, by}, {clx, -0.25, crx, -0.25}};
    }
    if (glyph == "cross")
        return {{-0.7, 0.0, 0.7, 0.0}, {0.0, -0.7, 0.0, 0.7}};
    throw std::invalid_argument("unknown glyph: " + glyph);
}

// Anti-aliased stroke rendering: intensity ramps over one pixel around the
// stroke boundary.
Matrix rasterize(int size, const std::vector<Segment>& segs) {
    const double halfw = 0.09;
    const double aa = 2.0 / size;
    Matrix img(size, size);  // (ix, iy)
    for (int j = 0; j < size; ++j)
        for (int i = 0; i < size; ++i) {
            const double px = -1.0 + 2.0 * i / (size - 1);
            const double py = -1.0 + 2.0 * j / (size - 1);
            double val = 0.0;
            for (const auto& s : segs)
                val = std::max(val, std::clamp(0.5 + (halfw - dist_to_segment(px, py, s)) / aa, 0.0, 1.0));
            img(i, j) = val;
        }
    return img;
}

double bilinear_pixel(const Matrix& img, double x, double y) {
    const int n = static_cast<int>(img.rows());
    if (x < 0.0 || x > n - 1.0 || y < 0.0 || y > n - 1.0) return 0.0;
    const int i = std::min(static_cast<int>(x), n - 2);
    const int j = std::min(static_cast<int>(y), n - 2);
    const double u = x - i, v = y - j;
    return (1 - u) * (1 - v) * img(i, j) + u * (1 - v) * img(i + 1, j) +
           (1 - u) * v * img(i, j + 1) + u * v * img(i + 1, j + 1);
}

void thomas_solve(Vector& lower, Vector& diag, Vector& upper, Vector& rhs) {
    const Eigen::Index n = diag.size();
    for (Eigen::Index i = 1; i < n; ++i) {
        const double m = lower[i] / diag[i - 1];
        diag[i] -= m * upper[i - 1];
        rhs[i] -= m * rhs[i - 1];
    }
    rhs[n - 1] /= diag[n - 1];
    for (Eigen::Index i = n - 2; i >= 0; --i) rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
}

Vector gaussian_ic(const Vector& x, const PdeRunConfig& cfg) {
    Vector w(x.size());
    if (cfg.ic_shape == "sine") {
        const double L = cfg.x_max - cfg.x_min;
        for (Eigen::Index i = 0; i < x.size(); ++i)
            w[i] = cfg.ic_offset +
                   cfg.ic_amplitude * std::sin(M_PI * cfg.ic_mode * (x[i] - cfg.x_min) / L);
        return w;
    }
    if (cfg.ic_shape != "gaussian")
        throw std::invalid_argument("PDE config: unknown initial-condition shape " + cfg.ic_shape);
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double z = (x[i] - cfg.ic_center) / cfg.ic_width;
        w[i] = cfg.ic_offset + cfg.ic_amplitude * std::exp(-z * z);
    }
    return w;
}

int spatial_nodes(const PdeRunConfig& cfg) {
    if (!(cfg.dx > 0) || !(cfg.dt > 0) || !(cfg.final_time > 0))
        throw std::invalid_argument("PDE config: dx, dt, T must be positive");
    const double span = (cfg.x_max - cfg.x_min) / cfg.dx;
    const int n = static_cast<int>(std::lround(span));
    if (std::abs(span - n) > 1e-8)
        throw std::invalid_argument("PDE config: dx must divide the domain exactly");
    return n + 1;
}

}  // namespace

Dataset rotated_glyph(int size, double total_degrees, double increment, const std::string& glyph) {
    if (size < 8) throw std::invalid_argument("rotated_glyph: size must be >= 8");
    int steps = 0;
    if (total_degrees != 0.0) {
        if (!(increment > 0)) throw std::invalid_argument("rotated_glyph: increment must be positive");
        const double q = total_degrees / increment;
        steps = static_cast<int>(std::lround(q));
        if (std::abs(q - steps) > 1e-9)
            throw std::invalid_argument("rotated_glyph: increment must divide total degrees");
    }
    const Matrix base = rasterize(size, glyph_segments(glyph));
    const double cx = 0.5 * (size - 1);

    Dataset ds;
    // Axes centered on the rotation axis so a rank-2 basis (x and y modes per
    // component) can represent rotations about the image center exactly.
    ds.reference = ReferenceGrid::uniform_2d(-1.0, 1.0, size, -1.0, 1.0, size);
    ds.snapshots.resize(static_cast<Eigen::Index>(size) * size, steps + 1);
    ds.times.resize(steps + 1);
    for (int k = 0; k <= steps; ++k) {
        const double theta = k * increment * M_PI / 180.0;
        ds.times[k] = k * increment;
        const double c = std::cos(theta), s = std::sin(theta);
        for (int j = 0; j < size; ++j)
            for (int i = 0; i < size; ++i) {
                // Backward-rotate the pixel center and resample the base image.
                const double rx = c * (i - cx) + s * (j - cx) + cx;
                const double ry = -s * (i - cx) + c * (j - cx) + cx;
                ds.snapshots(i + static_cast<Eigen::Index>(size) * j, k) = bilinear_pixel(base, rx, ry);
            }
    }
    return ds;
}

Dataset burgers_solve(const PdeRunConfig& cfg) {
    if (!(cfg.reynolds > 0)) throw std::invalid_argument("burgers_solve: Re must be positive");
    const int n = spatial_nodes(cfg);
    const Vector x = Vector::LinSpaced(n, cfg.x_min, cfg.x_max);
    const double nu = 1.0 / cfg.reynolds, dx = cfg.dx, dt = cfg.dt;
    const int steps = static_cast<int>(std::lround(cfg.final_time / dt));
    const int stride = std::max(1, cfg.snapshot_stride);

    Vector w = gaussian_ic(x, cfg);
    w[0] = 0.0;
    w[n - 1] = 0.0;

    const int ni = n - 2;
    auto rhs_f = [&](const Vector& u, Vector& f) {
        // f over interior nodes; u is the full state with boundary values
        for (int i = 1; i + 1 < n; ++i)
            f[i - 1] = -u[i] * (u[i + 1] - u[i - 1]) / (2 * dx) +
                       nu * (u[i + 1] - 2 * u[i] + u[i - 1]) / (dx * dx);
    };

    std::vector<Vector> kept;
    kept.push_back(w);
    Vector fn(ni), fu(ni), r(ni);
    for (int s = 1; s <= steps; ++s) {
        rhs_f(w, fn);
        Vector u = w;  // Newton iterate, boundaries stay zero
        bool done = false;
        for (int nit = 0; nit < 20; ++nit) {
            rhs_f(u, fu);
            for (int i = 0; i < ni; ++i) r[i] = u[i + 1] - w[i + 1] - 0.5 * dt * (fu[i] + fn[i]);
            if (r.cwiseAbs().maxCoeff() < 1e-10) {
                done = true;
                break;
            }
            Vector lo(ni), di(ni), up(ni);
            for (int i = 0; i < ni; ++i) {
                const int g = i + 1;  // full-state index
                const double jm = u[g] / (2 * dx) + nu / (dx * dx);
                const double jc = -(u[g + 1] - u[g - 1]) / (2 * dx) - 2 * nu / (dx * dx);
                const double jp = -u[g] / (2 * dx) + nu / (dx * dx);
                lo[i] = -0.5 * dt * jm;
                di[i] = 1.0 - 0.5 * dt * jc;
                up[i] = -0.5 * dt * jp;
            }
            Vector rr = r;
            thomas_solve(lo, di, up, rr);
            for (int i = 0; i < ni; ++i) u[i + 1] -= rr[i];
        }
        if (!done) throw NumericalError("burgers_solve: Newton divergence at step " + std::to_string(s));
        w = u;
        if (s % stride == 0) kept.push_back(w);
    }

    Dataset ds;
    ds.reference = ReferenceGrid::from_axes({x});
    ds.snapshots.resize(n, static_cast<Eigen::Index>(kept.size()));
    ds.times.resize(kept.size());
    for (size_t k = 0; k < kept.size(); ++k) {
        ds.snapshots.col(k) = kept[k];
        ds.times[k] = static_cast<double>(k) * stride * dt;
    }
    return ds;
}

Dataset wave_solve(const PdeRunConfig& cfg) {
    const int n = spatial_nodes(cfg);
    const Vector x = Vector::LinSpaced(n, cfg.x_min, cfg.x_max);
    const double dx = cfg.dx, dt = cfg.dt;
    const int steps = static_cast<int>(std::lround(cfg.final_time / dt));
    const int stride = std::max(1, cfg.snapshot_stride);
    const int ni = n - 2;

    Vector u = gaussian_ic(x, cfg);
    u[0] = 0.0;
    u[n - 1] = 0.0;
    Vector v = Vector::Zero(n);

    auto laplacian = [&](const Vector& f, Vector& out) {
        for (int i = 1; i + 1 < n; ++i) out[i - 1] = (f[i + 1] - 2 * f[i] + f[i - 1]) / (dx * dx);
    };
    Vector a(ni);
    laplacian(u, a);

    // Newmark average acceleration: (I - beta dt^2 L) a1 = L(u + dt v + dt^2 (0.5-beta) a)
    const double beta = 0.25, gamma = 0.5;

    std::vector<Vector> kept;
    kept.push_back(u);
    Vector upred(n), rhs(ni), a1(ni);
    for (int s = 1; s <= steps; ++s) {
        upred = u;
        for (int i = 0; i < ni; ++i)
            upred[i + 1] = u[i + 1] + dt * v[i + 1] + dt * dt * (0.5 - beta) * a[i];
        laplacian(upred, rhs);
        Vector lo = Vector::Constant(ni, -beta * dt * dt / (dx * dx));
        Vector up = lo;
        Vector di = Vector::Constant(ni, 1.0 + 2.0 * beta * dt * dt / (dx * dx));
        a1 = rhs;
        thomas_solve(lo, di, up, a1);
        for (int i = 0; i < ni; ++i) {
            u[i + 1] = upred[i + 1] + beta * dt * dt * a1[i];
            v[i + 1] += dt * ((1.0 - gamma) * a[i] + gamma * a1[i]);
        }
        a = a1;
        if (s % stride == 0) kept.push_back(u);
    }

    Dataset ds;
    ds.reference = ReferenceGrid::from_axes({x});
    ds.snapshots.resize(n, static_cast<Eigen::Index>(kept.size()));
    ds.times.resize(kept.size());
    for (size_t k = 0; k < kept.size(); ++k) {
        ds.snapshots.col(k) = kept[k];
        ds.times[k] = static_cast<double>(k) * stride * dt;
    }
    return ds;
}

AdvectionOracle advecting_gaussian(double speed, const PdeRunConfig& cfg, int num_steps) {
    if (num_steps < 2) throw std::invalid_argument("advecting_gaussian: need at least 2 steps");
    const int n = spatial_nodes(cfg);
    const Vector x = Vector::LinSpaced(n, cfg.x_min, cfg.x_max);
    const Vector t = Vector::LinSpaced(num_steps, 0.0, cfg.final_time);

    for (int k = 0; k < num_steps; ++k) {
        const double c = cfg.ic_center + speed * t[k];
        const double tol = 1e-12 * (cfg.x_max - cfg.x_min);
        if (c - 3.0 * cfg.ic_width < cfg.x_min - tol || c + 3.0 * cfg.ic_width > cfg.x_max + tol)
            throw std::invalid_argument("advecting_gaussian: profile leaves the domain");
    }

    AdvectionOracle oracle;
    oracle.data.reference = ReferenceGrid::from_axes({x});
    oracle.data.times = t;
    oracle.data.snapshots.resize(n, num_steps);
    for (int k = 0; k < num_steps; ++k)
        for (int i = 0; i < n; ++i) {
            const double z = (x[i] - cfg.ic_center - speed * t[k]) / cfg.ic_width;
            oracle.data.snapshots(i, k) = cfg.ic_offset + cfg.ic_amplitude * std::exp(-z * z);
        }

    MovingGrid g;
    g.reference = oracle.data.reference;
    g.rank = 2;
    g.num_steps = num_steps;
    g.upsample_degree = 3;
    g.boundary_pinned = false;
    g.control_axis.push_back(x);
    g.control_steps = Vector::LinSpaced(num_steps, 0.0, num_steps - 1.0);
    Matrix u(n, 2);
    u.col(0) = x;
    u.col(1).setOnes();
    Matrix vx(2, num_steps);
    vx.row(0).setOnes();
    for (int k = 0; k < num_steps; ++k) vx(1, k) = speed * t[k];
    g.basis.push_back(u);
    g.coeffs.push_back(vx);
    g.rebuild_upsample();
    oracle.true_grid = g;
    return oracle;
}

}  // namespace rgr
