#include "rgr/grid.hpp"

#include <cmath>
#include <random>

#include "rgr/interp.hpp"

namespace rgr {

namespace {

void check_axis(const Vector& ax) {
    if (ax.size() < 2) throw std::invalid_argument("grid axis needs at least 2 nodes");
    for (Eigen::Index i = 1; i < ax.size(); ++i)
        if (!(ax[i] > ax[i - 1])) throw std::invalid_argument("grid axis must be strictly increasing");
}

}  // namespace

Eigen::Index ReferenceGrid::num_nodes() const {
    Eigen::Index n = 1;
    for (const auto& a : axis) n *= a.size();
    return n;
}

Matrix ReferenceGrid::coords() const {
    Matrix c(num_nodes(), dim);
    if (dim == 1) {
        c.col(0) = axis[0];
    } else {
        const int nx = axis_size(0), ny = axis_size(1);
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                c(i + static_cast<Eigen::Index>(nx) * j, 0) = axis[0][i];
                c(i + static_cast<Eigen::Index>(nx) * j, 1) = axis[1][j];
            }
    }
    return c;
}

bool ReferenceGrid::is_boundary(Eigen::Index node) const {
    if (dim == 1) return node == 0 || node == num_nodes() - 1;
    const int nx = axis_size(0), ny = axis_size(1);
    const int i = static_cast<int>(node % nx), j = static_cast<int>(node / nx);
    return i == 0 || i == nx - 1 || j == 0 || j == ny - 1;
}

ReferenceGrid ReferenceGrid::uniform_1d(double a, double b, int n) {
    ReferenceGrid g;
    g.dim = 1;
    g.axis.push_back(Vector::LinSpaced(n, a, b));
    check_axis(g.axis[0]);
    return g;
}

ReferenceGrid ReferenceGrid::uniform_2d(double ax, double bx, int nx, double ay, double by, int ny) {
    ReferenceGrid g;
    g.dim = 2;
    g.axis.push_back(Vector::LinSpaced(nx, ax, bx));
    g.axis.push_back(Vector::LinSpaced(ny, ay, by));
    check_axis(g.axis[0]);
    check_axis(g.axis[1]);
    return g;
}

ReferenceGrid ReferenceGrid::from_axes(std::vector<Vector> axes) {
    if (axes.empty() || axes.size() > 2) throw std::invalid_argument("grid must be 1D or 2D");
    ReferenceGrid g;
    g.dim = static_cast<int>(axes.size());
    g.axis = std::move(axes);
    for (const auto& a : g.axis) check_axis(a);
    return g;
}

int MovingGrid::num_control_nodes() const {
    int n = 1;
    for (const auto& ax : control_axis) n *= static_cast<int>(ax.size());
    return n;
}

void MovingGrid::rebuild_upsample() {
    upsample.clear();
    for (int a = 0; a < reference.dim; ++a)
        upsample.push_back(interp_matrix(control_axis[a], reference.axis[a], upsample_degree));
}

Vector MovingGrid::step_coeffs(int c, double n) const {
    const int kc = num_control_steps();
    if (kc == 1) return coeffs[c].col(0);
    int i = bracket(control_steps, n);
    const double t = (n - control_steps[i]) / (control_steps[i + 1] - control_steps[i]);
    return (1.0 - t) * coeffs[c].col(i) + t * coeffs[c].col(i + 1);
}

Matrix MovingGrid::assemble(int n) const {
    if (n < 0 || n >= num_steps) throw std::invalid_argument("assemble: step index out of range");
    const Eigen::Index nn = reference.num_nodes();
    Matrix out(nn, reference.dim);
    for (int c = 0; c < reference.dim; ++c) {
        const Vector ctrl = basis[c] * step_coeffs(c, n);
        if (reference.dim == 1) {
            out.col(c) = upsample[0] * ctrl;
        } else {
            const int ncx = control_axis_size(0);
            const int ncy = control_axis_size(1);
            const Eigen::Map<const Matrix> cmat(ctrl.data(), ncx, ncy);  // x-fastest
            const Matrix fine = upsample[0] * cmat * upsample[1].transpose();
            out.col(c) = Eigen::Map<const Vector>(fine.data(), nn);
        }
    }
    if (boundary_pinned) {
        const Matrix ref = reference.coords();
        for (Eigen::Index i = 0; i < nn; ++i)
            if (reference.is_boundary(i)) out.row(i) = ref.row(i);
    }
    return out;
}

MovingGrid init_from_reference(const ReferenceGrid& ref, int r, int K, double perturb_scale,
                               std::uint64_t seed, std::vector<int> control_counts,
                               int control_steps, int upsample_degree, bool boundary_pinned) {
    if (r < 1) throw std::invalid_argument("init_from_reference: rank must be >= 1");
    if (K < 2) throw std::invalid_argument("init_from_reference: need at least 2 steps");
    if (perturb_scale < 0) throw std::invalid_argument("init_from_reference: negative perturbation");

    MovingGrid g;
    g.reference = ref;
    g.rank = r;
    g.num_steps = K;
    g.upsample_degree = upsample_degree;
    g.boundary_pinned = boundary_pinned;

    if (control_counts.empty())
        for (int a = 0; a < ref.dim; ++a) control_counts.push_back(ref.axis_size(a));
    if (static_cast<int>(control_counts.size()) != ref.dim)
        throw std::invalid_argument("init_from_reference: one control count per axis");
    for (int a = 0; a < ref.dim; ++a) {
        const int nca = control_counts[a];
        if (nca < 2 || nca > ref.axis_size(a))
            throw std::invalid_argument("control count out of range [2, n]");
        g.control_axis.push_back(
            Vector::LinSpaced(nca, ref.axis[a][0], ref.axis[a][ref.axis_size(a) - 1]));
    }

    const int kc = control_steps > 0 ? control_steps : K;
    if (kc < 2 || kc > K) throw std::invalid_argument("init_from_reference: control steps out of range");
    g.control_steps = Vector::LinSpaced(kc, 0.0, K - 1.0);

    const int nc = g.num_control_nodes();
    if (r > std::min(nc, kc))
        throw std::invalid_argument("init_from_reference: rank exceeds min(control nodes, control steps)");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);

    for (int c = 0; c < ref.dim; ++c) {
        // Control-node coordinates of component c, x-fastest flattening.
        Vector cc(nc);
        if (ref.dim == 1) {
            cc = g.control_axis[0];
        } else {
            const int ncx = g.control_axis_size(0);
            const int ncy = g.control_axis_size(1);
            for (int j = 0; j < ncy; ++j)
                for (int i = 0; i < ncx; ++i) cc[i + ncx * j] = g.control_axis[c][c == 0 ? i : j];
        }

        // Rank-r factorization of the K-fold replication of cc, scaled so the
        // leading coefficient row is all ones. Extra basis columns carry zero
        // coefficients; they are smooth low-order polynomials of the lattice
        // coordinates (orthogonalized) so the curvature regularizer vanishes
        // on the unperturbed factors. In 2D the first extra mode is the other
        // coordinate, which together with the leading column spans rotations.
        const double scale = ref.domain_length(c);
        Matrix u = Matrix::Zero(nc, r);
        u.col(0) = cc;

        // Normalized control-lattice coordinates, own axis first.
        std::vector<Vector> xi;
        for (int a = 0; a < ref.dim; ++a) {
            const int ax = (a == 0) ? c : 1 - c;
            const double lo = ref.axis[ax][0], hi = ref.axis[ax][ref.axis_size(ax) - 1];
            Vector z(nc);
            if (ref.dim == 1) {
                for (int i = 0; i < nc; ++i) z[i] = 2.0 * (cc[i] - lo) / (hi - lo) - 1.0;
            } else {
                const int ncx = g.control_axis_size(0);
                for (int i = 0; i < nc; ++i) {
                    const int k = (ax == 0) ? i % ncx : i / ncx;
                    z[i] = 2.0 * (g.control_axis[ax][k] - lo) / (hi - lo) - 1.0;
                }
            }
            xi.push_back(std::move(z));
        }
        // Candidate monomials after the leading column: constant in 1D; in 2D
        // the other coordinate, then the constant, then graded products.
        std::vector<std::pair<int, int>> cand;
        if (ref.dim == 1) {
            for (int pw = 0; pw <= nc; ++pw) cand.emplace_back(pw, 0);
        } else {
            cand.emplace_back(0, 1);
            cand.emplace_back(0, 0);
            for (int deg = 2; deg <= nc; ++deg)
                for (int b = deg; b >= 0; --b) cand.emplace_back(deg - b, b);
        }
        std::vector<Vector> ortho{cc.normalized()};
        size_t next = 0;
        for (int j = 1; j < r; ++j) {
            while (true) {
                if (next >= cand.size())
                    throw NumericalError("init_from_reference: basis completion failed");
                const auto [pa, pb] = cand[next++];
                Vector e = xi[0].array().pow(pa).matrix();
                if (ref.dim == 2) e = e.cwiseProduct(xi[1].array().pow(pb).matrix());
                for (const auto& q : ortho) e -= q.dot(e) * q;
                if (e.norm() > 1e-8) {
                    e.normalize();
                    ortho.push_back(e);
                    u.col(j) = scale * e;
                    break;
                }
            }
        }
        Matrix v = Matrix::Zero(r, kc);
        v.row(0).setOnes();

        for (Eigen::Index j = 0; j < u.cols(); ++j)
            for (Eigen::Index i = 0; i < u.rows(); ++i) u(i, j) += perturb_scale * scale * uni(rng);
        // Perturb the coefficients as well so the initial point is a generic
        // one: with exactly affine coefficient rows the step-direction
        // regularizer starts at the kink of the unsquared norm, where finite
        // difference gradients are meaningless.
        for (Eigen::Index j = 0; j < v.cols(); ++j)
            for (Eigen::Index i = 0; i < v.rows(); ++i) v(i, j) += perturb_scale * uni(rng);

        g.basis.push_back(std::move(u));
        g.coeffs.push_back(std::move(v));
    }
    g.rebuild_upsample();
    return g;
}

Vector cell_volumes(const Matrix& coords, const ReferenceGrid& ref) {
    if (coords.rows() != ref.num_nodes() || coords.cols() != ref.dim)
        throw std::invalid_argument("cell_volumes: coordinate shape mismatch");
    if (ref.dim == 1) {
        const Eigen::Index n = coords.rows();
        Vector v(n - 1);
        for (Eigen::Index i = 0; i + 1 < n; ++i) v[i] = coords(i + 1, 0) - coords(i, 0);
        return v;
    }
    const int nx = ref.axis_size(0), ny = ref.axis_size(1);
    Vector v((nx - 1) * static_cast<Eigen::Index>(ny - 1));
    auto node = [nx](int i, int j) { return i + static_cast<Eigen::Index>(nx) * j; };
    for (int j = 0; j + 1 < ny; ++j)
        for (int i = 0; i + 1 < nx; ++i) {
            const Eigen::Index a = node(i, j), b = node(i + 1, j), c = node(i + 1, j + 1),
                               d = node(i, j + 1);
            const double area =
                0.5 * ((coords(a, 0) * coords(b, 1) - coords(b, 0) * coords(a, 1)) +
                       (coords(b, 0) * coords(c, 1) - coords(c, 0) * coords(b, 1)) +
                       (coords(c, 0) * coords(d, 1) - coords(d, 0) * coords(c, 1)) +
                       (coords(d, 0) * coords(a, 1) - coords(a, 0) * coords(d, 1)));
            v[i + static_cast<Eigen::Index>(nx - 1) * j] = area;
        }
    return v;
}

VolumeReport validate_diffeomorphism(const MovingGrid& g, double v_min) {
    VolumeReport rep;
    rep.v_min = v_min;
    rep.global_min = std::numeric_limits<double>::infinity();
    constexpr size_t max_violations = 1000;
    for (int n = 0; n < g.num_steps; ++n) {
        const Vector v = cell_volumes(g.assemble(n), g.reference);
        rep.per_step_min.push_back(v.minCoeff());
        rep.global_min = std::min(rep.global_min, rep.per_step_min.back());
        for (Eigen::Index c = 0; c < v.size(); ++c) {
            const bool bad = (v_min == 0.0) ? (v[c] <= 0.0) : (v[c] < v_min);
            if (bad && rep.violations.size() < max_violations)
                rep.violations.push_back({n, static_cast<int>(c), v[c]});
        }
    }
    rep.passed = (v_min == 0.0) ? (rep.global_min > 0.0) : (rep.global_min >= v_min);
    return rep;
}

}  // namespace rgr
