#include "nlstab/singular/kernel.hpp"

#include "nlstab/geometry/quadrature.hpp"

#include <cmath>
#include <limits>

namespace nlstab::singular {

using geometry::Mesh;

FrozenMetric::FrozenMetric(const pde::CoefficientMatrixField& field, const Point& pole, int n) : y(pole), dim(n)
{
    NLSTAB_REQUIRE(n == 2 || n == 3, InvalidArgument, "kernel: dimension must be 2 or 3");
    a = field(pole);
    const auto A = a.topLeftCorner(n, n);
    NLSTAB_REQUIRE((A - A.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + A.cwiseAbs().maxCoeff()),
                   InvalidArgument, "kernel: a(y) is not symmetric");
    NLSTAB_REQUIRE(pde::min_eigenvalue(a, n) > 0, InvalidArgument, "kernel: a(y) is not positive definite");
    Q = Mat3::Identity();
    Q.topLeftCorner(n, n) = Matrix(A).inverse();
    sqrt_det = std::sqrt(Matrix(A).determinant());
    if (n == 2) y.z() = 0.0;
}

double FrozenMetric::rho(const Point& x) const
{
    Point r = x - y;
    if (dim == 2) r.z() = 0.0;
    return std::sqrt(std::max(0.0, r.dot(Q * r)));
}

double unit_sphere_area(int n)
{
    NLSTAB_REQUIRE(n >= 1, InvalidArgument, "unit_sphere_area: n must be >= 1");
    return 2.0 * std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n);
}

SingularKernel::SingularKernel(const pde::CoefficientMatrixField& a, const Point& y, int dim) : metric_(a, y, dim)
{
    if (dim == 2)
        c_ = -1.0 / (2.0 * M_PI * metric_.sqrt_det);
    else
        c_ = 1.0 / ((dim - 2) * unit_sphere_area(dim) * metric_.sqrt_det);
}

double SingularKernel::normalization() const { return dim() == 2 ? 1.0 / (2.0 * M_PI) : 1.0 / unit_sphere_area(dim()); }

Point SingularKernel::r(const Point& x) const
{
    Point d = x - metric_.y;
    if (dim() == 2) d.z() = 0.0;
    NLSTAB_REQUIRE(d.squaredNorm() > 0.0, InvalidArgument, "kernel evaluated at its pole");
    return d;
}

double SingularKernel::value(const Point& x) const
{
    const Point d = r(x);
    const double rho2 = d.dot(metric_.Q * d);
    if (dim() == 2) return 0.5 * c_ * std::log(rho2);
    return c_ / std::sqrt(rho2);
}

Point SingularKernel::gradient(const Point& x) const
{
    const Point d = r(x);
    const Point s = metric_.Q * d;
    const double rho2 = d.dot(s);
    if (dim() == 2) return c_ * s / rho2;
    return -c_ * s / (rho2 * std::sqrt(rho2));
}

Mat3 SingularKernel::hessian(const Point& x) const
{
    const Point d = r(x);
    const Point s = metric_.Q * d;
    const double rho2 = d.dot(s);
    Mat3 Hs;
    if (dim() == 2) {
        Hs = c_ * (metric_.Q / rho2 - 2.0 * s * s.transpose() / (rho2 * rho2));
        Hs.row(2).setZero();
        Hs.col(2).setZero();
    } else {
        const double rho = std::sqrt(rho2);
        Hs = -c_ * (metric_.Q / (rho2 * rho) - 3.0 * s * s.transpose() / (rho2 * rho2 * rho));
    }
    return Hs;
}

double SingularKernel::derivative(const Point& x, int k) const
{
    NLSTAB_REQUIRE(k >= 0 && k < dim(), InvalidArgument, "kernel derivative: component out of range");
    return gradient(x)[k];
}

Point SingularKernel::derivative_gradient(const Point& x, int k) const
{
    NLSTAB_REQUIRE(k >= 0 && k < dim(), InvalidArgument, "kernel derivative: component out of range");
    return hessian(x).row(k).transpose();
}

SingularKernel fundamental_h(const pde::CoefficientMatrixField& a, const Point& y, int dim)
{
    return SingularKernel(a, y, dim);
}

double flux_through_sphere(const SingularKernel& H, const pde::CoefficientMatrixField& a, double r, int order)
{
    NLSTAB_REQUIRE(r > 0 && order >= 4, InvalidArgument, "flux_through_sphere: need r > 0 and order >= 4");
    const Point y = H.pole();
    double total = 0.0;
    if (H.dim() == 2) {
        // Trapezoid rule in the angle: spectrally accurate for periodic integrands.
        const int m = 2 * order;
        for (int i = 0; i < m; ++i) {
            const double th = 2.0 * M_PI * i / m;
            const Point nu(std::cos(th), std::sin(th), 0.0);
            const Point x = y + r * nu;
            total += (a(x) * H.gradient(x)).dot(nu) * r * (2.0 * M_PI / m);
        }
        return total;
    }
    std::vector<double> t, w;
    geometry::gauss_legendre_01(order, t, w);
    const int m = 2 * order;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double ct = 2.0 * t[i] - 1.0, st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
        for (int j = 0; j < m; ++j) {
            const double ph = 2.0 * M_PI * j / m;
            const Point nu(st * std::cos(ph), st * std::sin(ph), ct);
            const Point x = y + r * nu;
            total += (a(x) * H.gradient(x)).dot(nu) * r * r * (2.0 * w[i]) * (2.0 * M_PI / m);
        }
    }
    return total;
}

double Parametrix::at_node(int v) const { return H.value(mesh->nodes[v]) + (R.size() ? R[v] : 0.0); }

Vector Parametrix::nodal() const
{
    Vector P(mesh->num_nodes());
    for (int v = 0; v < mesh->num_nodes(); ++v) P[v] = at_node(v);
    return P;
}

namespace {

/// Nearest mesh node to p.
int nearest_node(const Mesh& m, const Point& p)
{
    int best = 0;
    double bd = std::numeric_limits<double>::infinity();
    for (int v = 0; v < m.num_nodes(); ++v) {
        const double d = (m.nodes[v] - p).squaredNorm();
        if (d < bd) {
            bd = d;
            best = v;
        }
    }
    return best;
}

} // namespace

Parametrix parametrix(const pde::CoefficientMatrixField& a, const Point& y, std::shared_ptr<const Mesh> mesh,
                      const ParametrixOptions& opts)
{
    NLSTAB_REQUIRE(opts.mollify_factor >= 1.0, InvalidArgument,
                   "parametrix: mollification radius below the local mesh size is under-resolved");
    const auto V = pde::FESpace::of(mesh);
    const int n = mesh->dim;
    Parametrix P;
    P.H = SingularKernel(a, y, n);
    P.mesh = mesh;
    P.constant_coefficients = a.constant;
    P.R = Vector::Zero(mesh->num_nodes());
    const double h_loc = mesh->local_size(nearest_node(*mesh, y));
    P.mollify_radius = opts.mollify_factor * h_loc;
    const double eps = P.mollify_radius;
    const Mat3 ay = P.H.metric().a;
    const Mat3 Q = P.H.metric().Q;
    const double c = n == 2 ? -1.0 / (2.0 * M_PI * P.H.metric().sqrt_det)
                            : 1.0 / (unit_sphere_area(3) * P.H.metric().sqrt_det);
    // Kernel gradient with rho capped below at the mollification radius.
    auto mollified_gradient = [&](const Point& x) {
        Point d = x - P.H.pole();
        if (n == 2) d.z() = 0.0;
        const Point s = Q * d;
        const double rho2 = std::max(d.dot(s), eps * eps);
        if (n == 2) return Point(c * s / rho2);
        return Point(-c * s / (rho2 * std::sqrt(rho2)));
    };

    pde::SpMat K;
    if (!a.constant) {
        K = pde::assemble_diffusion(*V, a);
        const auto& rule = geometry::accurate_rule(n, opts.quadrature_order);
        Vector F = Vector::Zero(mesh->num_nodes());
        for (int c2 = 0; c2 < mesh->num_cells(); ++c2) {
            const auto& cell = mesh->cells[c2];
            for (std::size_t q = 0; q < rule.weights.size(); ++q) {
                const Point x = V->physical(c2, rule.bary[q]);
                const Point flux = (a(x) - ay) * mollified_gradient(x);
                const double w = rule.weights[q] * V->vol[c2];
                for (int i = 0; i <= n; ++i) F[cell[i]] -= w * flux.dot(V->grads[c2][i]);
            }
        }
        const pde::DirichletSolver solver(V, K);
        P.R = solver.solve(Vector::Zero(mesh->num_boundary_nodes()), &F);
    }

    if (!opts.compute_residual) return P;
    // Residual over interior nodes far from the pole.
    const auto& rule = geometry::accurate_rule(n, opts.residual_quadrature_order);
    Vector rh = Vector::Zero(mesh->num_nodes()), mag = Vector::Zero(mesh->num_nodes());
    std::vector<char> near(mesh->num_nodes(), 0);
    const double excl = opts.residual_exclusion * h_loc;
    for (int c2 = 0; c2 < mesh->num_cells(); ++c2) {
        const auto& cell = mesh->cells[c2];
        bool close = false;
        for (int i = 0; i <= n; ++i)
            if ((mesh->nodes[cell[i]] - y).norm() < excl + V->cell_diameter(c2)) close = true;
        if (close) {
            for (int i = 0; i <= n; ++i) near[cell[i]] = 1;
            continue;
        }
        for (std::size_t q = 0; q < rule.weights.size(); ++q) {
            const Point x = V->physical(c2, rule.bary[q]);
            const Point flux = a(x) * P.H.gradient(x);
            const double w = rule.weights[q] * V->vol[c2];
            for (int i = 0; i <= n; ++i) {
                rh[cell[i]] += w * flux.dot(V->grads[c2][i]);
                mag[cell[i]] += w * flux.norm() * V->grads[c2][i].norm();
            }
        }
    }
    const Vector rp = a.constant ? rh : Vector(rh + K * P.R);
    double s_h = 0, s_p = 0, s_m = 0;
    for (int v : V->interior) {
        if (near[v]) continue;
        s_h += rh[v] * rh[v];
        s_p += rp[v] * rp[v];
        s_m += mag[v] * mag[v];
        ++P.residual_nodes;
    }
    P.residual_abs = std::sqrt(s_p);
    P.residual_of_h_abs = std::sqrt(s_h);
    const double scale = std::sqrt(s_m);
    P.residual = scale > 0 ? P.residual_abs / scale : 0.0;
    P.residual_of_h = scale > 0 ? P.residual_of_h_abs / scale : 0.0;
    return P;
}

Parametrix parametrix(const pde::CoefficientMatrixField& a, const Point& y, const geometry::DomainTriple& dom,
                      const ParametrixOptions& opts)
{
    NLSTAB_REQUIRE(!geometry::inside_omega(dom, y) &&
                       geometry::distance_to_boundary(*dom.omega, y) > 1e-12 * (1.0 + y.norm()),
                   InvalidArgument, "parametrix: the pole must lie outside the closure of Omega");
    return parametrix(a, y, dom.omega_prime, opts);
}

} // namespace nlstab::singular
