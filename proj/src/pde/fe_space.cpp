#include "nlstab/pde/fe_space.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace nlstab::pde {

using geometry::assembly_rule;
using geometry::accurate_rule;
using geometry::SimplexRule;

FESpace::FESpace(std::shared_ptr<const geometry::Mesh> m) : mesh(std::move(m)), dim(mesh->dim)
{
    const int nc = mesh->num_cells();
    grads.resize(nc);
    vol.resize(nc);
    lumped_mass = Vector::Zero(mesh->num_nodes());
    for (int c = 0; c < nc; ++c) {
        const auto& cell = mesh->cells[c];
        Eigen::MatrixXd E(dim, dim);
        for (int k = 0; k < dim; ++k) E.col(k) = (mesh->nodes[cell[k + 1]] - mesh->nodes[cell[0]]).head(dim);
        const Eigen::MatrixXd Einv = E.inverse();
        Point sum = Point::Zero();
        for (int k = 0; k < dim; ++k) {
            Point g = Point::Zero();
            g.head(dim) = Einv.row(k).transpose();
            grads[c][k + 1] = g;
            sum += g;
        }
        grads[c][0] = -sum;
        vol[c] = mesh->signed_volume(c);
        for (int i = 0; i <= dim; ++i) lumped_mass[cell[i]] += vol[c] / (dim + 1);
    }
    interior_index.assign(mesh->num_nodes(), -1);
    for (int v = 0; v < mesh->num_nodes(); ++v)
        if (mesh->boundary_index[v] < 0) {
            interior_index[v] = static_cast<int>(interior.size());
            interior.push_back(v);
        }
}

Point FESpace::physical(int c, const std::array<double, 4>& bary) const
{
    Point x = Point::Zero();
    for (int i = 0; i <= dim; ++i) x += bary[i] * mesh->nodes[mesh->cells[c][i]];
    return x;
}

double FESpace::interpolate(int c, const std::array<double, 4>& bary, const Vector& u) const
{
    double s = 0.0;
    for (int i = 0; i <= dim; ++i) s += bary[i] * u[mesh->cells[c][i]];
    return s;
}

Point FESpace::gradient(int c, const Vector& u) const
{
    Point g = Point::Zero();
    for (int i = 0; i <= dim; ++i) g += u[mesh->cells[c][i]] * grads[c][i];
    return g;
}

double FESpace::cell_diameter(int c) const
{
    double m = 0.0;
    const auto& cell = mesh->cells[c];
    for (int i = 0; i <= dim; ++i)
        for (int j = i + 1; j <= dim; ++j) m = std::max(m, (mesh->nodes[cell[i]] - mesh->nodes[cell[j]]).norm());
    return m;
}

std::shared_ptr<const FESpace> FESpace::of(const std::shared_ptr<const geometry::Mesh>& m)
{
    static std::mutex mu;
    static std::map<std::uint64_t, std::weak_ptr<const FESpace>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[m->id];
    if (auto sp = slot.lock()) return sp;
    auto sp = std::make_shared<const FESpace>(m);
    slot = sp;
    return sp;
}

namespace {

SpMat from_triplets(int n, std::vector<Eigen::Triplet<double>>& t)
{
    SpMat A(n, n);
    A.setFromTriplets(t.begin(), t.end());
    A.makeCompressed();
    return A;
}

} // namespace

double min_eigenvalue(const Mat3& a, int dim)
{
    if (dim == 2) {
        const double tr = a(0, 0) + a(1, 1), det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
        return 0.5 * tr - std::sqrt(std::max(0.0, 0.25 * tr * tr - det));
    }
    return Eigen::SelfAdjointEigenSolver<Mat3>(a).eigenvalues().minCoeff();
}

SpMat assemble_diffusion(const FESpace& V, const CoefficientMatrixField& a, const ScalarField& weight)
{
    const SimplexRule& rule = assembly_rule(V.dim);
    const int nv = V.dim + 1;
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(static_cast<std::size_t>(V.num_cells()) * nv * nv);
    const Mat3 a_const = a.constant ? a(Point::Zero()) : Mat3::Zero();
    for (int c = 0; c < V.num_cells(); ++c) {
        Mat3 abar = Mat3::Zero();
        if (a.constant && !weight) {
            abar = a_const;
        } else {
            for (std::size_t q = 0; q < rule.size(); ++q) {
                const Point x = V.physical(c, rule.bary[q]);
                abar += rule.weights[q] * (weight ? weight(x) : 1.0) * (a.constant ? a_const : a(x));
            }
        }
        const auto& cell = V.mesh->cells[c];
        for (int i = 0; i < nv; ++i)
            for (int j = 0; j < nv; ++j)
                t.emplace_back(cell[i], cell[j], V.vol[c] * (abar * V.grads[c][j]).dot(V.grads[c][i]));
    }
    return from_triplets(V.num_nodes(), t);
}

SpMat assemble_drift(const FESpace& V, const VectorField& B)
{
    const SimplexRule& rule = assembly_rule(V.dim);
    const int nv = V.dim + 1;
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(static_cast<std::size_t>(V.num_cells()) * nv * nv);
    for (int c = 0; c < V.num_cells(); ++c) {
        const auto& cell = V.mesh->cells[c];
        // int (B . grad phi_j) phi_i = vol * sum_q w_q (B(x_q) . g_j) lambda_i(x_q)
        std::array<Point, 4> bw{};
        for (int i = 0; i < nv; ++i) bw[i] = Point::Zero();
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const Point b = B(V.physical(c, rule.bary[q]));
            for (int i = 0; i < nv; ++i) bw[i] += rule.weights[q] * rule.bary[q][i] * b;
        }
        for (int i = 0; i < nv; ++i)
            for (int j = 0; j < nv; ++j) t.emplace_back(cell[i], cell[j], V.vol[c] * bw[i].dot(V.grads[c][j]));
    }
    return from_triplets(V.num_nodes(), t);
}

SpMat assemble_mass(const FESpace& V, const ScalarField& weight)
{
    const SimplexRule& rule = weight ? accurate_rule(V.dim, 3) : assembly_rule(V.dim);
    const int nv = V.dim + 1;
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(static_cast<std::size_t>(V.num_cells()) * nv * nv);
    for (int c = 0; c < V.num_cells(); ++c) {
        const auto& cell = V.mesh->cells[c];
        Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const double w = rule.weights[q] * (weight ? weight(V.physical(c, rule.bary[q])) : 1.0);
            for (int i = 0; i < nv; ++i)
                for (int j = 0; j < nv; ++j) m(i, j) += w * rule.bary[q][i] * rule.bary[q][j];
        }
        for (int i = 0; i < nv; ++i)
            for (int j = 0; j < nv; ++j) t.emplace_back(cell[i], cell[j], V.vol[c] * m(i, j));
    }
    return from_triplets(V.num_nodes(), t);
}

SpMat lumped_diagonal(const FESpace& V, const Vector& nodal)
{
    SpMat D(V.num_nodes(), V.num_nodes());
    D.reserve(Eigen::VectorXi::Constant(V.num_nodes(), 1));
    for (int v = 0; v < V.num_nodes(); ++v) D.insert(v, v) = V.lumped_mass[v] * nodal[v];
    D.makeCompressed();
    return D;
}

Vector assemble_load(const FESpace& V, const ScalarField& f, int order)
{
    const SimplexRule& rule = accurate_rule(V.dim, order);
    Vector F = Vector::Zero(V.num_nodes());
    for (int c = 0; c < V.num_cells(); ++c) {
        const auto& cell = V.mesh->cells[c];
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const double w = V.vol[c] * rule.weights[q] * f(V.physical(c, rule.bary[q]));
            for (int i = 0; i <= V.dim; ++i) F[cell[i]] += w * rule.bary[q][i];
        }
    }
    return F;
}

double l2_error(const FESpace& V, const Vector& u, const ScalarField& exact, int order)
{
    const SimplexRule& rule = accurate_rule(V.dim, order);
    double s = 0.0;
    for (int c = 0; c < V.num_cells(); ++c)
        for (std::size_t q = 0; q < rule.size(); ++q) {
            double e = V.interpolate(c, rule.bary[q], u);
            if (exact) e -= exact(V.physical(c, rule.bary[q]));
            s += V.vol[c] * rule.weights[q] * e * e;
        }
    return std::sqrt(s);
}

double h1_norm(const FESpace& V, const Vector& u)
{
    double s = 0.0;
    for (int c = 0; c < V.num_cells(); ++c) s += V.vol[c] * V.gradient(c, u).squaredNorm();
    const double l2 = l2_error(V, u, {}, 2);
    return std::sqrt(s + l2 * l2);
}

std::pair<double, double> h1_error(const FESpace& V, const Vector& u, const ScalarField& f, const VectorField& grad_f,
                                   int order)
{
    const SimplexRule& rule = accurate_rule(V.dim, order);
    double s0 = 0.0, s1 = 0.0;
    for (int c = 0; c < V.num_cells(); ++c) {
        const Point gu = u.size() ? V.gradient(c, u) : Point(Point::Zero());
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const Point x = V.physical(c, rule.bary[q]);
            const double w = V.vol[c] * rule.weights[q];
            double e = u.size() ? V.interpolate(c, rule.bary[q], u) : 0.0;
            Point ge = gu;
            if (f) e -= f(x);
            if (grad_f) ge -= grad_f(x);
            s0 += w * e * e;
            s1 += w * ge.squaredNorm();
        }
    }
    return {std::sqrt(s0), std::sqrt(s0 + s1)};
}

double energy_pairing(const FESpace& V, const CoefficientMatrixField& a, const Vector& u, const Vector& v)
{
    const SimplexRule& rule = assembly_rule(V.dim);
    double s = 0.0;
    for (int c = 0; c < V.num_cells(); ++c) {
        Mat3 abar = Mat3::Zero();
        for (std::size_t q = 0; q < rule.size(); ++q) abar += rule.weights[q] * a(V.physical(c, rule.bary[q]));
        s += V.vol[c] * (abar * V.gradient(c, u)).dot(V.gradient(c, v));
    }
    return s;
}

Vector interpolate(const geometry::Mesh& m, const ScalarField& f)
{
    Vector u(m.num_nodes());
    for (int v = 0; v < m.num_nodes(); ++v) u[v] = f(m.nodes[v]);
    return u;
}

double peclet_number(const FESpace& V, const CoefficientMatrixField& a, double s, const VectorField& B)
{
    const SimplexRule& rule = assembly_rule(V.dim);
    const double lmin_const = a.constant ? min_eigenvalue(a(Point::Zero()), V.dim) : 0.0;
    double pe = 0.0;
    for (int c = 0; c < V.num_cells(); ++c) {
        const double h = V.cell_diameter(c);
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const Point x = V.physical(c, rule.bary[q]);
            const Point b = B(x);
            if (b.squaredNorm() == 0.0) continue;
            const double lmin = a.constant ? lmin_const : min_eigenvalue(a(x), V.dim);
            pe = std::max(pe, b.norm() * h / (2.0 * s * lmin));
        }
    }
    return pe;
}

} // namespace nlstab::pde
