#include "nlstab/dn/boundary_space.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace nlstab::dn {

BoundarySpace::BoundarySpace(std::shared_ptr<const geometry::Mesh> mesh) : mesh_(std::move(mesh))
{
    const auto& m = *mesh_;
    const int nb = m.num_boundary_nodes();
    NLSTAB_REQUIRE(nb >= m.dim + 1, InvalidArgument, "BoundarySpace: boundary has too few nodes");
    mass_ = Matrix::Zero(nb, nb);
    stiff_ = Matrix::Zero(nb, nb);
    for (std::size_t f = 0; f < m.bfacets.size(); ++f) {
        const auto& fac = m.bfacets[f];
        std::array<int, 3> b{};
        for (int i = 0; i < m.dim; ++i) b[i] = m.boundary_index[fac[i]];
        const double area = m.facet_measure(static_cast<int>(f));
        if (m.dim == 2) {
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) {
                    mass_(b[i], b[j]) += area * (i == j ? 1.0 / 3 : 1.0 / 6);
                    stiff_(b[i], b[j]) += (i == j ? 1.0 : -1.0) / area;
                }
            continue;
        }
        const Point p0 = m.nodes[fac[0]], p1 = m.nodes[fac[1]], p2 = m.nodes[fac[2]];
        // Tangential gradients of the barycentric coordinates: grad l_i = n x e_i / (2A),
        // with e_i the edge opposite vertex i, oriented counter-clockwise.
        const Point n = (p1 - p0).cross(p2 - p0).normalized();
        const std::array<Point, 3> e{p2 - p1, p0 - p2, p1 - p0};
        std::array<Point, 3> g;
        for (int i = 0; i < 3; ++i) g[i] = n.cross(e[i]) / (2.0 * area);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                mass_(b[i], b[j]) += area * (i == j ? 1.0 / 6 : 1.0 / 12);
                stiff_(b[i], b[j]) += area * g[i].dot(g[j]);
            }
    }
    Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> es(stiff_, mass_);
    NLSTAB_REQUIRE(es.info() == Eigen::Success, InvalidArgument,
                   "BoundarySpace: boundary mass matrix is not SPD (degenerate boundary mesh)");
    mu_ = es.eigenvalues().cwiseMax(0.0);
    phi_ = es.eigenvectors();
    const Matrix MP = mass_ * phi_;
    const Vector wp = (1.0 + mu_.array()).sqrt().matrix();
    const Vector wm = wp.cwiseInverse();
    plus_op_ = MP * wp.asDiagonal() * MP.transpose();
    minus_op_ = phi_ * wm.asDiagonal() * phi_.transpose();
}

std::shared_ptr<const BoundarySpace> BoundarySpace::of(const std::shared_ptr<const geometry::Mesh>& mesh)
{
    static std::mutex mu;
    static std::map<std::uint64_t, std::weak_ptr<const BoundarySpace>> cache;
    {
        std::lock_guard<std::mutex> lock(mu);
        if (auto sp = cache[mesh->id].lock()) return sp;
    }
    auto sp = std::make_shared<const BoundarySpace>(mesh);
    std::lock_guard<std::mutex> lock(mu);
    if (auto existing = cache[mesh->id].lock()) return existing;
    cache[mesh->id] = sp;
    return sp;
}

double BoundarySpace::fractional_norm(const Vector& v, double order) const
{
    if (order == 0.5) return norm_plus(v);
    if (order == -0.5) return norm_minus(v);
    throw InvalidArgument("fractional_norm: order must be +1/2 or -1/2");
}

double BoundarySpace::norm_plus(const Vector& f) const
{
    NLSTAB_REQUIRE(f.size() == size(), InvalidArgument, "norm_plus: size mismatch");
    return std::sqrt(std::max(0.0, f.dot(plus_op_ * f)));
}

double BoundarySpace::norm_minus(const Vector& l) const
{
    NLSTAB_REQUIRE(l.size() == size(), InvalidArgument, "norm_minus: size mismatch");
    return std::sqrt(std::max(0.0, l.dot(minus_op_ * l)));
}

Matrix BoundarySpace::gram_plus(const Matrix& F) const
{
    Matrix G = F.transpose() * plus_op_ * F;
    return 0.5 * (G + G.transpose());
}

Vector BoundarySpace::riesz(const Vector& f) const { return plus_op_ * f; }

double BoundarySpace::integral(const Vector& f) const { return (mass_ * f).sum(); }

} // namespace nlstab::dn
