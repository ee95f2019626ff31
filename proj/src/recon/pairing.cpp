#include "nlstab/recon/pairing.hpp"

#include "nlstab/pde/fe_space.hpp"

#include <cmath>

namespace nlstab::recon {

namespace {

void require_same_a(const pde::CoefficientMatrixField& a1, const pde::CoefficientMatrixField& a2,
                    const geometry::Mesh& mesh)
{
    for (const auto& x : mesh.nodes)
        NLSTAB_REQUIRE((a1(x) - a2(x)).cwiseAbs().maxCoeff() <= 1e-14 * (1.0 + a1(x).cwiseAbs().maxCoeff()),
                       InvalidArgument, "pairing: the two problems must share the coefficient matrix a");
}

} // namespace

PairingContext::PairingContext(const pde::ProblemSpec& p1, const pde::ProblemSpec& p2,
                               const dn::Background& background, std::shared_ptr<const geometry::Mesh> mesh,
                               const geometry::BoundaryPatch& S, const pde::SolverOptions& opts)
    : p1_(p1), p2_(p2), op1_(p1, background, mesh, S, opts), op2_(p2, background, mesh, S, opts)
{
    NLSTAB_REQUIRE(p1.condition == p2.condition, InvalidArgument, "pairing: problems of different conditions");
    require_same_a(p1.a, p2.a, *mesh);
    mask_ = dn::patch_mask(*mesh, S);
    if (p2.condition == pde::Condition::Quasilinear && !p2.drift.zero) {
        pde::LinearSpec spec;
        spec.a = p2.a;
        spec.s = op2_.diffusion_scale();
        const auto D = p2.drift.D;
        const double lam = background.lambda;
        spec.B = [D, lam](const Point& x) { return D(x, lam); };
        spec.adjoint = true;
        adjoint2_ = pde::linear_operator(spec, pde::FESpace::of(mesh), opts);
    }
}

PairingSample PairingContext::sample(const Vector& g, double tau) const
{
    const auto& mesh = *op1_.mesh();
    NLSTAB_REQUIRE(g.size() == mesh.num_boundary_nodes(), InvalidArgument, "pairing: data has the wrong size");
    for (Eigen::Index b = 0; b < g.size(); ++b)
        NLSTAB_REQUIRE(mask_[b] || g[b] == 0.0, InvalidArgument, "pairing: data is not supported in S");
    const auto& V = op1_.op().space();
    PairingSample s;
    s.lambda = op1_.background().lambda;
    s.tau = tau;
    const Vector w1 = op1_.solve(g);
    s.boundary = g.dot(op1_.op().flux(w1)) - g.dot(op2_.apply(g).values);
    if (op1_.condition() == pde::Condition::Semilinear) {
        const Vector w2 = op2_.solve(g);
        const Vector dq = op1_.potential() - op2_.potential();
        s.volume = (V.lumped_mass.array() * dq.array() * w1.array() * w2.array()).sum();
    } else {
        const Vector w2 = adjoint2_ ? adjoint2_->solve(g) : op2_.solve(g);
        const double gamma = op1_.diffusion_scale() - op2_.diffusion_scale();
        s.volume = gamma * pde::energy_pairing(V, p1_.a, w1, w2);
        if (!p1_.drift.zero || !p2_.drift.zero) {
            const double lam = s.lambda;
            const auto& rule = geometry::accurate_rule(V.dim, 4);
            double drift = 0.0;
            for (int c = 0; c < V.num_cells(); ++c) {
                const Point grad = V.gradient(c, w1);
                double cell = 0.0;
                for (std::size_t q = 0; q < rule.weights.size(); ++q) {
                    const Point x = V.physical(c, rule.bary[q]);
                    const Point dD = p1_.drift.D(x, lam) - p2_.drift.D(x, lam);
                    cell += rule.weights[q] * dD.dot(grad) * V.interpolate(c, rule.bary[q], w2);
                }
                drift += V.vol[c] * cell;
            }
            s.volume += drift;
        }
    }
    s.discrepancy = std::abs(s.boundary - s.volume);
    s.consistent = s.discrepancy <= rel_tol * (std::abs(s.boundary) + std::abs(s.volume)) + abs_tol;
    return s;
}

PairingSample PairingContext::sample(const singular::SingularData& data) const
{
    NLSTAB_REQUIRE(data.g.mesh_id == 0 || data.g.mesh_id == op1_.mesh()->id, InvalidArgument,
                   "pairing: singular data belongs to a different mesh");
    return sample(data.g.values, data.tau);
}

PairingSample pairing(const pde::ProblemSpec& p1, const pde::ProblemSpec& p2, const dn::Background& background,
                      const geometry::DomainTriple& dom, const singular::SingularData& g,
                      const pde::SolverOptions& opts)
{
    return PairingContext(p1, p2, background, dom.omega, dom.S, opts).sample(g);
}

} // namespace nlstab::recon
