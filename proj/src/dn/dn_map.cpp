#include "nlstab/dn/dn_map.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace nlstab::dn {

using geometry::BoundaryFunction;
using geometry::BoundaryPatch;
using geometry::Mesh;

std::vector<char> patch_mask(const Mesh& mesh, const BoundaryPatch& S)
{
    NLSTAB_REQUIRE(static_cast<int>(S.node_in.size()) == mesh.num_nodes(), InvalidArgument,
                   "patch '" + S.name + "' does not belong to this mesh");
    std::vector<char> mask(mesh.num_boundary_nodes());
    for (int b = 0; b < mesh.num_boundary_nodes(); ++b) mask[b] = S.node_in[mesh.boundary_nodes[b]];
    return mask;
}

FluxTrace restrict_flux(const Vector& flux, const Mesh& mesh, const BoundaryPatch& S)
{
    NLSTAB_REQUIRE(flux.size() == mesh.num_boundary_nodes(), InvalidArgument,
                   "restrict_flux: flux size does not match the mesh boundary");
    FluxTrace t;
    t.mesh_id = mesh.id;
    t.patch = patch_mask(mesh, S);
    t.patch_name = S.name;
    t.values = flux;
    for (int b = 0; b < mesh.num_boundary_nodes(); ++b)
        if (!t.patch[b]) t.values[b] = 0.0;
    return t;
}

FluxTrace neumann_trace(const pde::FieldSolution& sol, const BoundaryPatch& S)
{
    NLSTAB_REQUIRE(sol.mesh != nullptr, InvalidArgument, "neumann_trace: solution has no mesh");
    return restrict_flux(sol.flux, *sol.mesh, S);
}

FluxTrace neumann_trace(const pde::FieldSolution& sol, const pde::CoefficientMatrixField& a,
                        const pde::ScalarField& weight, const BoundaryPatch& S)
{
    NLSTAB_REQUIRE(sol.mesh != nullptr, InvalidArgument, "neumann_trace: solution has no mesh");
    const auto V = pde::FESpace::of(sol.mesh);
    NLSTAB_REQUIRE(sol.u.size() == V->num_nodes(), InvalidArgument, "neumann_trace: field size mismatch");
    const Vector Au = pde::assemble_diffusion(*V, a, weight) * sol.u;
    Vector flux(sol.mesh->num_boundary_nodes());
    for (int b = 0; b < flux.size(); ++b) flux[b] = Au[sol.mesh->boundary_nodes[b]];
    return restrict_flux(flux, *sol.mesh, S);
}

namespace {

pde::FieldSolution forward(const pde::ProblemSpec& p, const BoundaryFunction& g, std::shared_ptr<const Mesh> mesh,
                           const pde::SolverOptions& opts)
{
    if (p.condition == pde::Condition::Quasilinear)
        return pde::solve_quasilinear(p.a, p.gamma, p.drift, g, std::move(mesh), {}, opts);
    return pde::solve_semilinear(p.G, g, std::move(mesh), {}, opts);
}

} // namespace

FluxTrace dn_apply(const pde::ProblemSpec& problem, const BoundaryFunction& g, std::shared_ptr<const Mesh> mesh,
                   const BoundaryPatch& S, const pde::SolverOptions& opts)
{
    const auto sol = forward(problem, g, mesh, opts);
    return neumann_trace(sol, S);
}

Background Background::constant(double lambda)
{
    Background b;
    b.lambda = lambda;
    return b;
}

Background Background::with_cutoff(double lambda, BoundaryFunction chi)
{
    Background b;
    b.lambda = lambda;
    b.use_cutoff = true;
    b.chi = std::move(chi);
    return b;
}

Vector Background::values(const Mesh& mesh) const
{
    if (!use_cutoff) return Vector::Constant(mesh.num_boundary_nodes(), lambda);
    NLSTAB_REQUIRE(chi.values.size() == mesh.num_boundary_nodes(), InvalidArgument,
                   "Background: cutoff does not belong to this mesh");
    return lambda * chi.values;
}

std::string Background::describe() const
{
    std::ostringstream s;
    s << (use_cutoff ? "lambda*chi" : "lambda") << ", lambda=" << lambda;
    return s.str();
}

LinearizedDN::LinearizedDN(const pde::ProblemSpec& problem, const Background& background,
                           std::shared_ptr<const Mesh> mesh, BoundaryPatch S, const pde::SolverOptions& opts)
    : mesh_(std::move(mesh)), S_(std::move(S)), background_(background), condition_(problem.condition)
{
    mask_ = patch_mask(*mesh_, S_);
    const auto V = pde::FESpace::of(mesh_);
    if (condition_ == pde::Condition::Quasilinear) {
        NLSTAB_REQUIRE(!background.use_cutoff, InvalidArgument,
                       "linearized DN (quasilinear): the background must be a constant");
        const double lam = background.lambda;
        scale_ = problem.gamma.gamma(lam);
        if (!(scale_ > problem.gamma.positivity_floor))
            throw LawViolation("gamma(" + std::to_string(lam) + ") = " + std::to_string(scale_) +
                               " is not above the positivity floor");
        pde::LinearSpec spec;
        spec.a = problem.a;
        spec.s = scale_;
        if (!problem.drift.zero) {
            const auto D = problem.drift.D;
            spec.B = [D, lam](const Point& x) { return D(x, lam); };
        }
        op_ = pde::linear_operator(spec, V, opts);
        return;
    }
    const BoundaryFunction data = pde::boundary_values(*mesh_, background.values(*mesh_));
    v_ = pde::solve_semilinear(problem.G, data, mesh_, {}, opts).u;
    q_.resize(v_.size());
    for (Eigen::Index i = 0; i < v_.size(); ++i) {
        q_[i] = problem.G.dG(v_[i]);
        if (q_[i] < -1e-12)
            throw Error("linearized DN: computed potential G'(v) = " + std::to_string(q_[i]) +
                        " is negative (G is not monotone?)");
        q_[i] = std::max(q_[i], 0.0);
    }
    op_ = pde::schrodinger_operator(q_, V);
}

Vector LinearizedDN::solve(const Vector& h) const { return op_->solve(h); }

FluxTrace LinearizedDN::apply(const Vector& h) const
{
    const Vector w = op_->solve(h);
    return restrict_flux(op_->flux(w), *mesh_, S_);
}

FluxTrace LinearizedDN::apply(const BoundaryFunction& h) const
{
    h.validate(*mesh_);
    NLSTAB_REQUIRE(h.mesh_id == 0 || h.mesh_id == mesh_->id, InvalidArgument,
                   "linearized DN: data belongs to a different mesh");
    return apply(h.values);
}

Matrix LinearizedDN::apply_many(const Matrix& H) const
{
    NLSTAB_REQUIRE(H.rows() == mesh_->num_boundary_nodes(), InvalidArgument, "apply_many: wrong row count");
    const Matrix W = op_->solve_many(H);
    Matrix out(H.rows(), H.cols());
    for (Eigen::Index j = 0; j < H.cols(); ++j) out.col(j) = op_->flux(W.col(j));
    for (Eigen::Index b = 0; b < H.rows(); ++b)
        if (!mask_[b]) out.row(b).setZero();
    return out;
}

FluxTrace linearized_dn(const pde::ProblemSpec& problem, const Background& background, const BoundaryFunction& h,
                        std::shared_ptr<const Mesh> mesh, const BoundaryPatch& S, const pde::SolverOptions& opts)
{
    return LinearizedDN(problem, background, std::move(mesh), S, opts).apply(h);
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y)
{
    NLSTAB_REQUIRE(x.size() == y.size() && x.size() >= 2, InvalidArgument, "loglog_slope: need >= 2 pairs");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        NLSTAB_REQUIRE(x[i] > 0 && y[i] > 0, InvalidArgument, "loglog_slope: values must be positive");
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double den = n * sxx - sx * sx;
    NLSTAB_REQUIRE(std::abs(den) > 1e-300, InvalidArgument, "loglog_slope: abscissae coincide");
    return (n * sxy - sx * sy) / den;
}

FrechetReport frechet_ratio(const pde::ProblemSpec& problem, const Background& background, const BoundaryFunction& h,
                            const std::vector<double>& eps, std::shared_ptr<const Mesh> mesh, const BoundaryPatch& S,
                            const pde::SolverOptions& opts)
{
    NLSTAB_REQUIRE(eps.size() >= 3, InvalidArgument, "frechet_ratio: need at least 3 eps values");
    for (double e : eps) NLSTAB_REQUIRE(e > 0, InvalidArgument, "frechet_ratio: eps must be positive");
    h.validate(*mesh);
    const auto bs = BoundarySpace::of(mesh);
    const Vector base_data = background.values(*mesh);

    FrechetReport rep;
    rep.eps = eps;
    const LinearizedDN lin(problem, background, mesh, S, opts);
    rep.linear = lin.apply(h).values;
    const double lin_norm = bs->norm_minus(rep.linear);

    const auto base = forward(problem, pde::boundary_values(*mesh, base_data), mesh, opts);
    const FluxTrace n0 = neumann_trace(base, S);
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    rep.quotients = Matrix::Constant(mesh->num_boundary_nodes(), static_cast<Eigen::Index>(eps.size()), nan);

    std::vector<double> xs, ys;
    bool all_floor = true;
    for (std::size_t k = 0; k < eps.size(); ++k) {
        double err = nan, rel = nan, floor = nan;
        try {
            const auto sol = forward(problem, pde::boundary_values(*mesh, Vector(base_data + eps[k] * h.values)),
                                     mesh, opts);
            const Vector q = (neumann_trace(sol, S).values - n0.values) / eps[k];
            rep.quotients.col(static_cast<Eigen::Index>(k)) = q;
            err = bs->norm_minus(q - rep.linear);
            // Flux rows are residual rows, so a residual r perturbs each quotient by about r / eps;
            // round-off in the flux itself contributes the second term.
            const double scale = std::max(n0.values.norm(), 1.0);
            floor = 10.0 * (sol.residual + base.residual + 1e-15 * scale) / eps[k];
            rel = lin_norm > 0 ? err / lin_norm : err;
            if (err > floor) {
                all_floor = false;
                xs.push_back(eps[k]);
                ys.push_back(err);
            }
        } catch (const Error& e) {
            rep.partial = true;
            rep.failures.push_back("eps=" + std::to_string(eps[k]) + ": " + e.what());
        }
        rep.errors.push_back(err);
        rep.relative.push_back(rel);
        rep.floors.push_back(floor);
    }
    rep.points_used = static_cast<int>(xs.size());
    rep.exact_within_floor = !rep.partial && all_floor;
    rep.order = xs.size() >= 3 ? loglog_slope(xs, ys) : nan;
    return rep;
}

} // namespace nlstab::dn
