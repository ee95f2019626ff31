#include "nlstab/pde/solvers.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace nlstab::pde {

using geometry::assembly_rule;
using geometry::BoundaryFunction;
using geometry::Mesh;
using geometry::SimplexRule;

namespace {

struct System {
    Vector R;  // full residual
    SpMat J;   // full Jacobian (may be empty when only the residual is wanted)
};

double interior_norm(const FESpace& V, const Vector& R)
{
    double s = 0.0;
    for (int v : V.interior) s += R[v] * R[v];
    return std::sqrt(s);
}

void apply_boundary(const Mesh& m, Vector& u, const Vector& g)
{
    for (int b = 0; b < m.num_boundary_nodes(); ++b) u[m.boundary_nodes[b]] = g[b];
}

// Generic damped Newton on the interior unknowns. `eval(u, with_jacobian)`
// returns the full residual (and Jacobian). Throws NonConvergence.
template <class Eval>
void newton(const FESpace& V, Vector& u, Eval eval, const SolverOptions& opts, FieldSolution& out)
{
    const auto& interior = V.interior;
    System sys = eval(u, true);
    double norm = interior_norm(V, sys.R);
    out.residual_history.push_back(norm);
    for (int it = 0; it < opts.max_newton; ++it) {
        if (norm <= opts.tol) {
            out.residual = norm;
            return;
        }
        SparseLU lu;
        lu.factor(restrict_rows_cols(sys.J, interior, interior));
        Vector rI(interior.size());
        for (std::size_t i = 0; i < interior.size(); ++i) rI[i] = -sys.R[interior[i]];
        const Vector du = lu.solve(rI);
        double alpha = 1.0;
        bool accepted = false;
        Vector trial = u;
        for (int k = 0; k <= opts.max_halvings; ++k) {
            trial = u;
            for (std::size_t i = 0; i < interior.size(); ++i) trial[interior[i]] += alpha * du[i];
            double tn = std::numeric_limits<double>::infinity();
            try {
                tn = interior_norm(V, eval(trial, false).R);
            } catch (const LawViolation&) {
                // Overshooting trial step; shorten it. Accepted iterates are still checked.
                if (k == opts.max_halvings) throw;
            }
            if (std::isfinite(tn) && (tn < norm || tn <= opts.tol)) {
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        ++out.iterations;
        if (!accepted) throw NonConvergence("Newton line search failed", norm);
        u = trial;
        sys = eval(u, true);
        norm = interior_norm(V, sys.R);
        out.residual_history.push_back(norm);
    }
    if (norm <= opts.tol) {
        out.residual = norm;
        return;
    }
    throw NonConvergence("Newton iteration limit reached", norm);
}

BoundaryFunction scaled_data(const BoundaryFunction& g, double mean, double theta)
{
    BoundaryFunction out = g;
    out.values = (mean + theta * (g.values.array() - mean)).matrix();
    return out;
}

void check_data(const BoundaryFunction& g, const Mesh& m) { g.validate(m); }

std::string num(double x)
{
    std::ostringstream s;
    s.precision(12);
    s << x;
    return s.str();
}

} // namespace

BoundaryFunction boundary_values(const Mesh& mesh, const ScalarField& f)
{
    BoundaryFunction g;
    g.mesh_id = mesh.id;
    g.values.resize(mesh.num_boundary_nodes());
    for (int b = 0; b < mesh.num_boundary_nodes(); ++b) g.values[b] = f(mesh.nodes[mesh.boundary_nodes[b]]);
    return g;
}

BoundaryFunction boundary_values(const Mesh& mesh, const Vector& values)
{
    NLSTAB_REQUIRE(values.size() == mesh.num_boundary_nodes(), InvalidArgument,
                   "boundary_values: size does not match the boundary nodes");
    BoundaryFunction g;
    g.mesh_id = mesh.id;
    g.values = values;
    return g;
}

double check_ellipticity(const CoefficientMatrixField& a, const Mesh& mesh)
{
    const SimplexRule& rule = assembly_rule(mesh.dim);
    double floor = std::numeric_limits<double>::infinity();
    auto visit = [&](const Point& x) {
        const Mat3 ax = a(x);
        const auto blk = ax.topLeftCorner(mesh.dim, mesh.dim);
        NLSTAB_REQUIRE((blk - blk.transpose()).cwiseAbs().maxCoeff() == 0.0, InvalidArgument,
                       "check_ellipticity: coefficient matrix is not symmetric");
        floor = std::min(floor, min_eigenvalue(ax, mesh.dim));
    };
    if (a.constant) {
        visit(Point::Zero());
    } else {
        for (int c = 0; c < mesh.num_cells(); ++c)
            for (std::size_t q = 0; q < rule.size(); ++q) {
                Point x = Point::Zero();
                for (int i = 0; i <= mesh.dim; ++i) x += rule.bary[q][i] * mesh.nodes[mesh.cells[c][i]];
                visit(x);
            }
    }
    NLSTAB_REQUIRE(floor > 0, InvalidArgument,
                   "check_ellipticity: ellipticity floor " + std::to_string(floor) + " is not positive");
    return floor;
}

FieldSolution make_solution(const DirichletSolver& op, const Vector& u, const BoundaryFunction& g,
                            const std::string& tag, const Vector* load)
{
    FieldSolution sol;
    sol.mesh = op.space().mesh;
    sol.u = u;
    sol.flux = op.flux(u, load);
    sol.dirichlet = g;
    sol.tag = tag;
    Vector r = op.matrix() * u;
    if (load) r -= *load;
    sol.residual = interior_norm(op.space(), r);
    sol.residual_history.push_back(sol.residual);
    return sol;
}

FieldSolution solve_quasilinear(const CoefficientMatrixField& a, const QuasilinearLaw& gamma, const DriftLaw& drift,
                                const BoundaryFunction& g, std::shared_ptr<const Mesh> mesh, const ScalarField& source,
                                const SolverOptions& opts)
{
    check_data(g, *mesh);
    const auto V = FESpace::of(mesh);
    const double c_floor = check_ellipticity(a, *mesh);
    const SimplexRule& rule = assembly_rule(V->dim);
    const int nv = V->dim + 1;
    const Vector load = source ? assemble_load(*V, source) : Vector::Zero(V->num_nodes());
    const Mat3 a_const = a.constant ? a(Point::Zero()) : Mat3::Zero();

    auto eval = [&](const Vector& u, bool jac) {
        System sys;
        sys.R = -load;
        std::vector<Eigen::Triplet<double>> t;
        if (jac) t.reserve(static_cast<std::size_t>(V->num_cells()) * nv * nv);
        for (int c = 0; c < V->num_cells(); ++c) {
            const auto& cell = mesh->cells[c];
            const auto& gr = V->grads[c];
            const Point gu = V->gradient(c, u);
            const double h = V->cell_diameter(c);
            Eigen::Matrix4d Jc = Eigen::Matrix4d::Zero();
            for (std::size_t q = 0; q < rule.size(); ++q) {
                const auto& lam = rule.bary[q];
                const Point x = V->physical(c, lam);
                const double uq = V->interpolate(c, lam, u);
                const double gq = gamma.gamma(uq);
                if (!(gq > gamma.positivity_floor))
                    throw LawViolation("gamma(" + std::to_string(uq) + ") = " + std::to_string(gq) +
                                       " is not positive at a visited point");
                const Mat3 ax = a.constant ? a_const : a(x);
                const Point agu = ax * gu;
                const Point Dq = drift.zero ? Point(Point::Zero()) : drift.D(x, uq);
                if (!drift.zero && Dq.norm() * h / (2.0 * gq * c_floor) > opts.peclet_limit)
                    throw InvalidArgument("cell Peclet number exceeds " + std::to_string(opts.peclet_limit) +
                                          "; refine the mesh");
                const double w = V->vol[c] * rule.weights[q];
                const double Dgu = Dq.dot(gu);
                for (int i = 0; i < nv; ++i) sys.R[cell[i]] += w * (gq * agu.dot(gr[i]) + Dgu * lam[i]);
                if (!jac) continue;
                const double dg = gamma.dgamma(uq);
                const Point dD = drift.zero ? Point(Point::Zero()) : drift.dDdt(x, uq);
                const double dDgu = dD.dot(gu);
                for (int i = 0; i < nv; ++i)
                    for (int j = 0; j < nv; ++j)
                        Jc(i, j) += w * (gq * (ax * gr[j]).dot(gr[i]) + dg * lam[j] * agu.dot(gr[i]) +
                                         Dq.dot(gr[j]) * lam[i] + dDgu * lam[j] * lam[i]);
            }
            if (jac)
                for (int i = 0; i < nv; ++i)
                    for (int j = 0; j < nv; ++j) t.emplace_back(cell[i], cell[j], Jc(i, j));
        }
        if (jac) {
            sys.J.resize(V->num_nodes(), V->num_nodes());
            sys.J.setFromTriplets(t.begin(), t.end());
        }
        return sys;
    };

    FieldSolution sol;
    sol.mesh = mesh;
    sol.tag = "quasilinear";
    sol.params = {{"gamma", gamma.name}, {"drift", drift.name}, {"a", a.name}};
    const double mean = g.values.size() ? g.values.mean() : 0.0;
    Vector u = Vector::Constant(V->num_nodes(), mean);

    // Amplitude continuation from the constant solution u = mean.
    double theta = 0.0, step = 1.0;
    Vector u_prev = u;
    while (theta < 1.0) {
        const double target = std::min(1.0, theta + step);
        Vector trial = u_prev;
        apply_boundary(*mesh, trial, scaled_data(g, mean, target).values);
        FieldSolution attempt;
        try {
            newton(*V, trial, eval, opts, attempt);
        } catch (const NonConvergence& e) {
            step *= 0.5;
            if (step < opts.min_continuation_step)
                throw NonConvergence("quasilinear continuation exhausted at amplitude " + num(theta),
                                     e.last_residual());
            continue;
        }
        ++sol.continuation_steps;
        sol.iterations += attempt.iterations;
        sol.residual_history.insert(sol.residual_history.end(), attempt.residual_history.begin(),
                                    attempt.residual_history.end());
        sol.residual = attempt.residual;
        u_prev = trial;
        theta = target;
        step = std::min(1.0, 2.0 * step);
    }
    sol.u = u_prev;
    const System fin = eval(sol.u, false);
    sol.flux.resize(mesh->num_boundary_nodes());
    for (int b = 0; b < mesh->num_boundary_nodes(); ++b) sol.flux[b] = fin.R[mesh->boundary_nodes[b]];
    sol.dirichlet = g;
    return sol;
}

FieldSolution solve_semilinear(const SemilinearLaw& G, const BoundaryFunction& g, std::shared_ptr<const Mesh> mesh,
                               const ScalarField& source, const SolverOptions& opts)
{
    check_data(g, *mesh);
    const auto V = FESpace::of(mesh);
    const SpMat K = assemble_diffusion(*V, CoefficientMatrixField::identity());
    const Vector load = source ? assemble_load(*V, source) : Vector::Zero(V->num_nodes());

    auto eval = [&](const Vector& u, bool jac) {
        System sys;
        Vector Gu(u.size()), dGu(u.size());
        for (Eigen::Index v = 0; v < u.size(); ++v) {
            Gu[v] = G.G(u[v]);
            if (jac) {
                dGu[v] = G.dG(u[v]);
                if (dGu[v] < -1e-12)
                    throw LawViolation("G'(" + std::to_string(u[v]) + ") = " + std::to_string(dGu[v]) +
                                       " < 0 at a Newton iterate");
            }
        }
        sys.R = K * u + V->lumped_mass.cwiseProduct(Gu) - load;
        if (jac) sys.J = K + lumped_diagonal(*V, dGu);
        return sys;
    };

    FieldSolution sol;
    sol.mesh = mesh;
    sol.tag = "semilinear";
    sol.params = {{"G", G.name}};
    // Harmonic extension of the data as the starting point.
    DirichletSolver harmonic(V, K);
    Vector u = harmonic.solve(g.values);
    newton(*V, u, eval, opts, sol);
    sol.u = u;
    const System fin = eval(u, false);
    sol.flux.resize(mesh->num_boundary_nodes());
    for (int b = 0; b < mesh->num_boundary_nodes(); ++b) sol.flux[b] = fin.R[mesh->boundary_nodes[b]];
    sol.dirichlet = g;
    sol.continuation_steps = 1;
    return sol;
}

std::shared_ptr<const DirichletSolver> linear_operator(const LinearSpec& spec, std::shared_ptr<const FESpace> V,
                                                       const SolverOptions& opts)
{
    NLSTAB_REQUIRE(spec.s > 0, InvalidArgument, "linear operator: scale s must be positive");
    check_ellipticity(spec.a, *V->mesh);
    SpMat A = spec.s * assemble_diffusion(*V, spec.a);
    if (spec.B) {
        const double pe = peclet_number(*V, spec.a, spec.s, spec.B);
        if (pe > opts.peclet_limit)
            throw InvalidArgument("cell Peclet number " + std::to_string(pe) + " exceeds " +
                                  std::to_string(opts.peclet_limit) + "; refine the mesh");
        const SpMat C = assemble_drift(*V, spec.B);
        if (spec.adjoint)
            A += SpMat(C.transpose());
        else
            A += C;
    }
    return std::make_shared<const DirichletSolver>(std::move(V), std::move(A));
}

std::shared_ptr<const DirichletSolver> schrodinger_operator(const Vector& q, std::shared_ptr<const FESpace> V)
{
    NLSTAB_REQUIRE(q.size() == V->num_nodes(), InvalidArgument, "schrodinger: potential must be nodal");
    NLSTAB_REQUIRE(q.allFinite(), InvalidArgument, "schrodinger: potential must be finite");
    NLSTAB_REQUIRE(q.minCoeff() >= 0.0, InvalidArgument, "schrodinger: potential must be non-negative");
    SpMat A = assemble_diffusion(*V, CoefficientMatrixField::identity()) + lumped_diagonal(*V, q);
    return std::make_shared<const DirichletSolver>(std::move(V), std::move(A));
}

FieldSolution solve_linear(const LinearSpec& spec, const BoundaryFunction& g, std::shared_ptr<const Mesh> mesh,
                           const ScalarField& source, const SolverOptions& opts)
{
    check_data(g, *mesh);
    const auto op = linear_operator(spec, FESpace::of(mesh), opts);
    Vector load;
    if (source) load = assemble_load(op->space(), source);
    const Vector u = op->solve(g.values, source ? &load : nullptr);
    FieldSolution sol = make_solution(*op, u, g, spec.adjoint ? "linear-adjoint" : "linear", source ? &load : nullptr);
    sol.params = {{"s", num(spec.s)}, {"a", spec.a.name}, {"drift", spec.B ? "given" : "zero"}};
    return sol;
}

FieldSolution solve_schrodinger(const Vector& q, const BoundaryFunction& g, std::shared_ptr<const Mesh> mesh,
                                const ScalarField& source)
{
    check_data(g, *mesh);
    const auto op = schrodinger_operator(q, FESpace::of(mesh));
    Vector load;
    if (source) load = assemble_load(op->space(), source);
    const Vector u = op->solve(g.values, source ? &load : nullptr);
    FieldSolution sol = make_solution(*op, u, g, "schrodinger", source ? &load : nullptr);
    sol.params = {{"q_max", num(q.maxCoeff())}};
    return sol;
}

FieldSolution solve_schrodinger(const ScalarField& q, const BoundaryFunction& g, std::shared_ptr<const Mesh> mesh,
                                const ScalarField& source)
{
    return solve_schrodinger(interpolate(*mesh, q), g, mesh, source);
}

} // namespace nlstab::pde
