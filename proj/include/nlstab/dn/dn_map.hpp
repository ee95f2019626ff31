#pragma once

#include "nlstab/dn/boundary_space.hpp"
#include "nlstab/geometry/domain.hpp"
#include "nlstab/pde/solvers.hpp"

#include <string>
#include <vector>

namespace nlstab::dn {

/// Boundary functional phi_i -> <flux, phi_i> on the boundary hat functions,
/// restricted to test functions supported in a patch S: coefficients at
/// boundary nodes outside S are zero.
struct FluxTrace {
    std::uint64_t mesh_id = 0;
    Vector values;
    /// Per boundary index: 1 when the node lies in S.
    std::vector<char> patch;
    std::string patch_name;

    /// Dual pairing with a nodal boundary function.
    [[nodiscard]] double pair(const Vector& f) const { return values.dot(f); }
};

/// Boundary-index mask of a patch.
std::vector<char> patch_mask(const geometry::Mesh& mesh, const geometry::BoundaryPatch& S);

/// Restricts a full boundary flux (boundary_index order) to S.
FluxTrace restrict_flux(const Vector& flux, const geometry::Mesh& mesh, const geometry::BoundaryPatch& S);

/// Variational flux of the equation the solution was computed for.
FluxTrace neumann_trace(const pde::FieldSolution& sol, const geometry::BoundaryPatch& S);

/// Diffusion part only: phi_i -> int weight a grad u . grad phi_i. Equals the
/// full trace for equations without lower-order terms.
FluxTrace neumann_trace(const pde::FieldSolution& sol, const pde::CoefficientMatrixField& a,
                        const pde::ScalarField& weight, const geometry::BoundaryPatch& S);

/// Nonlinear partial DN map g -> gamma(u_g) d_nu_a u_g |_S (condition (i)) or
/// d_nu u_g |_S (condition (ii), the potential term is part of the flux).
FluxTrace dn_apply(const pde::ProblemSpec& problem, const geometry::BoundaryFunction& g,
                   std::shared_ptr<const geometry::Mesh> mesh, const geometry::BoundaryPatch& S,
                   const pde::SolverOptions& opts = {});

/// Linearization point: the constant lambda, or lambda * chi with a boundary cutoff.
struct Background {
    double lambda = 0.0;
    bool use_cutoff = false;
    geometry::BoundaryFunction chi;

    static Background constant(double lambda);
    static Background with_cutoff(double lambda, geometry::BoundaryFunction chi);
    /// Nodal boundary values lambda (or lambda chi).
    [[nodiscard]] Vector values(const geometry::Mesh& mesh) const;
    [[nodiscard]] std::string describe() const;
};

/// The linearized DN map at a background, factored once for repeated use.
///
/// Condition (i): h -> gamma(lambda) d_nu_a w |_S with
///   -gamma(lambda) div(a grad w) + D(x, lambda).grad w = 0, w = h.
/// Condition (ii): h -> d_nu p |_S with -Laplace p + q p = 0, p = h, where
///   q = G'(v) and v solves the semilinear problem with data lambda chi.
class LinearizedDN {
public:
    LinearizedDN(const pde::ProblemSpec& problem, const Background& background,
                 std::shared_ptr<const geometry::Mesh> mesh, geometry::BoundaryPatch S,
                 const pde::SolverOptions& opts = {});

    [[nodiscard]] FluxTrace apply(const geometry::BoundaryFunction& h) const;
    [[nodiscard]] FluxTrace apply(const Vector& h) const;
    /// Masked fluxes of every column of H (nodal boundary functions).
    [[nodiscard]] Matrix apply_many(const Matrix& H) const;
    /// Interior field for data h.
    [[nodiscard]] Vector solve(const Vector& h) const;

    [[nodiscard]] const pde::DirichletSolver& op() const { return *op_; }
    [[nodiscard]] const geometry::BoundaryPatch& patch() const { return S_; }
    [[nodiscard]] const std::shared_ptr<const geometry::Mesh>& mesh() const { return mesh_; }
    [[nodiscard]] const Background& background() const { return background_; }
    /// Nodal potential q (condition (ii)), empty otherwise.
    [[nodiscard]] const Vector& potential() const { return q_; }
    /// The background semilinear solution v (condition (ii)), empty otherwise.
    [[nodiscard]] const Vector& background_field() const { return v_; }
    /// gamma(lambda) for condition (i), 1 for condition (ii).
    [[nodiscard]] double diffusion_scale() const { return scale_; }
    [[nodiscard]] pde::Condition condition() const { return condition_; }

private:
    std::shared_ptr<const geometry::Mesh> mesh_;
    geometry::BoundaryPatch S_;
    std::vector<char> mask_;
    Background background_;
    pde::Condition condition_;
    double scale_ = 1.0;
    Vector q_;
    Vector v_;
    std::shared_ptr<const pde::DirichletSolver> op_;
};

FluxTrace linearized_dn(const pde::ProblemSpec& problem, const Background& background,
                        const geometry::BoundaryFunction& h, std::shared_ptr<const geometry::Mesh> mesh,
                        const geometry::BoundaryPatch& S, const pde::SolverOptions& opts = {});

struct FrechetReport {
    std::vector<double> eps;
    /// Difference quotients (N(b + eps h) - N(b)) / eps, one column per eps.
    Matrix quotients;
    Vector linear;
    /// H^{-1/2} distance between each quotient and the linearized flux.
    std::vector<double> errors;
    /// errors relative to the H^{-1/2} norm of the linearized flux (absolute when it vanishes).
    std::vector<double> relative;
    /// Estimated round-off/solver floor of each error.
    std::vector<double> floors;
    /// Log-log slope of error vs eps over the points above their floor (NaN when fewer than 3).
    double order = 0.0;
    int points_used = 0;
    /// Every error lies at or below its floor (exactly linear problem).
    bool exact_within_floor = false;
    /// Some perturbed solve failed; the corresponding columns are NaN.
    bool partial = false;
    std::vector<std::string> failures;
};

/// Requires at least 3 eps values.
FrechetReport frechet_ratio(const pde::ProblemSpec& problem, const Background& background,
                            const geometry::BoundaryFunction& h, const std::vector<double>& eps,
                            std::shared_ptr<const geometry::Mesh> mesh, const geometry::BoundaryPatch& S,
                            const pde::SolverOptions& opts = {});

/// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

} // namespace nlstab::dn
