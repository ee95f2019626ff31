#pragma once

#include "nlstab/geometry/domain.hpp"
#include "nlstab/pde/linear_solver.hpp"

#include <map>
#include <string>

namespace nlstab::pde {

struct SolverOptions {
    /// Absolute tolerance on the Euclidean norm of the interior residual.
    double tol = 1e-10;
    int max_newton = 60;
    int max_halvings = 40;
    /// Smallest continuation step in boundary-data amplitude.
    double min_continuation_step = 1.0 / 1024;
    double peclet_limit = 2.0;
};

/// A discrete solution together with its variational boundary flux: the
/// boundary rows of the residual of the equation it solves, i.e. the
/// functional phi_i -> <weight d_nu u, phi_i> for the boundary hat functions.
struct FieldSolution {
    std::shared_ptr<const geometry::Mesh> mesh;
    Vector u;
    Vector flux;
    geometry::BoundaryFunction dirichlet;
    double residual = 0.0;
    int iterations = 0;
    int continuation_steps = 0;
    std::vector<double> residual_history;
    /// Which equation this solves ("quasilinear", "semilinear", "linear", ...).
    std::string tag;
    std::map<std::string, std::string> params;
};

/// Minimum eigenvalue of a over the assembly points of `mesh`.
/// Throws InvalidArgument when a is not symmetric or the floor is <= 0.
double check_ellipticity(const CoefficientMatrixField& a, const geometry::Mesh& mesh);

/// -div(a gamma(u) grad u) + D(x,u).grad u = f, u = g on the boundary.
FieldSolution solve_quasilinear(const CoefficientMatrixField& a, const QuasilinearLaw& gamma, const DriftLaw& drift,
                                const geometry::BoundaryFunction& g, std::shared_ptr<const geometry::Mesh> mesh,
                                const ScalarField& source = {}, const SolverOptions& opts = {});

/// -Laplace u + G(u) = f, u = g on the boundary (G evaluated with a lumped mass).
FieldSolution solve_semilinear(const SemilinearLaw& G, const geometry::BoundaryFunction& g,
                               std::shared_ptr<const geometry::Mesh> mesh, const ScalarField& source = {},
                               const SolverOptions& opts = {});

/// Linear operator data for -s div(a grad w) + B.grad w (or its adjoint
/// -s div(a grad w) - div(B w)).
struct LinearSpec {
    CoefficientMatrixField a = CoefficientMatrixField::identity();
    double s = 1.0;
    VectorField B;  // empty = zero drift
    bool adjoint = false;
};

/// Assembles and factors the operator once, for repeated Dirichlet solves.
std::shared_ptr<const DirichletSolver> linear_operator(const LinearSpec& spec, std::shared_ptr<const FESpace> V,
                                                       const SolverOptions& opts = {});
/// -Laplace w + q w with a nodal potential q >= 0 (lumped).
std::shared_ptr<const DirichletSolver> schrodinger_operator(const Vector& q, std::shared_ptr<const FESpace> V);

FieldSolution solve_linear(const LinearSpec& spec, const geometry::BoundaryFunction& g,
                           std::shared_ptr<const geometry::Mesh> mesh, const ScalarField& source = {},
                           const SolverOptions& opts = {});

FieldSolution solve_schrodinger(const Vector& q, const geometry::BoundaryFunction& g,
                                std::shared_ptr<const geometry::Mesh> mesh, const ScalarField& source = {});
FieldSolution solve_schrodinger(const ScalarField& q, const geometry::BoundaryFunction& g,
                                std::shared_ptr<const geometry::Mesh> mesh, const ScalarField& source = {});

/// Wraps a field computed by a reusable operator into a FieldSolution.
FieldSolution make_solution(const DirichletSolver& op, const Vector& u, const geometry::BoundaryFunction& g,
                            const std::string& tag, const Vector* load = nullptr);

/// Boundary function from a callable evaluated at the boundary nodes.
geometry::BoundaryFunction boundary_values(const geometry::Mesh& mesh, const ScalarField& f);
/// Boundary function from values in boundary_index order.
geometry::BoundaryFunction boundary_values(const geometry::Mesh& mesh, const Vector& values);

} // namespace nlstab::pde
