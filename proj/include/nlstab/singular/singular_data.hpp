#pragma once

#include "nlstab/singular/kernel.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace nlstab::singular {

enum class DataKind {
    /// g1 = P(., y_tau) - w0 with w0 the a-harmonic sweep of P on Ω'.
    G1,
    /// g2_k = d_k H(., y_tau) - v_k with v_k the harmonic sweep of d_k H on Ω' (n = 3, a = I).
    G2,
};

std::string kind_name(DataKind kind);

/// Singular Dirichlet data on the Ω boundary, supported in S'.
struct SingularData {
    DataKind kind = DataKind::G1;
    /// Component 1..n for G2, 0 for G1.
    int k = 0;
    double tau = 0.0;
    Point y = Point::Zero();
    geometry::BoundaryFunction g;
    /// The sweep field (w0 or v_k) on the Ω' nodes.
    Vector sweep;
    /// Dirichlet data of the sweep (P or d_k H) on the Ω' boundary, boundary_index order.
    Vector leading_prime;
    SingularKernel H;
    pde::CoefficientMatrixField a;

    /// The singular part of solutions with this data: H for G1, d_k H for G2.
    [[nodiscard]] double leading(const Point& x) const;
    [[nodiscard]] Point leading_gradient(const Point& x) const;
};

/// 4 times the mesh size at x0 (below it a singularity at distance tau is under-resolved).
double resolution_floor(const geometry::DomainTriple& dom);

/// Geometric schedule delta/2, delta/4, ... down to max(4 h(x0), delta/32).
std::vector<double> tau_schedule(const geometry::DomainTriple& dom);

/// Factored -div(a grad .) on Ω' used by the sweeps (reusable across tau).
std::shared_ptr<const pde::DirichletSolver> sweep_operator(const geometry::DomainTriple& dom,
                                                           const pde::CoefficientMatrixField& a);

/// Requires 0 < tau < delta. `sweep` must come from sweep_operator(dom, a) (built when null).
SingularData make_g1(const geometry::DomainTriple& dom, double tau,
                     const pde::CoefficientMatrixField& a = pde::CoefficientMatrixField::identity(),
                     const ParametrixOptions& popts = {},
                     std::shared_ptr<const pde::DirichletSolver> sweep = nullptr);

/// Requires n = 3, a = identity, k in 1..3. Throws Unsupported otherwise.
SingularData make_g2(const geometry::DomainTriple& dom, double tau, int k,
                     const pde::CoefficientMatrixField& a = pde::CoefficientMatrixField::identity(),
                     std::shared_ptr<const pde::DirichletSolver> sweep = nullptr);

/// Operator for a singular solve on Ω: -s div(a grad w) + B.grad w (or the
/// adjoint -s div(a grad w) - div(B w)), or -Laplace w + q w when
/// `schrodinger` is set.
struct SingularProblem {
    double s = 1.0;
    pde::VectorField B;
    bool adjoint = false;
    bool schrodinger = false;
    /// Nodal potential on Ω (empty = zero) for the Schrödinger variant.
    Vector q;
};

struct DecompositionRow {
    double tau = 0.0;
    double h_l2 = 0.0;
    double h_h1 = 0.0;
    /// H1 norm of z = w - H (G1) or J = w - d_k H (G2).
    double remainder_h1 = 0.0;
    double data_h12 = 0.0;
    double ratio = 0.0;
    bool resolved = true;
};

struct SingularSolveResult {
    pde::FieldSolution solution;
    DecompositionRow row;
};

SingularSolveResult singular_solve(const geometry::DomainTriple& dom, const SingularData& data,
                                   const SingularProblem& problem = {},
                                   const pde::CoefficientMatrixField& a = pde::CoefficientMatrixField::identity(),
                                   const pde::SolverOptions& opts = {});

/// The factored operator of a singular problem on Ω.
std::shared_ptr<const pde::DirichletSolver> problem_operator(const geometry::DomainTriple& dom,
                                                             const SingularProblem& problem,
                                                             const pde::CoefficientMatrixField& a,
                                                             const pde::SolverOptions& opts = {});

/// singular_solve with an operator from problem_operator.
SingularSolveResult singular_solve(const geometry::DomainTriple& dom, const SingularData& data,
                                   const pde::DirichletSolver& op, const std::string& tag);

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    int points = 0;
};

/// Least-squares line y = slope x + intercept.
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);
/// Least-squares line in log-log coordinates.
LineFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

struct DecompositionReport {
    DataKind kind = DataKind::G1;
    int k = 0;
    int dim = 0;
    std::vector<DecompositionRow> rows;
    /// log ||g||_{H^1/2} against log tau.
    LineFit data_fit;
    /// ||g||^2_{H^1/2} against |ln tau| (the n = 2 logarithmic growth).
    LineFit data_log_fit;
    /// log ||remainder||_{H^1} against log tau.
    LineFit remainder_fit;
    /// ratio ||remainder|| / ||H|| decreases with tau over the resolved rows.
    bool ratio_monotone = false;
};

/// Builds the data and solves for every tau (parallel over tau, rows in tau
/// order). Requires at least 4 tau values.
DecompositionReport decomposition_sweep(const geometry::DomainTriple& dom, const std::vector<double>& taus,
                                        DataKind kind, int k, const SingularProblem& problem = {},
                                        const pde::CoefficientMatrixField& a = pde::CoefficientMatrixField::identity(),
                                        int workers = 1);

/// CSV rows (tau, ||H||_L2, ||H||_H1, ||z||_H1, ||g||_H1/2, ratio, resolved) and a
/// JSON fit summary next to it (same stem). Returns the paths written.
std::vector<std::filesystem::path> write_decomposition(const DecompositionReport& rep,
                                                       const std::filesystem::path& csv_path);

} // namespace nlstab::singular
