#pragma once

#include "nlstab/dn/dn_map.hpp"
#include "nlstab/singular/singular_data.hpp"

namespace nlstab::recon {

/// Both sides of the pairing identity for one boundary datum g.
///
/// Condition (i), with gamma = gamma_1(lambda) - gamma_2(lambda):
///   <(L1 - L2) g, g> = gamma int a grad w1 . grad w2* + int (D1 - D2) . grad w1 w2*,
/// where w1 solves the first linearized problem and w2* the adjoint of the
/// second, both with data g.
/// Condition (ii): <(L1 - L2) g, g> = int (q1 - q2) w1 w2.
struct PairingSample {
    double lambda = 0.0;
    double tau = 0.0;
    double boundary = 0.0;
    double volume = 0.0;
    /// |boundary - volume|.
    double discrepancy = 0.0;
    /// discrepancy <= rel_tol (|boundary| + |volume|) + abs_tol.
    bool consistent = false;
};

/// Linearizations of two problems at the same background on the same (mesh,
/// S), factored once for repeated pairings.
class PairingContext {
public:
    /// Throws InvalidArgument when the problems have different conditions or
    /// coefficient matrices.
    PairingContext(const pde::ProblemSpec& p1, const pde::ProblemSpec& p2, const dn::Background& background,
                   std::shared_ptr<const geometry::Mesh> mesh, const geometry::BoundaryPatch& S,
                   const pde::SolverOptions& opts = {});

    /// g in boundary_index order; must vanish outside S.
    [[nodiscard]] PairingSample sample(const Vector& g, double tau = 0.0) const;
    /// Singular data on the same mesh.
    [[nodiscard]] PairingSample sample(const singular::SingularData& data) const;

    [[nodiscard]] const dn::LinearizedDN& first() const { return op1_; }
    [[nodiscard]] const dn::LinearizedDN& second() const { return op2_; }

    double rel_tol = 1e-6;
    double abs_tol = 1e-10;

private:
    pde::ProblemSpec p1_, p2_;
    dn::LinearizedDN op1_, op2_;
    std::shared_ptr<const pde::DirichletSolver> adjoint2_;
    std::vector<char> mask_;
};

PairingSample pairing(const pde::ProblemSpec& p1, const pde::ProblemSpec& p2, const dn::Background& background,
                      const geometry::DomainTriple& dom, const singular::SingularData& g,
                      const pde::SolverOptions& opts = {});

} // namespace nlstab::recon
