#pragma once

#include "nlstab/pde/fe_space.hpp"

#include <memory>

namespace nlstab::pde {

/// Sparse direct LU factorization (UMFPACK). Deterministic for a fixed matrix.
class SparseLU {
public:
    SparseLU();
    ~SparseLU();
    SparseLU(const SparseLU&) = delete;
    SparseLU& operator=(const SparseLU&) = delete;
    SparseLU(SparseLU&&) noexcept;
    SparseLU& operator=(SparseLU&&) noexcept;

    /// Throws SolverError (with the reciprocal condition estimate) when the
    /// matrix is numerically singular.
    void factor(const SpMat& A);
    [[nodiscard]] Vector solve(const Vector& b) const;
    [[nodiscard]] Matrix solve(const Matrix& B) const;
    [[nodiscard]] int rows() const { return rows_; }

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    int rows_ = 0;
};

/// A linear operator assembled on all nodes, solved with Dirichlet data on
/// every boundary node by elimination. The factorization of the interior
/// block is computed once and reused for every right-hand side.
class DirichletSolver {
public:
    DirichletSolver(std::shared_ptr<const FESpace> V, SpMat A);

    /// Full nodal solution for boundary values g (boundary_index order) and
    /// optional full load vector F (int f phi_i).
    [[nodiscard]] Vector solve(const Vector& g, const Vector* load = nullptr) const;
    /// Multiple right-hand sides at once; column j uses boundary data G.col(j).
    [[nodiscard]] Matrix solve_many(const Matrix& G) const;
    /// Variational flux: boundary rows of A u - F.
    [[nodiscard]] Vector flux(const Vector& u, const Vector* load = nullptr) const;

    [[nodiscard]] const SpMat& matrix() const { return A_; }
    [[nodiscard]] const FESpace& space() const { return *V_; }
    [[nodiscard]] std::shared_ptr<const FESpace> space_ptr() const { return V_; }

private:
    std::shared_ptr<const FESpace> V_;
    SpMat A_;
    SpMat A_ib_;
    SpMat A_b_;  // boundary rows, all columns
    SparseLU lu_;
};

/// Interior/boundary row-column blocks of a full operator.
SpMat restrict_rows_cols(const SpMat& A, const std::vector<int>& rows, const std::vector<int>& cols);

} // namespace nlstab::pde
