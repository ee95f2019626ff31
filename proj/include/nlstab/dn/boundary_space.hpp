#pragma once

#include "nlstab/geometry/mesh.hpp"

#include <Eigen/Sparse>

#include <memory>

namespace nlstab::dn {

/// P1 functions on the boundary surface (curve in 2D) of a mesh, with the
/// spectral H^{1/2} / H^{-1/2} norms of the boundary Laplace-Beltrami
/// operator: ||f||^2_{+} = sum_k (1 + mu_k)^{1/2} |<f, phi_k>_M|^2 and
/// ||l||^2_{-} = sum_k (1 + mu_k)^{-1/2} |l(phi_k)|^2, where (mu_k, phi_k) solve
/// S phi = mu M phi with phi_k M-orthonormal.
///
/// Vectors of "functions" are nodal values, vectors of "functionals" are
/// coefficients against the boundary hat functions (fluxes); both are in
/// boundary_index order.
class BoundarySpace {
public:
    explicit BoundarySpace(std::shared_ptr<const geometry::Mesh> mesh);

    /// Shared instance per mesh id; the eigen-decomposition is computed once.
    static std::shared_ptr<const BoundarySpace> of(const std::shared_ptr<const geometry::Mesh>& mesh);

    [[nodiscard]] int size() const { return static_cast<int>(mass_.rows()); }
    [[nodiscard]] const Matrix& mass() const { return mass_; }
    [[nodiscard]] const Matrix& stiffness() const { return stiff_; }
    [[nodiscard]] const Vector& eigenvalues() const { return mu_; }
    [[nodiscard]] const Matrix& eigenvectors() const { return phi_; }
    [[nodiscard]] const geometry::Mesh& mesh() const { return *mesh_; }

    /// Throws InvalidArgument when order is not +1/2 or -1/2.
    [[nodiscard]] double fractional_norm(const Vector& v, double order) const;
    [[nodiscard]] double norm_plus(const Vector& f) const;
    [[nodiscard]] double norm_minus(const Vector& functional) const;
    /// Gram matrix F^T G_+ F of the columns of F (functions).
    [[nodiscard]] Matrix gram_plus(const Matrix& F) const;
    /// Riesz map H^{1/2} -> H^{-1/2}: the functional g -> <f, g>_{+}.
    [[nodiscard]] Vector riesz(const Vector& f) const;
    /// Surface integral of a nodal function (M times the vector, summed).
    [[nodiscard]] double integral(const Vector& f) const;

private:
    std::shared_ptr<const geometry::Mesh> mesh_;
    Matrix mass_;
    Matrix stiff_;
    Vector mu_;
    Matrix phi_;
    Matrix plus_op_;   // M Phi diag((1+mu)^{1/2}) Phi^T M
    Matrix minus_op_;  // Phi diag((1+mu)^{-1/2}) Phi^T
};

} // namespace nlstab::dn
