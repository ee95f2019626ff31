#pragma once

#include "nlstab/geometry/mesh.hpp"
#include "nlstab/geometry/quadrature.hpp"
#include "nlstab/pde/laws.hpp"

#include <Eigen/Sparse>

#include <functional>
#include <memory>

namespace nlstab::pde {

using SpMat = Eigen::SparseMatrix<double>;
using ScalarField = std::function<double(const Point&)>;
using VectorField = std::function<Point(const Point&)>;

/// Continuous P1 space on a simplicial mesh. All boundary nodes are Dirichlet
/// nodes; `interior` lists the free ones.
struct FESpace {
    std::shared_ptr<const geometry::Mesh> mesh;
    int dim = 2;
    /// Gradients of the barycentric coordinates, per cell.
    std::vector<std::array<Point, 4>> grads;
    std::vector<double> vol;
    /// Row sums of the consistent mass matrix.
    Vector lumped_mass;
    std::vector<int> interior;
    /// Interior numbering per node, -1 on the boundary.
    std::vector<int> interior_index;

    explicit FESpace(std::shared_ptr<const geometry::Mesh> m);

    [[nodiscard]] int num_nodes() const { return mesh->num_nodes(); }
    [[nodiscard]] int num_cells() const { return mesh->num_cells(); }
    [[nodiscard]] Point physical(int cell, const std::array<double, 4>& bary) const;
    [[nodiscard]] double interpolate(int cell, const std::array<double, 4>& bary, const Vector& u) const;
    [[nodiscard]] Point gradient(int cell, const Vector& u) const;
    [[nodiscard]] double cell_diameter(int cell) const;

    /// Shared instance per mesh id (meshes are immutable once finalized).
    static std::shared_ptr<const FESpace> of(const std::shared_ptr<const geometry::Mesh>& m);
};

/// int weight(x) a(x) grad phi_j . grad phi_i (weight defaults to 1).
SpMat assemble_diffusion(const FESpace& V, const CoefficientMatrixField& a, const ScalarField& weight = {});
/// int (B(x) . grad phi_j) phi_i.
SpMat assemble_drift(const FESpace& V, const VectorField& B);
/// Consistent mass matrix, optionally weighted.
SpMat assemble_mass(const FESpace& V, const ScalarField& weight = {});
/// Diagonal matrix of lumped mass times nodal values.
SpMat lumped_diagonal(const FESpace& V, const Vector& nodal);
/// Load vector int f phi_i with the accurate rule of the given order.
Vector assemble_load(const FESpace& V, const ScalarField& f, int order = 4);

/// L2 norm of (u_h - exact) with the accurate rule (exact may be empty -> norm of u_h).
double l2_error(const FESpace& V, const Vector& u, const ScalarField& exact = {}, int order = 4);
/// H1 norm (L2 + gradient) of the discrete field.
double h1_norm(const FESpace& V, const Vector& u);
/// L2 and H1 norms of (u_h - f) with the accurate rule of the given order;
/// an empty u measures f alone.
std::pair<double, double> h1_error(const FESpace& V, const Vector& u, const ScalarField& f, const VectorField& grad_f,
                                   int order = 4);
/// Energy-type pairing int a grad u . grad v.
double energy_pairing(const FESpace& V, const CoefficientMatrixField& a, const Vector& u, const Vector& v);

/// Nodal interpolation of a function.
Vector interpolate(const geometry::Mesh& m, const ScalarField& f);

/// Smallest eigenvalue of the leading dim x dim block of a symmetric matrix.
double min_eigenvalue(const Mat3& a, int dim);

/// Maximum cell Peclet number |B| h / (2 s lambda_min(a)) over the assembly points.
double peclet_number(const FESpace& V, const CoefficientMatrixField& a, double s, const VectorField& B);

} // namespace nlstab::pde
