#pragma once

#include "nlstab/dn/dn_map.hpp"

#include <string>

namespace nlstab::dn {

enum class DictionaryKind {
    /// Lowest Dirichlet eigenmodes of the boundary Laplace-Beltrami operator on S
    /// (all boundary eigenmodes when S is the full boundary).
    Eigen,
    /// 1, cos k theta, sin k theta for k <= kmax about the boundary centroid (n = 2).
    Fourier,
};

DictionaryKind parse_dictionary_kind(const std::string& name);
std::string dictionary_kind_name(DictionaryKind k);

/// Boundary functions supported in S (columns, nodal in boundary_index
/// order), orthonormal in the H^{1/2} inner product.
struct Dictionary {
    DictionaryKind kind = DictionaryKind::Eigen;
    std::string patch_name;
    std::uint64_t mesh_id = 0;
    Matrix F;
    /// Keeps the boundary eigen-decomposition alive while the dictionary is in use.
    std::shared_ptr<const BoundarySpace> space;

    [[nodiscard]] int size() const { return static_cast<int>(F.cols()); }
};

/// Eigen kind: `count` modes. Fourier kind: `count` is kmax (2 kmax + 1 columns).
/// Throws InvalidArgument when S has too few nodes or the span is rank deficient.
Dictionary make_dictionary(const std::shared_ptr<const geometry::Mesh>& mesh, const geometry::BoundaryPatch& S,
                           int count, DictionaryKind kind = DictionaryKind::Eigen);

/// H^{1/2}-orthonormalizes the columns of F (Cholesky of the Gram matrix).
Matrix orthonormalize_plus(const BoundarySpace& bs, const Matrix& F);

/// A linearized DN operator sampled on a dictionary.
struct BoundaryOperatorSample {
    Dictionary dict;
    /// Masked flux responses, one column per dictionary function.
    Matrix responses;
    /// H^{1/2} Gram matrix of the dictionary.
    Matrix gram_plus;
    /// Dual Gram matrix on the dictionary span (inverse of gram_plus): the
    /// H^{-1/2}(S) norm of a functional l is sqrt(c^T gram_minus c), c = F^T l.
    Matrix gram_minus;
    double lambda = 0.0;
    std::string background;
    std::string patch_name;

    /// T_ij = <Lambda f_j, f_i>.
    [[nodiscard]] Matrix pairing_matrix() const { return dict.F.transpose() * responses; }
};

BoundaryOperatorSample sample_operator(const LinearizedDN& op, const Dictionary& dict);

/// Dual norm of a flux on the dictionary span (a lower bound of its H^{-1/2}(S) norm).
double dictionary_dual_norm(const FluxTrace& flux, const BoundaryOperatorSample& sample);

/// Operator norm of the sampled operator from the dictionary span (H^{1/2}) to H^{-1/2}(S).
double operator_norm(const BoundaryOperatorSample& sample);

/// Operator norm of the difference of two samples on the same dictionary:
/// sqrt of the largest mu in (T^T G_- T) v = mu G_+ v, T = F^T (R1 - R2).
double measurement_functional(const BoundaryOperatorSample& s1, const BoundaryOperatorSample& s2);

/// Samples both linearized operators at the same background and dictionary.
double measurement_functional(const pde::ProblemSpec& p1, const pde::ProblemSpec& p2, const Background& background,
                              const Dictionary& dict, std::shared_ptr<const geometry::Mesh> mesh,
                              const geometry::BoundaryPatch& S, const pde::SolverOptions& opts = {});

} // namespace nlstab::dn
