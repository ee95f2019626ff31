#pragma once

#include "nlstab/geometry/domain.hpp"
#include "nlstab/pde/solvers.hpp"

namespace nlstab::singular {

/// Quadratic form frozen at a base point: rho(x) = ((x - y) . Q (x - y))^{1/2}
/// with Q = a(y)^{-1}, so that the kernel below is an exact fundamental
/// solution of -div(a(y) grad .). At a = identity rho is |x - y|.
struct FrozenMetric {
    Point y = Point::Zero();
    int dim = 3;
    Mat3 a = Mat3::Identity();
    /// a(y)^{-1} (identity on the unused z component for n = 2).
    Mat3 Q = Mat3::Identity();
    /// sqrt(det a(y)) of the leading n x n block.
    double sqrt_det = 1.0;

    FrozenMetric() = default;
    /// Throws InvalidArgument when a(y) is not symmetric positive definite.
    FrozenMetric(const pde::CoefficientMatrixField& a, const Point& y, int dim);

    [[nodiscard]] double rho(const Point& x) const;
};

/// Area of the unit sphere in R^n.
double unit_sphere_area(int n);

/// H(x, y) = -ln(rho) / (2 pi sqrt(det a)) for n = 2 and
/// rho^{2-n} / ((n - 2) d_n sqrt(det a)) for n = 3, with closed-form first
/// and second x-derivatives. Evaluation at x = y throws InvalidArgument.
class SingularKernel {
public:
    SingularKernel() = default;
    SingularKernel(const pde::CoefficientMatrixField& a, const Point& y, int dim);

    [[nodiscard]] double value(const Point& x) const;
    [[nodiscard]] Point gradient(const Point& x) const;
    [[nodiscard]] Mat3 hessian(const Point& x) const;
    /// d H / d x_k (k = 0..n-1) and its gradient.
    [[nodiscard]] double derivative(const Point& x, int k) const;
    [[nodiscard]] Point derivative_gradient(const Point& x, int k) const;

    [[nodiscard]] int dim() const { return metric_.dim; }
    [[nodiscard]] const Point& pole() const { return metric_.y; }
    [[nodiscard]] const FrozenMetric& metric() const { return metric_; }
    /// Normalization 1/d_n for n = 3 and 1/(2 pi) for n = 2.
    [[nodiscard]] double normalization() const;

private:
    FrozenMetric metric_;
    double c_ = 0.0;  // prefactor including sqrt(det a)
    [[nodiscard]] Point r(const Point& x) const;
};

SingularKernel fundamental_h(const pde::CoefficientMatrixField& a, const Point& y, int dim);

/// Integral of a grad H . nu over the sphere (circle) of radius r about the
/// pole, computed with a product Gauss rule of `order` points per angle.
double flux_through_sphere(const SingularKernel& H, const pde::CoefficientMatrixField& a, double r, int order = 64);

struct ParametrixOptions {
    /// Mollification radius in units of the longest edge of the cells
    /// around the pole; values below 1 are rejected as under-resolved.
    double mollify_factor = 2.0;
    /// Residual cells must lie at least this many local mesh sizes from the pole.
    double residual_exclusion = 4.0;
    /// Points per direction of the quadrature used for the load and the residual.
    int quadrature_order = 4;
    int residual_quadrature_order = 7;
    /// Skip the residual evaluation (it dominates the cost for constant a).
    bool compute_residual = true;
};

/// P = H + R on a mesh: R = 0 for constant a, otherwise the discrete solution of
/// div(a grad R) = -div((a - a(y)) grad H), R = 0 on the boundary, with the
/// kernel gradient mollified within the mollification radius of the pole.
struct Parametrix {
    SingularKernel H;
    std::shared_ptr<const geometry::Mesh> mesh;
    /// Nodal values of R (zero for constant a).
    Vector R;
    bool constant_coefficients = true;
    double mollify_radius = 0.0;
    /// Weak residual phi_i -> int a grad P . grad phi_i over interior nodes whose
    /// support is at least residual_exclusion local sizes from the pole
    /// (Euclidean norm), divided by the norm of the magnitudes
    /// int |a grad H| |grad phi_i| over the same nodes.
    double residual = 0.0;
    /// The same relative residual for H alone.
    double residual_of_h = 0.0;
    double residual_abs = 0.0;
    double residual_of_h_abs = 0.0;
    int residual_nodes = 0;

    /// P at a mesh node (H plus the nodal remainder).
    [[nodiscard]] double at_node(int v) const;
    /// Nodal values of P over the whole mesh.
    [[nodiscard]] Vector nodal() const;
};

/// Throws InvalidArgument when the mollification radius is under-resolved.
Parametrix parametrix(const pde::CoefficientMatrixField& a, const Point& y,
                      std::shared_ptr<const geometry::Mesh> mesh, const ParametrixOptions& opts = {});

/// Parametrix for a pipeline pole y: rejected when y lies in the closure of Ω.
Parametrix parametrix(const pde::CoefficientMatrixField& a, const Point& y, const geometry::DomainTriple& dom,
                      const ParametrixOptions& opts = {});

} // namespace nlstab::singular
