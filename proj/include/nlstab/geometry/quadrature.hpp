#pragma once

#include <array>
#include <vector>

namespace nlstab::geometry {

/// Quadrature on the reference simplex in barycentric form. Weights sum to 1,
/// so an integral over a physical simplex is volume * sum(w_q f(x_q)).
struct SimplexRule {
    int dim = 0;
    std::vector<std::array<double, 4>> bary;
    std::vector<double> weights;

    [[nodiscard]] std::size_t size() const { return weights.size(); }
};

/// Gauss-Legendre nodes and weights on [0, 1].
void gauss_legendre_01(int npts, std::vector<double>& nodes, std::vector<double>& weights);

/// Positive degree-2 rule (3 points in 2D, 4 points in 3D). Used for P1 assembly.
const SimplexRule& assembly_rule(int dim);

/// Collapsed-coordinate tensor Gauss rule with `order` points per direction.
/// Exact for polynomials of degree 2*order - 1 - dim + 1 or better; used for
/// error norms and integrals of near-singular kernels.
const SimplexRule& accurate_rule(int dim, int order);

} // namespace nlstab::geometry
