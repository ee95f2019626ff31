#include "nlstab/pde/linear_solver.hpp"

#include <Eigen/UmfPackSupport>

#include <cmath>
#include <sstream>

namespace nlstab::pde {

namespace {

class UmfLU : public Eigen::UmfPackLU<SpMat> {
public:
    [[nodiscard]] double rcond() const { return this->m_umfpackInfo[UMFPACK_RCOND]; }
};

} // namespace

struct SparseLU::Impl {
    SpMat matrix;  // UmfPackLU refers to the factored matrix during solves
    UmfLU lu;
};

SparseLU::SparseLU() : impl_(std::make_unique<Impl>()) {}
SparseLU::~SparseLU() = default;
SparseLU::SparseLU(SparseLU&&) noexcept = default;
SparseLU& SparseLU::operator=(SparseLU&&) noexcept = default;

void SparseLU::factor(const SpMat& A)
{
    NLSTAB_REQUIRE(A.rows() == A.cols(), InvalidArgument, "SparseLU: matrix must be square");
    rows_ = static_cast<int>(A.rows());
    if (rows_ == 0) return;
    impl_->matrix = A;
    // Direct solves only: refinement steps would triple the cost of every solve.
    impl_->lu.umfpackControl()(UMFPACK_IRSTEP) = 0;
    impl_->lu.compute(impl_->matrix);
    if (impl_->lu.info() != Eigen::Success) {
        std::ostringstream msg;
        msg << "sparse factorization failed (matrix numerically singular, coercivity lost?)";
        throw SolverError(msg.str());
    }
    const double rc = impl_->lu.rcond();
    if (!(rc > 1e-15)) {
        std::ostringstream msg;
        msg << "sparse factorization is singular: reciprocal condition estimate " << rc;
        throw SolverError(msg.str());
    }
}

Vector SparseLU::solve(const Vector& b) const
{
    if (rows_ == 0) return Vector(0);
    Vector x = impl_->lu.solve(b);
    NLSTAB_REQUIRE(x.allFinite(), SolverError, "sparse solve produced non-finite values");
    return x;
}

Matrix SparseLU::solve(const Matrix& B) const
{
    if (rows_ == 0) return Matrix(0, B.cols());
    Matrix X = impl_->lu.solve(B);
    NLSTAB_REQUIRE(X.allFinite(), SolverError, "sparse solve produced non-finite values");
    return X;
}

SpMat restrict_rows_cols(const SpMat& A, const std::vector<int>& rows, const std::vector<int>& cols)
{
    std::vector<int> rmap(A.rows(), -1), cmap(A.cols(), -1);
    for (std::size_t i = 0; i < rows.size(); ++i) rmap[rows[i]] = static_cast<int>(i);
    for (std::size_t j = 0; j < cols.size(); ++j) cmap[cols[j]] = static_cast<int>(j);
    std::vector<Eigen::Triplet<double>> t;
    for (int k = 0; k < A.outerSize(); ++k)
        for (SpMat::InnerIterator it(A, k); it; ++it) {
            const int r = rmap[it.row()], c = cmap[it.col()];
            if (r >= 0 && c >= 0) t.emplace_back(r, c, it.value());
        }
    SpMat B(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
    B.setFromTriplets(t.begin(), t.end());
    B.makeCompressed();
    return B;
}

DirichletSolver::DirichletSolver(std::shared_ptr<const FESpace> V, SpMat A) : V_(std::move(V)), A_(std::move(A))
{
    const auto& interior = V_->interior;
    const auto& boundary = V_->mesh->boundary_nodes;
    std::vector<int> all(V_->num_nodes());
    for (int i = 0; i < V_->num_nodes(); ++i) all[i] = i;
    lu_.factor(restrict_rows_cols(A_, interior, interior));
    A_ib_ = restrict_rows_cols(A_, interior, boundary);
    A_b_ = restrict_rows_cols(A_, boundary, all);
}

Vector DirichletSolver::solve(const Vector& g, const Vector* load) const
{
    const auto& interior = V_->interior;
    const auto& boundary = V_->mesh->boundary_nodes;
    NLSTAB_REQUIRE(g.size() == static_cast<Eigen::Index>(boundary.size()), InvalidArgument,
                   "DirichletSolver: boundary data has the wrong size");
    Vector rhs = -(A_ib_ * g);
    if (load)
        for (std::size_t i = 0; i < interior.size(); ++i) rhs[i] += (*load)[interior[i]];
    const Vector ui = lu_.solve(rhs);
    Vector u(V_->num_nodes());
    for (std::size_t i = 0; i < interior.size(); ++i) u[interior[i]] = ui[i];
    for (std::size_t b = 0; b < boundary.size(); ++b) u[boundary[b]] = g[b];
    return u;
}

Matrix DirichletSolver::solve_many(const Matrix& G) const
{
    const auto& interior = V_->interior;
    const auto& boundary = V_->mesh->boundary_nodes;
    const Matrix rhs = -(A_ib_ * G);
    const Matrix ui = lu_.solve(rhs);
    Matrix U(V_->num_nodes(), G.cols());
    for (std::size_t i = 0; i < interior.size(); ++i) U.row(interior[i]) = ui.row(i);
    for (std::size_t b = 0; b < boundary.size(); ++b) U.row(boundary[b]) = G.row(b);
    return U;
}

Vector DirichletSolver::flux(const Vector& u, const Vector* load) const
{
    Vector f = A_b_ * u;
    if (load) {
        const auto& boundary = V_->mesh->boundary_nodes;
        for (std::size_t b = 0; b < boundary.size(); ++b) f[b] -= (*load)[boundary[b]];
    }
    return f;
}

} // namespace nlstab::pde
