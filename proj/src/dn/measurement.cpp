#include "nlstab/dn/measurement.hpp"

#include <cmath>

namespace nlstab::dn {

DictionaryKind parse_dictionary_kind(const std::string& name)
{
    if (name == "eigen") return DictionaryKind::Eigen;
    if (name == "fourier") return DictionaryKind::Fourier;
    throw InvalidArgument("unknown dictionary kind '" + name + "' (expected eigen or fourier)");
}

std::string dictionary_kind_name(DictionaryKind k) { return k == DictionaryKind::Eigen ? "eigen" : "fourier"; }

Matrix orthonormalize_plus(const BoundarySpace& bs, const Matrix& F)
{
    const Matrix G = bs.gram_plus(F);
    Eigen::SelfAdjointEigenSolver<Matrix> es(G);
    const double top = es.eigenvalues().maxCoeff();
    NLSTAB_REQUIRE(top > 0 && es.eigenvalues().minCoeff() > 1e-10 * top, InvalidArgument,
                   "dictionary is rank deficient in H^{1/2}");
    Eigen::LLT<Matrix> llt(G);
    NLSTAB_REQUIRE(llt.info() == Eigen::Success, InvalidArgument, "dictionary Gram matrix is not SPD");
    // F L^{-T} has Gram L^{-1} G L^{-T} = I.
    return llt.matrixU().solve<Eigen::OnTheRight>(F);
}

Dictionary make_dictionary(const std::shared_ptr<const geometry::Mesh>& mesh, const geometry::BoundaryPatch& S,
                           int count, DictionaryKind kind)
{
    NLSTAB_REQUIRE(count >= 1, InvalidArgument, "dictionary size must be >= 1");
    const auto bs = BoundarySpace::of(mesh);
    const auto mask = patch_mask(*mesh, S);
    const int nb = mesh->num_boundary_nodes();
    std::vector<int> in;
    for (int b = 0; b < nb; ++b)
        if (mask[b]) in.push_back(b);

    Dictionary d;
    d.kind = kind;
    d.patch_name = S.name;
    d.mesh_id = mesh->id;
    d.space = bs;
    Matrix F;
    if (kind == DictionaryKind::Eigen) {
        NLSTAB_REQUIRE(static_cast<int>(in.size()) >= count, InvalidArgument,
                       "patch '" + S.name + "' has " + std::to_string(in.size()) + " nodes, fewer than the " +
                           std::to_string(count) + " requested dictionary functions");
        const int m = static_cast<int>(in.size());
        Matrix Ks(m, m), Ms(m, m);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                Ks(i, j) = bs->stiffness()(in[i], in[j]);
                Ms(i, j) = bs->mass()(in[i], in[j]);
            }
        Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> es(Ks, Ms);
        NLSTAB_REQUIRE(es.info() == Eigen::Success, InvalidArgument, "patch eigenproblem failed");
        F = Matrix::Zero(nb, count);
        for (int c = 0; c < count; ++c)
            for (int i = 0; i < m; ++i) F(in[i], c) = es.eigenvectors()(i, c);
    } else {
        NLSTAB_REQUIRE(mesh->dim == 2, InvalidArgument, "Fourier dictionary requires n = 2");
        Point c = Point::Zero();
        for (int v : mesh->boundary_nodes) c += mesh->nodes[v];
        c /= nb;
        F = Matrix::Zero(nb, 2 * count + 1);
        for (int b = 0; b < nb; ++b) {
            if (!mask[b]) continue;
            const Point p = mesh->nodes[mesh->boundary_nodes[b]] - c;
            const double th = std::atan2(p.y(), p.x());
            F(b, 0) = 1.0;
            for (int k = 1; k <= count; ++k) {
                F(b, 2 * k - 1) = std::cos(k * th);
                F(b, 2 * k) = std::sin(k * th);
            }
        }
    }
    d.F = orthonormalize_plus(*bs, F);
    return d;
}

BoundaryOperatorSample sample_operator(const LinearizedDN& op, const Dictionary& dict)
{
    NLSTAB_REQUIRE(dict.mesh_id == op.mesh()->id, InvalidArgument, "dictionary belongs to a different mesh");
    NLSTAB_REQUIRE(dict.patch_name == op.patch().name, InvalidArgument,
                   "dictionary patch '" + dict.patch_name + "' differs from operator patch '" + op.patch().name + "'");
    const auto bs = dict.space ? dict.space : BoundarySpace::of(op.mesh());
    BoundaryOperatorSample s;
    s.dict = dict;
    s.responses = op.apply_many(dict.F);
    s.gram_plus = bs->gram_plus(dict.F);
    Eigen::LLT<Matrix> llt(s.gram_plus);
    NLSTAB_REQUIRE(llt.info() == Eigen::Success, InvalidArgument, "dictionary Gram matrix is not SPD");
    s.gram_minus = llt.solve(Matrix::Identity(dict.size(), dict.size()));
    s.gram_minus = 0.5 * (s.gram_minus + s.gram_minus.transpose());
    s.lambda = op.background().lambda;
    s.background = op.background().describe();
    s.patch_name = op.patch().name;
    return s;
}

double dictionary_dual_norm(const FluxTrace& flux, const BoundaryOperatorSample& sample)
{
    NLSTAB_REQUIRE(flux.values.size() == sample.dict.F.rows(), InvalidArgument, "dual norm: size mismatch");
    const Vector c = sample.dict.F.transpose() * flux.values;
    return std::sqrt(std::max(0.0, c.dot(sample.gram_minus * c)));
}

namespace {

double difference_norm(const Matrix& T, const Matrix& gp, const Matrix& gm)
{
    Matrix A = T.transpose() * gm * T;
    A = 0.5 * (A + A.transpose());
    Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> es(A, gp);
    NLSTAB_REQUIRE(es.info() == Eigen::Success, InvalidArgument, "measurement: generalized eigenproblem failed");
    return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

} // namespace

double operator_norm(const BoundaryOperatorSample& s)
{
    return difference_norm(s.pairing_matrix(), s.gram_plus, s.gram_minus);
}

double measurement_functional(const BoundaryOperatorSample& s1, const BoundaryOperatorSample& s2)
{
    NLSTAB_REQUIRE(s1.dict.mesh_id == s2.dict.mesh_id && s1.dict.F.rows() == s2.dict.F.rows() &&
                       s1.dict.F.cols() == s2.dict.F.cols(),
                   InvalidArgument, "measurement: samples use different dictionaries");
    NLSTAB_REQUIRE((s1.dict.F - s2.dict.F).norm() <= 1e-12 * (1.0 + s1.dict.F.norm()), InvalidArgument,
                   "measurement: samples use different dictionaries");
    const Matrix T = s1.dict.F.transpose() * (s1.responses - s2.responses);
    return difference_norm(T, s1.gram_plus, s1.gram_minus);
}

double measurement_functional(const pde::ProblemSpec& p1, const pde::ProblemSpec& p2, const Background& background,
                              const Dictionary& dict, std::shared_ptr<const geometry::Mesh> mesh,
                              const geometry::BoundaryPatch& S, const pde::SolverOptions& opts)
{
    const LinearizedDN op1(p1, background, mesh, S, opts);
    const LinearizedDN op2(p2, background, mesh, S, opts);
    return measurement_functional(sample_operator(op1, dict), sample_operator(op2, dict));
}

} // namespace nlstab::dn
