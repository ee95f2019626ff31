#include "nlstab/pde/laws.hpp"

#include <cmath>
#include <sstream>

namespace nlstab::pde {

CoefficientMatrixField CoefficientMatrixField::identity() { return {}; }

CoefficientMatrixField CoefficientMatrixField::constant_matrix(const Mat3& a, const std::string& name)
{
    NLSTAB_REQUIRE((a - a.transpose()).norm() == 0.0, InvalidArgument, "coefficient matrix must be symmetric");
    CoefficientMatrixField f;
    f.name = name;
    f.eval = [a](const Point&) { return a; };
    f.constant = true;
    f.claimed_floor = Eigen::SelfAdjointEigenSolver<Mat3>(a).eigenvalues().minCoeff();
    return f;
}

CoefficientMatrixField CoefficientMatrixField::scalar(std::function<double(const Point&)> s, const std::string& name)
{
    CoefficientMatrixField f;
    f.name = name;
    f.eval = [s](const Point& x) { return Mat3(s(x) * Mat3::Identity()); };
    f.constant = false;
    f.claimed_floor = 0.0;
    return f;
}

QuasilinearLaw QuasilinearLaw::constant_law(double c)
{
    NLSTAB_REQUIRE(c > 0, LawViolation, "constant gamma must be positive");
    QuasilinearLaw g;
    std::ostringstream name;
    name << "const(" << c << ")";
    g.name = name.str();
    g.gamma = [c](double) { return c; };
    return g;
}

void QuasilinearLaw::check(const std::vector<double>& samples) const
{
    for (double t : samples) {
        const double g = gamma(t);
        if (!(g > positivity_floor) || !std::isfinite(g))
            throw LawViolation("gamma(" + std::to_string(t) + ") = " + std::to_string(g) + " is not positive");
        const double e = 1e-5 * std::max(1.0, std::abs(t));
        const double fd = (gamma(t + e) - gamma(t - e)) / (2 * e);
        const double d = dgamma(t);
        if (std::abs(fd - d) > 1e-6 * std::max(1.0, std::abs(d)) + 1e-7 * std::abs(g))
            throw LawViolation("gamma' inconsistent with gamma at t = " + std::to_string(t));
    }
}

DriftLaw DriftLaw::zero_drift() { return {}; }

void DriftLaw::check(const std::vector<Point>& xs, const std::vector<double>& ts, double tol) const
{
    if (!admissible_flag) return;
    for (const auto& x : xs)
        for (double t : ts)
            if (div(x, t) > tol)
                throw LawViolation("drift '" + name + "' flagged admissible but div D = " +
                                   std::to_string(div(x, t)) + " > 0 at t = " + std::to_string(t));
}

SemilinearLaw SemilinearLaw::zero_law() { return {}; }

void SemilinearLaw::check(const std::vector<double>& samples, double tol) const
{
    for (double t : samples) {
        const double d = dG(t);
        if (d < -tol) throw LawViolation("G' = " + std::to_string(d) + " < 0 at t = " + std::to_string(t));
        const double bound = std::abs(G(t)) + std::abs(d) + std::abs(d2G(t));
        if (bound > kappa(std::abs(t)) * (1 + 1e-12) + tol)
            throw LawViolation("growth majorant kappa violated at t = " + std::to_string(t));
    }
}

std::vector<double> linspace(double lo, double hi, int n)
{
    NLSTAB_REQUIRE(n >= 2, InvalidArgument, "linspace: need at least two points");
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) out[i] = lo + (hi - lo) * i / (n - 1);
    return out;
}

} // namespace nlstab::pde
