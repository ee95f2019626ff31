#pragma once

#include "nlstab/common.hpp"

#include <functional>
#include <string>
#include <vector>

namespace nlstab::pde {

/// Symmetric matrix field x -> a(x). In 2D only the leading 2x2 block is used.
struct CoefficientMatrixField {
    std::string name = "identity";
    std::function<Mat3(const Point&)> eval = [](const Point&) { return Mat3(Mat3::Identity()); };
    bool constant = true;
    /// Claimed ellipticity floor (informational; check_ellipticity measures it).
    double claimed_floor = 1.0;

    [[nodiscard]] Mat3 operator()(const Point& x) const { return eval(x); }

    static CoefficientMatrixField identity();
    static CoefficientMatrixField constant_matrix(const Mat3& a, const std::string& name = "constant");
    /// a(x) = f(x) I.
    static CoefficientMatrixField scalar(std::function<double(const Point&)> f, const std::string& name);
};

/// Quasilinear diffusion factor gamma(t) > 0 with two derivatives.
struct QuasilinearLaw {
    std::string name = "one";
    std::function<double(double)> gamma = [](double) { return 1.0; };
    std::function<double(double)> dgamma = [](double) { return 0.0; };
    std::function<double(double)> d2gamma = [](double) { return 0.0; };
    double positivity_floor = 0.0;
    bool constant = true;

    static QuasilinearLaw constant_law(double c);
    /// Throws LawViolation when gamma <= floor at a sample, or when gamma'
    /// disagrees with a central difference of gamma by more than 1e-6 relative.
    void check(const std::vector<double>& samples) const;
};

/// Drift D(x, t) with spatial divergence and t-derivative.
struct DriftLaw {
    std::string name = "zero";
    std::function<Point(const Point&, double)> D = [](const Point&, double) { return Point(Point::Zero()); };
    std::function<double(const Point&, double)> div = [](const Point&, double) { return 0.0; };
    std::function<Point(const Point&, double)> dDdt = [](const Point&, double) { return Point(Point::Zero()); };
    bool zero = true;
    /// Set when the law claims div_x D <= 0 (Theorem-1 admissibility).
    bool admissible_flag = true;

    static DriftLaw zero_drift();
    /// Throws LawViolation when the admissibility flag is set and div_x D > tol
    /// at one of the samples.
    void check(const std::vector<Point>& xs, const std::vector<double>& ts, double tol = 1e-12) const;
};

/// Monotone semilinear term G with growth majorant kappa.
struct SemilinearLaw {
    std::string name = "zero";
    std::function<double(double)> G = [](double) { return 0.0; };
    std::function<double(double)> dG = [](double) { return 0.0; };
    std::function<double(double)> d2G = [](double) { return 0.0; };
    std::function<double(double)> kappa = [](double) { return 0.0; };

    static SemilinearLaw zero_law();
    /// Throws LawViolation when G' < -tol or |G|+|G'|+|G''| > kappa(|t|) at a sample.
    void check(const std::vector<double>& samples, double tol = 1e-12) const;
};

enum class Condition { Quasilinear, Semilinear };

/// The full nonlinear problem: condition (i) -div(a gamma(u) grad u) + D(x,u).grad u = 0,
/// condition (ii) -Laplace u + G(u) = 0.
struct ProblemSpec {
    Condition condition = Condition::Quasilinear;
    CoefficientMatrixField a = CoefficientMatrixField::identity();
    QuasilinearLaw gamma;
    DriftLaw drift;
    SemilinearLaw G;
};

/// Evenly spaced samples on [lo, hi] (n >= 2 points).
std::vector<double> linspace(double lo, double hi, int n);

} // namespace nlstab::pde
