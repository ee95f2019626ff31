#include "nlstab/harness/catalog.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace nlstab::harness {

namespace {

struct Spec {
    std::string name;
    std::vector<double> p;
};

Spec split(const std::string& spec)
{
    Spec s;
    std::stringstream ss(spec);
    std::string item;
    bool first = true;
    while (std::getline(ss, item, ':')) {
        if (first) {
            s.name = item;
            first = false;
            continue;
        }
        double x = 0.0;
        const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), x);
        NLSTAB_REQUIRE(ec == std::errc() && ptr == item.data() + item.size() && !item.empty(), InvalidArgument,
                       "catalog: bad parameter '" + item + "' in '" + spec + "'");
        s.p.push_back(x);
    }
    return s;
}

void arity(const Spec& s, std::size_t n, const std::string& spec)
{
    NLSTAB_REQUIRE(s.p.size() == n, InvalidArgument,
                   "catalog: '" + spec + "' expects " + std::to_string(n) + " parameter(s)");
}

} // namespace

pde::QuasilinearLaw gamma_law(const std::string& spec)
{
    const Spec s = split(spec);
    pde::QuasilinearLaw g;
    g.name = spec;
    g.constant = false;
    if (s.name == "const") {
        arity(s, 1, spec);
        g = pde::QuasilinearLaw::constant_law(s.p[0]);
        g.name = spec;
        return g;
    }
    if (s.name == "affine") {
        arity(s, 2, spec);
        const double c0 = s.p[0], c1 = s.p[1];
        g.gamma = [c0, c1](double u) { return c0 + c1 * u; };
        g.dgamma = [c1](double) { return c1; };
        g.d2gamma = [](double) { return 0.0; };
        return g;
    }
    if (s.name == "quadratic") {
        arity(s, 2, spec);
        const double c0 = s.p[0], c2 = s.p[1];
        g.gamma = [c0, c2](double u) { return c0 + c2 * u * u; };
        g.dgamma = [c2](double u) { return 2.0 * c2 * u; };
        g.d2gamma = [c2](double) { return 2.0 * c2; };
        return g;
    }
    if (s.name == "sin" || s.name == "cos" || s.name == "tanh") {
        arity(s, 2, spec);
        const double c = s.p[0], a = s.p[1];
        if (s.name == "sin") {
            g.gamma = [c, a](double u) { return c + a * std::sin(u); };
            g.dgamma = [a](double u) { return a * std::cos(u); };
            g.d2gamma = [a](double u) { return -a * std::sin(u); };
        } else if (s.name == "cos") {
            g.gamma = [c, a](double u) { return c + a * std::cos(u); };
            g.dgamma = [a](double u) { return -a * std::sin(u); };
            g.d2gamma = [a](double u) { return -a * std::cos(u); };
        } else {
            g.gamma = [c, a](double u) { return c + a * std::tanh(u); };
            g.dgamma = [a](double u) { return a / (std::cosh(u) * std::cosh(u)); };
            g.d2gamma = [a](double u) { return -2.0 * a * std::tanh(u) / (std::cosh(u) * std::cosh(u)); };
        }
        return g;
    }
    throw InvalidArgument("catalog: unknown gamma law '" + spec + "'");
}

pde::DriftLaw drift_law(const std::string& spec, int dim)
{
    NLSTAB_REQUIRE(dim == 2 || dim == 3, InvalidArgument, "catalog: drift dimension must be 2 or 3");
    const Spec s = split(spec);
    pde::DriftLaw d;
    d.name = spec;
    if (s.name == "zero") {
        arity(s, 0, spec);
        return d;
    }
    d.zero = false;
    arity(s, 1, spec);
    const double a = s.p[0];
    const double n = dim;
    if (s.name == "rotation") {
        d.D = [a](const Point& x, double u) { return Point(a * u * Point(-x.y(), x.x(), 0.0)); };
        d.div = [](const Point&, double) { return 0.0; };
        d.dDdt = [a](const Point& x, double) { return Point(a * Point(-x.y(), x.x(), 0.0)); };
        return d;
    }
    if (s.name == "radial") {
        NLSTAB_REQUIRE(a >= 0, InvalidArgument, "catalog: radial drift needs s >= 0");
        d.D = [a](const Point& x, double u) { return Point(-a * (1.0 + u * u) * x); };
        d.div = [a, n](const Point&, double u) { return -a * n * (1.0 + u * u); };
        d.dDdt = [a](const Point& x, double u) { return Point(-2.0 * a * u * x); };
        return d;
    }
    if (s.name == "linear-radial") {
        d.D = [a](const Point& x, double u) { return Point(-a * u * x); };
        d.div = [a, n](const Point&, double u) { return -a * n * u; };
        d.dDdt = [a](const Point& x, double) { return Point(-a * x); };
        d.admissible_flag = false;
        return d;
    }
    throw InvalidArgument("catalog: unknown drift law '" + spec + "'");
}

pde::SemilinearLaw semilinear_law(const std::string& spec)
{
    const Spec s = split(spec);
    pde::SemilinearLaw g;
    g.name = spec;
    if (s.name == "zero") {
        arity(s, 0, spec);
        return g;
    }
    if (s.name == "linear-cubic") {
        arity(s, 2, spec);
        const double a = s.p[0], b = s.p[1];
        NLSTAB_REQUIRE(a >= 0 && b >= 0, InvalidArgument, "catalog: linear-cubic G needs a, b >= 0");
        g.G = [a, b](double u) { return a * u + b * u * u * u / 3.0; };
        g.dG = [a, b](double u) { return a + b * u * u; };
        g.d2G = [b](double u) { return 2.0 * b * u; };
        g.kappa = [a, b](double t) { return a * (1.0 + t) + b * (t * t * t / 3.0 + t * t + 2.0 * t); };
        return g;
    }
    arity(s, 1, spec);
    const double c = s.p[0];
    NLSTAB_REQUIRE(c >= 0, InvalidArgument, "catalog: '" + spec + "' needs c >= 0 for monotonicity");
    if (s.name == "linear") {
        g.G = [c](double u) { return c * u; };
        g.dG = [c](double) { return c; };
        g.d2G = [](double) { return 0.0; };
        g.kappa = [c](double t) { return c * (1.0 + t); };
        return g;
    }
    if (s.name == "cubic") {
        g.G = [c](double u) { return c * u * u * u / 3.0; };
        g.dG = [c](double u) { return c * u * u; };
        g.d2G = [c](double u) { return 2.0 * c * u; };
        g.kappa = [c](double t) { return c * (t * t * t / 3.0 + t * t + 2.0 * t); };
        return g;
    }
    if (s.name == "atan") {
        g.G = [c](double u) { return c * std::atan(u); };
        g.dG = [c](double u) { return c / (1.0 + u * u); };
        g.d2G = [c](double u) { return -2.0 * c * u / ((1.0 + u * u) * (1.0 + u * u)); };
        g.kappa = [c](double) { return c * (0.5 * M_PI + 2.0); };
        return g;
    }
    if (s.name == "sinh") {
        g.G = [c](double u) { return c * std::sinh(u); };
        g.dG = [c](double u) { return c * std::cosh(u); };
        g.d2G = [c](double u) { return c * std::sinh(u); };
        g.kappa = [c](double t) { return 3.0 * c * std::cosh(t); };
        return g;
    }
    throw InvalidArgument("catalog: unknown semilinear law '" + spec + "'");
}

pde::CoefficientMatrixField coefficient_field(const std::string& spec)
{
    const Spec s = split(spec);
    if (s.name == "identity") {
        arity(s, 0, spec);
        return pde::CoefficientMatrixField::identity();
    }
    if (s.name == "scalar-linear") {
        arity(s, 1, spec);
        const double c = s.p[0];
        return pde::CoefficientMatrixField::scalar([c](const Point& x) { return 1.0 + c * x.x(); }, spec);
    }
    if (s.name == "diag") {
        arity(s, 3, spec);
        NLSTAB_REQUIRE(s.p[0] > 0 && s.p[1] > 0 && s.p[2] > 0, InvalidArgument, "catalog: diag entries must be positive");
        return pde::CoefficientMatrixField::constant_matrix(Point(s.p[0], s.p[1], s.p[2]).asDiagonal(), spec);
    }
    throw InvalidArgument("catalog: unknown coefficient field '" + spec + "'");
}

pde::ScalarField boundary_data(const std::string& spec)
{
    const Spec s = split(spec);
    if (s.name == "const") {
        arity(s, 1, spec);
        const double c = s.p[0];
        return [c](const Point&) { return c; };
    }
    if (s.name == "x1") {
        arity(s, 1, spec);
        const double c = s.p[0];
        return [c](const Point& x) { return c * x.x(); };
    }
    if (s.name == "angular") {
        arity(s, 1, spec);
        const double k = s.p[0];
        return [k](const Point& x) { return std::cos(k * std::atan2(x.y(), x.x())); };
    }
    if (s.name == "saddle") {
        arity(s, 0, spec);
        return [](const Point& x) { return x.x() * x.x() - x.y() * x.y(); };
    }
    throw InvalidArgument("catalog: unknown boundary data '" + spec + "'");
}

pde::QuasilinearLaw perturb(const pde::QuasilinearLaw& base, const pde::QuasilinearLaw& delta, double s)
{
    pde::QuasilinearLaw g = base;
    g.name = base.name + "+" + std::to_string(s) + "*" + delta.name;
    g.constant = base.constant && delta.constant;
    g.gamma = [b = base.gamma, d = delta.gamma, s](double u) { return b(u) + s * d(u); };
    g.dgamma = [b = base.dgamma, d = delta.dgamma, s](double u) { return b(u) + s * d(u); };
    g.d2gamma = [b = base.d2gamma, d = delta.d2gamma, s](double u) { return b(u) + s * d(u); };
    return g;
}

pde::SemilinearLaw perturb(const pde::SemilinearLaw& base, const pde::SemilinearLaw& delta, double s)
{
    pde::SemilinearLaw g;
    g.name = base.name + "+" + std::to_string(s) + "*" + delta.name;
    g.G = [b = base.G, d = delta.G, s](double u) { return b(u) + s * d(u); };
    g.dG = [b = base.dG, d = delta.dG, s](double u) { return b(u) + s * d(u); };
    g.d2G = [b = base.d2G, d = delta.d2G, s](double u) { return b(u) + s * d(u); };
    g.kappa = [b = base.kappa, d = delta.kappa, s](double t) { return b(t) + std::abs(s) * d(t); };
    return g;
}

std::vector<std::string> catalog_entries()
{
    return {
        "gamma const:c            c",
        "gamma affine:c0:c1       c0 + c1 u",
        "gamma quadratic:c0:c2    c0 + c2 u^2",
        "gamma sin:c:a            c + a sin u",
        "gamma cos:c:a            c + a cos u",
        "gamma tanh:c:a           c + a tanh u",
        "drift zero               0",
        "drift rotation:s         s u (-x2, x1, 0)",
        "drift radial:s           -s (1 + u^2) x",
        "drift linear-radial:s    -s u x (not flagged admissible)",
        "G     zero               0",
        "G     linear:c           c u",
        "G     cubic:c            c u^3 / 3",
        "G     linear-cubic:a:b   a u + b u^3 / 3",
        "G     atan:c             c atan u",
        "G     sinh:c             c sinh u",
        "a     identity           I",
        "a     scalar-linear:c    (1 + c x1) I",
        "a     diag:a1:a2:a3      diag(a1, a2, a3)",
        "data  const:c            c",
        "data  x1:c               c x1",
        "data  angular:k          cos(k theta)",
        "data  saddle             x1^2 - x2^2",
    };
}

} // namespace nlstab::harness
