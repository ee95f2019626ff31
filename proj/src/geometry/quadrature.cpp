#include "nlstab/geometry/quadrature.hpp"

#include "nlstab/common.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

namespace nlstab::geometry {

void gauss_legendre_01(int npts, std::vector<double>& nodes, std::vector<double>& weights)
{
    NLSTAB_REQUIRE(npts >= 1, InvalidArgument, "gauss_legendre_01: npts must be >= 1");
    nodes.assign(static_cast<std::size_t>(npts), 0.0);
    weights.assign(static_cast<std::size_t>(npts), 0.0);
    for (int i = 0; i < npts; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (npts + 0.5));
        double pp = 1.0;
        for (int it = 0; it < 100; ++it) {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 1; j <= npts; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
            }
            pp = npts * (z * p1 - p2) / (z * z - 1.0);
            const double dz = p1 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        nodes[static_cast<std::size_t>(i)] = 0.5 * (1.0 - z);
        weights[static_cast<std::size_t>(i)] = 1.0 / ((1.0 - z * z) * pp * pp);
    }
}

namespace {

SimplexRule make_assembly_rule(int dim)
{
    SimplexRule r;
    r.dim = dim;
    if (dim == 2) {
        const double a = 2.0 / 3.0, b = 1.0 / 6.0;
        r.bary = {{a, b, b, 0}, {b, a, b, 0}, {b, b, a, 0}};
        r.weights = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    } else {
        const double a = 0.5854101966249685, b = 0.1381966011250105;
        r.bary = {{a, b, b, b}, {b, a, b, b}, {b, b, a, b}, {b, b, b, a}};
        r.weights = {0.25, 0.25, 0.25, 0.25};
    }
    return r;
}

SimplexRule make_collapsed_rule(int dim, int order)
{
    std::vector<double> x, w;
    gauss_legendre_01(order, x, w);
    SimplexRule r;
    r.dim = dim;
    const double fact = dim == 2 ? 2.0 : 6.0;
    if (dim == 2) {
        for (int i = 0; i < order; ++i)
            for (int j = 0; j < order; ++j) {
                const double u = x[i], v = x[j] * (1.0 - u);
                r.bary.push_back({1.0 - u - v, u, v, 0.0});
                r.weights.push_back(fact * w[i] * w[j] * (1.0 - u));
            }
    } else {
        for (int i = 0; i < order; ++i)
            for (int j = 0; j < order; ++j)
                for (int k = 0; k < order; ++k) {
                    const double u = x[i];
                    const double v = x[j] * (1.0 - u);
                    const double t = x[k] * (1.0 - u) * (1.0 - x[j]);
                    r.bary.push_back({1.0 - u - v - t, u, v, t});
                    r.weights.push_back(fact * w[i] * w[j] * w[k] * (1.0 - u) * (1.0 - u) * (1.0 - x[j]));
                }
    }
    return r;
}

} // namespace

const SimplexRule& assembly_rule(int dim)
{
    NLSTAB_REQUIRE(dim == 2 || dim == 3, InvalidArgument, "assembly_rule: dim must be 2 or 3");
    static const SimplexRule r2 = make_assembly_rule(2);
    static const SimplexRule r3 = make_assembly_rule(3);
    return dim == 2 ? r2 : r3;
}

const SimplexRule& accurate_rule(int dim, int order)
{
    NLSTAB_REQUIRE(dim == 2 || dim == 3, InvalidArgument, "accurate_rule: dim must be 2 or 3");
    static std::mutex mutex;
    static std::map<std::pair<int, int>, SimplexRule> cache;
    std::lock_guard lock(mutex);
    auto key = std::make_pair(dim, order);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, make_collapsed_rule(dim, order)).first;
    return it->second;
}

} // namespace nlstab::geometry
