#pragma once
#include "nlstab/geometry/domain.hpp"
#include <cmath>
#include <vector>

namespace oracle {

using nlstab::Point;
using nlstab::Vector;

/// u(0) / u(1) for -u'' - u'/r + q u = 0 with u'(0) = 0, by RK4 shooting from r = 0.
inline double radial_center_value(double q, int steps = 4000)
{
    const double r0 = 1e-6;
    double u = 1.0 + q * r0 * r0 / 4.0;
    double v = q * r0 / 2.0;
    const double dr = (1.0 - r0) / steps;
    auto rhs = [q](double r, double uu, double vv, double& du, double& dv) {
        du = vv;
        dv = q * uu - vv / r;
    };
    double r = r0;
    for (int i = 0; i < steps; ++i) {
        double k1u, k1v, k2u, k2v, k3u, k3v, k4u, k4v;
        rhs(r, u, v, k1u, k1v);
        rhs(r + dr / 2, u + dr / 2 * k1u, v + dr / 2 * k1v, k2u, k2v);
        rhs(r + dr / 2, u + dr / 2 * k2u, v + dr / 2 * k2v, k3u, k3v);
        rhs(r + dr, u + dr * k3u, v + dr * k3v, k4u, k4v);
        u += dr / 6 * (k1u + 2 * k2u + 2 * k3u + k4u);
        v += dr / 6 * (k1v + 2 * k2v + 2 * k3v + k4v);
        r += dr;
    }
    return 1.0 / u;
}

/// Mesh node closest to p.
inline int nearest_node(const nlstab::geometry::Mesh& m, const Point& p)
{
    int best = 0;
    for (int v = 1; v < m.num_nodes(); ++v)
        if ((m.nodes[v] - p).norm() < (m.nodes[best] - p).norm()) best = v;
    return best;
}

/// cos(k theta) at the boundary nodes, boundary_index order.
inline Vector boundary_cos(const nlstab::geometry::Mesh& m, int k)
{
    Vector c(m.num_boundary_nodes());
    for (int b = 0; b < c.size(); ++b) {
        const Point& p = m.nodes[m.boundary_nodes[b]];
        c[b] = std::cos(k * std::atan2(p.y(), p.x()));
    }
    return c;
}

/// Ray-casting point-in-polygon test.
inline bool in_polygon(const std::vector<Point>& poly, const Point& p)
{
    bool in = false;
    for (size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
        const Point& a = poly[i];
        const Point& b = poly[j];
        if ((a.y() > p.y()) != (b.y() > p.y()) &&
            p.x() < (b.x() - a.x()) * (p.y() - a.y()) / (b.y() - a.y()) + a.x())
            in = !in;
    }
    return in;
}

/// Least-squares slope of log y against log x.
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y)
{
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

/// max_{1<=k<=kmax} k (1 + k^2)^{-1/2}.
inline double fourier_symbol_max(int kmax)
{
    double best = 0.0;
    for (int k = 1; k <= kmax; ++k) best = std::max(best, k / std::sqrt(1.0 + k * k));
    return best;
}

} // namespace oracle
