#include "nlstab/geometry/mesh_io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

namespace nlstab::geometry {

void write_mesh(std::ostream& out, const Mesh& mesh)
{
    out << std::setprecision(17);
    out << "dim " << mesh.dim << '\n';
    for (int i = 0; i < mesh.num_nodes(); ++i) {
        out << "nodes: " << i;
        for (int d = 0; d < mesh.dim; ++d) out << ' ' << mesh.nodes[i][d];
        out << '\n';
    }
    for (int c = 0; c < mesh.num_cells(); ++c) {
        out << "cells: " << c;
        for (int i = 0; i <= mesh.dim; ++i) out << ' ' << mesh.cells[c][i];
        out << '\n';
    }
    for (std::size_t f = 0; f < mesh.bfacets.size(); ++f) {
        out << "bfacets: " << f;
        for (int i = 0; i < mesh.dim; ++i) out << ' ' << mesh.bfacets[f][i];
        out << ' ' << (f < mesh.bfacet_tag.size() ? mesh.bfacet_tag[f] : 0) << '\n';
    }
}

void write_mesh(const std::string& path, const Mesh& mesh)
{
    std::ofstream out(path);
    NLSTAB_REQUIRE(out, InvalidArgument, "write_mesh: cannot open " + path);
    write_mesh(out, mesh);
}

Mesh read_mesh(std::istream& in)
{
    std::vector<std::vector<double>> node_rows;
    std::vector<std::vector<long>> cell_rows, facet_rows;
    int dim = 0;
    std::string line;
    int lineno = 0;
    auto fail = [&](const std::string& why) {
        throw ParseError("mesh line " + std::to_string(lineno) + ": " + why);
    };
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ss(line);
        std::string kw;
        if (!(ss >> kw) || kw[0] == '#') continue;
        if (kw == "dim") {
            if (!(ss >> dim) || (dim != 2 && dim != 3)) fail("dim must be 2 or 3");
            continue;
        }
        long id = 0;
        if (!(ss >> id)) fail("missing record id");
        if (kw == "nodes:") {
            if (id != static_cast<long>(node_rows.size())) fail("node ids must be consecutive from 0");
            std::vector<double> v;
            double x;
            while (ss >> x) v.push_back(x);
            if (v.size() < 2 || v.size() > 3) fail("node needs 2 or 3 coordinates");
            node_rows.push_back(v);
        } else if (kw == "cells:" || kw == "bfacets:") {
            auto& rows = kw == "cells:" ? cell_rows : facet_rows;
            if (id != static_cast<long>(rows.size())) fail("record ids must be consecutive from 0");
            std::vector<long> v;
            long x;
            while (ss >> x) v.push_back(x);
            if (!ss.eof()) fail("non-integer entry");
            rows.push_back(v);
        } else {
            fail("unknown record '" + kw + "'");
        }
        if (ss.fail() && !ss.eof()) fail("malformed numeric entry");
    }
    if (cell_rows.empty()) throw ParseError("mesh: no cells");
    if (dim == 0) dim = static_cast<int>(cell_rows[0].size()) - 1;
    if (dim != 2 && dim != 3) throw ParseError("mesh: cannot infer dimension from cell arity");

    Mesh m;
    m.dim = dim;
    for (const auto& r : node_rows) m.nodes.push_back(Point(r[0], r[1], r.size() > 2 ? r[2] : 0.0));
    const long nn = static_cast<long>(node_rows.size());
    for (std::size_t c = 0; c < cell_rows.size(); ++c) {
        const auto& r = cell_rows[c];
        if (static_cast<int>(r.size()) != dim + 1) throw ParseError("cell " + std::to_string(c) + ": wrong arity");
        std::array<int, 4> cell{-1, -1, -1, -1};
        for (int i = 0; i <= dim; ++i) {
            if (r[i] < 0 || r[i] >= nn) throw ParseError("cell " + std::to_string(c) + ": node id out of range");
            cell[i] = static_cast<int>(r[i]);
        }
        m.cells.push_back(cell);
    }
    for (std::size_t f = 0; f < facet_rows.size(); ++f) {
        const auto& r = facet_rows[f];
        if (static_cast<int>(r.size()) != dim + 1) throw ParseError("bfacet " + std::to_string(f) + ": wrong arity");
        std::array<int, 3> fac{-1, -1, -1};
        for (int i = 0; i < dim; ++i) {
            if (r[i] < 0 || r[i] >= nn) throw ParseError("bfacet " + std::to_string(f) + ": node id out of range");
            fac[i] = static_cast<int>(r[i]);
        }
        m.bfacets.push_back(fac);
        m.bfacet_tag.push_back(static_cast<int>(r[dim]));
    }
    try {
        m.finalize();
    } catch (const InvalidArgument& e) {
        throw ParseError(std::string("mesh: ") + e.what());
    }
    return m;
}

Mesh read_mesh(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ParseError("read_mesh: cannot open " + path);
    return read_mesh(in);
}

} // namespace nlstab::geometry
