#include "bvwave/mesh.hpp"

#include <cmath>
#include <string>

#include "bvwave/errors.hpp"

namespace bvwave {

double TriMesh::square_size() const {
    return 2.0 / (nodes_per_side - 1);
}

double TriMesh::mesh_size() const {
    return square_size() * std::sqrt(2.0);
}

double TriMesh::triangle_area(int t) const {
    const auto& tri = triangles[t];
    const double x0 = node_x[tri[0]], y0 = node_y[tri[0]];
    const double x1 = node_x[tri[1]], y1 = node_y[tri[1]];
    const double x2 = node_x[tri[2]], y2 = node_y[tri[2]];
    return 0.5 * std::abs((x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0));
}

TriMesh build_uniform_mesh(int level) {
    if (level < 1 || level > 10)
        throw ConfigError("mesh level must be in [1,10], got " + std::to_string(level));

    const int n = 1 << level; // squares per side
    TriMesh mesh;
    mesh.level = level;
    mesh.nodes_per_side = n + 1;

    const int nps = n + 1;
    mesh.node_x.resize(static_cast<size_t>(nps) * nps);
    mesh.node_y.resize(static_cast<size_t>(nps) * nps);
    mesh.boundary.resize(static_cast<size_t>(nps) * nps);
    mesh.interior_index.assign(static_cast<size_t>(nps) * nps, -1);
    for (int iy = 0; iy <= n; ++iy) {
        for (int ix = 0; ix <= n; ++ix) {
            const int id = iy * nps + ix;
            // dyadic coordinates, exact in double, so nested levels share nodes exactly
            mesh.node_x[id] = -1.0 + ix * (2.0 / n);
            mesh.node_y[id] = -1.0 + iy * (2.0 / n);
            const bool bnd = ix == 0 || ix == n || iy == 0 || iy == n;
            mesh.boundary[id] = bnd;
            if (!bnd) {
                mesh.interior_index[id] = static_cast<int>(mesh.interior_node.size());
                mesh.interior_node.push_back(id);
            }
        }
    }

    mesh.triangles.reserve(static_cast<size_t>(2) * n * n);
    for (int iy = 0; iy < n; ++iy) {
        for (int ix = 0; ix < n; ++ix) {
            const int a = iy * nps + ix;
            const int b = iy * nps + ix + 1;
            const int c = (iy + 1) * nps + ix + 1;
            const int d = (iy + 1) * nps + ix;
            mesh.triangles.push_back({a, b, c}); // below the diagonal a-c
            mesh.triangles.push_back({a, c, d}); // above it
        }
    }
    return mesh;
}

const QuadratureRule& midpoint_rule() {
    static const QuadratureRule rule = [] {
        QuadratureRule r;
        r.degree = 2;
        r.points = {{{0.5, 0.5, 0.0}}, {{0.0, 0.5, 0.5}}, {{0.5, 0.0, 0.5}}};
        r.weights = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
        return r;
    }();
    return rule;
}

const QuadratureRule& seven_point_rule() {
    static const QuadratureRule rule = [] {
        QuadratureRule r;
        r.degree = 5;
        const double s = std::sqrt(15.0);
        const double a1 = (6.0 + s) / 21.0, w1 = (155.0 + s) / 1200.0;
        const double a2 = (6.0 - s) / 21.0, w2 = (155.0 - s) / 1200.0;
        r.points.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
        r.weights.push_back(9.0 / 40.0);
        for (int i = 0; i < 3; ++i) {
            std::array<double, 3> p{a1, a1, a1};
            p[i] = 1.0 - 2.0 * a1;
            r.points.push_back(p);
            r.weights.push_back(w1);
        }
        for (int i = 0; i < 3; ++i) {
            std::array<double, 3> p{a2, a2, a2};
            p[i] = 1.0 - 2.0 * a2;
            r.points.push_back(p);
            r.weights.push_back(w2);
        }
        return r;
    }();
    return rule;
}

} // namespace bvwave
