#include "bvwave/assembly.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <vector>

#include "bvwave/errors.hpp"

namespace bvwave {
namespace {

struct ElementGeom {
    double area;
    double b[3], c[3]; // grad phi_i = (b_i, c_i) / (2 area)
};

ElementGeom element_geometry(const TriMesh& mesh, int t) {
    const auto& tri = mesh.triangles[t];
    double x[3], y[3];
    for (int i = 0; i < 3; ++i) {
        x[i] = mesh.node_x[tri[i]];
        y[i] = mesh.node_y[tri[i]];
    }
    ElementGeom g;
    g.area = 0.5 * ((x[1] - x[0]) * (y[2] - y[0]) - (x[2] - x[0]) * (y[1] - y[0]));
    for (int i = 0; i < 3; ++i) {
        const int j = (i + 1) % 3, k = (i + 2) % 3;
        g.b[i] = y[j] - y[k];
        g.c[i] = x[k] - x[j];
    }
    return g;
}

template <typename Map>
SparseSym assemble(const TriMesh& mesh, int size, Map&& node_to_dof, bool want_mass) {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<size_t>(mesh.n_triangles()) * 9);
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const auto g = element_geometry(mesh, t);
        const auto& tri = mesh.triangles[t];
        for (int i = 0; i < 3; ++i) {
            const int di = node_to_dof(tri[i]);
            if (di < 0) continue;
            for (int j = 0; j < 3; ++j) {
                const int dj = node_to_dof(tri[j]);
                if (dj < 0) continue;
                double v;
                if (want_mass)
                    v = g.area / 12.0 * (i == j ? 2.0 : 1.0);
                else
                    v = (g.b[i] * g.b[j] + g.c[i] * g.c[j]) / (4.0 * g.area);
                trip.emplace_back(di, dj, v);
            }
        }
    }
    SparseSym a(size, size);
    a.setFromTriplets(trip.begin(), trip.end());
    a.makeCompressed();
    return a;
}

} // namespace

SparseSym assemble_mass(const TriMesh& mesh) {
    return assemble(mesh, mesh.n_interior(),
                    [&](int n) { return mesh.interior_index[n]; }, true);
}

SparseSym assemble_stiffness(const TriMesh& mesh) {
    return assemble(mesh, mesh.n_interior(),
                    [&](int n) { return mesh.interior_index[n]; }, false);
}

SparseSym assemble_mass_full(const TriMesh& mesh) {
    return assemble(mesh, mesh.n_nodes(), [](int n) { return n; }, true);
}

SparseSym assemble_stiffness_full(const TriMesh& mesh) {
    return assemble(mesh, mesh.n_nodes(), [](int n) { return n; }, false);
}

Eigen::VectorXd assemble_load(const TriMesh& mesh, const SpatialFn& f,
                              const QuadratureRule& rule) {
    Eigen::VectorXd b = Eigen::VectorXd::Zero(mesh.n_interior());
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const auto& tri = mesh.triangles[t];
        const double area = mesh.triangle_area(t);
        for (size_t q = 0; q < rule.points.size(); ++q) {
            const auto& lam = rule.points[q];
            double x = 0, y = 0;
            for (int i = 0; i < 3; ++i) {
                x += lam[i] * mesh.node_x[tri[i]];
                y += lam[i] * mesh.node_y[tri[i]];
            }
            const double wf = rule.weights[q] * area * f(x, y);
            for (int i = 0; i < 3; ++i) {
                const int di = mesh.interior_index[tri[i]];
                if (di >= 0) b[di] += wf * lam[i];
            }
        }
    }
    return b;
}

Eigen::VectorXd ritz_projection(const TriMesh& mesh, const SparseSym& stiffness,
                                const SpatialFn& grad_x, const SpatialFn& grad_y,
                                const QuadratureRule& rule) {
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(mesh.n_interior());
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const auto g = element_geometry(mesh, t);
        const auto& tri = mesh.triangles[t];
        // quadrature average of grad y0 over the element
        double gx = 0, gy = 0;
        for (size_t q = 0; q < rule.points.size(); ++q) {
            const auto& lam = rule.points[q];
            double x = 0, y = 0;
            for (int i = 0; i < 3; ++i) {
                x += lam[i] * mesh.node_x[tri[i]];
                y += lam[i] * mesh.node_y[tri[i]];
            }
            gx += rule.weights[q] * grad_x(x, y);
            gy += rule.weights[q] * grad_y(x, y);
        }
        for (int i = 0; i < 3; ++i) {
            const int di = mesh.interior_index[tri[i]];
            if (di >= 0) rhs[di] += 0.5 * (g.b[i] * gx + g.c[i] * gy);
        }
    }
    Eigen::SimplicialLDLT<SparseSym> solver(stiffness);
    if (solver.info() != Eigen::Success)
        throw NumericalError("stiffness factorization failed in ritz_projection");
    return solver.solve(rhs);
}

namespace {

double rayleigh_extreme(const SparseSym& num, const SparseSym& den, bool largest) {
    const int n = static_cast<int>(num.rows());
    if (n == 0) throw NumericalError("empty matrix in eigenvalue iteration");
    // iterate x <- inv(den_or_num) * other * x toward the extreme of the pencil
    const SparseSym& to_factor = largest ? den : num;
    Eigen::SimplicialLDLT<SparseSym> solver(to_factor);
    if (solver.info() != Eigen::Success)
        throw NumericalError("factorization failed in eigenvalue iteration");
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) x[i] = 1.0 + 0.25 * ((i * 2654435761u) % 97) / 97.0;
    x /= x.norm();
    double lambda = 0;
    for (int it = 0; it < 5000; ++it) {
        Eigen::VectorXd y = largest ? solver.solve(num * x).eval()
                                    : solver.solve(den * x).eval();
        const double ny = y.norm();
        if (!(ny > 0)) throw NumericalError("eigenvalue iteration collapsed");
        y /= ny;
        const double kx = y.dot(num * y);
        const double mx = y.dot(den * y);
        const double next = kx / mx;
        x = y;
        if (it > 3 && std::abs(next - lambda) <= 1e-12 * std::abs(next)) {
            lambda = next;
            break;
        }
        lambda = next;
    }
    return lambda;
}

} // namespace

double max_generalized_eigenvalue(const SparseSym& stiffness, const SparseSym& mass) {
    return rayleigh_extreme(stiffness, mass, true);
}

double min_generalized_eigenvalue(const SparseSym& stiffness, const SparseSym& mass) {
    return rayleigh_extreme(stiffness, mass, false);
}

double eval_p1(const TriMesh& mesh, const Eigen::VectorXd& interior_values,
               double x, double y) {
    const int n = mesh.nodes_per_side - 1;
    const double d = mesh.square_size();
    int ix = static_cast<int>(std::floor((x + 1.0) / d));
    int iy = static_cast<int>(std::floor((y + 1.0) / d));
    ix = std::clamp(ix, 0, n - 1);
    iy = std::clamp(iy, 0, n - 1);
    const double xi = (x - (-1.0 + ix * d)) / d;
    const double eta = (y - (-1.0 + iy * d)) / d;
    const int nps = mesh.nodes_per_side;
    const int a = iy * nps + ix, b = a + 1, c = b + nps, dd = a + nps;
    auto val = [&](int node) {
        const int di = mesh.interior_index[node];
        return di >= 0 ? interior_values[di] : 0.0;
    };
    if (xi >= eta) // below the square diagonal, triangle (a,b,c)
        return (1.0 - xi) * val(a) + (xi - eta) * val(b) + eta * val(c);
    return (1.0 - eta) * val(a) + xi * val(c) + (eta - xi) * val(dd);
}

} // namespace bvwave
