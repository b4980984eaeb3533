#pragma once

#include <array>
#include <vector>

namespace bvwave {

// Uniform criss-cross triangulation of the square (-1,1)^2 at dyadic level k:
// 2^k x 2^k grid squares, each split along its lower-left to upper-right
// diagonal. Nodes are numbered lexicographically, x fastest. Homogeneous
// Dirichlet boundary nodes are flagged and excluded from the dof set.
// Meshes at consecutive levels are nested: every coarse triangle is the
// union of four fine triangles.
struct TriMesh {
    int level = 0;
    int nodes_per_side = 0;
    std::vector<double> node_x, node_y;
    std::vector<std::array<int, 3>> triangles;
    std::vector<bool> boundary;      // per node, true iff max(|x|,|y|) == 1
    std::vector<int> interior_index; // node -> dof index, -1 on the boundary
    std::vector<int> interior_node;  // dof index -> node

    int n_nodes() const { return static_cast<int>(node_x.size()); }
    int n_triangles() const { return static_cast<int>(triangles.size()); }
    int n_interior() const { return static_cast<int>(interior_node.size()); }
    double square_size() const;  // grid square side, 2 * 2^-k
    double mesh_size() const;    // h, the element diameter (square diagonal)
    double triangle_area(int t) const;
};

// level must lie in [1, 10].
TriMesh build_uniform_mesh(int level);

// Symmetric quadrature on the reference triangle in barycentric coordinates.
// Weights sum to 1 and scale by the physical area.
struct QuadratureRule {
    std::vector<std::array<double, 3>> points;
    std::vector<double> weights;
    int degree = 0; // highest total polynomial degree integrated exactly
};

const QuadratureRule& midpoint_rule();    // 3 edge midpoints, degree 2
const QuadratureRule& seven_point_rule(); // degree 5

} // namespace bvwave
