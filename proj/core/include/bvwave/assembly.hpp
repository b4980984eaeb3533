#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <functional>

#include "bvwave/mesh.hpp"

namespace bvwave {

using SparseSym = Eigen::SparseMatrix<double>;
using SpatialFn = std::function<double(double, double)>;

// P1 mass and stiffness on the interior (Dirichlet-eliminated) dof set.
// Element matrices are closed-form: mass (A/12)[[2,1,1],[1,2,1],[1,1,2]],
// stiffness from the constant element gradients.
SparseSym assemble_mass(const TriMesh& mesh);
SparseSym assemble_stiffness(const TriMesh& mesh);

// All-node variants, for diagnostics and invariant checks.
SparseSym assemble_mass_full(const TriMesh& mesh);
SparseSym assemble_stiffness_full(const TriMesh& mesh);

// Interior load vector b_i = integral of f * phi_i, by the given rule.
Eigen::VectorXd assemble_load(const TriMesh& mesh, const SpatialFn& f,
                              const QuadratureRule& rule);

// Ritz projection onto the interior P1 space: solves
// (grad R y0, grad phi_i) = (grad y0, grad phi_i) with the gradient of y0
// supplied analytically and integrated elementwise by the given rule.
Eigen::VectorXd ritz_projection(const TriMesh& mesh, const SparseSym& stiffness,
                                const SpatialFn& grad_x, const SpatialFn& grad_y,
                                const QuadratureRule& rule);

// Extremal eigenvalues of K x = lambda M x on the interior space, by
// (inverse) power iteration on the pencil. Deterministic start vector.
double max_generalized_eigenvalue(const SparseSym& stiffness, const SparseSym& mass);
double min_generalized_eigenvalue(const SparseSym& stiffness, const SparseSym& mass);

// Pointwise evaluation of an interior-coefficient P1 field (zero on the boundary).
double eval_p1(const TriMesh& mesh, const Eigen::VectorXd& interior_values,
               double x, double y);

} // namespace bvwave
