#pragma once

#include <functional>
#include <vector>

#include "bvwave/assembly.hpp"
#include "bvwave/timefun.hpp"

namespace bvwave {

// Space-time function, P1 in space (interior dofs) and nodal-hat in time:
// slice[m] holds the spatial coefficients at time node m.
struct SpaceTimeField {
    TimeGrid grid;
    std::vector<Eigen::VectorXd> slice; // grid.steps + 1 entries
    int dofs() const { return slice.empty() ? 0 : static_cast<int>(slice[0].size()); }
    bool all_finite() const;
};

// Dual-side representation of a forcing or data term: r[m][i] is the raw
// space-time integral of f * e_m * phi_i. Pairing a field against a TimeLoad
// gives the exact L2(Omega_T) inner product with f.
struct TimeLoad {
    TimeGrid grid;
    std::vector<Eigen::VectorXd> r;
};

SpaceTimeField zero_field(const TimeGrid& grid, int dofs);
SpaceTimeField reversed(const SpaceTimeField& f);
TimeLoad reversed(const TimeLoad& f);

void axpy(SpaceTimeField& y, double alpha, const SpaceTimeField& x);
void axpy(TimeLoad& y, double alpha, const TimeLoad& x);

// Exact L2(Omega_T) inner product of two same-grid fields (time-exact
// trapezoid-free formula through the hat-basis mass tridiagonal).
double st_inner(const SpaceTimeField& a, const SpaceTimeField& b, const SparseSym& mass);
double st_norm_sq(const SpaceTimeField& a, const SparseSym& mass);

// <a, f> for the f represented by the load.
double pair_load(const SpaceTimeField& a, const TimeLoad& load);

// TimeLoad of a same-grid field (time-mass tridiagonal times spatial mass).
TimeLoad load_of_field(const SpaceTimeField& f, const SparseSym& mass);

// TimeLoad of u(t) * g(x) with u a step function, exact breakpoint splitting.
TimeLoad load_of_step_forcing(const StepFunction& u, const Eigen::VectorXd& g_load,
                              const TimeGrid& grid);

// TimeLoad of theta(t) * g(x) with smooth theta, Gauss-Legendre in time.
TimeLoad load_of_smooth_forcing(const std::function<double(double)>& theta,
                                const Eigen::VectorXd& g_load, const TimeGrid& grid);

// Nested-mesh transfer. Prolongation reproduces the coarse function exactly
// on the fine mesh; restriction is its transpose acting on loads.
Eigen::VectorXd prolong_space_once(const TriMesh& coarse, const TriMesh& fine,
                                   const Eigen::VectorXd& v);
Eigen::VectorXd restrict_space_once(const TriMesh& coarse, const TriMesh& fine,
                                    const Eigen::VectorXd& v);

// Field transfer from the first mesh of the chain to the last, then time
// refinement to steps_to (a power-of-two multiple of f.grid.steps).
SpaceTimeField prolong_field(const SpaceTimeField& f,
                             const std::vector<const TriMesh*>& chain, int steps_to);

// Transpose of prolong_field on the dual side: fine loads to coarse loads.
TimeLoad restrict_load(const TimeLoad& fine, const std::vector<const TriMesh*>& chain,
                       int steps_to);

} // namespace bvwave
