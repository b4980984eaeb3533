#pragma once

#include "bvwave/fields.hpp"
#include "bvwave/timefun.hpp"

namespace bvwave {

// Sparse control: per component a finite list of time atoms (jump positions
// with weights) plus a constant offset. The atoms are the derivative measure
// of the induced BV control function.
struct MeasureControl {
    struct Atom {
        double t = 0;
        double weight = 0;
    };
    std::vector<std::vector<Atom>> atoms; // per component, times strictly increasing in (0,T)
    Eigen::VectorXd offset;

    int components() const { return static_cast<int>(atoms.size()); }
    int total_atoms() const;
    double tv(int component) const; // sum of |weight|
    // sort by time, merge atoms closer than tol (weights add, position is the
    // |weight|-weighted mean of the group), drop zero weights
    void normalize(double tol);
};

// u_i(t) = sum_l c_l (1_{(t_l, T]}(t) - (T - t_l)/T) + offset_i.
// The atom part has exact zero mean, so mean(u_i) == offset_i.
StepFunction apply_B(const MeasureControl& control, int component, double T);

// First adjoint functional per actuator: p1_i(t) = -int_t^T (adjoint state, g_i) ds,
// exactly piecewise quadratic because the integrand is piecewise linear in time.
// g_loads are the actuator load vectors (g_i, phi_j).
std::vector<PiecewiseQuadratic> compute_p1(const SpaceTimeField& adjoint,
                                           const std::vector<Eigen::VectorXd>& g_loads);

// z = dp1/dt; its nodal values are exactly the pairings (adjoint slice, g_load).
PiecewiseLinear compute_z(const PiecewiseQuadratic& p1);

struct BStarResult {
    std::vector<PiecewiseQuadratic> wprime; // one per component
    Eigen::VectorXd pairing;                // integral of q * g_j over Omega_T
};

// Predual action: w'_j(t) = -p1_j(t) + ((t - T)/T) * pairing_j with
// pairing_j = -p1_j(0), so w'_j vanishes at both endpoints exactly.
BStarResult apply_B_star(const SpaceTimeField& q, const std::vector<Eigen::VectorXd>& g_loads);

// <(v, c), B*(q)> = sum_i [ sum_l weight * wprime_i(t_l) + offset_i * pairing_i ].
double duality_pairing(const MeasureControl& control, const BStarResult& bs);

} // namespace bvwave
