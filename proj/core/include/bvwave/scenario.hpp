#pragma once

#include <memory>

#include "bvwave/pdap.hpp"

namespace bvwave {

enum class PhiVariant { corrected, printed };

// Manufactured tracking problem on (-1,1)^2 x (0,2) with one actuator
// g = cos(pi x/2) cos(pi y/2) (unit L2 norm) and a known optimal control:
// jumps at {1/3, 1, 5/3} with weights {+1, -1, +1}, zero offset. The data
// offset theta(t) g(x) is chosen so the adjoint certificate p1 is available
// in closed form. The `printed` variant uses an alternative adjoint profile
// whose certificate does not peak at the jump set; it exists for comparison
// runs and fails the optimality checks by design.
struct Scenario {
    double T = 2.0;
    double alpha = 6e-3;
    SpatialFn g, g_x, g_y;
    std::function<double(double)> psi;      // adjoint time profile
    std::function<double(double)> theta;    // (d_tt + pi^2/2) psi
    std::function<double(double)> p1_exact; // antiderivative of psi vanishing at T
    MeasureControl exact_control;
    StepFunction exact_u;
    double exact_tv = 3.0;
    double w_sq = 0;      // ||theta(t) g(x)||^2 over the space-time cylinder
    double exact_cost = 0; // w_sq / 2 + alpha * exact_tv
    PhiVariant variant = PhiVariant::corrected;
};

Scenario build_reference_scenario(PhiVariant variant);

// One discretization level: mesh, matrices, grid, gate report, factored
// operator. Throws GateError when the gate refuses the parameters.
struct Level {
    int k = 0;
    TriMesh mesh;
    SparseSym mass, stiffness;
    TimeGrid grid;
    SchemeParams params;
    StabilityReport gate;
    std::unique_ptr<WaveOperator> op;
};

Level make_level(int k, double T, int steps, const SchemeParams& params);

// Actuator load vector (g, phi_i) under the given rule.
Eigen::VectorXd actuator_load(const Scenario& sc, const TriMesh& mesh,
                              const QuadratureRule& rule);

// Discrete response to the exact control on the reference level, with
// measurement-grade (degree 5) actuator loads.
SpaceTimeField compute_reference_state(const Scenario& sc, const Level& ref);

// Tracking problem for PDAP on `level` against y_d = ref_state - theta g.
// Column loads use the solver-facing (degree 2) rule; the data pairing is
// restricted from the reference level through the nested transfer.
PdapProblem build_pdap_problem(const Scenario& sc, const Level& level, const Level& ref,
                               const SpaceTimeField& ref_state);

PdapOptions scenario_pdap_options(const Scenario& sc);

// Max over time nodes of the spatial L2 error of the computed standing wave
// y = cos(sqrt(pi^2/2) t) g with y0 = g, y1 = 0, f = 0.
double standing_wave_error(const Level& level);

} // namespace bvwave
