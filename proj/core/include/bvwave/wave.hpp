#pragma once

#include <Eigen/SparseCholesky>

#include "bvwave/fields.hpp"

namespace bvwave {

// Scheme parameters. sigma weights the stabilization term; sigma >= 1/4 is
// unconditionally stable, below that the gate inequalities bind.
struct SchemeParams {
    double sigma = 0.25;
    double eps0 = 0.1; // margin parameter of the conditional gate inequalities
    double c2 = 1.0;   // bound constant of the sigma magnitude inequality
    bool unconditional() const { return sigma >= 0.25; }
};

struct StabilityReport {
    bool pass = false;
    bool unconditional = false;
    double sigma = 0, tau = 0, h = 0;
    double c1 = 0; // h^2 times the largest eigenvalue of K x = lambda M x
    double rhs1 = 0, rhs2 = 0, rhs3 = 0;
    bool ineq1 = true, ineq2 = true, ineq3 = true;
    const char* failed() const; // name of the first failed inequality, else nullptr
};

// Evaluates the gate inequalities
//   sigma >= 1/4 - c1 h^2 (1 - eps0^2) / tau^2
//   sigma >= (1 + eps0^2)/4 - c1 h^2 / tau^2
//   |sigma| tau^2 <= 2 (c2 h^2 + tau^2)
// with c1 measured per mesh. For sigma >= 1/4 only the third is checked.
StabilityReport stability_gate(const SparseSym& stiffness, const SparseSym& mass,
                               double h, double tau, const SchemeParams& params);

// Time stepper for the damped-free second-order wave system on one level.
// The matrix M + sigma tau^2 K is factored once at construction and shared
// by every forward and adjoint solve. For sigma < 1/4 a passing gate report
// must be supplied.
class WaveOperator {
  public:
    WaveOperator(const SparseSym& mass, const SparseSym& stiffness, TimeGrid grid,
                 SchemeParams params, const StabilityReport* gate = nullptr);

    // Interior recurrence (A = M + sigma tau^2 K):
    //   A (y_{m+1} - 2 y_m + y_{m-1}) = tau r_m - tau^2 K y_m
    // started from y_0 (Ritz cofficients of the initial state) and
    //   y_1 = y_0 + A^{-1} (tau (b1 + r_0) - (tau^2/2) K y_0)
    // where b1 is the load vector of the initial velocity. Null pointers mean
    // zero data.
    SpaceTimeField solve_forward(const TimeLoad* f, const Eigen::VectorXd* y0,
                                 const Eigen::VectorXd* v0_load) const;

    // Adjoint of the forward map with terminal conditions, computed by index
    // reversal of the load, a zero-data forward solve, and field reversal.
    SpaceTimeField solve_adjoint(const TimeLoad& w) const;

    const TimeGrid& grid() const { return grid_; }
    const SchemeParams& params() const { return params_; }
    const SparseSym& mass() const { return *mass_; }
    const SparseSym& stiffness() const { return *stiffness_; }
    int dofs() const { return static_cast<int>(mass_->rows()); }

  private:
    const SparseSym* mass_;
    const SparseSym* stiffness_;
    TimeGrid grid_;
    SchemeParams params_;
    Eigen::SimplicialLDLT<SparseSym> system_;
};

// Dense space-time Galerkin solve of the same discrete problem, assembled
// from the weak form with exact time-basis matrices. Independent oracle for
// the stepping scheme; refuses problems larger than ~2600 unknowns.
SpaceTimeField galerkin_oracle(const SparseSym& mass, const SparseSym& stiffness,
                               const TimeGrid& grid, double sigma, const TimeLoad* f,
                               const Eigen::VectorXd* y0, const Eigen::VectorXd* v0_load);

// Residual of a field in the assembled Galerkin system, scaled by the
// system magnitude. Near zero iff the field solves the discrete weak form.
// The initial state enters through y.slice[0].
double galerkin_residual(const SparseSym& mass, const SparseSym& stiffness,
                         const TimeGrid& grid, double sigma, const TimeLoad* f,
                         const Eigen::VectorXd* v0_load, const SpaceTimeField& y);

// Crank-Nicolson on the first-order system with piecewise-constant-in-time
// interval forcing; algebraically identical to the scheme at sigma = 1/4.
SpaceTimeField crank_nicolson_reference(const SparseSym& mass, const SparseSym& stiffness,
                                        const TimeGrid& grid, const Eigen::VectorXd& y0,
                                        const Eigen::VectorXd& v0_load,
                                        const std::vector<Eigen::VectorXd>& interval_loads);

// Leapfrog with a Taylor first step; identical to the scheme at sigma = 0.
SpaceTimeField leapfrog_reference(const SparseSym& mass, const SparseSym& stiffness,
                                  const TimeGrid& grid, const Eigen::VectorXd& y0,
                                  const Eigen::VectorXd& v0_load,
                                  const std::vector<Eigen::VectorXd>& interval_loads);

struct NormCheckReport {
    double max_state_norm = 0; // max over time nodes of the spatial L2 norm
    double data_norm = 0;      // energy-type norm of the problem data
    double ratio = 0;
    bool vacuous = false; // zero data, nothing to bound
};

// Diagnostic ratio max_m ||y_m||_L2 / data norm. The data norm combines the
// initial state H1 seminorm, initial velocity L2 norm, and the L1(L2) size
// of the forcing supplied by the caller.
NormCheckReport stability_norm_check(const SpaceTimeField& y, const SparseSym& mass,
                                     const SparseSym& stiffness, const Eigen::VectorXd* y0,
                                     const Eigen::VectorXd* v0_load, double forcing_l1_l2);

} // namespace bvwave
