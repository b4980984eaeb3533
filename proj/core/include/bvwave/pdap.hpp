#pragma once

#include "bvwave/controls.hpp"
#include "bvwave/wave.hpp"

namespace bvwave {

struct PdapOptions {
    Eigen::VectorXd alpha;         // per-component penalty weights, positive
    int max_iterations = 400;
    double gap_tol = 0;            // absolute stopping gap; 0 selects gap_tol_rel * J(0)
    double gap_tol_rel = 1e-9;
    double tv_cap = 0;             // surrogate radius R; 0 selects 10 * J(0) / min alpha
    double merge_tol_rel = 1e-12;  // in-loop atom merge distance as a fraction of T
    double readout_merge_rel = 1e-5; // final-control cluster width as a fraction of T
    double gamma_min_rel = 1e-12;  // continuation floor as a fraction of gamma0
    double subproblem_tol = 1e-10; // KKT residual bound for the magnitude subproblem
    double kkt_tol = 1e-2;         // reporting threshold for the optimality certificate
};

// Finite-dimensional magnitude problem over the active columns:
//   min over q of  1/2 q^T G q - r^T q + sum_l alpha_l |q_l|
// with the l1 term over the atom block only; offsets are unpenalized.
struct SubproblemModel {
    Eigen::MatrixXd gram;   // atoms first, then offsets
    Eigen::VectorXd linear; // <column, data>
    Eigen::VectorXd alpha;  // one entry per atom column
    int n_atoms = 0;
    int n_offsets = 0;
};

struct SubproblemResult {
    Eigen::VectorXd q;
    double kkt_residual = 0; // against the gamma_min-regularized problem
    bool converged = false;
    int iterations = 0;
    bool used_fallback = false; // proximal-gradient fallback engaged
};

// Semismooth-Newton active-set solve with gamma-continuation from
// trace(G)/dim down to gamma_min_rel times that, warm-started throughout;
// falls back to proximal gradient when the active set cycles.
SubproblemResult solve_magnitude_subproblem(const SubproblemModel& model,
                                            const Eigen::VectorXd* warm_start,
                                            double gamma_min_rel, double tol);

// Everything fixed for one discretization level. data_load and data_sq
// describe b = y_d minus the response to fixed initial data, so the tracking
// objective is 1/2 || sum q_j col_j - b ||^2.
struct PdapProblem {
    const WaveOperator* op = nullptr;
    std::vector<Eigen::VectorXd> g_loads;
    TimeLoad data_load;
    double data_sq = 0;
};

struct PdapHistoryRow {
    int iteration = 0;
    double cost = 0;
    double kkt_violation = 0;    // max over components of ||p1||_inf / alpha - 1
    double gap = 0;              // surrogate duality gap
    int active_atoms = 0;
    double offset_residual = 0;  // max |p1(0)|
};

struct PdapResult {
    MeasureControl control;
    SpaceTimeField state;               // tracking response of the returned control
    std::vector<PiecewiseQuadratic> p1; // at the returned control
    double cost = 0;
    double gap = 0;
    double kkt_violation = 0;
    double offset_residual = 0;
    bool converged = false;
    int iterations = 0;
    std::vector<PdapHistoryRow> history;
};

// Conditional-gradient outer loop: insert the global maximizer of |p1_i| per
// component, re-solve the magnitude subproblem over the enlarged support,
// prune exact zeros, merge collapsing atoms, stop when the surrogate gap
// falls below gap_tol.
PdapResult run_pdap(const PdapProblem& problem, const PdapOptions& options);

} // namespace bvwave
