#include "bvwave/wave.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "bvwave/errors.hpp"

namespace bvwave {

const char* StabilityReport::failed() const {
    if (!ineq1) return "sigma >= 1/4 - c1 h^2 (1 - eps0^2) / tau^2";
    if (!ineq2) return "sigma >= (1 + eps0^2)/4 - c1 h^2 / tau^2";
    if (!ineq3) return "|sigma| tau^2 <= 2 (c2 h^2 + tau^2)";
    return nullptr;
}

StabilityReport stability_gate(const SparseSym& stiffness, const SparseSym& mass,
                               double h, double tau, const SchemeParams& params) {
    StabilityReport rep;
    rep.sigma = params.sigma;
    rep.tau = tau;
    rep.h = h;
    rep.unconditional = params.unconditional();
    rep.c1 = h * h * max_generalized_eigenvalue(stiffness, mass);
    const double e2 = params.eps0 * params.eps0;
    rep.rhs1 = 0.25 - rep.c1 * h * h * (1.0 - e2) / (tau * tau);
    rep.rhs2 = 0.25 * (1.0 + e2) - rep.c1 * h * h / (tau * tau);
    rep.rhs3 = 2.0 * (params.c2 * h * h + tau * tau);
    rep.ineq3 = std::abs(params.sigma) * tau * tau <= rep.rhs3;
    if (rep.unconditional) {
        rep.ineq1 = rep.ineq2 = true;
        rep.pass = rep.ineq3;
    } else {
        rep.ineq1 = params.sigma >= rep.rhs1;
        rep.ineq2 = params.sigma >= rep.rhs2;
        rep.pass = rep.ineq1 && rep.ineq2 && rep.ineq3;
    }
    return rep;
}

WaveOperator::WaveOperator(const SparseSym& mass, const SparseSym& stiffness,
                           TimeGrid grid, SchemeParams params, const StabilityReport* gate)
    : mass_(&mass), stiffness_(&stiffness), grid_(grid), params_(params) {
    if (!params_.unconditional() && (gate == nullptr || !gate->pass))
        throw GateError("gated scheme (sigma < 1/4) requires a passing stability report");
    const double tau = grid_.tau();
    SparseSym system = mass + params_.sigma * tau * tau * stiffness;
    system_.compute(system);
    if (system_.info() != Eigen::Success)
        throw NumericalError("factorization of M + sigma tau^2 K failed");
}

SpaceTimeField WaveOperator::solve_forward(const TimeLoad* f, const Eigen::VectorXd* y0,
                                           const Eigen::VectorXd* v0_load) const {
    const int M = grid_.steps;
    const int n = dofs();
    const double tau = grid_.tau();
    SpaceTimeField y = zero_field(grid_, n);
    if (y0) y.slice[0] = *y0;

    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    if (v0_load) rhs += tau * *v0_load;
    if (f) rhs += tau * f->r[0];
    rhs -= 0.5 * tau * tau * (*stiffness_ * y.slice[0]);
    y.slice[1] = y.slice[0] + system_.solve(rhs);

    for (int m = 1; m < M; ++m) {
        Eigen::VectorXd step = -(tau * tau) * (*stiffness_ * y.slice[m]);
        if (f) step += tau * f->r[m];
        y.slice[m + 1] = 2.0 * y.slice[m] - y.slice[m - 1] + system_.solve(step);
    }
    if (!y.all_finite()) throw NumericalError("forward solve produced non-finite values");
    return y;
}

SpaceTimeField WaveOperator::solve_adjoint(const TimeLoad& w) const {
    const TimeLoad wr = reversed(w);
    const SpaceTimeField p = solve_forward(&wr, nullptr, nullptr);
    return reversed(p);
}

namespace {

double hat(int j, double t, const TimeGrid& g) {
    const double tau = g.tau();
    const double s = 1.0 - std::abs(t - g.node(j)) / tau;
    return s > 0 ? s : 0.0;
}

double hat_deriv(int j, double t, const TimeGrid& g) {
    const double tau = g.tau();
    const double tj = g.node(j);
    if (t < tj - tau || t > tj + tau) return 0.0;
    return t < tj ? 1.0 / tau : -1.0 / tau;
}

// time-basis matrices assembled per interval with 2-point Gauss (exact here)
void time_matrices(const TimeGrid& g, Eigen::MatrixXd& mass_t, Eigen::MatrixXd& stiff_t) {
    const int M = g.steps;
    mass_t = Eigen::MatrixXd::Zero(M + 1, M + 1);
    stiff_t = Eigen::MatrixXd::Zero(M + 1, M + 1);
    const double q = 1.0 / std::sqrt(3.0);
    for (int m = 0; m < M; ++m) {
        const double t0 = g.node(m), t1 = g.node(m + 1);
        const double mid = 0.5 * (t0 + t1), half = 0.5 * (t1 - t0);
        for (const double xi : {-q, q}) {
            const double t = mid + half * xi;
            for (int j = std::max(0, m - 1); j <= std::min(M, m + 2); ++j) {
                for (int k = std::max(0, m - 1); k <= std::min(M, m + 2); ++k) {
                    mass_t(j, k) += half * hat(j, t, g) * hat(k, t, g);
                    stiff_t(j, k) += half * hat_deriv(j, t, g) * hat_deriv(k, t, g);
                }
            }
        }
    }
}

} // namespace

SpaceTimeField galerkin_oracle(const SparseSym& mass, const SparseSym& stiffness,
                               const TimeGrid& grid, double sigma, const TimeLoad* f,
                               const Eigen::VectorXd* y0, const Eigen::VectorXd* v0_load) {
    const int M = grid.steps;
    const int n = static_cast<int>(mass.rows());
    if ((M + 1) * n > 2600)
        throw NumericalError("galerkin_oracle size guard: " + std::to_string((M + 1) * n) +
                             " unknowns exceeds the dense-solve budget");
    Eigen::MatrixXd mt, at;
    time_matrices(grid, mt, at);
    const Eigen::MatrixXd md(mass);
    const Eigen::MatrixXd kd(stiffness);
    const double tau = grid.tau();
    const double stab = (sigma - 1.0 / 6.0) * tau * tau;

    // unknowns y_1..y_M blockwise; test functions eta = e_k phi, k=0..M-1
    // weak form: sum_m [ -At(m,k) (M + stab K) y_m + Mt(m,k) K y_m ] = rhs_k
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(M * n, M * n);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(M * n);
    Eigen::VectorXd y0v = y0 ? *y0 : Eigen::VectorXd::Zero(n);
    for (int k = 0; k < M; ++k) {
        for (int m = 0; m <= M; ++m) {
            const double ca = -at(m, k);
            const double cm = mt(m, k);
            if (ca == 0 && cm == 0) continue;
            const Eigen::MatrixXd block = ca * (md + stab * kd) + cm * kd;
            if (m == 0)
                rhs.segment(k * n, n) -= block * y0v;
            else
                A.block(k * n, (m - 1) * n, n, n) += block;
        }
        if (f) rhs.segment(k * n, n) += f->r[k];
    }
    if (v0_load) rhs.segment(0, n) += *v0_load;

    const auto lu = A.partialPivLu();
    Eigen::VectorXd sol = lu.solve(rhs);
    // one refinement step keeps the residual near machine precision for the
    // ill-conditioned fine-step systems
    sol += lu.solve(rhs - A * sol);
    SpaceTimeField y = zero_field(grid, n);
    y.slice[0] = y0v;
    for (int m = 1; m <= M; ++m) y.slice[m] = sol.segment((m - 1) * n, n);
    if (!y.all_finite()) throw NumericalError("galerkin_oracle produced non-finite values");
    return y;
}

double galerkin_residual(const SparseSym& mass, const SparseSym& stiffness,
                         const TimeGrid& grid, double sigma, const TimeLoad* f,
                         const Eigen::VectorXd* v0_load, const SpaceTimeField& y) {
    const int M = grid.steps;
    const int n = static_cast<int>(mass.rows());
    Eigen::MatrixXd mt, at;
    time_matrices(grid, mt, at);
    const Eigen::MatrixXd md(mass);
    const Eigen::MatrixXd kd(stiffness);
    const double tau = grid.tau();
    const double stab = (sigma - 1.0 / 6.0) * tau * tau;
    const double mat_norm = md.cwiseAbs().rowwise().sum().maxCoeff() +
                            (1.0 + std::abs(stab)) * kd.cwiseAbs().rowwise().sum().maxCoeff();
    double worst = 0, scale = 1e-300;
    for (int k = 0; k < M; ++k) {
        Eigen::VectorXd res = Eigen::VectorXd::Zero(n);
        for (int m = 0; m <= M; ++m) {
            const double ca = -at(m, k);
            const double cm = mt(m, k);
            if (ca == 0 && cm == 0) continue;
            res += (ca * (md + stab * kd) + cm * kd) * y.slice[m];
            scale = std::max(scale, (std::abs(ca) + std::abs(cm)) * mat_norm *
                                        y.slice[m].lpNorm<Eigen::Infinity>());
        }
        if (f) res -= f->r[k];
        if (k == 0 && v0_load) res -= *v0_load;
        worst = std::max(worst, res.lpNorm<Eigen::Infinity>());
    }
    return worst / scale;
}

SpaceTimeField crank_nicolson_reference(const SparseSym& mass, const SparseSym& stiffness,
                                        const TimeGrid& grid, const Eigen::VectorXd& y0,
                                        const Eigen::VectorXd& v0_load,
                                        const std::vector<Eigen::VectorXd>& interval_loads) {
    // first-order system y' = v, M v' = -K y + c(t), trapezoidal in both
    // equations, forcing constant on each interval
    const int M = grid.steps;
    const int n = static_cast<int>(mass.rows());
    const double tau = grid.tau();
    Eigen::SimplicialLDLT<SparseSym> msolve(mass);
    SparseSym sys = mass + 0.25 * tau * tau * stiffness;
    Eigen::SimplicialLDLT<SparseSym> ssolve(sys);
    if (msolve.info() != Eigen::Success || ssolve.info() != Eigen::Success)
        throw NumericalError("factorization failed in crank_nicolson_reference");

    SpaceTimeField y = zero_field(grid, n);
    y.slice[0] = y0;
    Eigen::VectorXd v = msolve.solve(v0_load);
    for (int m = 0; m < M; ++m) {
        const Eigen::VectorXd& c = interval_loads[m];
        // eliminate v_{m+1}: (M + tau^2/4 K) y_{m+1} =
        //   M y_m + tau M v_m - tau^2/4 K y_m + tau^2/2 c
        Eigen::VectorXd rhs = mass * y.slice[m] + tau * (mass * v) -
                              0.25 * tau * tau * (stiffness * y.slice[m]) +
                              0.5 * tau * tau * c;
        Eigen::VectorXd ynext = ssolve.solve(rhs);
        Eigen::VectorXd rhsv = -0.5 * (stiffness * (y.slice[m] + ynext)) + c;
        v = v + tau * msolve.solve(rhsv);
        y.slice[m + 1] = ynext;
    }
    return y;
}

SpaceTimeField leapfrog_reference(const SparseSym& mass, const SparseSym& stiffness,
                                  const TimeGrid& grid, const Eigen::VectorXd& y0,
                                  const Eigen::VectorXd& v0_load,
                                  const std::vector<Eigen::VectorXd>& interval_loads) {
    const int M = grid.steps;
    const int n = static_cast<int>(mass.rows());
    const double tau = grid.tau();
    Eigen::SimplicialLDLT<SparseSym> msolve(mass);
    if (msolve.info() != Eigen::Success)
        throw NumericalError("factorization failed in leapfrog_reference");

    SpaceTimeField y = zero_field(grid, n);
    y.slice[0] = y0;
    // Taylor first step with the first-interval forcing
    y.slice[1] = y0 + tau * msolve.solve(v0_load) +
                 0.5 * tau * tau * msolve.solve(interval_loads[0] - stiffness * y0);
    for (int m = 1; m < M; ++m) {
        // nodal forcing is the average of the adjacent interval loads
        const Eigen::VectorXd c = 0.5 * (interval_loads[m - 1] + interval_loads[m]);
        y.slice[m + 1] = 2.0 * y.slice[m] - y.slice[m - 1] +
                         tau * tau * msolve.solve(c - stiffness * y.slice[m]);
    }
    return y;
}

NormCheckReport stability_norm_check(const SpaceTimeField& y, const SparseSym& mass,
                                     const SparseSym& stiffness, const Eigen::VectorXd* y0,
                                     const Eigen::VectorXd* v0_load, double forcing_l1_l2) {
    NormCheckReport rep;
    for (const auto& s : y.slice)
        rep.max_state_norm = std::max(rep.max_state_norm, std::sqrt(s.dot(mass * s)));
    double data = forcing_l1_l2;
    if (y0) data += std::sqrt(y0->dot(stiffness * *y0));
    if (v0_load) {
        Eigen::SimplicialLDLT<SparseSym> msolve(mass);
        const Eigen::VectorXd v = msolve.solve(*v0_load);
        data += std::sqrt(v.dot(mass * v));
    }
    rep.data_norm = data;
    if (data == 0) {
        rep.vacuous = true;
        rep.ratio = 0;
    } else {
        rep.ratio = rep.max_state_norm / data;
    }
    return rep;
}

} // namespace bvwave
