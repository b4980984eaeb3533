#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "bvwave/pdap.hpp"
#include "bvwave/scenario.hpp"

using namespace bvwave;

namespace {

double subproblem_objective(const SubproblemModel& m, const Eigen::VectorXd& q) {
    double obj = 0.5 * q.dot(m.gram * q) - m.linear.dot(q);
    for (int l = 0; l < m.n_atoms; ++l) obj += m.alpha[l] * std::abs(q[l]);
    return obj;
}

// exact minimizer by enumerating sign patterns of the atom block; the offset
// block is always free
double brute_force_objective(const SubproblemModel& m) {
    const int n = m.n_atoms + m.n_offsets;
    int total = 1;
    for (int l = 0; l < m.n_atoms; ++l) total *= 3;
    double best = subproblem_objective(m, Eigen::VectorXd::Zero(n));
    for (int code = 0; code < total; ++code) {
        int c = code;
        std::vector<int> sign(m.n_atoms);
        for (int l = 0; l < m.n_atoms; ++l) {
            sign[l] = (c % 3) - 1;
            c /= 3;
        }
        std::vector<int> free_idx;
        for (int l = 0; l < m.n_atoms; ++l)
            if (sign[l] != 0) free_idx.push_back(l);
        for (int j = 0; j < m.n_offsets; ++j) free_idx.push_back(m.n_atoms + j);
        if (free_idx.empty()) continue;
        const int nf = static_cast<int>(free_idx.size());
        Eigen::MatrixXd Gff(nf, nf);
        Eigen::VectorXd rhs(nf);
        for (int a = 0; a < nf; ++a) {
            for (int b = 0; b < nf; ++b) Gff(a, b) = m.gram(free_idx[a], free_idx[b]);
            rhs[a] = m.linear[free_idx[a]];
            if (free_idx[a] < m.n_atoms) rhs[a] -= m.alpha[free_idx[a]] * sign[free_idx[a]];
        }
        const Eigen::VectorXd qf = Gff.ldlt().solve(rhs);
        if ((Gff * qf - rhs).lpNorm<Eigen::Infinity>() > 1e-8) continue;
        bool consistent = true;
        for (int a = 0; a < nf && consistent; ++a)
            if (free_idx[a] < m.n_atoms && qf[a] * sign[free_idx[a]] < 0)
                consistent = false;
        if (!consistent) continue;
        Eigen::VectorXd q = Eigen::VectorXd::Zero(n);
        for (int a = 0; a < nf; ++a) q[free_idx[a]] = qf[a];
        best = std::min(best, subproblem_objective(m, q));
    }
    return best;
}

SubproblemModel random_model(std::mt19937& rng, int n_atoms, int n_offsets) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::uniform_real_distribution<double> adist(0.05, 0.6);
    const int n = n_atoms + n_offsets;
    Eigen::MatrixXd C(n + 4, n);
    for (int i = 0; i < C.rows(); ++i)
        for (int j = 0; j < n; ++j) C(i, j) = dist(rng);
    Eigen::VectorXd b(n + 4);
    for (int i = 0; i < b.size(); ++i) b[i] = dist(rng);
    SubproblemModel m;
    m.gram = C.transpose() * C;
    m.linear = C.transpose() * b;
    m.alpha.resize(n_atoms);
    for (int l = 0; l < n_atoms; ++l) m.alpha[l] = adist(rng);
    m.n_atoms = n_atoms;
    m.n_offsets = n_offsets;
    return m;
}

} // namespace

TEST_CASE("magnitude subproblem matches brute-force enumeration") {
    std::mt19937 rng(509);
    for (int trial = 0; trial < 10; ++trial) {
        const int n_atoms = 1 + static_cast<int>(rng() % 5);
        const int n_offsets = static_cast<int>(rng() % 3);
        const SubproblemModel m = random_model(rng, n_atoms, n_offsets);
        const SubproblemResult got = solve_magnitude_subproblem(m, nullptr, 1e-12, 1e-10);
        CHECK(got.converged);
        const double obj = subproblem_objective(m, got.q);
        const double ref = brute_force_objective(m);
        const double scale = std::max({std::abs(ref), std::abs(obj), 1e-12});
        CHECK(std::abs(obj - ref) / scale < 1e-6);
    }
}

TEST_CASE("large penalties zero the atom block but leave offsets free") {
    std::mt19937 rng(71);
    SubproblemModel m = random_model(rng, 3, 1);
    m.alpha = Eigen::VectorXd::Constant(3, 1e3);
    const SubproblemResult got = solve_magnitude_subproblem(m, nullptr, 1e-12, 1e-10);
    CHECK(got.converged);
    for (int l = 0; l < 3; ++l) CHECK(got.q[l] == 0.0);
    // the offset solves its own normal equation given zero atoms
    const double expected = m.linear[3] / m.gram(3, 3);
    CHECK(got.q[3] == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("warm starts do not change the answer") {
    std::mt19937 rng(83);
    const SubproblemModel m = random_model(rng, 4, 1);
    const SubproblemResult cold = solve_magnitude_subproblem(m, nullptr, 1e-12, 1e-10);
    Eigen::VectorXd warm = cold.q;
    for (int i = 0; i < warm.size(); ++i) warm[i] += 0.01 * std::sin(3.0 * i);
    const SubproblemResult hot = solve_magnitude_subproblem(m, &warm, 1e-12, 1e-10);
    CHECK(hot.converged);
    CHECK(std::abs(subproblem_objective(m, hot.q) - subproblem_objective(m, cold.q)) <
          1e-8 * std::max(1.0, std::abs(subproblem_objective(m, cold.q))));
}

TEST_CASE("pdap on zero data returns the zero control immediately") {
    const Scenario sc = build_reference_scenario(PhiVariant::corrected);
    SchemeParams params;
    const Level level = make_level(2, sc.T, 8, params);
    PdapProblem prob;
    prob.op = level.op.get();
    prob.g_loads.push_back(actuator_load(sc, level.mesh, midpoint_rule()));
    prob.data_load.grid = level.grid;
    prob.data_load.r.assign(level.grid.steps + 1,
                            Eigen::VectorXd::Zero(level.mesh.n_interior()));
    prob.data_sq = 0;
    PdapOptions opts;
    opts.alpha = Eigen::VectorXd::Constant(1, sc.alpha);
    opts.gap_tol = 1e-14;
    const PdapResult res = run_pdap(prob, opts);
    CHECK(res.converged);
    CHECK(res.control.total_atoms() == 0);
    CHECK(res.control.offset[0] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(res.cost == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("small reference problem solves with a clean certificate") {
    const Scenario sc = build_reference_scenario(PhiVariant::corrected);
    SchemeParams params;
    const Level ref = make_level(4, sc.T, 32, params);
    const Level level = make_level(3, sc.T, 16, params);
    const SpaceTimeField ref_state = compute_reference_state(sc, ref);
    const PdapProblem prob = build_pdap_problem(sc, level, ref, ref_state);
    const PdapOptions opts = scenario_pdap_options(sc);
    const PdapResult res = run_pdap(prob, opts);

    CHECK(res.converged);
    CHECK(res.kkt_violation < opts.kkt_tol);
    CHECK(res.offset_residual < 1e-10);
    CHECK(res.cost < 0.5 * prob.data_sq);
    CHECK(res.cost > 0);
    REQUIRE(!res.history.empty());
    // outer iterations never increase the cost beyond roundoff
    for (size_t i = 1; i < res.history.size(); ++i)
        CHECK(res.history[i].cost <= res.history[i - 1].cost + 1e-10);
    for (const auto& a : res.control.atoms[0]) {
        CHECK(a.t > 0.0);
        CHECK(a.t < sc.T);
        CHECK(a.weight != 0.0);
    }
    // the gap at the last iterate is below the stopping tolerance
    const double gap_tol = opts.gap_tol > 0 ? opts.gap_tol
                                            : opts.gap_tol_rel * 0.5 * prob.data_sq;
    CHECK(res.gap <= gap_tol);
}
