#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "bvwave/timefun.hpp"

using namespace bvwave;

TEST_CASE("step function evaluation, integral, variation") {
    StepFunction u;
    u.breakpoints = {0.0, 0.5, 1.25, 2.0};
    u.values = {1.0, -2.0, 0.5};
    CHECK(u(0.25) == 1.0);
    CHECK(u(0.75) == -2.0);
    CHECK(u(1.9) == 0.5);
    // intervals are left-open: an interior breakpoint takes the left value
    CHECK(u(0.5) == 1.0);
    CHECK(u.integral() == doctest::Approx(0.5 - 1.5 + 0.375).epsilon(1e-15));
    CHECK(u.total_variation() == doctest::Approx(3.0 + 2.5).epsilon(1e-15));
    CHECK(u.mean() == doctest::Approx(u.integral() / 2.0).epsilon(1e-15));

    StepFunction c = constant_step(3.5, 2.0);
    CHECK(c(1.0) == 3.5);
    CHECK(c.total_variation() == 0.0);
    CHECK(l1_distance(u, u) == doctest::Approx(0.0));
    CHECK(l1_distance(c, constant_step(3.0, 2.0)) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("merge_equal removes breakpoints with tiny jumps only") {
    StepFunction u;
    u.breakpoints = {0.0, 0.4, 0.8, 2.0};
    u.values = {1.0, 1.0 + 1e-14, 2.0};
    u.merge_equal(1e-12);
    CHECK(u.values.size() == 2);
    CHECK(u.breakpoints.size() == 3);
    CHECK(u(0.6) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(u(1.0) == 2.0);
}

TEST_CASE("piecewise linear and quadratic evaluation agree at nodes") {
    TimeGrid grid{2.0, 8};
    PiecewiseLinear pl;
    pl.grid = grid;
    pl.values = Eigen::VectorXd::LinSpaced(9, -1.0, 3.0);
    for (int m = 0; m <= 8; ++m)
        CHECK(pl(grid.node(m)) == doctest::Approx(pl.values[m]).epsilon(1e-15));
    CHECK(pl(grid.node(3) + 0.5 * grid.tau()) ==
          doctest::Approx(0.5 * (pl.values[3] + pl.values[4])).epsilon(1e-15));

    PiecewiseQuadratic q;
    q.grid = grid;
    const double tau = grid.tau();
    // build the exact antiderivative of pl starting at 0.7: C^1 by construction
    double acc = 0.7;
    for (int m = 0; m < 8; ++m) {
        const double slope = (pl.values[m + 1] - pl.values[m]) / tau;
        q.a.push_back(0.5 * slope);
        q.b.push_back(pl.values[m]);
        q.c.push_back(acc);
        acc += 0.5 * tau * (pl.values[m] + pl.values[m + 1]);
    }
    CHECK(q(0.0) == doctest::Approx(0.7).epsilon(1e-15));
    CHECK(q(2.0) == doctest::Approx(acc).epsilon(1e-13));
    PiecewiseLinear dq = q.derivative();
    for (int m = 0; m <= 8; ++m)
        CHECK(dq.values[m] == doctest::Approx(pl.values[m]).epsilon(1e-12));
}

TEST_CASE("global_max_abs matches a dense grid oracle on continuous quadratics") {
    std::mt19937 rng(411);
    std::uniform_real_distribution<double> coef(-2.0, 2.0);
    for (int trial = 0; trial < 20; ++trial) {
        PiecewiseQuadratic q;
        q.grid = TimeGrid{2.0, 10};
        const double tau = q.grid.tau();
        double level = coef(rng);
        for (int m = 0; m < 10; ++m) {
            q.a.push_back(coef(rng));
            q.b.push_back(coef(rng));
            q.c.push_back(level);
            level = (q.a[m] * tau + q.b[m]) * tau + q.c[m];
        }
        const MaxAbsResult got = global_max_abs(q);
        double best = -1, tbest = 0;
        const int n = 200001;
        for (int i = 0; i < n; ++i) {
            const double t = 2.0 * i / (n - 1);
            const double v = std::abs(q(t));
            if (v > best + 1e-15) {
                best = v;
                tbest = t;
            }
        }
        CHECK(got.value >= best - 1e-12);
        CHECK(std::abs(q(got.t)) == doctest::Approx(got.value).epsilon(1e-12));
        // a parabola-vertex maximum can beat the grid by at most O(grid step)^2
        CHECK(got.value - best < 1e-8);
        CHECK(std::abs(got.t - tbest) < 2.1e-5);
    }
}

TEST_CASE("global_max_abs sees jump limits of discontinuous inputs") {
    std::mt19937 rng(412);
    std::uniform_real_distribution<double> coef(-2.0, 2.0);
    for (int trial = 0; trial < 10; ++trial) {
        PiecewiseQuadratic q;
        q.grid = TimeGrid{2.0, 6};
        const double tau = q.grid.tau();
        for (int m = 0; m < 6; ++m) {
            q.a.push_back(coef(rng));
            q.b.push_back(coef(rng));
            q.c.push_back(coef(rng));
        }
        // exact supremum per piece: endpoints and interior vertex
        double sup = 0;
        for (int m = 0; m < 6; ++m) {
            auto val = [&](double s) {
                return std::abs((q.a[m] * s + q.b[m]) * s + q.c[m]);
            };
            sup = std::max({sup, val(0.0), val(tau)});
            if (q.a[m] != 0.0) {
                const double s = -q.b[m] / (2.0 * q.a[m]);
                if (s > 0.0 && s < tau) sup = std::max(sup, val(s));
            }
        }
        CHECK(global_max_abs(q).value == doctest::Approx(sup).epsilon(1e-14));
    }
}

TEST_CASE("global_max_abs ties resolve to the earliest time") {
    PiecewiseQuadratic q;
    q.grid = TimeGrid{2.0, 2};
    // |q| peaks with equal value 1 at t = 0.5 and t = 1.5
    q.a = {-4.0, -4.0};
    q.b = {4.0, 4.0};
    q.c = {0.0, 0.0};
    const MaxAbsResult got = global_max_abs(q);
    CHECK(got.value == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(got.t == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("step_hat_integrals splits breakpoints exactly") {
    TimeGrid grid{2.0, 7}; // tau = 2/7, breakpoints land inside intervals
    StepFunction u;
    u.breakpoints = {0.0, 1.0 / 3.0, 1.0, 5.0 / 3.0, 2.0};
    u.values = {0.5, 1.5, -1.0, 0.25};
    const Eigen::VectorXd got = step_hat_integrals(u, grid);
    REQUIRE(got.size() == 8);
    // oracle by fine Gauss panels per interval against each hat
    for (int m = 0; m <= 7; ++m) {
        auto hat = [&](double t) {
            const double tau = grid.tau();
            const double d = std::abs(t - grid.node(m));
            return d >= tau ? 0.0 : 1.0 - d / tau;
        };
        double oracle = 0;
        // integrate on subintervals split at breakpoints and grid nodes
        std::vector<double> cuts = u.breakpoints;
        for (int j = 0; j <= 7; ++j) cuts.push_back(grid.node(j));
        std::sort(cuts.begin(), cuts.end());
        for (size_t j = 0; j + 1 < cuts.size(); ++j) {
            if (cuts[j + 1] - cuts[j] < 1e-14) continue;
            oracle += gauss_integral([&](double t) { return u(t) * hat(t); }, cuts[j],
                                     cuts[j + 1], 1);
        }
        CHECK(got[m] == doctest::Approx(oracle).epsilon(1e-12));
    }
}

TEST_CASE("smooth_hat_integrals matches the step version on a step-like refinement") {
    TimeGrid grid{2.0, 16};
    auto f = [](double t) { return std::sin(3.0 * t) + 0.25 * t; };
    const Eigen::VectorXd got = smooth_hat_integrals(f, grid);
    // oracle: high-panel Gauss against each hat
    for (int m = 0; m <= 16; ++m) {
        const double tau = grid.tau();
        const double lo = std::max(0.0, grid.node(m) - tau);
        const double hi = std::min(2.0, grid.node(m) + tau);
        auto hat = [&](double t) {
            const double d = std::abs(t - grid.node(m));
            return d >= tau ? 0.0 : 1.0 - d / tau;
        };
        const double oracle =
            gauss_integral([&](double t) { return f(t) * hat(t); }, lo, hi, 64);
        CHECK(got[m] == doctest::Approx(oracle).epsilon(1e-13));
    }
}

TEST_CASE("step_linear_integral is exact against symbolic pieces") {
    TimeGrid grid{2.0, 5};
    PiecewiseLinear d;
    d.grid = grid;
    d.values = Eigen::VectorXd::Zero(6);
    for (int m = 0; m <= 5; ++m) d.values[m] = std::cos(1.1 * m);
    StepFunction u;
    u.breakpoints = {0.0, 0.3, 1.1, 2.0};
    u.values = {2.0, -1.0, 0.5};
    double oracle = 0;
    std::vector<double> cuts = u.breakpoints;
    for (int m = 0; m <= 5; ++m) cuts.push_back(grid.node(m));
    std::sort(cuts.begin(), cuts.end());
    for (size_t j = 0; j + 1 < cuts.size(); ++j) {
        if (cuts[j + 1] - cuts[j] < 1e-14) continue;
        oracle += gauss_integral([&](double t) { return u(t) * d(t); }, cuts[j],
                                 cuts[j + 1], 1);
    }
    CHECK(step_linear_integral(u, d) == doctest::Approx(oracle).epsilon(1e-13));
}

TEST_CASE("gauss16 integrates high-degree polynomials exactly") {
    // 16-point Gauss is exact through degree 31
    auto poly = [](double t) {
        double p = 1;
        for (int i = 0; i < 10; ++i) p *= (t - 0.1 * i);
        return p;
    };
    const double a = -0.5, b = 1.5;
    const double got = gauss_integral(poly, a, b, 1);
    const double ref = gauss_integral(poly, a, b, 8);
    CHECK(got == doctest::Approx(ref).epsilon(1e-13));
    double wsum = 0;
    for (const auto& [x, w] : gauss16()) {
        CHECK(std::abs(x) < 1.0);
        wsum += w;
    }
    CHECK(wsum == doctest::Approx(2.0).epsilon(1e-14));
}
