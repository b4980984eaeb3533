#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>
#include <random>

#include "bvwave/fields.hpp"

using namespace bvwave;

namespace {

SpaceTimeField random_field(const TimeGrid& grid, int dofs, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    SpaceTimeField f = zero_field(grid, dofs);
    for (auto& s : f.slice)
        for (int i = 0; i < dofs; ++i) s[i] = dist(rng);
    return f;
}

} // namespace

TEST_CASE("st_inner matches time-quadrature of the nodal interpolants") {
    const TriMesh mesh = build_uniform_mesh(2);
    const SparseSym mass = assemble_mass(mesh);
    const TimeGrid grid{2.0, 6};
    const int n = mesh.n_interior();
    const SpaceTimeField a = random_field(grid, n, 7);
    const SpaceTimeField b = random_field(grid, n, 8);

    // both fields are linear in t on each interval; Simpson is exact for the
    // quadratic integrand t -> a(t)^T M b(t)
    double oracle = 0;
    const double tau = grid.tau();
    for (int m = 0; m < grid.steps; ++m) {
        const Eigen::VectorXd mid_a = 0.5 * (a.slice[m] + a.slice[m + 1]);
        const Eigen::VectorXd mid_b = 0.5 * (b.slice[m] + b.slice[m + 1]);
        oracle += tau / 6.0 *
                  (a.slice[m].dot(mass * b.slice[m]) + 4.0 * mid_a.dot(mass * mid_b) +
                   a.slice[m + 1].dot(mass * b.slice[m + 1]));
    }
    CHECK(st_inner(a, b, mass) == doctest::Approx(oracle).epsilon(1e-13));
    CHECK(st_norm_sq(a, mass) == doctest::Approx(st_inner(a, a, mass)).epsilon(1e-14));
    CHECK(st_inner(a, b, mass) == doctest::Approx(st_inner(b, a, mass)).epsilon(1e-14));
}

TEST_CASE("load_of_field pairs back to st_inner") {
    const TriMesh mesh = build_uniform_mesh(2);
    const SparseSym mass = assemble_mass(mesh);
    const TimeGrid grid{2.0, 5};
    const int n = mesh.n_interior();
    const SpaceTimeField a = random_field(grid, n, 11);
    const SpaceTimeField b = random_field(grid, n, 12);
    const TimeLoad lb = load_of_field(b, mass);
    CHECK(pair_load(a, lb) == doctest::Approx(st_inner(a, b, mass)).epsilon(1e-13));
}

TEST_CASE("axpy and reversal behave as their names say") {
    const TimeGrid grid{2.0, 4};
    SpaceTimeField a = random_field(grid, 3, 21);
    const SpaceTimeField b = random_field(grid, 3, 22);
    SpaceTimeField a0 = a;
    axpy(a, -2.0, b);
    for (int m = 0; m <= 4; ++m)
        CHECK((a.slice[m] - (a0.slice[m] - 2.0 * b.slice[m])).norm() == 0.0);

    const SpaceTimeField r = reversed(b);
    for (int m = 0; m <= 4; ++m) CHECK((r.slice[m] - b.slice[4 - m]).norm() == 0.0);
    const SpaceTimeField rr = reversed(r);
    for (int m = 0; m <= 4; ++m) CHECK((rr.slice[m] - b.slice[m]).norm() == 0.0);
}

TEST_CASE("load_of_step_forcing equals step_hat_integrals times the spatial load") {
    const TriMesh mesh = build_uniform_mesh(2);
    const TimeGrid grid{2.0, 7};
    Eigen::VectorXd g = Eigen::VectorXd::LinSpaced(mesh.n_interior(), -1.0, 2.0);
    StepFunction u;
    u.breakpoints = {0.0, 0.4, 1.3, 2.0};
    u.values = {1.0, -0.5, 2.0};
    const TimeLoad load = load_of_step_forcing(u, g, grid);
    const Eigen::VectorXd hats = step_hat_integrals(u, grid);
    REQUIRE(static_cast<int>(load.r.size()) == grid.steps + 1);
    for (int m = 0; m <= grid.steps; ++m)
        CHECK((load.r[m] - hats[m] * g).lpNorm<Eigen::Infinity>() < 1e-14);
}

TEST_CASE("smooth forcing load matches the step forcing load for a constant") {
    const TriMesh mesh = build_uniform_mesh(2);
    const TimeGrid grid{2.0, 9};
    Eigen::VectorXd g = Eigen::VectorXd::Ones(mesh.n_interior());
    const TimeLoad smooth =
        load_of_smooth_forcing([](double) { return 1.7; }, g, grid);
    const TimeLoad step = load_of_step_forcing(constant_step(1.7, 2.0), g, grid);
    for (int m = 0; m <= grid.steps; ++m)
        CHECK((smooth.r[m] - step.r[m]).lpNorm<Eigen::Infinity>() < 1e-13);
}

TEST_CASE("prolongation reproduces coarse fields exactly in the fine space") {
    const TriMesh coarse = build_uniform_mesh(2);
    const TriMesh fine = build_uniform_mesh(3);
    Eigen::VectorXd v(coarse.n_interior());
    for (int i = 0; i < v.size(); ++i) v[i] = std::sin(0.9 * i) + 0.2;
    const Eigen::VectorXd vf = prolong_space_once(coarse, fine, v);
    // sample the two P1 fields at scattered points
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> dist(-0.999, 0.999);
    for (int s = 0; s < 200; ++s) {
        const double x = dist(rng), y = dist(rng);
        CHECK(eval_p1(fine, vf, x, y) ==
              doctest::Approx(eval_p1(coarse, v, x, y)).epsilon(1e-12));
    }
}

TEST_CASE("restriction is the transpose of prolongation") {
    const TriMesh coarse = build_uniform_mesh(2);
    const TriMesh fine = build_uniform_mesh(3);
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
        Eigen::VectorXd v(coarse.n_interior());
        Eigen::VectorXd w(fine.n_interior());
        for (int i = 0; i < v.size(); ++i) v[i] = dist(rng);
        for (int i = 0; i < w.size(); ++i) w[i] = dist(rng);
        const double lhs = prolong_space_once(coarse, fine, v).dot(w);
        const double rhs = v.dot(restrict_space_once(coarse, fine, w));
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-13));
    }
}

TEST_CASE("field prolongation across two levels with time refinement is exact") {
    std::vector<TriMesh> meshes;
    for (int k = 2; k <= 4; ++k) meshes.push_back(build_uniform_mesh(k));
    std::vector<const TriMesh*> chain{&meshes[0], &meshes[1], &meshes[2]};

    const TimeGrid grid{2.0, 4};
    const SpaceTimeField f = random_field(grid, meshes[0].n_interior(), 77);
    const SpaceTimeField up = prolong_field(f, chain, 16);
    REQUIRE(up.grid.steps == 16);
    REQUIRE(up.dofs() == meshes[2].n_interior());

    // time-linear interpolation plus spatial exactness: check a refined node
    // against the coarse value at matching times and a midpoint in time
    std::mt19937 rng(78);
    std::uniform_real_distribution<double> dist(-0.999, 0.999);
    for (int s = 0; s < 50; ++s) {
        const double x = dist(rng), y = dist(rng);
        // t = 1.0 is node 2 coarse, node 8 fine
        CHECK(eval_p1(meshes[2], up.slice[8], x, y) ==
              doctest::Approx(eval_p1(meshes[0], f.slice[2], x, y)).epsilon(1e-12));
        // t = 0.25 is the midpoint of coarse interval 0, fine node 2
        const double mid = 0.5 * (eval_p1(meshes[0], f.slice[0], x, y) +
                                  eval_p1(meshes[0], f.slice[1], x, y));
        CHECK(eval_p1(meshes[2], up.slice[2], x, y) ==
              doctest::Approx(mid).epsilon(1e-12));
    }
}

TEST_CASE("restrict_load is the transpose of prolong_field on pairings") {
    std::vector<TriMesh> meshes;
    for (int k = 2; k <= 3; ++k) meshes.push_back(build_uniform_mesh(k));
    std::vector<const TriMesh*> chain{&meshes[0], &meshes[1]};
    const SparseSym fine_mass = assemble_mass(meshes[1]);

    const TimeGrid coarse_grid{2.0, 4};
    const TimeGrid fine_grid{2.0, 8};
    const SpaceTimeField a = random_field(coarse_grid, meshes[0].n_interior(), 91);
    const SpaceTimeField b = random_field(fine_grid, meshes[1].n_interior(), 92);
    const TimeLoad fine_load = load_of_field(b, fine_mass);

    const double lhs = pair_load(prolong_field(a, chain, 8), fine_load);
    const double rhs = pair_load(a, restrict_load(fine_load, chain, 4));
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("all_finite flags poisoned fields") {
    SpaceTimeField f = zero_field(TimeGrid{1.0, 2}, 3);
    CHECK(f.all_finite());
    f.slice[1][2] = std::numeric_limits<double>::quiet_NaN();
    CHECK(!f.all_finite());
}
