#include "bvwave/scenario.hpp"

#include <cmath>
#include <string>

#include "bvwave/errors.hpp"

namespace bvwave {

Scenario build_reference_scenario(PhiVariant variant) {
    Scenario sc;
    sc.variant = variant;
    const double a = sc.alpha;
    const double pi = M_PI;

    sc.g = [pi](double x, double y) { return std::cos(0.5 * pi * x) * std::cos(0.5 * pi * y); };
    sc.g_x = [pi](double x, double y) {
        return -0.5 * pi * std::sin(0.5 * pi * x) * std::cos(0.5 * pi * y);
    };
    sc.g_y = [pi](double x, double y) {
        return -0.5 * pi * std::cos(0.5 * pi * x) * std::sin(0.5 * pi * y);
    };

    if (variant == PhiVariant::corrected) {
        // psi = (9 pi a / 8) (cos(3 pi t / 2) - cos(9 pi t / 2));
        // its antiderivative vanishing at T is a sin^3(3 pi t / 2)
        const double A = 9.0 * pi * a / 8.0;
        sc.psi = [A, pi](double t) {
            return A * (std::cos(1.5 * pi * t) - std::cos(4.5 * pi * t));
        };
        sc.theta = [A, pi](double t) {
            return A * pi * pi *
                   (-1.75 * std::cos(1.5 * pi * t) + 19.75 * std::cos(4.5 * pi * t));
        };
        sc.p1_exact = [a, pi](double t) { return a * std::pow(std::sin(1.5 * pi * t), 3); };
        sc.w_sq = A * A * std::pow(pi, 4) * (1.75 * 1.75 + 19.75 * 19.75);
    } else {
        // alternative profile psi = (3 pi a / 4) (cos(pi t) - cos(3 pi t)),
        // antiderivative a sin^3(pi t); its extrema avoid the jump set
        const double A = 3.0 * pi * a / 4.0;
        sc.psi = [A, pi](double t) { return A * (std::cos(pi * t) - std::cos(3.0 * pi * t)); };
        sc.theta = [A, pi](double t) {
            return A * pi * pi * (-0.5 * std::cos(pi * t) + 8.5 * std::cos(3.0 * pi * t));
        };
        sc.p1_exact = [a, pi](double t) { return a * std::pow(std::sin(pi * t), 3); };
        sc.w_sq = A * A * std::pow(pi, 4) * (0.25 + 72.25);
    }
    sc.exact_cost = 0.5 * sc.w_sq + sc.alpha * sc.exact_tv;

    sc.exact_control.atoms = {{{1.0 / 3.0, 1.0}, {1.0, -1.0}, {5.0 / 3.0, 1.0}}};
    sc.exact_control.offset = Eigen::VectorXd::Zero(1);
    sc.exact_u = apply_B(sc.exact_control, 0, sc.T);

    // construction self-checks
    auto require = [](bool ok, const char* what) {
        if (!ok) throw NumericalError(std::string("scenario self-check failed: ") + what);
    };
    require(std::abs(sc.p1_exact(0.0)) < 1e-14, "p1(0) = 0");
    require(std::abs(sc.p1_exact(sc.T)) < 1e-12, "p1(T) = 0");
    if (variant == PhiVariant::corrected) {
        require(std::abs(sc.p1_exact(1.0 / 3.0) - a) < 1e-14, "p1 = +alpha at t = 1/3");
        require(std::abs(sc.p1_exact(1.0) + a) < 1e-12, "p1 = -alpha at t = 1");
        require(std::abs(sc.p1_exact(5.0 / 3.0) - a) < 1e-12, "p1 = +alpha at t = 5/3");
    }
    const double expect[4] = {-0.5, 0.5, -0.5, 0.5};
    require(sc.exact_u.values.size() == 4, "exact control has 4 steps");
    for (int i = 0; i < 4; ++i)
        require(std::abs(sc.exact_u.values[i] - expect[i]) < 1e-14,
                "exact control step values");
    require(std::abs(sc.exact_u.mean()) < 1e-15, "exact control mean equals offset");
    return sc;
}

Level make_level(int k, double T, int steps, const SchemeParams& params) {
    Level lv;
    lv.k = k;
    lv.mesh = build_uniform_mesh(k);
    lv.mass = assemble_mass(lv.mesh);
    lv.stiffness = assemble_stiffness(lv.mesh);
    lv.grid = TimeGrid{T, steps};
    lv.params = params;
    lv.gate = stability_gate(lv.stiffness, lv.mass, lv.mesh.mesh_size(), lv.grid.tau(), params);
    if (!lv.gate.pass)
        throw GateError(std::string("stability gate failed: ") + lv.gate.failed());
    lv.op = std::make_unique<WaveOperator>(lv.mass, lv.stiffness, lv.grid, params, &lv.gate);
    return lv;
}

Eigen::VectorXd actuator_load(const Scenario& sc, const TriMesh& mesh,
                              const QuadratureRule& rule) {
    return assemble_load(mesh, sc.g, rule);
}

SpaceTimeField compute_reference_state(const Scenario& sc, const Level& ref) {
    const Eigen::VectorXd g_load = actuator_load(sc, ref.mesh, seven_point_rule());
    const TimeLoad f = load_of_step_forcing(sc.exact_u, g_load, ref.grid);
    return ref.op->solve_forward(&f, nullptr, nullptr);
}

PdapProblem build_pdap_problem(const Scenario& sc, const Level& level, const Level& ref,
                               const SpaceTimeField& ref_state) {
    if (ref.k < level.k) throw ConfigError("reference level must not be coarser than the study level");
    PdapProblem prob;
    prob.op = level.op.get();
    prob.g_loads = {actuator_load(sc, level.mesh, midpoint_rule())};

    // y_d = ref_state - theta g; carry it as a load on the study level
    const TimeLoad ref_load = load_of_field(ref_state, ref.mass);
    std::vector<TriMesh> chain_storage;
    std::vector<const TriMesh*> chain;
    for (int k = level.k; k <= ref.k; ++k) chain_storage.push_back(build_uniform_mesh(k));
    for (const auto& msh : chain_storage) chain.push_back(&msh);
    prob.data_load = restrict_load(ref_load, chain, level.grid.steps);

    const Eigen::VectorXd g_level = actuator_load(sc, level.mesh, seven_point_rule());
    const TimeLoad theta_level = load_of_smooth_forcing(sc.theta, g_level, level.grid);
    axpy(prob.data_load, -1.0, theta_level);

    // ||y_d||^2 expanded around the reference state; ||g||_L2 = 1 exactly
    const Eigen::VectorXd g_ref = actuator_load(sc, ref.mesh, seven_point_rule());
    const TimeLoad theta_ref = load_of_smooth_forcing(sc.theta, g_ref, ref.grid);
    const double rr = st_norm_sq(ref_state, ref.mass);
    const double rw = pair_load(ref_state, theta_ref);
    prob.data_sq = rr - 2.0 * rw + sc.w_sq;
    return prob;
}

PdapOptions scenario_pdap_options(const Scenario& sc) {
    PdapOptions opt;
    opt.alpha = Eigen::VectorXd::Constant(1, sc.alpha);
    return opt;
}

double standing_wave_error(const Level& level) {
    SpatialFn g = [](double x, double y) {
        return std::cos(0.5 * M_PI * x) * std::cos(0.5 * M_PI * y);
    };
    SpatialFn gx = [](double x, double y) {
        return -0.5 * M_PI * std::sin(0.5 * M_PI * x) * std::cos(0.5 * M_PI * y);
    };
    SpatialFn gy = [](double x, double y) {
        return -0.5 * M_PI * std::cos(0.5 * M_PI * x) * std::sin(0.5 * M_PI * y);
    };
    const Eigen::VectorXd y0 =
        ritz_projection(level.mesh, level.stiffness, gx, gy, seven_point_rule());
    const SpaceTimeField y = level.op->solve_forward(nullptr, &y0, nullptr);
    const Eigen::VectorXd g_load = assemble_load(level.mesh, g, seven_point_rule());
    const double omega = M_PI / std::sqrt(2.0);
    double worst = 0;
    for (int m = 0; m <= level.grid.steps; ++m) {
        const double c = std::cos(omega * level.grid.node(m));
        const double e2 = y.slice[m].dot(level.mass * y.slice[m]) -
                          2.0 * c * g_load.dot(y.slice[m]) + c * c;
        worst = std::max(worst, std::sqrt(std::max(e2, 0.0)));
    }
    return worst;
}

} // namespace bvwave
