// Command-line front end: solve (single forward run), pdap (sparse control
// optimization on one level), convergence (multi-level rate study).
#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "bvwave/config.hpp"
#include "bvwave/errors.hpp"
#include "bvwave/study.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitGate = 3;
constexpr int kExitNotConverged = 4;
constexpr int kExitNumerical = 5;

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw bvwave::ConfigError("cannot write " + path.string());
    out << content;
}

json gate_json(const bvwave::StabilityReport& g) {
    return json{{"pass", g.pass},
                {"unconditional", g.unconditional},
                {"sigma", g.sigma},
                {"tau", g.tau},
                {"h", g.h},
                {"c1", g.c1},
                {"inequality1", g.ineq1},
                {"inequality2", g.ineq2},
                {"inequality3", g.ineq3}};
}

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

bvwave::SchemeParams scheme_params(const bvwave::RunConfig& cfg) {
    bvwave::SchemeParams p;
    p.sigma = cfg.sigma;
    p.eps0 = cfg.eps0;
    p.c2 = cfg.c2;
    return p;
}

bvwave::PhiVariant phi_variant(const bvwave::RunConfig& cfg) {
    return cfg.phi == "printed" ? bvwave::PhiVariant::printed
                                : bvwave::PhiVariant::corrected;
}

int cmd_solve(const bvwave::RunConfig& cfg) {
    const auto sc = bvwave::build_reference_scenario(phi_variant(cfg));
    const int steps = 1 << (cfg.level + 1);
    bvwave::Level lv = bvwave::make_level(cfg.level, sc.T, steps, scheme_params(cfg));

    bvwave::SpaceTimeField y;
    json extra;
    if (cfg.scenario == "zero") {
        y = lv.op->solve_forward(nullptr, nullptr, nullptr);
    } else if (cfg.scenario == "standing-wave") {
        const double err = bvwave::standing_wave_error(lv);
        extra["standing_wave_error"] = err;
        const Eigen::VectorXd y0 = bvwave::ritz_projection(
            lv.mesh, lv.stiffness, sc.g_x, sc.g_y, bvwave::seven_point_rule());
        y = lv.op->solve_forward(nullptr, &y0, nullptr);
        std::cout << "standing wave C(I;L2) error at k=" << cfg.level << ": " << err
                  << "\n";
    } else {
        const Eigen::VectorXd g_load =
            bvwave::actuator_load(sc, lv.mesh, bvwave::midpoint_rule());
        const bvwave::TimeLoad f =
            bvwave::load_of_step_forcing(sc.exact_u, g_load, lv.grid);
        y = lv.op->solve_forward(&f, nullptr, nullptr);
    }

    const auto check = bvwave::stability_norm_check(y, lv.mass, lv.stiffness, nullptr,
                                                    nullptr, 0.0);
    fs::create_directories(cfg.out_dir);
    std::string csv = "m,t,l2_norm,center_value\n";
    const int center = (lv.mesh.nodes_per_side - 1) / 2;
    const int center_dof =
        lv.mesh.interior_index[center * lv.mesh.nodes_per_side + center];
    for (int m = 0; m <= lv.grid.steps; ++m) {
        const double n2 = std::sqrt(std::max(
            y.slice[m].dot(lv.mass * y.slice[m]), 0.0));
        csv += std::to_string(m) + "," + num(lv.grid.node(m)) + "," + num(n2) + "," +
               num(center_dof >= 0 ? y.slice[m][center_dof] : 0.0) + "\n";
    }
    const fs::path csv_path = fs::path(cfg.out_dir) /
                              ("state_k" + std::to_string(cfg.level) + ".csv");
    write_file(csv_path, csv);

    json summary{{"command", "solve"},
                 {"scenario", cfg.scenario},
                 {"level", cfg.level},
                 {"steps", lv.grid.steps},
                 {"gate", gate_json(lv.gate)},
                 {"max_state_l2", check.max_state_norm},
                 {"state_csv", csv_path.string()}};
    for (auto& [k, v] : extra.items()) summary[k] = v;
    write_file(fs::path(cfg.out_dir) / "solve_summary.json", summary.dump(2) + "\n");
    std::cout << "wrote " << csv_path.string() << "\n";
    return kExitOk;
}

int cmd_pdap(const bvwave::RunConfig& cfg) {
    const auto sc = bvwave::build_reference_scenario(phi_variant(cfg));
    bvwave::Level lv =
        bvwave::make_level(cfg.level, sc.T, 1 << (cfg.level + 1), scheme_params(cfg));

    bvwave::PdapProblem prob;
    if (cfg.scenario == "zero") {
        // target consistent with the zero control
        prob.op = lv.op.get();
        prob.g_loads = {bvwave::actuator_load(sc, lv.mesh, bvwave::midpoint_rule())};
        prob.data_load = bvwave::load_of_field(
            bvwave::zero_field(lv.grid, lv.op->dofs()), lv.mass);
        prob.data_sq = 0.0;
    } else {
        if (cfg.k_ref <= cfg.level)
            throw bvwave::ConfigError("k_ref must exceed the study level");
        const bvwave::Level ref = bvwave::make_level(
            cfg.k_ref, sc.T, 1 << (cfg.k_ref + 1), scheme_params(cfg));
        const bvwave::SpaceTimeField ref_state = bvwave::compute_reference_state(sc, ref);
        prob = bvwave::build_pdap_problem(sc, lv, ref, ref_state);
    }

    bvwave::PdapOptions opts = bvwave::scenario_pdap_options(sc);
    opts.gap_tol_rel = cfg.gap_tol_rel;
    opts.gamma_min_rel = cfg.gamma_min_rel;
    opts.max_iterations = cfg.kmax;
    opts.kkt_tol = cfg.tol_kkt;
    const bvwave::PdapResult run = bvwave::run_pdap(prob, opts);

    fs::create_directories(cfg.out_dir);
    json atoms = json::array();
    for (int i = 0; i < run.control.components(); ++i)
        for (const auto& a : run.control.atoms[i])
            atoms.push_back({{"component", i}, {"t", a.t}, {"weight", a.weight}});
    std::vector<double> offsets(run.control.offset.data(),
                                run.control.offset.data() + run.control.offset.size());
    json summary{{"command", "pdap"},
                 {"scenario", cfg.scenario},
                 {"phi", cfg.phi},
                 {"level", cfg.level},
                 {"converged", run.converged},
                 {"iterations", run.iterations},
                 {"cost", run.cost},
                 {"gap", run.gap},
                 {"kkt_violation", run.kkt_violation},
                 {"offset_residual", run.offset_residual},
                 {"certificate_within_tol", run.kkt_violation <= cfg.tol_kkt},
                 {"atoms", atoms},
                 {"offsets", offsets},
                 {"gate", gate_json(lv.gate)}};
    write_file(fs::path(cfg.out_dir) / "pdap_summary.json", summary.dump(2) + "\n");
    write_file(fs::path(cfg.out_dir) / "pdap_history.csv", bvwave::history_csv(run));
    std::cout << (run.converged ? "converged" : "NOT converged") << " after "
              << run.iterations << " iterations, " << run.control.total_atoms()
              << " atoms, cost " << run.cost << ", gap " << run.gap << "\n";
    return run.converged ? kExitOk : kExitNotConverged;
}

int cmd_convergence(const bvwave::RunConfig& cfg) {
    bvwave::StudyConfig sconf;
    sconf.levels = cfg.levels;
    sconf.k_ref = cfg.k_ref;
    sconf.params = scheme_params(cfg);
    sconf.variant = phi_variant(cfg);
    sconf.pdap.gap_tol_rel = cfg.gap_tol_rel;
    sconf.pdap.gamma_min_rel = cfg.gamma_min_rel;
    sconf.pdap.max_iterations = cfg.kmax;
    sconf.pdap.kkt_tol = cfg.tol_kkt;

    const bvwave::StudyResult res = bvwave::convergence_study(sconf);

    fs::create_directories(cfg.out_dir);
    write_file(fs::path(cfg.out_dir) / "rates.csv", bvwave::rate_table_csv(res.table));
    write_file(fs::path(cfg.out_dir) / "rates.gp", bvwave::gnuplot_script("rates.csv"));
    for (size_t i = 0; i < res.runs.size(); ++i) {
        const int k = res.table.rows[i].k;
        write_file(fs::path(cfg.out_dir) / ("history_k" + std::to_string(k) + ".csv"),
                   bvwave::history_csv(res.runs[i]));
    }

    bool all_converged = true;
    for (const auto& r : res.table.rows) all_converged = all_converged && r.converged;
    bool rates_met = all_converged;
    json fitted;
    for (const char* q : bvwave::kRateQuantities) {
        const double rate = bvwave::fitted_rate(res.table, q);
        fitted[q] = rate;
        rates_met = rates_met && std::isfinite(rate) && rate >= 1.7;
    }
    for (const auto& r : res.table.rows) {
        rates_met = rates_met && r.state_l2 >= 5.0 * res.table.richardson_state &&
                    r.cost_err >= 5.0 * res.table.richardson_cost;
    }
    const bool marker = rates_met && sconf.variant == bvwave::PhiVariant::corrected;

    json summary{{"command", "convergence"},
                 {"phi", cfg.phi},
                 {"k_ref", cfg.k_ref},
                 {"fitted_rates", fitted},
                 {"richardson_state", res.table.richardson_state},
                 {"richardson_cost", res.table.richardson_cost},
                 {"all_converged", all_converged},
                 {"rate_targets_met", marker},
                 {"elapsed_seconds", res.elapsed_seconds}};
    write_file(fs::path(cfg.out_dir) / "summary.json", summary.dump(2) + "\n");

    std::cout << bvwave::rate_table_csv(res.table);
    std::cout << "fitted rates:";
    for (const char* q : bvwave::kRateQuantities)
        std::cout << " " << q << "=" << bvwave::fitted_rate(res.table, q);
    std::cout << "\n";
    if (marker) std::cout << "rate targets met\n";
    return all_converged ? kExitOk : kExitNotConverged;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Space-time finite element solver and sparse BV control "
                 "optimizer for the linear wave equation"};
    app.require_subcommand(0, 1);
    app.fallthrough();

    std::string config_path, out_dir, levels_spec, phi, scenario;
    double sigma = std::numeric_limits<double>::quiet_NaN();
    long long seed = -1;
    int level = -1, kref = -1;
    app.add_option("--config", config_path, "INI config file");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--levels", levels_spec, "study levels, e.g. 3..6");
    app.add_option("--level", level, "single-run discretization level");
    app.add_option("--kref", kref, "reference level for data and errors");
    app.add_option("--sigma", sigma, "stabilization parameter");
    app.add_option("--phi", phi, "adjoint profile variant: corrected|printed");
    app.add_option("--scenario", scenario, "reference|standing-wave|zero");
    app.add_option("--seed", seed, "run seed recorded in outputs");
    auto* sub_solve = app.add_subcommand("solve", "single forward solve");
    auto* sub_pdap = app.add_subcommand("pdap", "sparse control optimization");
    auto* sub_conv = app.add_subcommand("convergence", "multi-level rate study");

    CLI11_PARSE(app, argc, argv);

    try {
        bvwave::RunConfig cfg;
        if (!config_path.empty()) cfg = bvwave::parse_config_file(config_path);
        if (sub_solve->parsed()) cfg.command = "solve";
        if (sub_pdap->parsed()) cfg.command = "pdap";
        if (sub_conv->parsed()) cfg.command = "convergence";
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (!levels_spec.empty()) cfg.levels = bvwave::parse_level_range(levels_spec);
        if (!phi.empty()) cfg.phi = phi;
        if (!scenario.empty()) cfg.scenario = scenario;
        if (!std::isnan(sigma)) cfg.sigma = sigma;
        if (seed >= 0) cfg.seed = static_cast<unsigned long>(seed);
        if (level >= 0) cfg.level = level;
        if (kref >= 0) cfg.k_ref = kref;
        bvwave::validate_config(cfg);

        if (cfg.command == "solve") return cmd_solve(cfg);
        if (cfg.command == "pdap") return cmd_pdap(cfg);
        return cmd_convergence(cfg);
    } catch (const bvwave::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const bvwave::GateError& e) {
        std::cerr << "stability gate: " << e.what() << "\n";
        return kExitGate;
    } catch (const bvwave::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
}
