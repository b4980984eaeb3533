#include "bvwave/study.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>

#include "bvwave/errors.hpp"

namespace bvwave {

double state_l2_error(const SpaceTimeField& coarse, int k_coarse,
                      const SpaceTimeField& ref, int k_ref, const SparseSym& ref_mass) {
    std::vector<TriMesh> storage;
    std::vector<const TriMesh*> chain;
    for (int k = k_coarse; k <= k_ref; ++k) storage.push_back(build_uniform_mesh(k));
    for (const auto& m : storage) chain.push_back(&m);
    SpaceTimeField up = prolong_field(coarse, chain, ref.grid.steps);
    axpy(up, -1.0, ref);
    return std::sqrt(std::max(st_norm_sq(up, ref_mass), 0.0));
}

ControlErrors control_errors(const Scenario& sc, const MeasureControl& got,
                             double delta_match) {
    ControlErrors err;
    const int m = sc.exact_control.components();
    if (got.components() != m) throw ConfigError("component count mismatch in control_errors");
    err.count_ok = true;
    double tv_got = 0, tv_ref = 0;
    for (int i = 0; i < m; ++i) {
        const auto& ref_atoms = sc.exact_control.atoms[i];
        const auto& got_atoms = got.atoms[i];
        std::vector<double> acc(ref_atoms.size(), 0.0);
        std::vector<int> hits(ref_atoms.size(), 0);
        for (const auto& a : got_atoms) {
            size_t best = 0;
            double bestd = std::numeric_limits<double>::infinity();
            for (size_t j = 0; j < ref_atoms.size(); ++j) {
                const double d = std::abs(a.t - ref_atoms[j].t);
                if (d < bestd) {
                    bestd = d;
                    best = j;
                }
            }
            if (bestd <= delta_match) {
                acc[best] += a.weight;
                ++hits[best];
                err.jump_pos_max = std::max(err.jump_pos_max, bestd);
                ++err.matched;
            } else {
                // stray atom: its whole weight is amplitude error
                err.jump_amp_max = std::max(err.jump_amp_max, std::abs(a.weight));
                err.count_ok = false;
            }
        }
        for (size_t j = 0; j < ref_atoms.size(); ++j) {
            err.jump_amp_max =
                std::max(err.jump_amp_max, std::abs(acc[j] - ref_atoms[j].weight));
            if (hits[j] != 1) err.count_ok = false;
        }
        err.offset_err = std::max(
            err.offset_err, std::abs(got.offset[i] - sc.exact_control.offset[i]));
        err.l1 += l1_distance(apply_B(got, i, sc.T), apply_B(sc.exact_control, i, sc.T));
        tv_got += got.tv(i);
        tv_ref += sc.exact_control.tv(i);
    }
    err.tv_err = std::abs(tv_got - tv_ref);
    return err;
}

namespace {

double get_metric(const LevelRow& row, const std::string& q) {
    if (q == "state_l2") return row.state_l2;
    if (q == "control_l1") return row.control_l1;
    if (q == "jump_pos_max") return row.jump_pos_max;
    if (q == "jump_amp_max") return row.jump_amp_max;
    if (q == "offset_err") return row.offset_err;
    if (q == "cost_err") return row.cost_err;
    throw ConfigError("unknown rate quantity " + q);
}

} // namespace

void fit_rates(RateTable& table) {
    table.consecutive.clear();
    table.fitted.clear();
    for (const char* qn : kRateQuantities) {
        const std::string q(qn);
        std::vector<std::pair<double, double>> pts; // (k, log2 e) over usable rows
        std::vector<double> consec;
        for (size_t i = 0; i < table.rows.size(); ++i) {
            const LevelRow& row = table.rows[i];
            const double e = get_metric(row, q);
            if (row.converged && std::isfinite(e) && e > 0)
                pts.emplace_back(row.k, std::log2(e));
            if (i + 1 < table.rows.size()) {
                const LevelRow& next = table.rows[i + 1];
                const double e1 = get_metric(next, q);
                if (row.converged && next.converged && e > 0 && e1 > 0 &&
                    std::isfinite(e) && std::isfinite(e1))
                    consec.push_back(std::log2(e / e1) /
                                     static_cast<double>(next.k - row.k));
                else
                    consec.push_back(std::numeric_limits<double>::quiet_NaN());
            }
        }
        double rate = std::numeric_limits<double>::quiet_NaN();
        if (pts.size() >= 2) {
            double sx = 0, sy = 0, sxx = 0, sxy = 0;
            for (const auto& [x, y] : pts) {
                sx += x;
                sy += y;
                sxx += x * x;
                sxy += x * y;
            }
            const double n = static_cast<double>(pts.size());
            const double denom = n * sxx - sx * sx;
            if (denom > 0) rate = -(n * sxy - sx * sy) / denom;
        }
        table.consecutive[q] = std::move(consec);
        table.fitted[q] = rate;
    }
}

double fitted_rate(const RateTable& table, const std::string& quantity) {
    const auto it = table.fitted.find(quantity);
    return it == table.fitted.end() ? std::numeric_limits<double>::quiet_NaN()
                                    : it->second;
}

StudyResult convergence_study(const StudyConfig& config) {
    const auto t_start = std::chrono::steady_clock::now();
    StudyResult out;
    out.scenario = build_reference_scenario(config.variant);
    const Scenario& sc = out.scenario;

    std::vector<int> levels = config.levels;
    std::sort(levels.begin(), levels.end());
    if (levels.empty()) throw ConfigError("convergence study needs at least one level");
    if (config.k_ref <= levels.back())
        throw ConfigError("reference level must exceed every study level");

    auto steps_for = [](int k) { return 1 << (k + 1); }; // tau = 2^-k for T = 2
    const Level ref = make_level(config.k_ref, sc.T, steps_for(config.k_ref), config.params);
    const SpaceTimeField ref_state = compute_reference_state(sc, ref);

    // reference-error estimate from the previous level (factor 3 for rate 2)
    {
        const Level prev = make_level(config.k_ref - 1, sc.T, steps_for(config.k_ref - 1),
                                      config.params);
        const SpaceTimeField prev_state = compute_reference_state(sc, prev);
        out.table.richardson_state = state_l2_error(prev_state, prev.k, ref_state,
                                                    ref.k, ref.mass) /
                                     3.0;
        out.table.richardson_cost = std::sqrt(sc.w_sq) * out.table.richardson_state;
    }

    for (const int k : levels) {
        Level lv = make_level(k, sc.T, steps_for(k), config.params);
        const PdapProblem prob = build_pdap_problem(sc, lv, ref, ref_state);
        PdapOptions opts = config.pdap;
        if (opts.alpha.size() == 0) opts.alpha = Eigen::VectorXd::Constant(1, sc.alpha);
        PdapResult run = run_pdap(prob, opts);

        LevelRow row;
        row.k = k;
        row.tau = lv.grid.tau();
        row.h = lv.mesh.mesh_size();
        row.state_l2 = state_l2_error(run.state, k, ref_state, ref.k, ref.mass);
        const ControlErrors ce = control_errors(sc, run.control, config.delta_match);
        row.control_l1 = ce.l1;
        row.jump_pos_max = ce.jump_pos_max;
        row.jump_amp_max = ce.jump_amp_max;
        row.offset_err = ce.offset_err;
        row.tv_err = ce.tv_err;
        row.cost_err = std::abs(run.cost - sc.exact_cost);
        row.pdap_iters = run.iterations;
        row.converged = run.converged;
        out.table.rows.push_back(row);
        out.runs.push_back(std::move(run));
    }
    fit_rates(out.table);
    out.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return out;
}

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

std::string rate_table_csv(const RateTable& table) {
    std::string s = "k,tau,h,state_l2,control_l1,jump_pos_max,jump_amp_max,"
                    "offset_err,cost_err,tv_err,pdap_iters,converged\n";
    for (const auto& r : table.rows) {
        s += std::to_string(r.k) + "," + num(r.tau) + "," + num(r.h) + "," +
             num(r.state_l2) + "," + num(r.control_l1) + "," + num(r.jump_pos_max) +
             "," + num(r.jump_amp_max) + "," + num(r.offset_err) + "," +
             num(r.cost_err) + "," + num(r.tv_err) + "," + std::to_string(r.pdap_iters) +
             "," + (r.converged ? "1" : "0") + "\n";
    }
    return s;
}

std::string history_csv(const PdapResult& result) {
    std::string s = "iteration,cost,kkt_violation,gap,active_atoms,offset_residual\n";
    for (const auto& h : result.history) {
        s += std::to_string(h.iteration) + "," + num(h.cost) + "," +
             num(h.kkt_violation) + "," + num(h.gap) + "," +
             std::to_string(h.active_atoms) + "," + num(h.offset_residual) + "\n";
    }
    return s;
}

std::string gnuplot_script(const std::string& csv_name) {
    std::string s;
    s += "set datafile separator ','\n";
    s += "set terminal pngcairo size 960,640\n";
    s += "set output 'rates.png'\n";
    s += "set logscale y\n";
    s += "set xlabel 'refinement level k'\n";
    s += "set ylabel 'error'\n";
    s += "set key outside\n";
    s += "plot '" + csv_name + "' every ::1 using 1:4 with linespoints title 'state L2', \\\n";
    s += "     '" + csv_name + "' every ::1 using 1:5 with linespoints title 'control L1', \\\n";
    s += "     '" + csv_name + "' every ::1 using 1:6 with linespoints title 'jump position', \\\n";
    s += "     '" + csv_name + "' every ::1 using 1:7 with linespoints title 'jump amplitude', \\\n";
    s += "     '" + csv_name + "' every ::1 using 1:8 with linespoints title 'offset', \\\n";
    s += "     '" + csv_name + "' every ::1 using 1:9 with linespoints title 'cost'\n";
    return s;
}

} // namespace bvwave
