#pragma once

#include <map>
#include <string>

#include "bvwave/scenario.hpp"

namespace bvwave {

// L2(Omega_T) distance between a coarse-level field and a reference field,
// evaluated exactly on the reference level through the nested transfer.
double state_l2_error(const SpaceTimeField& coarse, int k_coarse,
                      const SpaceTimeField& ref, int k_ref, const SparseSym& ref_mass);

struct ControlErrors {
    double l1 = 0;           // sum over components of the L1 control distance
    double jump_pos_max = 0; // worst matched jump-position error
    double jump_amp_max = 0; // worst accumulated-weight error per reference jump
    double offset_err = 0;
    double tv_err = 0;
    int matched = 0;
    bool count_ok = false; // one atom per reference jump, none stray
};

// Nearest-assignment comparison against the scenario's exact control within
// the window delta_match. Stray atoms beyond the window count their full
// weight as amplitude error and fail the count check.
ControlErrors control_errors(const Scenario& sc, const MeasureControl& got,
                             double delta_match);

struct LevelRow {
    int k = 0;
    double tau = 0, h = 0;
    double state_l2 = 0, control_l1 = 0, jump_pos_max = 0, jump_amp_max = 0,
           offset_err = 0, cost_err = 0, tv_err = 0;
    int pdap_iters = 0;
    bool converged = false;
};

inline constexpr const char* kRateQuantities[6] = {
    "state_l2", "control_l1", "jump_pos_max", "jump_amp_max", "offset_err", "cost_err"};

struct RateTable {
    std::vector<LevelRow> rows;
    // per quantity: consecutive-level rates and the least-squares fitted rate
    std::map<std::string, std::vector<double>> consecutive;
    std::map<std::string, double> fitted;
    double richardson_state = 0; // reference-state error estimate
    double richardson_cost = 0;  // its first-order propagation into the cost
};

struct StudyConfig {
    std::vector<int> levels{3, 4, 5, 6};
    int k_ref = 7;
    SchemeParams params{};
    PhiVariant variant = PhiVariant::corrected;
    PdapOptions pdap{}; // alpha filled from the scenario when empty
    double delta_match = 1.0 / 6.0;
};

struct StudyResult {
    Scenario scenario;
    RateTable table;
    std::vector<PdapResult> runs; // aligned with config.levels
    double elapsed_seconds = 0;
};

StudyResult convergence_study(const StudyConfig& config);

// CSV and plotting emission. Numbers print with %.17g so reruns are
// byte-identical.
std::string rate_table_csv(const RateTable& table);
std::string history_csv(const PdapResult& result);
std::string gnuplot_script(const std::string& csv_name);

void fit_rates(RateTable& table);
double fitted_rate(const RateTable& table, const std::string& quantity);

} // namespace bvwave
