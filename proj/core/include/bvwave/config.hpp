#pragma once

#include <string>
#include <vector>

namespace bvwave {

// Run settings shared by the CLI commands. Serializes to an INI layout whose
// parse is an exact inverse (doubles print with %.17g).
struct RunConfig {
    std::string command = "convergence"; // solve | pdap | convergence
    std::string scenario = "reference";  // reference | standing-wave | zero
    std::string phi = "corrected";       // corrected | printed
    std::string out_dir = "out";
    unsigned long seed = 1;

    int level = 5;
    std::vector<int> levels{3, 4, 5, 6};
    int k_ref = 7;
    double sigma = 0.25;
    double eps0 = 0.1;
    double c2 = 1.0;

    double gap_tol_rel = 1e-9;
    double tol_kkt = 1e-2;
    double gamma_min_rel = 1e-12;
    int kmax = 400;

    bool operator==(const RunConfig&) const = default;
};

RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);
std::string serialize_config(const RunConfig& config);
void validate_config(const RunConfig& config);

// "a..b" or a single "a"
std::vector<int> parse_level_range(const std::string& spec);

} // namespace bvwave
