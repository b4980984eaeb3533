#include "bvwave/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "bvwave/errors.hpp"

namespace bvwave {
namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("bad numeric value for " + key + ": '" + v + "'");
    }
}

long parse_int(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        const long n = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return n;
    } catch (const std::exception&) {
        throw ConfigError("bad integer value for " + key + ": '" + v + "'");
    }
}

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string levels_to_string(const std::vector<int>& levels) {
    if (levels.empty()) return "";
    const bool contiguous = [&] {
        for (size_t i = 1; i < levels.size(); ++i)
            if (levels[i] != levels[i - 1] + 1) return false;
        return true;
    }();
    if (contiguous && levels.size() > 1)
        return std::to_string(levels.front()) + ".." + std::to_string(levels.back());
    std::string s;
    for (size_t i = 0; i < levels.size(); ++i)
        s += (i ? "," : "") + std::to_string(levels[i]);
    return s;
}

std::vector<int> parse_levels_value(const std::string& key, const std::string& v) {
    std::vector<int> out;
    const auto dots = v.find("..");
    if (dots != std::string::npos) {
        const long a = parse_int(key, trim(v.substr(0, dots)));
        const long b = parse_int(key, trim(v.substr(dots + 2)));
        if (b < a) throw ConfigError("descending level range '" + v + "'");
        for (long k = a; k <= b; ++k) out.push_back(static_cast<int>(k));
        return out;
    }
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(static_cast<int>(parse_int(key, trim(item))));
    if (out.empty()) throw ConfigError("empty level list for " + key);
    return out;
}

} // namespace

std::vector<int> parse_level_range(const std::string& spec) {
    return parse_levels_value("levels", trim(spec));
}

RunConfig parse_config_text(const std::string& text) {
    RunConfig c;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw ConfigError("malformed section header at line " + std::to_string(lineno));
            section = t.substr(1, t.size() - 2);
            if (section != "run" && section != "discretization" && section != "pdap")
                throw ConfigError("unknown config section [" + section + "]");
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("expected key = value at line " + std::to_string(lineno));
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        const std::string qual = section + "." + key;

        if (qual == "run.command") c.command = value;
        else if (qual == "run.scenario") c.scenario = value;
        else if (qual == "run.phi") c.phi = value;
        else if (qual == "run.out") c.out_dir = value;
        else if (qual == "run.seed") c.seed = static_cast<unsigned long>(parse_int(key, value));
        else if (qual == "discretization.level") c.level = static_cast<int>(parse_int(key, value));
        else if (qual == "discretization.levels") c.levels = parse_levels_value(key, value);
        else if (qual == "discretization.k_ref") c.k_ref = static_cast<int>(parse_int(key, value));
        else if (qual == "discretization.sigma") c.sigma = parse_double(key, value);
        else if (qual == "discretization.eps0") c.eps0 = parse_double(key, value);
        else if (qual == "discretization.c2") c.c2 = parse_double(key, value);
        else if (qual == "pdap.gap_tol_rel") c.gap_tol_rel = parse_double(key, value);
        else if (qual == "pdap.tol_kkt") c.tol_kkt = parse_double(key, value);
        else if (qual == "pdap.gamma_min_rel") c.gamma_min_rel = parse_double(key, value);
        else if (qual == "pdap.kmax") c.kmax = static_cast<int>(parse_int(key, value));
        else throw ConfigError("unknown config key '" + key + "' in section [" + section + "]");
    }
    validate_config(c);
    return c;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

std::string serialize_config(const RunConfig& c) {
    std::string s;
    s += "[run]\n";
    s += "command = " + c.command + "\n";
    s += "scenario = " + c.scenario + "\n";
    s += "phi = " + c.phi + "\n";
    s += "out = " + c.out_dir + "\n";
    s += "seed = " + std::to_string(c.seed) + "\n";
    s += "\n[discretization]\n";
    s += "level = " + std::to_string(c.level) + "\n";
    s += "levels = " + levels_to_string(c.levels) + "\n";
    s += "k_ref = " + std::to_string(c.k_ref) + "\n";
    s += "sigma = " + num(c.sigma) + "\n";
    s += "eps0 = " + num(c.eps0) + "\n";
    s += "c2 = " + num(c.c2) + "\n";
    s += "\n[pdap]\n";
    s += "gap_tol_rel = " + num(c.gap_tol_rel) + "\n";
    s += "tol_kkt = " + num(c.tol_kkt) + "\n";
    s += "gamma_min_rel = " + num(c.gamma_min_rel) + "\n";
    s += "kmax = " + std::to_string(c.kmax) + "\n";
    return s;
}

void validate_config(const RunConfig& c) {
    if (c.command != "solve" && c.command != "pdap" && c.command != "convergence")
        throw ConfigError("unknown command '" + c.command + "'");
    if (c.scenario != "reference" && c.scenario != "standing-wave" && c.scenario != "zero")
        throw ConfigError("unknown scenario '" + c.scenario + "'");
    if (c.phi != "corrected" && c.phi != "printed")
        throw ConfigError("phi must be 'corrected' or 'printed'");
    if (c.level < 1 || c.level > 10) throw ConfigError("level must be in [1,10]");
    if (c.levels.empty()) throw ConfigError("levels must not be empty");
    for (const int k : c.levels)
        if (k < 1 || k > 10) throw ConfigError("levels entries must be in [1,10]");
    if (c.k_ref < 1 || c.k_ref > 10) throw ConfigError("k_ref must be in [1,10]");
    if (!(c.gap_tol_rel > 0)) throw ConfigError("gap_tol_rel must be positive");
    if (!(c.tol_kkt > 0)) throw ConfigError("tol_kkt must be positive");
    if (!(c.gamma_min_rel > 0)) throw ConfigError("gamma_min_rel must be positive");
    if (c.kmax < 1) throw ConfigError("kmax must be at least 1");
    if (!(c.eps0 >= 0 && c.eps0 < 1)) throw ConfigError("eps0 must lie in [0,1)");
    if (!(c.c2 > 0)) throw ConfigError("c2 must be positive");
}

} // namespace bvwave
