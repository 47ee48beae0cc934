#include "epo/config.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "epo/errors.hpp"
#include "epo/sde.hpp"

namespace epo {
namespace {

std::string trim(const std::string& s) {
    size_t a = 0, b = s.size();
    while (a < b && std::isspace((unsigned char)s[a])) ++a;
    while (b > a && std::isspace((unsigned char)s[b - 1])) --b;
    return s.substr(a, b - a);
}

[[noreturn]] void bad(int line, const std::string& msg) {
    fail(errc::config_invalid, "line " + std::to_string(line) + ": " + msg);
}

double parse_double(const std::string& v, int line) {
    size_t pos = 0;
    double x;
    try {
        x = std::stod(v, &pos);
    } catch (const std::exception&) {
        bad(line, "not a number: '" + v + "'");
    }
    if (pos != v.size()) bad(line, "trailing junk in number: '" + v + "'");
    return x;
}

std::uint64_t parse_u64(const std::string& v, int line) {
    size_t pos = 0;
    unsigned long long x;
    try {
        x = std::stoull(v, &pos);
    } catch (const std::exception&) {
        bad(line, "not a nonnegative integer: '" + v + "'");
    }
    if (pos != v.size()) bad(line, "trailing junk in integer: '" + v + "'");
    return x;
}

std::vector<double> parse_list(const std::string& v, int line) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) bad(line, "empty list element");
        out.push_back(parse_double(item, line));
    }
    if (out.empty()) bad(line, "empty list");
    return out;
}

bool parse_bool(const std::string& v, int line) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    bad(line, "expected true/false: '" + v + "'");
}

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string fmt_list(const std::vector<double>& xs) {
    std::string s;
    for (size_t i = 0; i < xs.size(); ++i) {
        if (i) s += ", ";
        s += fmt(xs[i]);
    }
    return s;
}

} // namespace

const char* mode_name(RunMode m) {
    switch (m) {
        case RunMode::McDirect: return "mc_direct";
        case RunMode::McCycles: return "mc_cycles";
        case RunMode::Pde: return "pde";
        case RunMode::All: return "all";
    }
    return "?";
}

RunMode mode_from_name(const std::string& name) {
    if (name == "mc_direct") return RunMode::McDirect;
    if (name == "mc_cycles") return RunMode::McCycles;
    if (name == "pde") return RunMode::Pde;
    if (name == "all") return RunMode::All;
    fail(errc::config_invalid, "unknown mode '" + name + "'");
}

ExperimentConfig parse_config_text(const std::string& text) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string raw, section;
    int ln = 0;
    while (std::getline(in, raw)) {
        ++ln;
        const size_t cut = raw.find_first_of("#;");
        std::string line = trim(cut == std::string::npos ? raw : raw.substr(0, cut));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') bad(ln, "unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section != "oscillator" && section != "run" && section != "pde")
                bad(ln, "unknown section [" + section + "]");
            continue;
        }
        const size_t eq = line.find('=');
        if (eq == std::string::npos) bad(ln, "expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty() || val.empty()) bad(ln, "empty key or value");

        if (section == "oscillator") {
            if (key == "c0")
                cfg.c0_list = parse_list(val, ln);
            else if (key == "k")
                cfg.k_list = parse_list(val, ln);
            else if (key == "Y")
                cfg.Y_list = parse_list(val, ln);
            else
                bad(ln, "unknown key '" + key + "' in [oscillator]");
        } else if (section == "run") {
            if (key == "T")
                cfg.T = parse_double(val, ln);
            else if (key == "dt")
                cfg.dt = parse_double(val, ln);
            else if (key == "MC")
                cfg.MC = (std::size_t)parse_u64(val, ln);
            else if (key == "master_seed")
                cfg.master_seed = parse_u64(val, ln);
            else if (key == "mode") {
                try {
                    cfg.mode = mode_from_name(val);
                } catch (const error&) {
                    bad(ln, "unknown mode '" + val + "'");
                }
            } else if (key == "out")
                cfg.out = val;
            else if (key == "threads")
                cfg.threads = (int)parse_u64(val, ln);
            else if (key == "cycle_start") {
                if (val == "burnin")
                    cfg.cycle_start = CycleStart::BurnIn;
                else if (val == "corner")
                    cfg.cycle_start = CycleStart::Corner;
                else
                    bad(ln, "cycle_start must be burnin or corner");
            } else if (key == "harvest")
                cfg.harvest = parse_bool(val, ln);
            else if (key == "dump_paths")
                cfg.dump_paths = (int)parse_u64(val, ln);
            else
                bad(ln, "unknown key '" + key + "' in [run]");
        } else if (section == "pde") {
            if (key == "delta") {
                if (val == "auto")
                    cfg.pde_deltas.clear();
                else
                    cfg.pde_deltas = parse_list(val, ln);
            } else if (key == "L")
                cfg.pde_L = parse_double(val, ln);
            else if (key == "dump_fields")
                cfg.dump_fields = parse_bool(val, ln);
            else
                bad(ln, "unknown key '" + key + "' in [pde]");
        } else {
            bad(ln, "key outside any section");
        }
    }
    return cfg;
}

ExperimentConfig parse_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) fail(errc::io_error, "cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config_text(ss.str());
}

void validate_config(const ExperimentConfig& cfg) {
    if (cfg.c0_list.empty() || cfg.k_list.empty())
        fail(errc::config_invalid, "c0 and k sweeps must be nonempty");
    const bool mc = cfg.mode != RunMode::Pde;
    const bool pde = cfg.mode == RunMode::Pde || cfg.mode == RunMode::All;
    for (double c0 : cfg.c0_list)
        for (double k : cfg.k_list)
            for (double Y : cfg.Y_list) {
                const auto p = validate_params(c0, k, Y);
                if (mc) check_dt_guard(p, cfg.dt);
                if (pde)
                    for (double d : cfg.pde_deltas)
                        if (!(d > 0.0) || d > Y)
                            fail(errc::config_invalid,
                                 "pde delta must be in (0, Y]; got " + std::to_string(d) +
                                     " with Y = " + std::to_string(Y));
            }
    if (!(cfg.T > 0.0)) fail(errc::config_invalid, "T must be positive");
    if (!(cfg.dt > 0.0)) fail(errc::config_invalid, "dt must be positive");
    if (mc && cfg.MC < 2) fail(errc::config_invalid, "MC modes need MC >= 2");
    if (cfg.threads < 1) fail(errc::config_invalid, "threads must be >= 1");
    if (cfg.dump_paths < 0) fail(errc::config_invalid, "dump_paths must be >= 0");
    if (cfg.pde_L < 0.0) fail(errc::config_invalid, "L must be >= 0 (0 = auto)");
    if ((int)cfg.MC > 0 && cfg.dump_paths > (int)cfg.MC)
        fail(errc::config_invalid, "dump_paths exceeds MC");
}

std::string config_echo(const ExperimentConfig& cfg) {
    std::string s;
    s += "[oscillator]\n";
    s += "c0 = " + fmt_list(cfg.c0_list) + "\n";
    s += "k = " + fmt_list(cfg.k_list) + "\n";
    s += "Y = " + fmt_list(cfg.Y_list) + "\n";
    s += "[run]\n";
    s += std::string("mode = ") + mode_name(cfg.mode) + "\n";
    s += "T = " + fmt(cfg.T) + "\n";
    s += "dt = " + fmt(cfg.dt) + "\n";
    s += "MC = " + std::to_string(cfg.MC) + "\n";
    s += "master_seed = " + std::to_string(cfg.master_seed) + "\n";
    // out and threads are deliberately not echoed: neither changes a single
    // computed number, and leaving them out keeps report files byte-identical
    // across thread counts and output locations.
    s += std::string("cycle_start = ") +
         (cfg.cycle_start == CycleStart::BurnIn ? "burnin" : "corner") + "\n";
    s += std::string("harvest = ") + (cfg.harvest ? "true" : "false") + "\n";
    s += "dump_paths = " + std::to_string(cfg.dump_paths) + "\n";
    s += "[pde]\n";
    s += "delta = " + (cfg.pde_deltas.empty() ? std::string("auto") : fmt_list(cfg.pde_deltas)) +
         "\n";
    s += "L = " + fmt(cfg.pde_L) + "\n";
    s += std::string("dump_fields = ") + (cfg.dump_fields ? "true" : "false") + "\n";
    return s;
}

} // namespace epo
