#pragma once

// Scenario/sweep configuration: a small key-value format with [section]
// headers, '#' comments, and three value shapes:
//   key = 3.5                  scalar
//   key = log 1e-7 1e-4 13     log-spaced sweep (start stop count)
//   key = list 1e-7 5e-7 2e-6  explicit sweep values
// Parse errors carry line/column; validation collects every problem before
// reporting.

#include <cctype>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "qbrown/errors.hpp"
#include "qbrown/scenario.hpp"

namespace qbrown {

struct SweepSpec {
    std::vector<double> values;

    bool is_sweep() const { return values.size() > 1; }
};

struct RunConfig {
    std::string constants_preset = "si";
    PhysicalConstants constants = PhysicalConstants::si();
    double mass = 1e-18;
    std::string polarizability_kind = "lorentz";
    double alpha0 = 4e-39;
    double omega0 = 7e15;
    double alpha_gamma = 1e12;
    std::string medium_kind = "mirror";
    double omega_p = 1.37e16;
    double gamma_d = 4.05e13;
    SweepSpec z{{1e-6}};
    SweepSpec temperature{{300.0}};
    SpectralGrid spectral;
    KParQuadrature kpar;
    std::vector<std::string> outputs{"lambda", "gamma", "diffusion", "drag"};
    std::vector<double> kernel_tau;
    bool phase_space = false;
    uint64_t seed = 1;
    int threads = 0;

    PolarizabilityModel make_polarizability() const {
        if (polarizability_kind == "lorentz")
            return PolarizabilityModel::lorentz(alpha0, omega0, alpha_gamma);
        return PolarizabilityModel::constant(alpha0);
    }
    MediumModel make_medium() const {
        if (medium_kind == "drude") return MediumModel::drude(omega_p, gamma_d);
        if (medium_kind == "vacuum") return MediumModel::vacuum();
        return MediumModel::perfect_mirror();
    }
    Scenario scenario_at(double zv, double tv) const {
        Scenario sc;
        sc.constants = constants;
        sc.particle = ParticleModel::make(mass, make_polarizability());
        sc.medium = make_medium();
        sc.z = zv;
        sc.environment = ThermalEnvironment{tv};
        sc.spectral = spectral;
        sc.kpar = kpar;
        return sc;
    }
};

namespace config_detail {

struct RawEntry {
    std::string value;
    int line;
    int column;
    bool used = false;
};

using RawMap = std::map<std::string, RawEntry>;

inline std::string trim(const std::string& s) {
    size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

inline RawMap tokenize(const std::string& text, std::vector<std::string>& errors) {
    RawMap map;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        const std::string t = trim(line);
        if (t.empty()) continue;
        if (t.front() == '[') {
            if (t.back() != ']') {
                errors.push_back("line " + std::to_string(line_no) + ", col " +
                                 std::to_string(line.find('[') + 1) +
                                 ": unterminated section header");
                continue;
            }
            section = trim(t.substr(1, t.size() - 2));
            if (section.empty())
                errors.push_back("line " + std::to_string(line_no) + ": empty section name");
            continue;
        }
        const size_t eq = t.find('=');
        if (eq == std::string::npos) {
            errors.push_back("line " + std::to_string(line_no) + ", col 1: expected key = value");
            continue;
        }
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key.empty()) {
            errors.push_back("line " + std::to_string(line_no) + ": empty key");
            continue;
        }
        const std::string full = section.empty() ? key : section + "." + key;
        if (map.count(full))
            errors.push_back("line " + std::to_string(line_no) + ": duplicate key '" + full + "'");
        map[full] = RawEntry{value, line_no, static_cast<int>(line.find('=') + 2)};
    }
    return map;
}

inline bool parse_number(const std::string& s, double& out) {
    char* end = nullptr;
    out = std::strtod(s.c_str(), &end);
    return end && *end == '\0' && end != s.c_str();
}

struct Reader {
    RawMap& map;
    std::vector<std::string>& errors;

    bool has(const std::string& key) const { return map.count(key) > 0; }

    void fail(const std::string& key, const std::string& msg) {
        auto it = map.find(key);
        if (it != map.end())
            errors.push_back("line " + std::to_string(it->second.line) + " (" + key + "): " + msg);
        else
            errors.push_back(key + ": " + msg);
    }

    double number(const std::string& key, double fallback) {
        auto it = map.find(key);
        if (it == map.end()) return fallback;
        it->second.used = true;
        double v;
        if (!parse_number(it->second.value, v)) {
            fail(key, "expected a number, got '" + it->second.value + "'");
            return fallback;
        }
        return v;
    }

    std::string word(const std::string& key, const std::string& fallback,
                     const std::vector<std::string>& allowed) {
        auto it = map.find(key);
        if (it == map.end()) return fallback;
        it->second.used = true;
        for (const auto& a : allowed)
            if (it->second.value == a) return a;
        std::string opts;
        for (const auto& a : allowed) opts += (opts.empty() ? "" : " | ") + a;
        fail(key, "expected one of {" + opts + "}, got '" + it->second.value + "'");
        return fallback;
    }

    SweepSpec sweep(const std::string& key, const SweepSpec& fallback) {
        auto it = map.find(key);
        if (it == map.end()) return fallback;
        it->second.used = true;
        std::istringstream ss(it->second.value);
        std::string head;
        ss >> head;
        double v;
        if (parse_number(head, v)) {
            return SweepSpec{{v}};
        }
        if (head == "log") {
            double a, b;
            long n;
            if (!(ss >> a >> b >> n)) {
                fail(key, "log sweep needs: log START STOP COUNT");
                return fallback;
            }
            if (n < 2) {
                fail(key, "sweep must have at least 2 points");
                return fallback;
            }
            if (!(a > 0) || !(b > a)) {
                fail(key, "log sweep needs 0 < START < STOP");
                return fallback;
            }
            SweepSpec out;
            for (long i = 0; i < n; ++i)
                out.values.push_back(a * std::pow(b / a, static_cast<double>(i) / (n - 1)));
            return out;
        }
        if (head == "list") {
            SweepSpec out;
            std::string tok;
            while (ss >> tok) {
                if (!parse_number(tok, v)) {
                    fail(key, "list entries must be numbers, got '" + tok + "'");
                    return fallback;
                }
                out.values.push_back(v);
            }
            if (out.values.size() < 2) {
                fail(key, "sweep must have at least 2 points");
                return fallback;
            }
            for (size_t i = 1; i < out.values.size(); ++i)
                if (!(out.values[i] > out.values[i - 1])) {
                    fail(key, "sweep values must be strictly increasing");
                    return fallback;
                }
            return out;
        }
        fail(key, "expected a number, 'log START STOP N', or 'list v1 v2 ...'");
        return fallback;
    }

    std::vector<std::string> words(const std::string& key,
                                   const std::vector<std::string>& fallback,
                                   const std::vector<std::string>& allowed) {
        auto it = map.find(key);
        if (it == map.end()) return fallback;
        it->second.used = true;
        std::vector<std::string> out;
        std::istringstream ss(it->second.value);
        std::string tok;
        while (ss >> tok) {
            bool ok = false;
            for (const auto& a : allowed) ok = ok || tok == a;
            if (!ok) {
                fail(key, "unknown entry '" + tok + "'");
                continue;
            }
            out.push_back(tok);
        }
        return out.empty() ? fallback : out;
    }

    std::vector<double> numbers(const std::string& key, const std::vector<double>& fallback) {
        auto it = map.find(key);
        if (it == map.end()) return fallback;
        it->second.used = true;
        std::vector<double> out;
        std::istringstream ss(it->second.value);
        std::string tok;
        double v;
        while (ss >> tok) {
            if (!parse_number(tok, v)) {
                fail(key, "expected numbers, got '" + tok + "'");
                return fallback;
            }
            out.push_back(v);
        }
        return out;
    }
};

} // namespace config_detail

inline RunConfig parse_config_text(const std::string& text) {
    std::vector<std::string> errors;
    auto map = config_detail::tokenize(text, errors);
    config_detail::Reader r{map, errors};
    RunConfig cfg;

    cfg.constants_preset = r.word("constants", "si", {"si", "natural"});
    cfg.constants = cfg.constants_preset == "natural" ? PhysicalConstants::natural()
                                                      : PhysicalConstants::si();
    cfg.seed = static_cast<uint64_t>(r.number("seed", 1.0));
    cfg.threads = static_cast<int>(r.number("threads", 0.0));

    cfg.mass = r.number("particle.mass", cfg.mass);
    cfg.polarizability_kind =
        r.word("particle.polarizability", "lorentz", {"lorentz", "constant"});
    cfg.alpha0 = r.number("particle.alpha0", cfg.alpha0);
    cfg.omega0 = r.number("particle.omega0", cfg.omega0);
    cfg.alpha_gamma = r.number("particle.gamma", cfg.alpha_gamma);

    cfg.medium_kind = r.word("medium.type", "mirror", {"drude", "mirror", "vacuum"});
    cfg.omega_p = r.number("medium.omega_p", cfg.omega_p);
    cfg.gamma_d = r.number("medium.gamma_d", cfg.gamma_d);

    cfg.z = r.sweep("geometry.z", cfg.z);
    cfg.temperature = r.sweep("environment.temperature", cfg.temperature);

    cfg.spectral.u_max = r.number("quadrature.u_max", cfg.spectral.u_max);
    cfg.spectral.panels = static_cast<int>(r.number("quadrature.panels", cfg.spectral.panels));
    cfg.spectral.target_rel_tol =
        r.number("quadrature.target_rel_tol", cfg.spectral.target_rel_tol);
    cfg.kpar.propagating_nodes =
        static_cast<int>(r.number("quadrature.propagating_nodes", cfg.kpar.propagating_nodes));
    cfg.kpar.evanescent_nodes =
        static_cast<int>(r.number("quadrature.evanescent_nodes", cfg.kpar.evanescent_nodes));
    cfg.kpar.evanescent_cutoff =
        r.number("quadrature.evanescent_cutoff", cfg.kpar.evanescent_cutoff);
    cfg.kpar.target_rel_tol = r.number("quadrature.kpar_rel_tol", cfg.kpar.target_rel_tol);

    cfg.outputs = r.words("outputs.coefficients", cfg.outputs,
                          {"lambda", "gamma", "diffusion", "drag", "c1", "c2", "u1", "u2"});
    cfg.kernel_tau = r.numbers("outputs.kernel_tau", cfg.kernel_tau);
    cfg.phase_space = r.word("outputs.phase_space", "off", {"on", "off"}) == "on";

    // unknown keys are configuration mistakes, not silently ignored
    for (const auto& [key, entry] : map)
        if (!entry.used)
            errors.push_back("line " + std::to_string(entry.line) + ": unknown key '" + key + "'");

    // semantic validation, all collected
    if (cfg.mass <= 0) errors.push_back("particle.mass: must be > 0");
    if (cfg.alpha0 < 0) errors.push_back("particle.alpha0: must be >= 0");
    if (cfg.polarizability_kind == "lorentz") {
        if (cfg.omega0 <= 0) errors.push_back("particle.omega0: must be > 0");
        if (cfg.alpha_gamma < 0) errors.push_back("particle.gamma: must be >= 0");
    }
    if (cfg.medium_kind == "drude") {
        if (cfg.omega_p <= 0) errors.push_back("medium.omega_p: must be > 0");
        if (cfg.gamma_d <= 0)
            errors.push_back("medium.gamma_d: must be > 0 (lossless Drude is rejected)");
    }
    for (double zv : cfg.z.values)
        if (cfg.medium_kind != "vacuum" && zv <= 0)
            errors.push_back("geometry.z: heights must be > 0");
    for (double tv : cfg.temperature.values)
        if (tv < 0) errors.push_back("environment.temperature: must be >= 0");
    if (!cfg.spectral.valid())
        errors.push_back("quadrature: invalid spectral grid (u_max >= 40, panels >= 4)");
    if (!cfg.kpar.valid())
        errors.push_back("quadrature: invalid k_par settings (nodes >= 8, cutoff >= 30)");
    const bool needs_drag_T =
        std::find(cfg.outputs.begin(), cfg.outputs.end(), "drag") != cfg.outputs.end();
    if (needs_drag_T)
        for (double tv : cfg.temperature.values)
            if (tv == 0)
                errors.push_back(
                    "outputs.coefficients: drag is undefined at T = 0 (environment.temperature)");

    if (!errors.empty()) {
        std::string msg = "configuration errors:";
        for (const auto& e : errors) msg += "\n  - " + e;
        throw config_error(msg);
    }
    return cfg;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

// Normalized form: stable ordering and full precision, so that re-parsing
// reproduces the configuration byte for byte.
inline std::string canonical_config(const RunConfig& cfg) {
    std::ostringstream out;
    out.setf(std::ios::scientific);
    out.precision(17);
    auto num = [](double v) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    auto sweep = [&](const SweepSpec& s) {
        if (s.values.size() == 1) return num(s.values[0]);
        std::string o = "list";
        for (double v : s.values) o += " " + num(v);
        return o;
    };
    out << "constants = " << cfg.constants_preset << "\n";
    out << "seed = " << cfg.seed << "\n";
    out << "threads = " << cfg.threads << "\n\n";
    out << "[particle]\n";
    out << "mass = " << num(cfg.mass) << "\n";
    out << "polarizability = " << cfg.polarizability_kind << "\n";
    out << "alpha0 = " << num(cfg.alpha0) << "\n";
    if (cfg.polarizability_kind == "lorentz") {
        out << "omega0 = " << num(cfg.omega0) << "\n";
        out << "gamma = " << num(cfg.alpha_gamma) << "\n";
    }
    out << "\n[medium]\n";
    out << "type = " << cfg.medium_kind << "\n";
    if (cfg.medium_kind == "drude") {
        out << "omega_p = " << num(cfg.omega_p) << "\n";
        out << "gamma_d = " << num(cfg.gamma_d) << "\n";
    }
    out << "\n[geometry]\n";
    out << "z = " << sweep(cfg.z) << "\n";
    out << "\n[environment]\n";
    out << "temperature = " << sweep(cfg.temperature) << "\n";
    out << "\n[quadrature]\n";
    out << "u_max = " << num(cfg.spectral.u_max) << "\n";
    out << "panels = " << cfg.spectral.panels << "\n";
    out << "target_rel_tol = " << num(cfg.spectral.target_rel_tol) << "\n";
    out << "propagating_nodes = " << cfg.kpar.propagating_nodes << "\n";
    out << "evanescent_nodes = " << cfg.kpar.evanescent_nodes << "\n";
    out << "evanescent_cutoff = " << num(cfg.kpar.evanescent_cutoff) << "\n";
    out << "kpar_rel_tol = " << num(cfg.kpar.target_rel_tol) << "\n";
    out << "\n[outputs]\n";
    out << "coefficients =";
    for (const auto& c : cfg.outputs) out << " " << c;
    out << "\n";
    if (!cfg.kernel_tau.empty()) {
        out << "kernel_tau =";
        for (double t : cfg.kernel_tau) out << " " << num(t);
        out << "\n";
    }
    out << "phase_space = " << (cfg.phase_space ? "on" : "off") << "\n";
    return out.str();
}

} // namespace qbrown
