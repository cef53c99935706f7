#pragma once

#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "qbrown/constants.hpp"
#include "qbrown/errors.hpp"
#include "qbrown/models.hpp"
#include "qbrown/surface.hpp"

namespace qbrown {

// Frequency-quadrature settings in the substituted variable u = hbar w / kB T.
struct SpectralGrid {
    std::vector<double> u_nodes; // optional extra breakpoints, strictly increasing
    double u_max = 60.0;         // n(n+1) < 1e-25 beyond 60
    int panels = 24;
    double target_rel_tol = 1e-9;

    bool valid() const {
        if (u_max < 40.0 || panels < 4 || target_rel_tol <= 0) return false;
        for (size_t i = 1; i < u_nodes.size(); ++i)
            if (!(u_nodes[i] > u_nodes[i - 1])) return false;
        return true;
    }
};

// One evaluation point: everything the coefficient integrals depend on.
struct Scenario {
    PhysicalConstants constants = PhysicalConstants::si();
    ParticleModel particle{1e-18, PolarizabilityModel::constant(0.0)};
    MediumModel medium = MediumModel::vacuum();
    double z = 1e-6; // m, height above the surface
    ThermalEnvironment environment{300.0};
    SpectralGrid spectral;
    KParQuadrature kpar;

    void validate() const {
        if (!constants.valid()) throw config_error("scenario: invalid constants");
        if (particle.mass <= 0) throw config_error("scenario: mass must be > 0");
        if (!medium.is_vacuum() && z <= 0) throw config_error("scenario: z must be > 0");
        if (environment.temperature < 0) throw config_error("scenario: T must be >= 0");
        if (!spectral.valid()) throw config_error("scenario: invalid spectral grid");
        if (!kpar.valid()) throw config_error("scenario: invalid k_par quadrature");
    }
};

namespace detail {
inline void hash_mix(uint64_t& h, const char* data, size_t n) {
    for (size_t i = 0; i < n; ++i) {
        h ^= static_cast<unsigned char>(data[i]);
        h *= 0x100000001b3ull; // FNV-1a
    }
}
inline void hash_num(uint64_t& h, double v) {
    char buf[32];
    const int n = std::snprintf(buf, sizeof buf, "%.17g|", v);
    hash_mix(h, buf, static_cast<size_t>(n));
}
inline void hash_str(uint64_t& h, const std::string& s) { hash_mix(h, s.data(), s.size()); }
} // namespace detail

// Stable identity of a scenario, recorded as provenance on every result.
inline uint64_t scenario_hash(const Scenario& s) {
    uint64_t h = 0xcbf29ce484222325ull;
    using namespace detail;
    hash_num(h, s.constants.hbar);
    hash_num(h, s.constants.c);
    hash_num(h, s.constants.eps0);
    hash_num(h, s.constants.mu0);
    hash_num(h, s.constants.kB);
    hash_num(h, s.particle.mass);
    std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, LorentzPolarizability>) {
                hash_str(h, "lorentz");
                hash_num(h, m.alpha0);
                hash_num(h, m.omega0);
                hash_num(h, m.gamma);
            } else if constexpr (std::is_same_v<T, ConstantPolarizability>) {
                hash_str(h, "constant");
                hash_num(h, m.alpha0);
            } else {
                hash_str(h, "tabulated");
                for (size_t i = 0; i < m.omega.size(); ++i) {
                    hash_num(h, m.omega[i]);
                    hash_num(h, m.alpha[i].real());
                    hash_num(h, m.alpha[i].imag());
                }
            }
        },
        s.particle.polarizability.value);
    std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, DrudeMedium>) {
                hash_str(h, "drude");
                hash_num(h, m.omega_p);
                hash_num(h, m.gamma_d);
            } else if constexpr (std::is_same_v<T, PerfectMirrorMedium>) {
                hash_str(h, "mirror");
            } else if constexpr (std::is_same_v<T, VacuumMedium>) {
                hash_str(h, "vacuum");
            } else {
                hash_str(h, "tab-eps");
                for (size_t i = 0; i < m.omega.size(); ++i) {
                    hash_num(h, m.omega[i]);
                    hash_num(h, m.eps[i].real());
                    hash_num(h, m.eps[i].imag());
                }
            }
        },
        s.medium.value);
    hash_num(h, s.z);
    hash_num(h, s.environment.temperature);
    hash_num(h, s.spectral.u_max);
    hash_num(h, static_cast<double>(s.spectral.panels));
    hash_num(h, s.spectral.target_rel_tol);
    for (double u : s.spectral.u_nodes) hash_num(h, u);
    hash_num(h, static_cast<double>(s.kpar.propagating_nodes));
    hash_num(h, static_cast<double>(s.kpar.evanescent_nodes));
    hash_num(h, s.kpar.evanescent_cutoff);
    hash_num(h, s.kpar.target_rel_tol);
    return h;
}

} // namespace qbrown
