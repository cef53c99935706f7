#pragma once

#include <cmath>
#include <numbers>

#include "qbrown/errors.hpp"

namespace qbrown {

inline constexpr double pi = std::numbers::pi_v<double>;

// Fundamental constants in SI units. A natural-units preset
// (hbar = c = kB = eps0 = mu0 = 1) is provided for analytic checks
// where prefactors reduce to pure numbers.
struct PhysicalConstants {
    double hbar; // J s
    double c;    // m / s
    double eps0; // F / m
    double mu0;  // H / m
    double kB;   // J / K

    static constexpr PhysicalConstants si() {
        // CODATA 2018. eps0 derived from mu0 and c so that mu0*eps0*c^2 == 1
        // holds to rounding, which several identities below rely on.
        constexpr double c0 = 299792458.0;
        constexpr double mu0v = 1.25663706212e-6;
        return {1.054571817e-34, c0, 1.0 / (mu0v * c0 * c0), mu0v, 1.380649e-23};
    }

    static constexpr PhysicalConstants natural() { return {1.0, 1.0, 1.0, 1.0, 1.0}; }

    constexpr bool valid() const {
        return hbar > 0 && c > 0 && eps0 > 0 && mu0 > 0 && kB > 0;
    }
};

struct ThermalEnvironment {
    double temperature; // K, >= 0

    constexpr bool valid() const { return temperature >= 0; }
};

// Bose-Einstein mean photon number at frequency omega. Exactly zero at T = 0.
inline double occupation(double omega, const ThermalEnvironment& env,
                         const PhysicalConstants& k) {
    if (omega <= 0) throw domain_error("occupation: omega must be positive");
    if (env.temperature == 0) return 0.0;
    const double u = k.hbar * omega / (k.kB * env.temperature);
    // expm1 keeps the u << 1 limit (n ~ 1/u) accurate.
    return 1.0 / std::expm1(u);
}

// Analytic d n_th / d omega; always negative for T > 0.
// Equals -(hbar / kB T) n (n + 1), which is the identity the dissipation
// coefficient leans on (see coefficients.hpp for the sign convention used there).
inline double occupation_derivative(double omega, const ThermalEnvironment& env,
                                    const PhysicalConstants& k) {
    if (omega <= 0) throw domain_error("occupation_derivative: omega must be positive");
    if (env.temperature == 0)
        throw domain_error("occupation_derivative: undefined at T = 0");
    const double beta_h = k.hbar / (k.kB * env.temperature);
    const double n = 1.0 / std::expm1(beta_h * omega);
    return -beta_h * n * (n + 1.0);
}

// Characteristic thermal photon wavelength 4 pi hbar c / (kB T).
inline double thermal_wavelength(const ThermalEnvironment& env,
                                 const PhysicalConstants& k) {
    if (env.temperature <= 0)
        throw domain_error("thermal_wavelength: requires T > 0");
    return 4.0 * pi * k.hbar * k.c / (k.kB * env.temperature);
}

} // namespace qbrown
