#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <variant>
#include <vector>

#include "qbrown/errors.hpp"

namespace qbrown {

using complexd = std::complex<double>;

// --- monotone-cubic (Fritsch-Carlson) interpolation for tabulated models ---

class PchipTable {
public:
    PchipTable() = default;

    PchipTable(std::vector<double> x, std::vector<double> y)
        : x_(std::move(x)), y_(std::move(y)) {
        const size_t n = x_.size();
        if (n < 2) throw domain_error("tabulated model needs at least 2 samples");
        for (size_t i = 1; i < n; ++i)
            if (!(x_[i] > x_[i - 1]))
                throw domain_error("tabulated model: abscissae must be strictly increasing");
        slopes_.resize(n);
        std::vector<double> d(n - 1);
        for (size_t i = 0; i + 1 < n; ++i) d[i] = (y_[i + 1] - y_[i]) / (x_[i + 1] - x_[i]);
        slopes_[0] = d[0];
        slopes_[n - 1] = d[n - 2];
        for (size_t i = 1; i + 1 < n; ++i) {
            if (d[i - 1] * d[i] <= 0) {
                slopes_[i] = 0.0;
            } else {
                const double w1 = 2 * (x_[i + 1] - x_[i]) + (x_[i] - x_[i - 1]);
                const double w2 = (x_[i + 1] - x_[i]) + 2 * (x_[i] - x_[i - 1]);
                slopes_[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
            }
        }
    }

    double operator()(double x) const {
        if (x < x_.front() || x > x_.back())
            throw range_error("tabulated model: frequency outside sampled range");
        auto it = std::upper_bound(x_.begin(), x_.end(), x);
        size_t i = (it == x_.begin()) ? 0 : static_cast<size_t>(it - x_.begin()) - 1;
        if (i + 1 >= x_.size()) i = x_.size() - 2;
        const double h = x_[i + 1] - x_[i];
        const double t = (x - x_[i]) / h;
        const double t2 = t * t, t3 = t2 * t;
        return (2 * t3 - 3 * t2 + 1) * y_[i] + (t3 - 2 * t2 + t) * h * slopes_[i] +
               (-2 * t3 + 3 * t2) * y_[i + 1] + (t3 - t2) * h * slopes_[i + 1];
    }

    double min_x() const { return x_.front(); }
    double max_x() const { return x_.back(); }

private:
    std::vector<double> x_, y_, slopes_;
};

// --- polarizability ---

struct LorentzPolarizability {
    double alpha0; // C m^2 / V, static value, >= 0
    double omega0; // rad/s, > 0
    double gamma;  // rad/s, >= 0
};

struct ConstantPolarizability {
    double alpha0;
};

struct TabulatedPolarizability {
    std::vector<double> omega;
    std::vector<complexd> alpha;
};

struct PolarizabilityModel {
    std::variant<LorentzPolarizability, ConstantPolarizability, TabulatedPolarizability> value;

    static PolarizabilityModel lorentz(double alpha0, double omega0, double gamma) {
        if (alpha0 < 0) throw domain_error("Lorentz polarizability: alpha0 must be >= 0");
        if (omega0 <= 0) throw domain_error("Lorentz polarizability: omega0 must be > 0");
        if (gamma < 0) throw domain_error("Lorentz polarizability: gamma must be >= 0");
        return {LorentzPolarizability{alpha0, omega0, gamma}};
    }

    static PolarizabilityModel constant(double alpha0) {
        return {ConstantPolarizability{alpha0}};
    }

    static PolarizabilityModel tabulated(std::vector<double> omega, std::vector<complexd> alpha) {
        if (omega.size() != alpha.size() || omega.size() < 2)
            throw domain_error("tabulated polarizability: need matching sample lists, >= 2 points");
        for (size_t i = 1; i < omega.size(); ++i)
            if (!(omega[i] > omega[i - 1]))
                throw domain_error("tabulated polarizability: omega samples must increase");
        for (size_t i = 0; i < omega.size(); ++i)
            if (omega[i] > 0 && alpha[i].imag() < 0)
                throw domain_error("tabulated polarizability: Im alpha(omega) < 0 violates passivity");
        return {TabulatedPolarizability{std::move(omega), std::move(alpha)}};
    }
};

// alpha(omega). The Lorentz branch accepts signed omega so crossing symmetry
// alpha(-w) = conj(alpha(w)) can be exercised directly.
inline complexd polarizability_at(const PolarizabilityModel& model, double omega) {
    return std::visit(
        [omega](const auto& m) -> complexd {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, LorentzPolarizability>) {
                const double w0sq = m.omega0 * m.omega0;
                return m.alpha0 * w0sq / complexd(w0sq - omega * omega, -m.gamma * omega);
            } else if constexpr (std::is_same_v<T, ConstantPolarizability>) {
                return complexd(m.alpha0, 0.0);
            } else {
                static_assert(std::is_same_v<T, TabulatedPolarizability>);
                if (omega < m.omega.front() || omega > m.omega.back())
                    throw range_error("polarizability_at: omega outside tabulated range");
                std::vector<double> re(m.alpha.size()), im(m.alpha.size());
                for (size_t i = 0; i < m.alpha.size(); ++i) {
                    re[i] = m.alpha[i].real();
                    im[i] = m.alpha[i].imag();
                }
                PchipTable tre(m.omega, re), tim(m.omega, im);
                return complexd(tre(omega), tim(omega));
            }
        },
        model.value);
}

// alpha(i xi): the polarizability continued to the imaginary frequency axis,
// where it is real and positive for passive models. Tabulated data cannot be
// continued and is rejected.
inline double polarizability_imag_axis(const PolarizabilityModel& model, double xi) {
    return std::visit(
        [xi](const auto& m) -> double {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, LorentzPolarizability>) {
                const double w0sq = m.omega0 * m.omega0;
                return m.alpha0 * w0sq / (w0sq + xi * xi + m.gamma * xi);
            } else if constexpr (std::is_same_v<T, ConstantPolarizability>) {
                return m.alpha0;
            } else {
                throw domain_error(
                    "polarizability_imag_axis: tabulated models cannot be continued");
            }
        },
        model.value);
}

// --- medium ---

struct DrudeMedium {
    double omega_p; // rad/s, > 0
    double gamma_d; // rad/s, > 0 (strictly: lossless Drude puts poles on the real axis)
};

struct PerfectMirrorMedium {};
struct VacuumMedium {};

struct TabulatedPermittivity {
    std::vector<double> omega;
    std::vector<complexd> eps; // relative
};

struct MediumModel {
    std::variant<DrudeMedium, PerfectMirrorMedium, VacuumMedium, TabulatedPermittivity> value;

    static MediumModel drude(double omega_p, double gamma_d) {
        if (omega_p <= 0) throw domain_error("Drude medium: omega_p must be > 0");
        if (gamma_d <= 0)
            throw domain_error("Drude medium: gamma_d must be > 0 (lossless Drude rejected)");
        return {DrudeMedium{omega_p, gamma_d}};
    }
    static MediumModel perfect_mirror() { return {PerfectMirrorMedium{}}; }
    static MediumModel vacuum() { return {VacuumMedium{}}; }
    static MediumModel tabulated(std::vector<double> omega, std::vector<complexd> eps) {
        if (omega.size() != eps.size() || omega.size() < 2)
            throw domain_error("tabulated permittivity: need matching sample lists, >= 2 points");
        for (size_t i = 1; i < omega.size(); ++i)
            if (!(omega[i] > omega[i - 1]))
                throw domain_error("tabulated permittivity: omega samples must increase");
        for (size_t i = 0; i < omega.size(); ++i)
            if (omega[i] > 0 && eps[i].imag() < 0)
                throw domain_error("tabulated permittivity: Im eps(omega) < 0 violates passivity");
        return {TabulatedPermittivity{std::move(omega), std::move(eps)}};
    }

    bool is_vacuum() const { return std::holds_alternative<VacuumMedium>(value); }
    bool is_perfect_mirror() const { return std::holds_alternative<PerfectMirrorMedium>(value); }
};

// Relative permittivity. PerfectMirror has no finite eps; its reflection limits
// (r_s = -1, r_p = +1) are special-cased in the Fresnel routine instead.
inline complexd permittivity_at(const MediumModel& model, double omega) {
    return std::visit(
        [omega](const auto& m) -> complexd {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, DrudeMedium>) {
                if (omega <= 0) throw domain_error("permittivity_at: Drude pole at omega = 0");
                return 1.0 - m.omega_p * m.omega_p / complexd(omega * omega, m.gamma_d * omega);
            } else if constexpr (std::is_same_v<T, VacuumMedium>) {
                return complexd(1.0, 0.0);
            } else if constexpr (std::is_same_v<T, PerfectMirrorMedium>) {
                throw domain_error(
                    "permittivity_at: perfect mirror has no finite permittivity; "
                    "use fresnel() which handles it directly");
            } else {
                static_assert(std::is_same_v<T, TabulatedPermittivity>);
                if (omega < m.omega.front() || omega > m.omega.back())
                    throw range_error("permittivity_at: omega outside tabulated range");
                std::vector<double> re(m.eps.size()), im(m.eps.size());
                for (size_t i = 0; i < m.eps.size(); ++i) {
                    re[i] = m.eps[i].real();
                    im[i] = m.eps[i].imag();
                }
                PchipTable tre(m.omega, re), tim(m.omega, im);
                return complexd(tre(omega), tim(omega));
            }
        },
        model.value);
}

struct ParticleModel {
    double mass; // kg, > 0
    PolarizabilityModel polarizability;

    static ParticleModel make(double mass, PolarizabilityModel pol) {
        if (mass <= 0) throw domain_error("ParticleModel: mass must be > 0");
        return {mass, std::move(pol)};
    }
};

} // namespace qbrown
