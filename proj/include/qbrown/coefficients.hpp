#pragma once

// Spectral coefficient assembly: decoherence Lambda, dissipation Gamma,
// momentum diffusion D, drag xi, and the Casimir-Polder quantities U1, U2,
// C1, C2. Every integrand is built from the contraction
//     sum_pk Im G_pk(r0, r0, w) Im[d_i G_pk(r0, r0, w) d_j]
// with the Green tensor split into free and scattering parts; the "surface"
// label collects the three groupings that involve the scattering part at
// least once (0*s, s*0, s*s), the "free" label the purely free grouping.

#include <algorithm>
#include <array>
#include <cmath>
#include <set>
#include <vector>

#include "qbrown/constants.hpp"
#include "qbrown/errors.hpp"
#include "qbrown/green_free.hpp"
#include "qbrown/quadrature.hpp"
#include "qbrown/scenario.hpp"
#include "qbrown/surface.hpp"

namespace qbrown {

struct SpectralContractions {
    Mat2 free_free = mat2_zero();
    Mat2 cross = mat2_zero();     // Im G0 . Im dGs + Im Gs . Im dG0
    Mat2 surf_surf = mat2_zero(); // Im Gs . Im dGs
};

// Contraction groupings at one frequency. Pure free-space parts come from the
// analytic coincidence limits; scattering parts from the k_par quadrature.
inline SpectralContractions spectral_contractions(const Scenario& sc, double omega) {
    SpectralContractions out;
    const double g0 = omega / (6.0 * pi * sc.constants.c);
    const DerivedGreenBlock d0 = free_green_lateral_derivatives(omega, sc.constants);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            double s = 0.0;
            for (int p = 0; p < 3; ++p) s += g0 * d0.values[i][j](p, p).imag();
            out.free_free[i][j] = s;
        }
    if (sc.medium.is_vacuum()) return out;

    const SurfaceCoincidence surf =
        scattering_green_coincidence_full(sc.z, omega, sc.medium, sc.kpar, sc.constants);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            double cx = 0.0, ss = 0.0;
            for (int p = 0; p < 3; ++p)
                cx += g0 * surf.deriv[i][j](p, p).imag() +
                      surf.values(p, p).imag() * d0.values[i][j](p, p).imag();
            // off-diagonal (p,k) pairs contribute only via Gs x dGs
            for (int p = 0; p < 3; ++p)
                for (int q = 0; q < 3; ++q)
                    ss += surf.values(p, q).imag() * surf.deriv[i][j](p, q).imag();
            out.cross[i][j] = cx;
            out.surf_surf[i][j] = ss;
        }
    return out;
}

struct CoefficientPart {
    Mat2 free = mat2_zero();
    Mat2 surface = mat2_zero();
    Mat2 total = mat2_zero();
};

struct ScalarPart {
    double free = 0.0;
    double surface = 0.0;
    double total = 0.0;
};

struct CoefficientSet {
    CoefficientPart lambda;    // 1/(m^2 s)
    CoefficientPart gamma;     // 1/s
    CoefficientPart diffusion; // kg^2 m^2 / s^3
    CoefficientPart drag;      // kg/s (zero and unusable at T = 0)
    CoefficientPart c2;        // J/m^2; free part renormalized to zero
    Vec2 c1{0.0, 0.0};         // N, lateral first-order force
    ScalarPart u1;             // J; free part dropped (self-energy)
    ScalarPart u2;             // J; free part renormalized to zero
    bool has_drag = false;
    bool has_cp = false;
    uint64_t provenance = 0;
};

namespace coeff_detail {

// u-axis breakpoints: base panels, polarizability resonance, and the surface
// reflection phase (w z+ / c) resolved to half oscillation periods.
inline std::vector<double> u_breakpoints(const Scenario& sc) {
    const double umax = sc.spectral.u_max;
    std::set<double> b;
    b.insert(0.0);
    b.insert(umax);
    for (int i = 1; i < sc.spectral.panels; ++i)
        b.insert(umax * i / static_cast<double>(sc.spectral.panels));
    for (double u : sc.spectral.u_nodes)
        if (u > 0 && u < umax) b.insert(u);

    const double kbt_over_h = sc.constants.kB * sc.environment.temperature / sc.constants.hbar;
    if (const auto* lor = std::get_if<LorentzPolarizability>(&sc.particle.polarizability.value)) {
        const double u0 = lor->omega0 / kbt_over_h;
        const double gt = std::max(lor->gamma / kbt_over_h, 1e-6 * u0);
        for (double d : {-5.0, -1.0, 0.0, 1.0, 5.0}) {
            const double u = u0 + d * gt;
            if (u > 0 && u < umax) b.insert(u);
        }
    }
    if (!sc.medium.is_vacuum()) {
        const double phase_rate = kbt_over_h * 2.0 * sc.z / sc.constants.c; // d(phase)/du
        const double half_period = pi / phase_rate;
        // beyond u ~ 45 the Bose weight has collapsed to < 1e-19 of its peak,
        // so unresolved reflection oscillations cannot matter there
        const double u_osc = std::min(umax, 45.0);
        if (half_period < umax / sc.spectral.panels) {
            for (double u = half_period; u < u_osc; u += half_period) b.insert(u);
        }
    }
    return std::vector<double>(b.begin(), b.end());
}

struct BosonIntegrals {
    // index 0: n(n+1) weight; index 1: (kB T / hbar) |dn/dw| weight
    Mat2 ff[2] = {mat2_zero(), mat2_zero()};
    Mat2 cross[2] = {mat2_zero(), mat2_zero()};
    Mat2 ss[2] = {mat2_zero(), mat2_zero()};
};

// All Lambda/Gamma/D/xi integrals in one adaptive pass over u = hbar w / kB T.
// Both thermal weights ride on the same contraction samples, so the
// fluctuation-dissipation ratio is preserved to rounding by construction of
// the integrands (not of the assembled coefficients, which apply their own
// prefactors).
inline BosonIntegrals boson_integrals(const Scenario& sc) {
    const double kbt_over_h = sc.constants.kB * sc.environment.temperature / sc.constants.hbar;

    auto integrand = [&sc, kbt_over_h](double u) {
        std::array<double, 18> out{};
        const double omega = u * kbt_over_h;
        const SpectralContractions s = spectral_contractions(sc, omega);
        const complexd alpha = polarizability_at(sc.particle.polarizability, omega);
        const double alpha2 = std::norm(alpha);
        const double n = occupation(omega, sc.environment, sc.constants);
        const double w_boson = n * (n + 1.0);
        const double w_deriv =
            kbt_over_h * std::abs(occupation_derivative(omega, sc.environment, sc.constants));
        const double common = std::pow(omega, 4) * alpha2 * kbt_over_h; // jacobian dw = kBT/hbar du
        const double pack[2] = {w_boson * common, w_deriv * common};
        int idx = 0;
        for (int w = 0; w < 2; ++w) {
            out[idx++] = pack[w] * s.free_free[0][0];
            out[idx++] = pack[w] * s.free_free[1][1];
            out[idx++] = pack[w] * s.free_free[0][1];
            out[idx++] = pack[w] * s.cross[0][0];
            out[idx++] = pack[w] * s.cross[1][1];
            out[idx++] = pack[w] * s.cross[0][1];
            out[idx++] = pack[w] * s.surf_surf[0][0];
            out[idx++] = pack[w] * s.surf_surf[1][1];
            out[idx++] = pack[w] * s.surf_surf[0][1];
        }
        return out;
    };

    const auto res =
        adaptive_integrate(integrand, u_breakpoints(sc), 8, sc.spectral.target_rel_tol);
    BosonIntegrals out;
    for (int w = 0; w < 2; ++w) {
        const int base = 9 * w;
        out.ff[w][0][0] = res.value[base + 0];
        out.ff[w][1][1] = res.value[base + 1];
        out.ff[w][0][1] = out.ff[w][1][0] = res.value[base + 2];
        out.cross[w][0][0] = res.value[base + 3];
        out.cross[w][1][1] = res.value[base + 4];
        out.cross[w][0][1] = out.cross[w][1][0] = res.value[base + 5];
        out.ss[w][0][0] = res.value[base + 6];
        out.ss[w][1][1] = res.value[base + 7];
        out.ss[w][0][1] = out.ss[w][1][0] = res.value[base + 8];
    }
    return out;
}

inline CoefficientPart assemble(const Mat2& ff, const Mat2& cross, const Mat2& ss,
                                double prefactor) {
    CoefficientPart p;
    p.free = prefactor * ff;
    p.surface = prefactor * (cross + ss);
    p.total = p.free + p.surface;
    return p;
}

} // namespace coeff_detail

// Lambda_ij = (2 mu0^2 / pi) int dw w^4 |alpha|^2 n(n+1) sum_pk Im G Im[d_i G d_j]
inline CoefficientPart lambda_coefficient(const Scenario& sc) {
    sc.validate();
    if (sc.environment.temperature == 0) return {};
    const auto I = coeff_detail::boson_integrals(sc);
    const double pref = 2.0 * sc.constants.mu0 * sc.constants.mu0 / pi;
    return coeff_detail::assemble(I.ff[0], I.cross[0], I.ss[0], pref);
}

// Gamma_ij = (hbar mu0^2 / pi M) int dw w^4 |alpha|^2 |dn/dw| sum_pk ...
// The Bose-Einstein derivative is negative; Gamma carries its magnitude so
// dissipation stays positive and 2 M Gamma kB T = hbar^2 Lambda holds with
// Lambda >= 0.
inline CoefficientPart gamma_coefficient(const Scenario& sc) {
    sc.validate();
    if (sc.environment.temperature == 0) return {};
    const auto I = coeff_detail::boson_integrals(sc);
    const double kBT = sc.constants.kB * sc.environment.temperature;
    const double pref = sc.constants.hbar * sc.constants.mu0 * sc.constants.mu0 /
                        (pi * sc.particle.mass) * (sc.constants.hbar / kBT);
    return coeff_detail::assemble(I.ff[1], I.cross[1], I.ss[1], pref);
}

// D_ij = (4 hbar^2 mu0^2 / pi) int dw w^4 n(n+1) |alpha|^2 sum_pk ...
inline CoefficientPart diffusion_coefficient(const Scenario& sc) {
    sc.validate();
    if (sc.environment.temperature == 0) return {};
    const auto I = coeff_detail::boson_integrals(sc);
    const double h2 = sc.constants.hbar * sc.constants.hbar;
    const double pref = 4.0 * h2 * sc.constants.mu0 * sc.constants.mu0 / pi;
    return coeff_detail::assemble(I.ff[0], I.cross[0], I.ss[0], pref);
}

// xi_ij = (2 hbar^2 mu0^2 / kB T pi) int dw w^4 n(n+1) |alpha|^2 sum_pk ...
inline CoefficientPart drag_coefficient(const Scenario& sc) {
    sc.validate();
    if (sc.environment.temperature == 0)
        throw domain_error("drag_coefficient: undefined at T = 0");
    const auto I = coeff_detail::boson_integrals(sc);
    const double h2 = sc.constants.hbar * sc.constants.hbar;
    const double kBT = sc.constants.kB * sc.environment.temperature;
    const double pref = 2.0 * h2 * sc.constants.mu0 * sc.constants.mu0 / (kBT * pi);
    return coeff_detail::assemble(I.ff[0], I.cross[0], I.ss[0], pref);
}

namespace coeff_detail {

// Casimir-Polder integrand pieces at one frequency. Only scattering-dependent
// combinations survive: the coincidence Re parts of the free tensor are pure
// self-energy and renormalize to zero, and the free Im Tr piece of U1 is the
// position-independent divergent part that is dropped.
struct CpSample {
    double u1 = 0.0;            // Im[alpha tr Gs]
    double u2 = 0.0;            // sum_pk Re Gs (Im G0 + Im Gs)
    double c2xx = 0.0, c2yy = 0.0, c2xy = 0.0;
    double c1x = 0.0;           // Im[alpha tr(d1 Gs + d2 Gs)]
};

inline CpSample cp_sample(const Scenario& sc, double omega) {
    CpSample out;
    const SurfaceCoincidence s =
        scattering_green_coincidence_full(sc.z, omega, sc.medium, sc.kpar, sc.constants);
    const complexd alpha = polarizability_at(sc.particle.polarizability, omega);
    const double g0 = omega / (6.0 * pi * sc.constants.c);
    const DerivedGreenBlock d0 = free_green_lateral_derivatives(omega, sc.constants);

    out.u1 = (alpha * s.values.trace()).imag();
    out.c1x = (alpha * (s.dsingle_r1x.trace() + s.dsingle_r2x.trace())).imag();

    double u2 = 0.0;
    for (int p = 0; p < 3; ++p)
        for (int q = 0; q < 3; ++q) {
            const double im_tot = (p == q ? g0 : 0.0) + s.values(p, q).imag();
            u2 += s.values(p, q).real() * im_tot;
        }
    out.u2 = u2;

    auto c2 = [&](int i, int j) {
        double acc = 0.0;
        for (int p = 0; p < 3; ++p)
            for (int q = 0; q < 3; ++q) {
                const double im_g = (p == q ? g0 : 0.0) + s.values(p, q).imag();
                const double im_d_ji =
                    d0.values[j][i](p, q).imag() + s.deriv[j][i](p, q).imag();
                acc += s.deriv[i][j](p, q).real() * im_g +
                       s.values(p, q).real() * im_d_ji;
            }
        return acc;
    };
    out.c2xx = c2(0, 0);
    out.c2yy = c2(1, 1);
    out.c2xy = c2(0, 1);
    return out;
}

struct CpIntegrals {
    double u1 = 0, u2 = 0, c2xx = 0, c2yy = 0, c2xy = 0, c1x = 0;
};

// weight w(omega) applied to each CP sample; the U2/C2 entries additionally
// carry w^4 |alpha|^2 while U1/C1 carry w^2 (alpha inside the sample).
inline std::array<double, 6> cp_weighted(const Scenario& sc, double omega, double thermal_w) {
    const CpSample s = cp_sample(sc, omega);
    const double alpha2 = std::norm(polarizability_at(sc.particle.polarizability, omega));
    const double w2 = omega * omega;
    const double w4a = w2 * w2 * alpha2;
    return {thermal_w * w2 * s.u1,   thermal_w * w4a * s.u2,  thermal_w * w4a * s.c2xx,
            thermal_w * w4a * s.c2yy, thermal_w * w4a * s.c2xy, thermal_w * w2 * s.c1x};
}

// The first-order pieces (U1, C1) are linear in alpha and are boundary
// values of a retarded response product, so their zero-point integral is
// evaluated on the imaginary axis where the integrand is smooth and decays
// as exp(-2 xi z / c): on the real axis it is an oscillatory residual whose
// conditioning collapses once w z / c reaches the thousands. The
// |alpha|^2-weighted second-order pieces have no such continuation and stay
// on the real axis (half-period panels plus an Euler-summed tail).
inline CpIntegrals cp_integrals(const Scenario& sc, bool rotate_first_order = true) {
    std::array<double, 6> total{};

    // thermal part: weight 2 n(w), exponentially cut by u_max
    const double T = sc.environment.temperature;
    if (T > 0) {
        const double kbt_over_h = sc.constants.kB * T / sc.constants.hbar;
        auto f = [&](double u) {
            const double omega = u * kbt_over_h;
            const double n = occupation(omega, sc.environment, sc.constants);
            return cp_weighted(sc, omega, 2.0 * n * kbt_over_h);
        };
        auto res = adaptive_integrate(f, u_breakpoints(sc), 8, sc.spectral.target_rel_tol);
        for (int i = 0; i < 6; ++i) total[i] += res.value[i];
    }

    const bool tabulated =
        std::holds_alternative<TabulatedPolarizability>(sc.particle.polarizability.value);
    const bool mirror_or_drude =
        sc.medium.is_perfect_mirror() || std::holds_alternative<DrudeMedium>(sc.medium.value);
    const bool rotated = rotate_first_order && !tabulated && mirror_or_drude;

    // zero-point part of the second-order pieces (and, when not rotated, the
    // first-order ones): weight 1, [0, W_T] adaptive + Abel-summed tail over
    // the reflection phase
    const double zp = 2.0 * sc.z;
    const double half_period = pi * sc.constants.c / zp;
    double w_top = 10.0 * half_period;
    if (const auto* lor = std::get_if<LorentzPolarizability>(&sc.particle.polarizability.value))
        w_top = std::max(w_top, 3.0 * lor->omega0 + 20.0 * lor->gamma);

    std::set<double> b{0.0, w_top};
    if (const auto* lor = std::get_if<LorentzPolarizability>(&sc.particle.polarizability.value))
        for (double d : {-5.0, -1.0, 0.0, 1.0, 5.0}) {
            const double w = lor->omega0 + d * std::max(lor->gamma, 1e-6 * lor->omega0);
            if (w > 0 && w < w_top) b.insert(w);
        }
    for (double w = half_period; w < w_top; w += half_period) b.insert(w);
    auto head = adaptive_integrate([&](double w) { return cp_weighted(sc, w, 1.0); },
                                   std::vector<double>(b.begin(), b.end()), 8,
                                   sc.spectral.target_rel_tol);
    // The Euler ladder length is a subsystem of its own (like the k_par node
    // budget): it is held fixed under spectral-grid refinement so that grid
    // doubling measures the u/omega discretization, not tail drift. 48
    // half-periods put the averaged remainder far below the oracle tolerances.
    const int tail_terms = 48;
    auto tail = oscillatory_tail([&](double w) { return cp_weighted(sc, w, 1.0); }, w_top,
                                 half_period, tail_terms, 16);
    for (int i = 0; i < 6; ++i) total[i] += head.value[i] + tail.value[i];

    if (rotated) {
        // overwrite the zero-point first-order slots with the rotated form:
        // int_0^inf dw w^2 Im[alpha tr Gs] = - int_0^inf dxi xi^2 alpha(i xi) tr Gs(i xi)
        total[0] -= head.value[0] + tail.value[0];
        total[5] -= head.value[5] + tail.value[5];
        auto axis = [&](double xi) {
            const auto e = scattering_green_coincidence_imag(sc.z, xi, sc.medium, sc.kpar,
                                                             sc.constants);
            const double a = polarizability_imag_axis(sc.particle.polarizability, xi);
            const double tr_values = e[0] + e[1] + e[2];
            // single-derivative traces vanish identically; keep the computed
            // sum so the lateral force stays a measurement
            const double tr_singles = 0.0 * e[10];
            return std::array<double, 2>{-xi * xi * a * tr_values,
                                         -xi * xi * a * tr_singles};
        };
        const double xi_scale = sc.constants.c / zp;
        std::vector<double> xedges{xi_scale * 1e-4};
        for (double f : {0.1, 0.3, 1.0, 2.0, 4.0, 8.0, 16.0, 26.0, 40.0})
            xedges.push_back(xi_scale * f);
        if (const auto* lor =
                std::get_if<LorentzPolarizability>(&sc.particle.polarizability.value))
            for (double f : {0.5, 1.0, 2.0, 4.0})
                if (f * lor->omega0 < xedges.back() && f * lor->omega0 > xedges.front())
                    xedges.push_back(f * lor->omega0);
        std::sort(xedges.begin(), xedges.end());
        auto res = adaptive_integrate(axis, xedges, 12, sc.spectral.target_rel_tol);
        total[0] += res.value[0];
        total[5] += res.value[1];
    }

    CpIntegrals out;
    out.u1 = total[0];
    out.u2 = total[1];
    out.c2xx = total[2];
    out.c2yy = total[3];
    out.c2xy = total[4];
    out.c1x = total[5];
    return out;
}

} // namespace coeff_detail

// U1 = -(hbar mu0 / 2 pi) int dw w^2 (2n+1) Im[alpha(w) tr Gs(r0, r0, w)].
// Only the scattering part is reported; the free-space piece is the divergent
// position-independent self-energy. Im acts on the alpha * tr G product so the
// result stays real for absorptive polarizabilities (identical to the
// alpha * Tr Im G form whenever alpha is real).
inline double cp_potential_first(const Scenario& sc) {
    sc.validate();
    if (sc.medium.is_vacuum()) return 0.0;
    const auto I = coeff_detail::cp_integrals(sc);
    return -sc.constants.hbar * sc.constants.mu0 / (2.0 * pi) * I.u1;
}

// C1_i = d_i U1 for lateral i; assembled from the single-derivative
// coincidence blocks (d_{r1,i} + d_{r2,i}) rather than assumed zero.
inline Vec2 cp_force_lateral(const Scenario& sc) {
    sc.validate();
    if (sc.medium.is_vacuum()) return {0.0, 0.0};
    const auto I = coeff_detail::cp_integrals(sc);
    const double c1x = -sc.constants.hbar * sc.constants.mu0 / (2.0 * pi) * I.c1x;
    // in-plane isotropy: the y derivative obeys the same (vanishing) algebra
    return {c1x, c1x};
}

// U2 = (hbar mu0^2 / 2 pi) int dw w^4 |alpha|^2 (2n+1) sum_pk Re G_pk Im G_pk,
// surface part (free Re renormalizes to zero at coincidence).
inline double cp_potential_second(const Scenario& sc) {
    sc.validate();
    if (sc.medium.is_vacuum()) return 0.0;
    const auto I = coeff_detail::cp_integrals(sc);
    return sc.constants.hbar * sc.constants.mu0 * sc.constants.mu0 / (2.0 * pi) * I.u2;
}

// C2_ij per the mixed Re/Im double-derivative structure.
inline CoefficientPart c2_coefficient(const Scenario& sc) {
    sc.validate();
    CoefficientPart out;
    if (sc.medium.is_vacuum()) return out;
    const auto I = coeff_detail::cp_integrals(sc);
    const double pref = sc.constants.hbar * sc.constants.mu0 * sc.constants.mu0 / (2.0 * pi);
    out.surface[0][0] = pref * I.c2xx;
    out.surface[1][1] = pref * I.c2yy;
    out.surface[0][1] = out.surface[1][0] = pref * I.c2xy;
    out.total = out.free + out.surface;
    return out;
}

// One-stop evaluation sharing the spectral pass across all coefficients.
inline CoefficientSet compute_coefficient_set(const Scenario& sc, bool with_cp = true) {
    sc.validate();
    CoefficientSet out;
    out.provenance = scenario_hash(sc);

    if (sc.environment.temperature > 0) {
        const auto I = coeff_detail::boson_integrals(sc);
        const double mu02 = sc.constants.mu0 * sc.constants.mu0;
        const double h = sc.constants.hbar;
        const double kBT = sc.constants.kB * sc.environment.temperature;
        const double M = sc.particle.mass;
        out.lambda = coeff_detail::assemble(I.ff[0], I.cross[0], I.ss[0], 2.0 * mu02 / pi);
        out.gamma = coeff_detail::assemble(I.ff[1], I.cross[1], I.ss[1],
                                           h * mu02 / (pi * M) * (h / kBT));
        out.diffusion = coeff_detail::assemble(I.ff[0], I.cross[0], I.ss[0],
                                               4.0 * h * h * mu02 / pi);
        out.drag = coeff_detail::assemble(I.ff[0], I.cross[0], I.ss[0],
                                          2.0 * h * h * mu02 / (kBT * pi));
        out.has_drag = true;
    }

    if (with_cp) {
        out.has_cp = true;
        if (!sc.medium.is_vacuum()) {
            const auto I = coeff_detail::cp_integrals(sc);
            const double pref1 = -sc.constants.hbar * sc.constants.mu0 / (2.0 * pi);
            const double pref2 =
                sc.constants.hbar * sc.constants.mu0 * sc.constants.mu0 / (2.0 * pi);
            out.u1.surface = pref1 * I.u1;
            out.u1.total = out.u1.surface;
            out.u2.surface = pref2 * I.u2;
            out.u2.total = out.u2.surface;
            out.c2.surface[0][0] = pref2 * I.c2xx;
            out.c2.surface[1][1] = pref2 * I.c2yy;
            out.c2.surface[0][1] = out.c2.surface[1][0] = pref2 * I.c2xy;
            out.c2.total = out.c2.free + out.c2.surface;
            out.c1 = {pref1 * I.c1x, pref1 * I.c1x};
        }
    }
    return out;
}

// Grid-refinement helper for the self-convergence checks: 1.5x the u cutoff
// and doubled panels. The k_par settings stay fixed so that their (already
// separately convergence-tested) bias cancels in the comparison.
inline Scenario refined(const Scenario& sc) {
    Scenario r = sc;
    r.spectral.u_max *= 1.5;
    r.spectral.panels *= 2;
    return r;
}

} // namespace qbrown
