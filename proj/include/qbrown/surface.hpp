#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <vector>

#include "qbrown/bessel.hpp"
#include "qbrown/constants.hpp"
#include "qbrown/errors.hpp"
#include "qbrown/green_free.hpp"
#include "qbrown/linalg.hpp"
#include "qbrown/models.hpp"
#include "qbrown/quadrature.hpp"

namespace qbrown {

// Half-space reflection data at one (omega, k_par) point.
//
// Branches: k_z1 = sqrt(w^2/c^2 - k_par^2) with k_z1 >= 0 below the light
// line's conjugate... concretely, kappa_perp = -i k_z1 (outgoing phase) for
// propagating k_par < w/c and kappa_perp = +sqrt(k_par^2 - w^2/c^2) > 0
// (decaying exponential) for evanescent k_par > w/c. The medium-side
// k_z2 = sqrt(eps w^2/c^2 - k_par^2) always takes the Im >= 0 branch.
struct SurfaceResponse {
    double k_par;
    complexd kappa_perp;
    complexd r_s;
    complexd r_p;
};

inline SurfaceResponse fresnel(double omega, double k_par, const MediumModel& medium,
                               const PhysicalConstants& k) {
    if (omega <= 0) throw domain_error("fresnel: omega must be positive");
    if (k_par < 0) throw domain_error("fresnel: k_par must be >= 0");
    const double kw = omega / k.c;

    SurfaceResponse out;
    out.k_par = k_par;
    complexd kz1;
    if (k_par <= kw) {
        const double kz = std::sqrt(std::max(0.0, kw * kw - k_par * k_par));
        kz1 = complexd(kz, 0.0);
        out.kappa_perp = complexd(0.0, -kz);
    } else {
        const double kp = std::sqrt(k_par * k_par - kw * kw);
        out.kappa_perp = complexd(kp, 0.0);
        kz1 = complexd(0.0, kp);
    }

    if (medium.is_perfect_mirror()) {
        out.r_s = complexd(-1.0, 0.0);
        out.r_p = complexd(1.0, 0.0);
        return out;
    }
    const complexd eps = permittivity_at(medium, omega);
    const complexd kz2 = std::sqrt(eps * kw * kw - k_par * k_par);
    out.r_s = (kz1 - kz2) / (kz1 + kz2);
    out.r_p = (eps * kz1 - kz2) / (eps * kz1 + kz2);
    return out;
}

// Lateral-wavenumber quadrature settings for the scattering tensor.
struct KParQuadrature {
    int propagating_nodes = 64;
    int evanescent_nodes = 128;
    double evanescent_cutoff = 40.0; // kappa_perp * z_plus beyond which the tail is dropped
    double target_rel_tol = 1e-9;
    int max_doublings = 4;

    bool valid() const {
        return propagating_nodes >= 8 && evanescent_nodes >= 8 && evanescent_cutoff >= 30 &&
               target_rel_tol > 0;
    }
};

// All coincidence blocks of the scattering tensor at one (z, omega).
// deriv[i][j](p,k) = d_{r1,i} (G_s)_pk d_{r2,j}; the single-derivative blocks
// feed the lateral Casimir-Polder force check.
struct SurfaceCoincidence {
    Mat3c values;       // 1/m
    Mat3c deriv[2][2];  // 1/m^3
    Mat3c dsingle_r1x;  // 1/m^2
    Mat3c dsingle_r2x;  // 1/m^2
    double est_rel_err = 0.0;
};

namespace surface_detail {

// Compact coincidence integrand layout: only the entries that survive the
// angular integration are carried.
//   [0..2]  values xx, yy, zz
//   [3..5]  d_{r1,x} . d_{r2,x} of xx, yy, zz
//   [6..8]  d_{r1,y} . d_{r2,y} of xx, yy, zz
//   [9]     d_{r1,x} . d_{r2,y} of the (x,y) = (y,x) entry
//   [10]    d_{r1,x}-only of the (x,z) entry; (z,x) is its negative and the
//           d_{r2,x} block is the mirror image
using CoinArray = std::array<complexd, 11>;

// Two-point layout at lateral separation x along the x-axis:
//   [0] xx  [1] yy  [2] zz  [3] xz  [4] zx
using TwoPointArray = std::array<complexd, 5>;

// Coincidence-limit integrand entries at one lateral wavenumber. k_par enters
// the derivative blocks through the angular moments of k_i k_j over the
// in-plane direction of k_par (<cos^2> = 1/2, <cos^4> = 3/8, <cos^2 sin^2> = 1/8),
// equivalent to the small-argument Bessel identities J0''(0) = -1/2,
// J2''(0) = 1/4, J1'(0) = 1/2 applied to the lateral-separation form.
inline void coincidence_entries(double k_par, const complexd& kappa, const complexd& rs,
                                const complexd& rp, double c2w2, CoinArray& f) {
    const double kp2 = k_par * k_par;
    const complexd kap2 = kappa * kappa;
    const complexd rpc = rp * c2w2;

    f[0] = rs + rpc * kap2;
    f[1] = f[0];
    f[2] = rpc * 2.0 * kp2;
    f[3] = rs * (kp2 / 4.0) + rpc * (0.75 * kp2 * kap2);
    f[4] = rs * (0.75 * kp2) + rpc * (kp2 * kap2 / 4.0);
    f[5] = rpc * kp2 * kp2;
    f[6] = f[4];
    f[7] = f[3];
    f[8] = f[5];
    f[9] = rs * (-kp2 / 4.0) + rpc * (kp2 * kap2 / 4.0);
    f[10] = rpc * kp2 * kappa;
}

// Two-point integrand entries at lateral separation x (along the x-axis).
inline void twopoint_entries(double k_par, const complexd& kappa, const complexd& rs,
                             const complexd& rp, double c2w2, double x, TwoPointArray& f) {
    const double arg = k_par * x;
    const double b0 = bessel::j0(arg), b1 = bessel::j1(arg), b2 = bessel::j2(arg);
    const double kp2 = k_par * k_par;
    const complexd kap2 = kappa * kappa;
    const complexd rpc = rp * c2w2;
    f[0] = rs * (b0 + b2) + rpc * kap2 * (b0 - b2);
    f[1] = rs * (b0 - b2) + rpc * kap2 * (b0 + b2);
    f[2] = rpc * 2.0 * kp2 * b0;
    f[3] = rpc * 2.0 * k_par * kappa * b1;
    f[4] = -f[3];
}

struct FilonBasis {
    // inverse Vandermonde for 6 Chebyshev nodes on [-1, 1]
    static constexpr int N = 6;
    std::array<double, N> nodes{};
    std::array<std::array<double, N>, N> inv{}; // coeff_m = sum_j inv[m][j] f(node_j)

    FilonBasis() {
        for (int j = 0; j < N; ++j) nodes[j] = std::cos(M_PI * (j + 0.5) / N);
        double a[N][2 * N];
        for (int r = 0; r < N; ++r) {
            double pw = 1.0;
            for (int m = 0; m < N; ++m) {
                a[r][m] = pw;
                pw *= nodes[r];
            }
            for (int m = 0; m < N; ++m) a[r][N + m] = (r == m) ? 1.0 : 0.0;
        }
        // Gauss-Jordan; the 6x6 Vandermonde on Chebyshev nodes is well conditioned
        for (int col = 0; col < N; ++col) {
            int piv = col;
            for (int r = col + 1; r < N; ++r)
                if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
            for (int m = 0; m < 2 * N; ++m) std::swap(a[col][m], a[piv][m]);
            const double d = a[col][col];
            for (int m = 0; m < 2 * N; ++m) a[col][m] /= d;
            for (int r = 0; r < N; ++r) {
                if (r == col) continue;
                const double ftr = a[r][col];
                for (int m = 0; m < 2 * N; ++m) a[r][m] -= ftr * a[col][m];
            }
        }
        // solving V c = f means c = V^{-1} f where V[r][m] = node_r^m
        for (int m = 0; m < N; ++m)
            for (int j = 0; j < N; ++j) inv[m][j] = a[m][N + j];
    }
};

inline const FilonBasis& filon_basis() {
    static const FilonBasis basis;
    return basis;
}

// nu_m(theta) = int_{-1}^{1} t^m e^{i theta t} dt, by the boundary-term recurrence.
inline void filon_moments(double theta, std::array<complexd, FilonBasis::N>& nu) {
    const complexd eip = std::exp(complexd(0.0, theta));
    const complexd eim = std::conj(eip);
    const complexd itheta(0.0, theta);
    nu[0] = 2.0 * std::sin(theta) / theta;
    for (int m = 1; m < FilonBasis::N; ++m) {
        const complexd boundary = (m % 2 == 0) ? (eip - eim) : (eip + eim);
        nu[m] = (boundary - static_cast<double>(m) * nu[m - 1]) / itheta;
    }
}

// Medium response features along the integration path: the critical angle
// (k_z2 -> 0 inside the propagating segment) and the surface-plasmon
// resonance (r_p pole near the evanescent axis). Both locations are known in
// closed form and get dedicated panel edges, otherwise the polynomial
// interpolation underneath Filon/Gauss panels misses them.
inline void add_feature(std::vector<double>& edges, double center, double width, double lo,
                        double hi) {
    if (center > lo && center < hi) edges.push_back(center);
    // dyadic ladder from the loss width out to several times the feature
    // location: every panel then spans at most a factor 2 of the distance to
    // the square-root point, which keeps a fixed Gauss order accurate
    const double w0 = std::max(width, 1e-7 * center);
    for (int k = 0; k < 60; ++k) {
        const double d = w0 * std::pow(2.0, k);
        if (d > 8.0 * center && d > 4.0 * (hi - lo)) break;
        for (double v : {center - d, center + d})
            if (v > lo && v < hi) edges.push_back(v);
    }
}

inline std::vector<double> propagating_edges(const complexd& eps, bool mirror, int base_panels) {
    std::vector<double> edges;
    for (int i = 0; i <= base_panels; ++i)
        edges.push_back(static_cast<double>(i) / base_panels);
    if (!mirror) {
        const complexd psic = std::sqrt(complexd(1.0, 0.0) - eps); // k_z2 = 0 at psi = psic
        const double a = std::abs(psic.real());
        const double b = std::max(std::abs(psic.imag()), 1e-9);
        if (a > 1e-9 && a < 1.0 - 1e-9) add_feature(edges, a, std::min(b, 0.25), 0.0, 1.0);
        // pseudo-Brewster boundary layer: the r_p denominator eps k_z1 + k_z2
        // vanishes at psi = 1/sqrt(eps); for |eps| >> 1 this sits at tiny psi
        // where r_p swings from +1 to -1
        const complexd psib = 1.0 / std::sqrt(eps);
        const double ab = std::abs(psib.real());
        const double bb = std::max(std::abs(psib.imag()), 1e-9 * (ab + 1e-12));
        if (ab > 1e-12 && ab < 1.0 - 1e-9) add_feature(edges, ab, std::min(bb, 0.25), 0.0, 1.0);
        // epsilon-near-zero: at grazing incidence k_z2 ~ kw sqrt(eps), and r_p
        // varies on the scale |eps| below the psi = 1 endpoint
        const double aeps = std::abs(eps);
        if (aeps < 4.0) {
            const double w0 = std::max(0.5 * aeps, 1e-9);
            for (int k = 0; k < 40; ++k) {
                const double d = w0 * std::pow(2.0, k);
                if (d >= 1.0) break;
                edges.push_back(1.0 - d);
            }
        }
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    return edges;
}

inline std::vector<double> evanescent_edges(const complexd& eps, bool mirror, double kw,
                                            double zp, double cutoff) {
    std::vector<double> edges{0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0};
    while (!edges.empty() && edges.back() >= cutoff) edges.pop_back();
    edges.push_back(cutoff);
    // the integrand crosses over on the light-line scale u ~ kw z+
    for (double f : {0.25, 1.0, 4.0}) {
        const double v = f * kw * zp;
        if (v > 1e-12 && v < cutoff) edges.push_back(v);
    }
    if (!mirror) {
        // surface-plasmon kappa = kw sqrt(-1/(eps+1)), sharp when Im eps is small
        const complexd denom = eps + 1.0;
        if (std::abs(denom) > 1e-14) {
            const complexd kappa_sp = kw * std::sqrt(-1.0 / denom);
            const double a = kappa_sp.real() * zp;
            const double b = std::max(std::abs(kappa_sp.imag()) * zp, 1e-9 * (a + 1.0));
            if (a > 1e-12 && a < cutoff)
                add_feature(edges, a, std::min(b, 0.5 * cutoff), 0.0, cutoff);
        }
        // medium light line: k_z2 = 0 at kappa = kw sqrt(eps - 1), reached on
        // this axis whenever Re sqrt(eps - 1) > 0 (large-|eps| regime)
        const complexd kappa_c = kw * std::sqrt(eps - 1.0);
        const double ac = kappa_c.real() * zp;
        const double bc = std::max(std::abs(kappa_c.imag()) * zp, 1e-9 * (ac + 1.0));
        if (ac > 1e-12 && ac < cutoff)
            add_feature(edges, ac, std::min(bc, 0.5 * cutoff), 0.0, cutoff);
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    return edges;
}

// One propagating-segment pass over the given psi edges, each interval split
// into `sub` equal panels. Phase is linear in psi = cos(theta); panels with
// large phase use Filon (degree-5 interpolation x exact moments), quiet
// panels plain Gauss.
template <class Entries>
auto propagating_segment(double phi, const std::vector<double>& edges, int sub,
                         const Entries& entries) {
    using Arr = decltype(entries(0.5));
    const FilonBasis& basis = filon_basis();
    Arr total{};
    for (size_t seg = 0; seg + 1 < edges.size(); ++seg)
        for (int p = 0; p < sub; ++p) {
            const double a = edges[seg] + (edges[seg + 1] - edges[seg]) * p / sub;
            const double b = edges[seg] + (edges[seg + 1] - edges[seg]) * (p + 1) / sub;
            const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
            const double theta = phi * half;
            if (theta > 4.0) {
                std::array<Arr, FilonBasis::N> fv;
                for (int j = 0; j < FilonBasis::N; ++j)
                    fv[j] = entries(mid + half * basis.nodes[j]);
                std::array<complexd, FilonBasis::N> nu;
                filon_moments(theta, nu);
                const complexd carrier = half * std::exp(complexd(0.0, phi * mid));
                for (size_t e = 0; e < total.size(); ++e) {
                    complexd acc(0.0, 0.0);
                    for (int m = 0; m < FilonBasis::N; ++m) {
                        complexd cm(0.0, 0.0);
                        for (int j = 0; j < FilonBasis::N; ++j)
                            cm += basis.inv[m][j] * fv[j][e];
                        acc += cm * nu[m];
                    }
                    total[e] += carrier * acc;
                }
            } else {
                const GaussRule& rule = gauss_legendre_rule(8);
                for (int j = 0; j < 8; ++j) {
                    const double psi = mid + half * rule.x[j];
                    const Arr f = entries(psi);
                    const complexd w = half * rule.w[j] * std::exp(complexd(0.0, phi * psi));
                    for (size_t e = 0; e < total.size(); ++e) total[e] += w * f[e];
                }
            }
        }
    return total;
}

} // namespace surface_detail

// Core k_par integral: evaluates all coincidence blocks of the scattering
// tensor in one pass, with one-sided error control by panel doubling.
//
// Propagating segment (k_par < w/c), substituted psi = k_z c / w:
//   int dk_par (k_par/kappa) e^{-kappa z+} (...) = i k^2 int_0^1 dpsi e^{i k z+ psi} (...)
// Evanescent segment, substituted u = kappa z+ with cutoff (tail < e^{-cutoff}):
//   ... = (1/z+) int_0^inf du e^{-u} (...)
inline SurfaceCoincidence scattering_green_coincidence_full(double z, double omega,
                                                            const MediumModel& medium,
                                                            const KParQuadrature& quad,
                                                            const PhysicalConstants& k) {
    using namespace surface_detail;
    if (z <= 0) throw domain_error("scattering_green: z must be positive");
    if (omega <= 0) throw domain_error("scattering_green: omega must be positive");
    if (!quad.valid()) throw config_error("scattering_green: invalid KParQuadrature");

    SurfaceCoincidence out;
    if (medium.is_vacuum()) return out; // r_s = r_p = 0

    const double zp = 2.0 * z;
    const double kw = omega / k.c;
    const double phi = kw * zp;
    const double c2w2 = 1.0 / (kw * kw);

    // Fresnel data as a function of the substituted variables.
    const bool mirror = medium.is_perfect_mirror();
    const complexd eps = mirror ? complexd(0, 0) : permittivity_at(medium, omega);

    auto prop_entries = [&](double psi) {
        CoinArray f{};
        const double kz = kw * psi;
        const double kpar2 = std::max(0.0, kw * kw - kz * kz);
        const double kpar = std::sqrt(kpar2);
        const complexd kappa(0.0, -kz);
        complexd rs, rp;
        if (mirror) {
            rs = -1.0;
            rp = 1.0;
        } else {
            const complexd kz1(kz, 0.0);
            const complexd kz2 = std::sqrt(eps * kw * kw - kpar2);
            rs = (kz1 - kz2) / (kz1 + kz2);
            rp = (eps * kz1 - kz2) / (eps * kz1 + kz2);
        }
        coincidence_entries(kpar, kappa, rs, rp, c2w2, f);
        return f;
    };
    auto evan_entries = [&](double u) {
        CoinArray f{};
        const double kp = u / zp;
        const double kpar = std::sqrt(kw * kw + kp * kp);
        const complexd kappa(kp, 0.0);
        complexd rs, rp;
        if (mirror) {
            rs = -1.0;
            rp = 1.0;
        } else {
            const complexd kz1(0.0, kp);
            const complexd kz2 = std::sqrt(eps * kw * kw - kpar * kpar);
            rs = (kz1 - kz2) / (kz1 + kz2);
            rp = (eps * kz1 - kz2) / (eps * kz1 + kz2);
        }
        coincidence_entries(kpar, kappa, rs, rp, c2w2, f);
        return f;
    };

    const std::vector<double> pedges =
        propagating_edges(eps, mirror, std::max(8, quad.propagating_nodes / 8));
    const std::vector<double> uedges =
        evanescent_edges(eps, mirror, kw, zp, quad.evanescent_cutoff);
    const int evan_order =
        std::max(8, quad.evanescent_nodes / static_cast<int>(uedges.size() - 1));

    auto evaluate = [&](int sub) {
        CoinArray prop = propagating_segment(phi, pedges, sub, prop_entries);
        // measure from k_par dk_par / kappa = i kw dpsi on the propagating side
        const complexd prop_measure = complexd(0.0, 1.0) * kw;
        CoinArray evan{};
        for (size_t s = 0; s + 1 < uedges.size(); ++s)
            for (int m = 0; m < sub; ++m) {
                const double a = uedges[s] + (uedges[s + 1] - uedges[s]) * m / sub;
                const double b = uedges[s] + (uedges[s + 1] - uedges[s]) * (m + 1) / sub;
                auto seg = gauss_integrate(
                    [&](double u) {
                        CoinArray f = evan_entries(u);
                        const double w = std::exp(-u);
                        for (auto& e : f) e *= w;
                        return f;
                    },
                    a, b, evan_order);
                for (size_t e = 0; e < evan.size(); ++e) evan[e] += seg[e];
            }
        CoinArray res;
        for (size_t e = 0; e < res.size(); ++e)
            res[e] = (prop[e] * prop_measure + evan[e] / zp) / (8.0 * pi);
        return res;
    };

    int sub = 1;
    CoinArray coarse = evaluate(sub);
    CoinArray fine;
    double rel = 0.0;
    // physical scales per group keep the error measure meaningful when a
    // group is small or exactly zero
    const double vscale = omega / (6.0 * pi * k.c);
    const double dscale = vscale * kw * kw;
    const double sscale = vscale * kw;
    const int group_lo[4] = {0, 3, 9, 10};
    const int group_hi[4] = {3, 9, 10, 11};
    const double floors[4] = {vscale, dscale, dscale, sscale};
    bool converged = false;
    for (int pass = 0; pass < quad.max_doublings; ++pass) {
        sub *= 2;
        fine = evaluate(sub);
        rel = 0.0;
        for (int b = 0; b < 4; ++b) {
            double num = 0.0, den = 0.0;
            for (int e = group_lo[b]; e < group_hi[b]; ++e) {
                num += norm1(fine[e] - coarse[e]);
                den += norm1(fine[e]);
            }
            rel = std::max(rel, num / std::max(den, floors[b]));
        }
        coarse = fine;
        if (rel <= quad.target_rel_tol) {
            converged = true;
            break;
        }
    }
    if (!converged)
        throw quadrature_error("scattering_green_coincidence: k_par quadrature did not converge"
                               " (z = " + std::to_string(z) + ", omega = " +
                                   std::to_string(omega) + ")",
                               rel);

    for (int p = 0; p < 3; ++p) {
        out.values(p, p) = coarse[p];
        out.deriv[0][0](p, p) = coarse[3 + p];
        out.deriv[1][1](p, p) = coarse[6 + p];
    }
    out.deriv[0][1](0, 1) = out.deriv[0][1](1, 0) = coarse[9];
    out.deriv[1][0](0, 1) = out.deriv[1][0](1, 0) = coarse[9];
    out.dsingle_r1x(0, 2) = coarse[10];
    out.dsingle_r1x(2, 0) = -coarse[10];
    out.dsingle_r2x(0, 2) = -coarse[10];
    out.dsingle_r2x(2, 0) = coarse[10];
    out.est_rel_err = rel;
    return out;
}

inline GreenBlock scattering_green_coincidence(double z, double omega,
                                               const MediumModel& medium,
                                               const KParQuadrature& quad,
                                               const PhysicalConstants& k) {
    SurfaceCoincidence full = scattering_green_coincidence_full(z, omega, medium, quad, k);
    GreenBlock g;
    g.values = full.values;
    g.r1 = g.r2 = Vec3{0.0, 0.0, z};
    g.omega = omega;
    g.part = GreenPart::Scattering;
    return g;
}

inline DerivedGreenBlock scattering_green_lateral_derivatives(double z, double omega,
                                                              const MediumModel& medium,
                                                              const KParQuadrature& quad,
                                                              const PhysicalConstants& k) {
    SurfaceCoincidence full = scattering_green_coincidence_full(z, omega, medium, quad, k);
    DerivedGreenBlock d;
    d.omega = omega;
    d.part = GreenPart::Scattering;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) d.values[i][j] = full.deriv[i][j];
    return d;
}

// Two-point scattering tensor at lateral separation x along the x-axis
// (z1, z2 heights). Used by the finite-difference oracles; shares every
// convention with the coincidence path.
// Coincidence blocks of the scattering tensor at imaginary frequency
// omega = i xi. On this axis there is no light line and no surface-mode
// structure: kappa_perp = sqrt(k_par^2 + xi^2/c^2) is real, the Fresnel
// ratios are real, and the integrand decays as exp(-kappa z+). Used by the
// rotated-contour evaluation of the first-order (linear-in-alpha)
// Casimir-Polder pieces. Layout matches surface_detail::CoinArray.
inline std::array<double, 11> scattering_green_coincidence_imag(
    double z, double xi, const MediumModel& medium, const KParQuadrature& quad,
    const PhysicalConstants& k) {
    using namespace surface_detail;
    if (z <= 0) throw domain_error("scattering_green_imag: z must be positive");
    if (xi <= 0) throw domain_error("scattering_green_imag: xi must be positive");
    std::array<double, 11> out{};
    if (medium.is_vacuum()) return out;

    const double zp = 2.0 * z;
    const double kw_im = xi / k.c;            // |kw| with kw = i xi / c
    const double c2w2 = -1.0 / (kw_im * kw_im); // c^2 / omega^2 at omega = i xi
    const bool mirror = medium.is_perfect_mirror();
    double eps_r = 0.0;
    if (!mirror) {
        // Drude on the imaginary axis: 1 + wp^2 / (xi^2 + gd xi), real and > 1;
        // general models come through permittivity_at analytically continued
        if (const auto* dr = std::get_if<DrudeMedium>(&medium.value)) {
            eps_r = 1.0 + dr->omega_p * dr->omega_p / (xi * xi + dr->gamma_d * xi);
        } else {
            throw domain_error(
                "scattering_green_imag: only Drude/mirror/vacuum media continue to the "
                "imaginary axis");
        }
    }

    auto entries = [&](double u) {
        CoinArray f{};
        const double kappa = u / zp;
        const double kpar2 = std::max(0.0, kappa * kappa - kw_im * kw_im);
        const double kpar = std::sqrt(kpar2);
        double rs, rp;
        if (mirror) {
            rs = -1.0;
            rp = 1.0;
        } else {
            const double s2 = std::sqrt(eps_r * kw_im * kw_im + kpar2);
            rs = (kappa - s2) / (kappa + s2);
            rp = (eps_r * kappa - s2) / (eps_r * kappa + s2);
        }
        coincidence_entries(kpar, complexd(kappa, 0.0), complexd(rs, 0.0),
                            complexd(rp, 0.0), c2w2, f);
        const double w = std::exp(-u);
        for (auto& e : f) e *= w;
        return f;
    };

    const double u0 = kw_im * zp; // kappa starts at xi / c
    std::vector<double> edges{u0};
    for (double d : {0.5, 1.0, 2.0, 4.0, 8.0, 16.0}) edges.push_back(u0 + d);
    edges.push_back(u0 + quad.evanescent_cutoff);

    auto evaluate = [&](int order) {
        CoinArray acc{};
        for (size_t s = 0; s + 1 < edges.size(); ++s) {
            auto seg = gauss_integrate(entries, edges[s], edges[s + 1], order);
            for (size_t e = 0; e < acc.size(); ++e) acc[e] += seg[e];
        }
        return acc;
    };
    CoinArray coarse = evaluate(12);
    CoinArray fine = evaluate(24);
    double num = 0.0, den = 0.0;
    for (size_t e = 0; e < fine.size(); ++e) {
        num += norm1(fine[e] - coarse[e]);
        den += norm1(fine[e]);
    }
    if (num > std::max(den, 1e-300) * std::max(quad.target_rel_tol, 1e-12) && den > 0) {
        // one more refinement; this integrand is entire, so 48 nodes per panel
        // is far past the accuracy floor
        fine = evaluate(48);
    }
    for (size_t e = 0; e < fine.size(); ++e) out[e] = fine[e].real() / (zp * 8.0 * pi);
    return out;
}

inline GreenBlock scattering_green(double z1, double z2, double x, double omega,
                                   const MediumModel& medium, const KParQuadrature& quad,
                                   const PhysicalConstants& k) {
    using namespace surface_detail;
    if (z1 <= 0 || z2 <= 0) throw domain_error("scattering_green: heights must be positive");
    if (omega <= 0) throw domain_error("scattering_green: omega must be positive");

    GreenBlock g;
    g.r1 = Vec3{x, 0.0, z1};
    g.r2 = Vec3{0.0, 0.0, z2};
    g.omega = omega;
    g.part = GreenPart::Scattering;
    if (medium.is_vacuum()) return g;

    const double zp = z1 + z2;
    const double kw = omega / k.c;
    const double c2w2 = 1.0 / (kw * kw);
    const bool mirror = medium.is_perfect_mirror();
    const complexd eps = mirror ? complexd(0, 0) : permittivity_at(medium, omega);

    auto rs_rp = [&](const complexd& kz1, double kpar2, complexd& rs, complexd& rp) {
        if (mirror) {
            rs = -1.0;
            rp = 1.0;
            return;
        }
        const complexd kz2 = std::sqrt(eps * kw * kw - kpar2);
        rs = (kz1 - kz2) / (kz1 + kz2);
        rp = (eps * kz1 - kz2) / (eps * kz1 + kz2);
    };

    // note: J_n(k_par x) oscillates on the lateral scale too; panel counts
    // below follow both phases
    const double phi = kw * zp;
    const double lateral_phase = kw * std::abs(x);
    auto prop_f = [&](double psi) {
        TwoPointArray f{};
        const double kz = kw * psi;
        const double kpar2 = std::max(0.0, kw * kw - kz * kz);
        complexd rs, rp;
        rs_rp(complexd(kz, 0.0), kpar2, rs, rp);
        twopoint_entries(std::sqrt(kpar2), complexd(0.0, -kz), rs, rp, c2w2, x, f);
        return f;
    };
    auto evan_f = [&](double u) {
        TwoPointArray f{};
        const double kp = u / zp;
        const double kpar2 = kw * kw + kp * kp;
        complexd rs, rp;
        rs_rp(complexd(0.0, kp), kpar2, rs, rp);
        twopoint_entries(std::sqrt(kpar2), complexd(kp, 0.0), rs, rp, c2w2, x, f);
        const double w = std::exp(-u);
        for (auto& e : f) e *= w;
        return f;
    };

    // lateral Bessel oscillation rides on the smooth factor, so plain panels
    // fine enough for both phases are used here (no Filon)
    const int base_panels =
        std::max(std::max(8, quad.propagating_nodes / 8),
                 static_cast<int>((phi + lateral_phase) / 2.5) + 1);
    const std::vector<double> pedges = propagating_edges(eps, mirror, base_panels);
    std::vector<double> uedges = evanescent_edges(eps, mirror, kw, zp, quad.evanescent_cutoff);
    // evanescent lateral oscillation scale: k_par x ~ u x / zp
    const int evan_sub_lateral =
        1 + static_cast<int>(quad.evanescent_cutoff * std::abs(x) / zp / 2.5) /
                static_cast<int>(uedges.size() - 1);
    const int evan_order =
        std::max(8, quad.evanescent_nodes / static_cast<int>(uedges.size() - 1));

    auto evaluate = [&](int sub) {
        TwoPointArray prop{};
        for (size_t s = 0; s + 1 < pedges.size(); ++s)
            for (int m = 0; m < sub; ++m) {
                const double a = pedges[s] + (pedges[s + 1] - pedges[s]) * m / sub;
                const double b = pedges[s] + (pedges[s + 1] - pedges[s]) * (m + 1) / sub;
                auto seg = gauss_integrate(
                    [&](double psi) {
                        TwoPointArray f = prop_f(psi);
                        const complexd w = std::exp(complexd(0.0, phi * psi));
                        for (auto& e : f) e *= w;
                        return f;
                    },
                    a, b, 8);
                for (size_t e = 0; e < prop.size(); ++e) prop[e] += seg[e];
            }
        TwoPointArray evan{};
        const int esub = sub * evan_sub_lateral;
        for (size_t s = 0; s + 1 < uedges.size(); ++s)
            for (int m = 0; m < esub; ++m) {
                const double a = uedges[s] + (uedges[s + 1] - uedges[s]) * m / esub;
                const double b = uedges[s] + (uedges[s + 1] - uedges[s]) * (m + 1) / esub;
                auto seg = gauss_integrate(evan_f, a, b, evan_order);
                for (size_t e = 0; e < evan.size(); ++e) evan[e] += seg[e];
            }
        TwoPointArray res;
        // measure from k_par dk_par / kappa = i kw dpsi on the propagating side
        const complexd prop_measure = complexd(0.0, 1.0) * kw;
        for (size_t e = 0; e < res.size(); ++e)
            res[e] = (prop[e] * prop_measure + evan[e] / zp) / (8.0 * pi);
        return res;
    };

    int sub = 1;
    TwoPointArray coarse = evaluate(sub);
    double rel = 0.0;
    bool converged = false;
    for (int pass = 0; pass < quad.max_doublings; ++pass) {
        sub *= 2;
        TwoPointArray fine = evaluate(sub);
        double num = 0.0, den = 0.0;
        for (size_t e = 0; e < fine.size(); ++e) {
            num += norm1(fine[e] - coarse[e]);
            den += norm1(fine[e]);
        }
        rel = num / std::max(den, omega / (6.0 * pi * k.c));
        coarse = fine;
        if (rel <= quad.target_rel_tol) {
            converged = true;
            break;
        }
    }
    if (!converged)
        throw quadrature_error("scattering_green: k_par quadrature did not converge", rel);

    g.values(0, 0) = coarse[0];
    g.values(1, 1) = coarse[1];
    g.values(2, 2) = coarse[2];
    g.values(0, 2) = coarse[3];
    g.values(2, 0) = coarse[4];
    return g;
}

} // namespace qbrown
