#pragma once

#include <cmath>
#include <complex>

#include "qbrown/constants.hpp"
#include "qbrown/errors.hpp"
#include "qbrown/linalg.hpp"

namespace qbrown {

enum class GreenPart { Free, Scattering, Total };

// Dyadic Green tensor value at one (r1, r2, omega) point, units 1/m.
struct GreenBlock {
    Mat3c values;
    Vec3 r1{}, r2{};
    double omega = 0;
    GreenPart part = GreenPart::Free;
};

// Double lateral derivatives d_{r1,i} G_pk d_{r2,j} with i, j in {x, y},
// units 1/m^3. values[i][j] holds the 3x3 block in (p, k).
struct DerivedGreenBlock {
    Mat3c values[2][2];
    double omega = 0;
    GreenPart part = GreenPart::Free;
};

// Homogeneous-space dyadic Green tensor between two distinct points.
//
// Written with the polynomial pair (x^2 + ix - 1) on the identity and
// (3 - 3ix - x^2) on the radial dyad. The overall sign is fixed by the
// requirement Im Tr G(r, r, w) = + w / (2 pi c): local emission and
// decoherence rates must come out positive.
inline GreenBlock free_green(const Vec3& r1, const Vec3& r2, double omega,
                             const PhysicalConstants& k) {
    if (omega <= 0) throw domain_error("free_green: omega must be positive");
    const Vec3 s{r1[0] - r2[0], r1[1] - r2[1], r1[2] - r2[2]};
    const double r = std::sqrt(s[0] * s[0] + s[1] * s[1] + s[2] * s[2]);
    if (r == 0)
        throw domain_error("free_green: coincident points; use free_green_coincidence_im");

    const double kw = omega / k.c;
    const double x = kw * r;
    const double cx = std::cos(x), sx = std::sin(x);

    // phase * polynomial, as one complex number per dyadic part
    complexd ident_prod(cx * (x * x - 1.0) - sx * x, sx * (x * x - 1.0) + cx * x);
    complexd radial_prod(cx * (3.0 - x * x) + sx * 3.0 * x,
                         sx * (3.0 - x * x) - cx * 3.0 * x);
    if (x < 0.1) {
        // the imaginary parts cancel to O(x^3) and O(x^5); use their Taylor
        // series so coincidence-limit differences stay accurate
        const double x2 = x * x, x3 = x2 * x, x5 = x3 * x2, x7 = x5 * x2, x9 = x7 * x2;
        ident_prod.imag(2.0 / 3.0 * x3 - 2.0 / 15.0 * x5 + x7 / 140.0 - x9 / 5670.0);
        radial_prod.imag(x5 / 15.0 - x7 / 210.0 + x9 / 7560.0);
    }
    const double inv_scale = 1.0 / (4.0 * pi * kw * kw * r * r * r);

    GreenBlock g;
    g.r1 = r1;
    g.r2 = r2;
    g.omega = omega;
    g.part = GreenPart::Free;
    for (int p = 0; p < 3; ++p)
        for (int q = 0; q < 3; ++q) {
            const double er_er = s[p] * s[q] / (r * r);
            g.values(p, q) =
                (ident_prod * (p == q ? 1.0 : 0.0) + radial_prod * er_er) * inv_scale;
        }
    return g;
}

// Coincidence-limit block with the renormalized convention: the divergent
// Re part is dropped (position-independent self-energy), leaving i w/(6 pi c).
inline GreenBlock free_green_coincidence(const Vec3& r0, double omega,
                                         const PhysicalConstants& k) {
    if (omega <= 0) throw domain_error("free_green_coincidence: omega must be positive");
    GreenBlock g;
    g.r1 = g.r2 = r0;
    g.omega = omega;
    g.part = GreenPart::Free;
    const double im = omega / (6.0 * pi * k.c);
    for (int p = 0; p < 3; ++p) g.values(p, p) = complexd(0.0, im);
    return g;
}

// Im G(r, r, w) = (w / 6 pi c) * Identity; the only finite piece of the
// coincidence limit (Re diverges as 1/r^3 and is absorbed as self-energy).
inline Mat3c free_green_coincidence_im(double omega, const PhysicalConstants& k) {
    if (omega <= 0) throw domain_error("free_green_coincidence_im: omega must be positive");
    return identity3c() * complexd(omega / (6.0 * pi * k.c), 0.0);
}

namespace detail {
// Small-argument expansion of Im G(s): with x = kw |s|,
//   Im G_pk(s) = (kw/4pi) [ (c3 x^2/x^2... ) ]
// concretely  Im G_pk = (kw/4pi) [ (2/3 - (2/15) x^2) d_pk ] + (kw^3/(60 pi)) s_p s_k + O(s^4).
// The x^3 and x^5 Taylor coefficients of Im[e^{ix}(x^2+ix-1)] and Im[e^{ix}(3-3ix-x^2)]
// are 2/3, -2/15 and 0, 1/15 respectively; everything below follows from them.
inline constexpr double kImIdentX3 = 2.0 / 3.0;
inline constexpr double kImIdentX5 = -2.0 / 15.0;
inline constexpr double kImRadialX5 = 1.0 / 15.0;
} // namespace detail

// Coincidence limit of the double lateral derivatives of the free tensor.
// Only the Im part survives renormalization; obtained by differentiating the
// small-argument expansion of Im G twice with respect to the separation:
//   Im[d_i G_pk d_j] = -(d^2/ds_i ds_j) Im G_pk |_{s=0}.
inline DerivedGreenBlock free_green_lateral_derivatives(double omega,
                                                        const PhysicalConstants& k) {
    if (omega <= 0)
        throw domain_error("free_green_lateral_derivatives: omega must be positive");
    const double kw = omega / k.c;
    const double k3 = kw * kw * kw;
    // -d^2/ds_i ds_j of (kw/4pi) kImIdentX5 kw^2 |s|^2 d_pk  -> -2 kImIdentX5 (kw^3/4pi) d_ij d_pk
    // -d^2/ds_i ds_j of (kw^3/4pi) kImRadialX5 s_p s_k       -> -kImRadialX5 (kw^3/4pi) (d_pi d_kj + d_pj d_ki)
    const double iso = -2.0 * detail::kImIdentX5 * k3 / (4.0 * pi);
    const double mix = -detail::kImRadialX5 * k3 / (4.0 * pi);

    DerivedGreenBlock d;
    d.omega = omega;
    d.part = GreenPart::Free;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int p = 0; p < 3; ++p)
                for (int q = 0; q < 3; ++q) {
                    double v = 0.0;
                    if (i == j && p == q) v += iso;
                    if (p == i && q == j) v += mix;
                    if (p == j && q == i) v += mix;
                    d.values[i][j](p, q) = complexd(0.0, v);
                }
    return d;
}

// sum_pk Im G_pk * Im[d_i G_pk d_j]  -- the 2x2 contraction every spectral
// coefficient integrand is built from.
inline Mat2 contract_im(const Mat3c& green_values, const DerivedGreenBlock& derivs) {
    Mat2 out = mat2_zero();
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            double s = 0.0;
            for (int p = 0; p < 3; ++p)
                for (int q = 0; q < 3; ++q)
                    s += green_values(p, q).imag() * derivs.values[i][j](p, q).imag();
            out[i][j] = s;
        }
    return out;
}

} // namespace qbrown
