#pragma once

// Test-only reference machinery, kept independent of the library's
// quadrature and Green-tensor code paths on purpose.

#include <cmath>
#include <functional>
#include <vector>

#include "qbrown/green_free.hpp"
#include "qbrown/linalg.hpp"

namespace oracles {

// plain adaptive Simpson, no shared code with qbrown::adaptive_integrate
inline double simpson_rec(const std::function<double(double)>& f, double a, double b,
                          double fa, double fm, double fb, double whole, double tol,
                          int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return simpson_rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double tol = 1e-12, int depth = 40) {
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_rec(f, a, b, fa, fm, fb, whole, tol, depth);
}

// Richardson extrapolation of A(h) assuming even-power error terms,
// steps h, h/2, h/4, ...
inline double richardson(const std::function<double(double)>& A, double h, int levels) {
    std::vector<double> row(levels);
    for (int i = 0; i < levels; ++i) row[i] = A(h / std::pow(2.0, i));
    for (int k = 1; k < levels; ++k) {
        const double fac = std::pow(4.0, k);
        for (int i = levels - 1; i >= k; --i)
            row[i] = (fac * row[i] - row[i - 1]) / (fac - 1.0);
    }
    return row[levels - 1];
}

// Image-dipole construction of the perfect-mirror scattering tensor:
// reflect the source across the plane and flip the lateral dipole components.
inline qbrown::Mat3c image_dipole_scattering(const qbrown::Vec3& r1, const qbrown::Vec3& r2,
                                             double omega, const qbrown::PhysicalConstants& k) {
    const qbrown::Vec3 r2_image{r2[0], r2[1], -r2[2]};
    qbrown::GreenBlock g0 = qbrown::free_green(r1, r2_image, omega, k);
    qbrown::Mat3c out;
    const double mirror_sign[3] = {-1.0, -1.0, 1.0};
    for (int p = 0; p < 3; ++p)
        for (int q = 0; q < 3; ++q) out(p, q) = g0.values(p, q) * mirror_sign[q];
    return out;
}

// least-squares slope/intercept of y against x
inline void linear_fit(const std::vector<double>& x, const std::vector<double>& y,
                       double& slope, double& intercept) {
    const size_t n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    intercept = (sy - slope * sx) / n;
}

} // namespace oracles
