#pragma once

// Cylindrical Bessel functions J0, J1, J2 to ~1e-13 relative or better.
// Power series below |x| = 8, Hankel asymptotic form above, with the
// modulus/phase factors P_n and x*Q_n represented by Chebyshev tables
// (generated offline against a 40-digit reference). The switch point and
// both evaluation paths are fixed, so results are bit-stable across runs.

#include <cmath>

namespace qbrown::bessel {

namespace detail {

inline constexpr double kChebP0[] = {
    1.9989206986950373307, -0.00053652204681321174247, 3.0751847875194746219e-6,
    -5.170594537606097701e-8, 1.6306464635151383095e-9, -7.864091377237069999e-11,
    5.1682623873491924622e-12, -4.3045788699253912223e-13, 4.3265957431549405618e-14,
    -5.069034095935236018e-15, 6.7480722157338721692e-16, -1.0011513723467745752e-16,
    1.6305919233743123528e-17, -2.8808661694800209228e-18, 5.4680827831813254002e-19,
    -1.106203649467732444e-19};
inline constexpr double kChebXQ0[] = {
    -0.24889367368539214559, 0.00054708159540893196795, -5.9315987288485178116e-6,
    1.4377965798375193428e-7, -5.8175327494930559835e-9, 3.3760975237349907551e-10,
    -2.5653979367973077957e-11, 2.4049161002813650488e-12, -2.6690625482579415936e-13,
    3.4041800321963687994e-14, -4.8799441053120374889e-15, 7.7297031762425405814e-16,
    -1.3348852171500827275e-16, 2.4865952389345841982e-17, -4.952892629766684119e-18,
    1.0473158970512613363e-18, -2.3369301631814081203e-19};
inline constexpr double kChebP1[] = {
    2.0018060817200273998, 0.00089898983308594085557, -3.9872843004889085228e-6,
    6.1776339606442985349e-8, -1.8718907491063066087e-9, 8.8168986595823388985e-11,
    -5.7048636403956447019e-12, 4.6991955152305423751e-13, -4.6842237839904892192e-14,
    5.4526748960447171069e-15, -7.2211808422740163371e-16, 1.0667689114335371133e-16,
    -1.7312313216115240379e-17, 3.049299119763645839e-18, -5.7724216549072155518e-19,
    1.1650571753487964895e-19};
inline constexpr double kChebXQ1[] = {
    0.74844459311256520385, -0.00077021788393256634594, 7.3108922063643632996e-6,
    -1.6767825107266737968e-7, 6.5833546621204433032e-9, -3.7490909505415561844e-10,
    2.8121750359748864681e-11, -2.6114525394623199406e-12, 2.8774212663332233503e-13,
    -3.6490019160618376533e-14, 5.2066263662267045685e-15, -8.2153180254585275075e-16,
    1.4141084390210091254e-16, -2.6267615898339214805e-17, 5.219264919547751003e-18,
    -1.1012617184510182366e-18, 2.4525932226981344593e-19};

template <size_t N>
double clenshaw(const double (&c)[N], double t) {
    double b0 = 0.0, b1 = 0.0;
    for (size_t i = N - 1; i >= 1; --i) {
        const double tmp = 2.0 * t * b0 - b1 + c[i];
        b1 = b0;
        b0 = tmp;
    }
    return t * b0 - b1 + 0.5 * c[0];
}

// ascending series sum_k (-1)^k (x/2)^{2k+n} / (k! (k+n)!)
inline double series_jn(int n, double x) {
    const double q = 0.25 * x * x;
    double term = 1.0;
    for (int k = 1; k <= n; ++k) term *= 0.5 * x / k;
    double sum = term;
    for (int k = 1; k < 64; ++k) {
        term *= -q / (static_cast<double>(k) * (k + n));
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum) + 1e-300) break;
    }
    return sum;
}

inline double asymptotic_jn(int n, double x) {
    const double u = (8.0 / x) * (8.0 / x);
    const double t = 2.0 * u - 1.0;
    const double p = (n == 0) ? clenshaw(kChebP0, t) : clenshaw(kChebP1, t);
    const double xq = (n == 0) ? clenshaw(kChebXQ0, t) : clenshaw(kChebXQ1, t);
    const double chi = x - (2 * n + 1) * M_PI_4;
    return std::sqrt(2.0 / (M_PI * x)) * (p * std::cos(chi) - (xq / x) * std::sin(chi));
}

} // namespace detail

inline double j0(double x) {
    x = std::abs(x);
    return x < 8.0 ? detail::series_jn(0, x) : detail::asymptotic_jn(0, x);
}

inline double j1(double x) {
    const double ax = std::abs(x);
    const double v = ax < 8.0 ? detail::series_jn(1, ax) : detail::asymptotic_jn(1, ax);
    return x < 0 ? -v : v;
}

inline double j2(double x) {
    const double ax = std::abs(x);
    if (ax < 8.0) return detail::series_jn(2, ax);
    // stable for order 2 once x >= 8
    return (2.0 / ax) * detail::asymptotic_jn(1, ax) - detail::asymptotic_jn(0, ax);
}

} // namespace qbrown::bessel
