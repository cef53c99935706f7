#pragma once

// Monte-Carlo momentum-kick ensembles: accumulated impulses over a window
// delta_t are Gaussian with covariance D * delta_t, and their dephasing
// factor reproduces position decoherence.

#include <cmath>
#include <complex>
#include <vector>

#include "qbrown/errors.hpp"
#include "qbrown/linalg.hpp"
#include "qbrown/rng.hpp"

namespace qbrown {

// symmetric square root of a 2x2 PSD matrix; rejects indefinite input
inline Mat2 mat2_sqrt_psd(const Mat2& m) {
    const double asym = std::abs(m[0][1] - m[1][0]);
    const double scale = std::abs(m[0][0]) + std::abs(m[1][1]) + std::abs(m[0][1]);
    if (asym > 1e-12 * std::max(scale, 1e-300))
        throw domain_error("mat2_sqrt_psd: matrix not symmetric");
    const double tr = m[0][0] + m[1][1];
    const double det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    const double disc = std::sqrt(std::max(0.0, tr * tr - 4.0 * det));
    const double lmin = 0.5 * (tr - disc);
    if (lmin < -1e-12 * std::max(std::abs(tr), 1e-300))
        throw domain_error("mat2_sqrt_psd: matrix not positive semidefinite");
    if (scale == 0.0) return mat2_zero();
    const double s = std::sqrt(std::max(0.0, det));
    const double t = std::sqrt(std::max(0.0, tr + 2.0 * s));
    if (t == 0.0) return mat2_zero();
    Mat2 r = m;
    r[0][0] = (m[0][0] + s) / t;
    r[1][1] = (m[1][1] + s) / t;
    r[0][1] = m[0][1] / t;
    r[1][0] = m[1][0] / t;
    return r;
}

struct KickEnsemble {
    std::vector<Vec2> samples; // accumulated impulses, kg m/s
    double delta_t = 0.0;
    Mat2 covariance_target = mat2_zero(); // D * delta_t
    uint64_t rng_seed = 0;
};

// n i.i.d. impulse vectors with covariance D * delta_t, deterministic per seed.
inline KickEnsemble sample_kicks(const Mat2& diffusion, double delta_t, size_t n,
                                 uint64_t seed) {
    if (n < 1000) throw domain_error("sample_kicks: ensemble must have n >= 1000");
    if (delta_t <= 0) throw domain_error("sample_kicks: delta_t must be positive");
    KickEnsemble out;
    out.delta_t = delta_t;
    out.covariance_target = delta_t * diffusion;
    out.rng_seed = seed;
    const Mat2 root = mat2_sqrt_psd(out.covariance_target);
    const uint64_t key = rng::derive_stream(seed, "kicks");
    out.samples.resize(n);
    for (size_t i = 0; i < n; ++i) {
        const auto z = rng::normal_pair(key, 0, i);
        out.samples[i] = {root[0][0] * z.a + root[0][1] * z.b,
                          root[1][0] * z.a + root[1][1] * z.b};
    }
    return out;
}

// | < exp(-i dp . a / hbar) > | over the ensemble; converges to
// exp(-sum_ij D_ij a_i a_j dt / 2 hbar^2) for large n.
inline double decoherence_factor(const KickEnsemble& ensemble, const Vec2& a, double hbar) {
    if (ensemble.samples.empty())
        throw domain_error("decoherence_factor: empty ensemble");
    std::complex<double> acc(0.0, 0.0);
    for (const Vec2& dp : ensemble.samples) {
        const double phase = -(dp[0] * a[0] + dp[1] * a[1]) / hbar;
        acc += std::complex<double>(std::cos(phase), std::sin(phase));
    }
    return std::abs(acc) / static_cast<double>(ensemble.samples.size());
}

inline Vec2 sample_mean(const std::vector<Vec2>& v) {
    Vec2 m{0.0, 0.0};
    for (const auto& x : v) {
        m[0] += x[0];
        m[1] += x[1];
    }
    m[0] /= static_cast<double>(v.size());
    m[1] /= static_cast<double>(v.size());
    return m;
}

// unbiased sample covariance; zero for a single sample
inline Mat2 sample_covariance(const std::vector<Vec2>& v) {
    Mat2 c = mat2_zero();
    if (v.size() < 2) return c;
    const Vec2 m = sample_mean(v);
    for (const auto& x : v) {
        const double dx = x[0] - m[0], dy = x[1] - m[1];
        c[0][0] += dx * dx;
        c[0][1] += dx * dy;
        c[1][1] += dy * dy;
    }
    const double norm = 1.0 / static_cast<double>(v.size() - 1);
    c[0][0] *= norm;
    c[0][1] *= norm;
    c[1][0] = c[0][1];
    c[1][1] *= norm;
    return c;
}

} // namespace qbrown
