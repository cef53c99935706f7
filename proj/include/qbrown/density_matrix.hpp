#pragma once

// Position-basis density-matrix evolution on a uniform grid, by operator
// splitting: the decoherence term is an exact pointwise multiplier, the
// kinetic term a spectral (FFT) step, the friction term a first-order upwind
// advection of the relative coordinate, and the Casimir-Polder terms phase
// multipliers.

#include <cmath>
#include <complex>
#include <vector>

#include "qbrown/coefficients.hpp"
#include "qbrown/constants.hpp"
#include "qbrown/errors.hpp"

namespace qbrown {

namespace fft_detail {

// iterative radix-2, in place; sign = -1 forward, +1 inverse (unscaled)
inline void fft_pow2(std::vector<complexd>& a, int sign) {
    const size_t n = a.size();
    for (size_t i = 1, j = 0; i < n; ++i) {
        size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (size_t len = 2; len <= n; len <<= 1) {
        const double ang = sign * 2.0 * M_PI / static_cast<double>(len);
        const complexd wl(std::cos(ang), std::sin(ang));
        for (size_t i = 0; i < n; i += len) {
            complexd w(1.0, 0.0);
            for (size_t j = 0; j < len / 2; ++j) {
                const complexd u = a[i + j];
                const complexd v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

} // namespace fft_detail

struct DensityMatrixGrid {
    std::vector<double> x;      // N uniform nodes
    std::vector<complexd> rho;  // row-major: rho[i * N + j] = rho(x_i, x'_j)
    double time = 0.0;

    int size() const { return static_cast<int>(x.size()); }
    double dx() const { return x[1] - x[0]; }
    double half_width() const { return 0.5 * (x.back() - x.front()); }
    complexd& at(int i, int j) { return rho[static_cast<size_t>(i) * x.size() + j]; }
    const complexd& at(int i, int j) const {
        return rho[static_cast<size_t>(i) * x.size() + j];
    }
    double trace() const {
        double t = 0.0;
        for (int i = 0; i < size(); ++i) t += at(i, i).real();
        return t * dx();
    }
    // sum_i x_i^2 rho(x_i, x_i) dx
    double position_variance() const {
        double v = 0.0, m = 0.0;
        for (int i = 0; i < size(); ++i) {
            m += x[i] * at(i, i).real();
            v += x[i] * x[i] * at(i, i).real();
        }
        m *= dx();
        v *= dx();
        return v - m * m;
    }
};

// pure Gaussian wavepacket rho = psi psi*, normalized so Tr rho dx = 1
inline DensityMatrixGrid gaussian_pure_state(int n, double half_width, double sigma,
                                             double x0, double p0, double hbar) {
    if (n < 2) throw config_error("gaussian_pure_state: need at least 2 nodes");
    DensityMatrixGrid g;
    g.x.resize(n);
    const double dx = 2.0 * half_width / n;
    for (int i = 0; i < n; ++i) g.x[i] = -half_width + (i + 0.5) * dx;
    std::vector<complexd> psi(n);
    double norm = 0.0;
    for (int i = 0; i < n; ++i) {
        const double d = g.x[i] - x0;
        const double amp = std::exp(-d * d / (4.0 * sigma * sigma));
        psi[i] = amp * std::exp(complexd(0.0, p0 * g.x[i] / hbar));
        norm += amp * amp;
    }
    norm = 1.0 / std::sqrt(norm * dx);
    for (auto& v : psi) v *= norm;
    g.rho.resize(static_cast<size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g.at(i, j) = psi[i] * std::conj(psi[j]);
    return g;
}

struct EvolveTerms {
    bool kinetic = false;
    bool c1 = false;
    bool c2 = false;
    bool friction = false;
    bool decoherence = false;
};

inline void evolve_density_matrix(DensityMatrixGrid& grid, const CoefficientSet& coeffs,
                                  double mass, double dt, int steps,
                                  const EvolveTerms& terms, const PhysicalConstants& k) {
    const int n = grid.size();
    const double half_width = grid.half_width();
    const double lambda = coeffs.lambda.total[0][0];
    const double gamma = coeffs.gamma.total[0][0];
    const double c1x = coeffs.c1[0];
    const double c2xx = coeffs.c2.total[0][0];

    // stability gates, checked before any stepping
    if (terms.decoherence && lambda * half_width * half_width * dt >= 0.1)
        throw config_error("evolve_density_matrix: decoherence step too large "
                           "(Lambda L^2 dt must stay below 0.1)");
    if (terms.friction && 2.0 * std::abs(gamma) * half_width * dt >= grid.dx())
        throw config_error("evolve_density_matrix: friction advection violates the CFL bound");
    if (terms.kinetic && (n & (n - 1)) != 0)
        throw config_error("evolve_density_matrix: kinetic step needs a power-of-two grid");

    // precomputed per-step multipliers
    std::vector<double> deco(n * n);
    std::vector<complexd> cp_phase(n * n);
    if (terms.decoherence || terms.c1 || terms.c2) {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const double u = grid.x[i] - grid.x[j];
                deco[i * n + j] = std::exp(-lambda * u * u * dt);
                double phase = 0.0;
                if (terms.c1) phase -= c1x * u * dt / k.hbar;
                if (terms.c2)
                    phase -= c2xx * (grid.x[i] * grid.x[i] - grid.x[j] * grid.x[j]) * dt / k.hbar;
                cp_phase[i * n + j] = std::exp(complexd(0.0, phase));
            }
    }
    std::vector<complexd> kin_phase(n);
    if (terms.kinetic) {
        const double dk = 2.0 * M_PI / (n * grid.dx());
        for (int m = 0; m < n; ++m) {
            const int mm = (m <= n / 2) ? m : m - n;
            const double kx = mm * dk;
            kin_phase[m] = std::exp(complexd(0.0, -k.hbar * kx * kx * dt / (2.0 * mass)));
        }
    }

    std::vector<complexd> line(n);
    std::vector<complexd> next;
    if (terms.friction) next.resize(static_cast<size_t>(n) * n);

    for (int step = 0; step < steps; ++step) {
        if (terms.kinetic) {
            // rows: forward transform in x, phase, inverse
            for (int j = 0; j < n; ++j) {
                for (int i = 0; i < n; ++i) line[i] = grid.at(i, j);
                fft_detail::fft_pow2(line, -1);
                for (int m = 0; m < n; ++m) line[m] *= kin_phase[m];
                fft_detail::fft_pow2(line, +1);
                for (int i = 0; i < n; ++i) grid.at(i, j) = line[i] / static_cast<double>(n);
            }
            // columns: conjugate phase on x'
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < n; ++j) line[j] = grid.at(i, j);
                fft_detail::fft_pow2(line, -1);
                for (int m = 0; m < n; ++m) line[m] *= std::conj(kin_phase[m]);
                fft_detail::fft_pow2(line, +1);
                for (int j = 0; j < n; ++j) grid.at(i, j) = line[j] / static_cast<double>(n);
            }
        }
        if (terms.friction) {
            // -Gamma (x - x') (d_x - d_x') rho as upwind advection with
            // velocities v_x = Gamma u, v_x' = -Gamma u
            const double dxg = grid.dx();
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    const double u = grid.x[i] - grid.x[j];
                    const double vx = gamma * u;
                    complexd ddx, ddxp;
                    if (vx > 0)
                        ddx = (grid.at(i, j) - grid.at(i > 0 ? i - 1 : i, j)) / dxg;
                    else
                        ddx = (grid.at(i < n - 1 ? i + 1 : i, j) - grid.at(i, j)) / dxg;
                    if (-vx > 0)
                        ddxp = (grid.at(i, j) - grid.at(i, j > 0 ? j - 1 : j)) / dxg;
                    else
                        ddxp = (grid.at(i, j < n - 1 ? j + 1 : j) - grid.at(i, j)) / dxg;
                    next[static_cast<size_t>(i) * n + j] =
                        grid.at(i, j) - dt * (vx * ddx - vx * ddxp);
                }
            grid.rho.swap(next);
        }
        if (terms.decoherence || terms.c1 || terms.c2) {
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    complexd v = grid.at(i, j) * cp_phase[i * n + j];
                    if (terms.decoherence) v *= deco[i * n + j];
                    grid.at(i, j) = v;
                }
        }
        grid.time += dt;
    }
}

} // namespace qbrown
