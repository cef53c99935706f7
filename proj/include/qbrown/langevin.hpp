#pragma once

// Classical phase-space ensemble under drag and momentum diffusion:
//   p <- p - 2 Gamma p dt + sqrt(D dt) xi,   r <- r + p/M dt
// with D = 2 hbar^2 Lambda. Particles carry independent counter-based
// streams, so results are bit-identical for a fixed seed no matter how the
// work is partitioned across threads.

#include <cmath>
#include <thread>
#include <vector>

#include "qbrown/errors.hpp"
#include "qbrown/kicks.hpp"
#include "qbrown/linalg.hpp"
#include "qbrown/rng.hpp"

namespace qbrown {

struct LangevinState {
    std::vector<Vec2> r;
    std::vector<Vec2> p;
    double time = 0.0;

    size_t size() const { return r.size(); }
};

// thermal momentum ensemble at temperature T (positions at the origin)
inline LangevinState thermal_ensemble(size_t n, double mass, double kBT, uint64_t seed) {
    LangevinState st;
    st.r.assign(n, Vec2{0.0, 0.0});
    st.p.resize(n);
    const double sigma = std::sqrt(mass * kBT);
    const uint64_t key = rng::derive_stream(seed, "thermal-init");
    for (size_t i = 0; i < n; ++i) {
        const auto z = rng::normal_pair(key, 1, i);
        st.p[i] = {sigma * z.a, sigma * z.b};
    }
    return st;
}

inline LangevinState evolve_langevin(LangevinState state, const Mat2& gamma,
                                     const Mat2& diffusion, double mass, double dt,
                                     int steps, uint64_t seed,
                                     unsigned n_threads = 0) {
    const double gmax = std::max(std::abs(gamma[0][0]) + std::abs(gamma[0][1]),
                                 std::abs(gamma[1][0]) + std::abs(gamma[1][1]));
    if (2.0 * gmax * dt >= 0.1)
        throw config_error("evolve_langevin: dt too large for the drag rate (need 2 Gamma dt < 0.1)");
    if (state.r.size() != state.p.size())
        throw config_error("evolve_langevin: inconsistent ensemble");

    const Mat2 root = mat2_sqrt_psd(diffusion);
    const double sq_dt = std::sqrt(dt);
    const uint64_t key = rng::derive_stream(seed, "langevin");
    const size_t n = state.size();
    if (n_threads == 0) n_threads = std::max(1u, std::thread::hardware_concurrency());
    n_threads = std::min<unsigned>(n_threads, 64);

    auto work = [&](size_t lo, size_t hi) {
        for (size_t i = lo; i < hi; ++i) {
            Vec2 r = state.r[i], p = state.p[i];
            for (int s = 0; s < steps; ++s) {
                const auto z = rng::normal_pair(key, i, static_cast<uint64_t>(s));
                const double drag_x = 2.0 * (gamma[0][0] * p[0] + gamma[0][1] * p[1]);
                const double drag_y = 2.0 * (gamma[1][0] * p[0] + gamma[1][1] * p[1]);
                p[0] += -drag_x * dt + sq_dt * (root[0][0] * z.a + root[0][1] * z.b);
                p[1] += -drag_y * dt + sq_dt * (root[1][0] * z.a + root[1][1] * z.b);
                r[0] += p[0] / mass * dt;
                r[1] += p[1] / mass * dt;
            }
            state.r[i] = r;
            state.p[i] = p;
        }
    };

    if (n_threads <= 1 || n < 256) {
        work(0, n);
    } else {
        std::vector<std::thread> pool;
        const size_t chunk = (n + n_threads - 1) / n_threads;
        for (unsigned t = 0; t < n_threads; ++t) {
            const size_t lo = t * chunk;
            if (lo >= n) break;
            pool.emplace_back(work, lo, std::min(n, lo + chunk));
        }
        for (auto& th : pool) th.join();
    }
    state.time += steps * dt;
    return state;
}

struct MomentRecord {
    Vec2 mean_r{0.0, 0.0};
    Vec2 mean_p{0.0, 0.0};
    Mat2 cov_r = mat2_zero();
    Mat2 cov_p = mat2_zero();
    Mat2 cov_rp = mat2_zero(); // <dr_i dp_j>, unbiased
};

inline MomentRecord wigner_moments(const LangevinState& state) {
    if (state.size() == 0) throw domain_error("wigner_moments: empty ensemble");
    MomentRecord m;
    m.mean_r = sample_mean(state.r);
    m.mean_p = sample_mean(state.p);
    m.cov_r = sample_covariance(state.r);
    m.cov_p = sample_covariance(state.p);
    if (state.size() >= 2) {
        const double norm = 1.0 / static_cast<double>(state.size() - 1);
        for (size_t i = 0; i < state.size(); ++i)
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b)
                    m.cov_rp[a][b] += (state.r[i][a] - m.mean_r[a]) *
                                      (state.p[i][b] - m.mean_p[b]) * norm;
    }
    return m;
}

} // namespace qbrown
