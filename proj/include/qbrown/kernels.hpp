#pragma once

// Finite-tau noise and dissipation kernels: the two-time correlation
// structure behind the Markovian coefficients, kept as a validator. The
// double-frequency integrals run on a fixed coarse tensor grid (they are
// cross-checks with percent-level targets, not production paths).

#include <cmath>
#include <vector>

#include "qbrown/coefficients.hpp"
#include "qbrown/scenario.hpp"

namespace qbrown {

struct KernelSettings {
    int nodes_per_axis = 96;
    double u_max = 40.0;
    int panels = 12;
};

struct KernelSample {
    double tau = 0.0;
    Mat2 noise = mat2_zero();       // even in tau
    Mat2 dissipation = mat2_zero(); // odd in tau
};

// Frequency-grid data reused across tau samples.
class KernelTable {
public:
    KernelTable(const Scenario& sc, const KernelSettings& settings = {}) {
        sc.validate();
        if (sc.environment.temperature <= 0)
            throw domain_error("KernelTable: kernels are evaluated at T > 0");
        hbar_ = sc.constants.hbar;
        pref_ = hbar_ * hbar_ * sc.constants.mu0 * sc.constants.mu0 / (2.0 * pi * pi);
        const double kbt_over_h = sc.constants.kB * sc.environment.temperature / hbar_;
        u_max_over_h_ = settings.u_max * kbt_over_h;

        const int per_panel = std::max(2, settings.nodes_per_axis / settings.panels);
        const GaussRule& rule = gauss_legendre_rule(per_panel);
        for (int p = 0; p < settings.panels; ++p) {
            const double a = settings.u_max * p / settings.panels;
            const double b = settings.u_max * (p + 1) / settings.panels;
            for (int j = 0; j < per_panel; ++j) {
                Node nd;
                const double u = 0.5 * (a + b) + 0.5 * (b - a) * rule.x[j];
                nd.w = u * kbt_over_h;
                nd.weight = 0.5 * (b - a) * rule.w[j] * kbt_over_h;
                nd.n = occupation(nd.w, sc.environment, sc.constants);
                nd.alpha = polarizability_at(sc.particle.polarizability, nd.w);
                const double g0 = nd.w / (6.0 * pi * sc.constants.c);
                const DerivedGreenBlock d0 = free_green_lateral_derivatives(nd.w, sc.constants);
                for (int q = 0; q < 3; ++q) {
                    nd.g[q] = g0;
                    nd.dxx[q] = d0.values[0][0](q, q).imag();
                    nd.dyy[q] = d0.values[1][1](q, q).imag();
                }
                if (!sc.medium.is_vacuum()) {
                    const SurfaceCoincidence s = scattering_green_coincidence_full(
                        sc.z, nd.w, sc.medium, sc.kpar, sc.constants);
                    for (int q = 0; q < 3; ++q) {
                        nd.g[q] += s.values(q, q).imag();
                        nd.dxx[q] += s.deriv[0][0](q, q).imag();
                        nd.dyy[q] += s.deriv[1][1](q, q).imag();
                    }
                }
                nodes_.push_back(nd);
            }
        }
    }

    KernelSample sample(double tau) const {
        KernelSample out;
        out.tau = tau;
        double nxx = 0, nyy = 0, dxx = 0, dyy = 0;
        const size_t n = nodes_.size();
        std::vector<double> c(n), s(n);
        for (size_t a = 0; a < n; ++a) {
            c[a] = std::cos(nodes_[a].w * tau);
            s[a] = std::sin(nodes_[a].w * tau);
        }
        for (size_t a = 0; a < n; ++a) {
            const Node& na = nodes_[a];
            const double wa2 = na.w * na.w;
            const double a2 = std::norm(na.alpha);
            for (size_t b = 0; b < n; ++b) {
                const Node& nb = nodes_[b];
                const double meas = na.weight * nb.weight * wa2 * (nb.w * nb.w);
                double bxx = 0, byy = 0;
                for (int q = 0; q < 3; ++q) {
                    bxx += na.dxx[q] * nb.g[q] + na.g[q] * nb.dxx[q];
                    byy += na.dyy[q] * nb.g[q] + na.g[q] * nb.dyy[q];
                }
                const double cp = (na.n + 1.0) * (nb.n + 1.0) + na.n * nb.n;
                const double cm = (na.n + 1.0) * nb.n + na.n * (nb.n + 1.0);
                const double sp = (na.n + 1.0) * (nb.n + 1.0) - na.n * nb.n;
                const double sm = nb.n - na.n;
                const double mix_conj = (na.alpha * std::conj(nb.alpha)).real();
                const double mix_plain = (na.alpha * nb.alpha).real();
                // angle sums from the per-node tables
                const double cos_p = c[a] * c[b] - s[a] * s[b];
                const double cos_m = c[a] * c[b] + s[a] * s[b];
                const double sin_p = s[a] * c[b] + c[a] * s[b];
                const double sin_m = s[a] * c[b] - c[a] * s[b];
                const double wn =
                    (a2 + mix_conj) * cp * cos_p + (a2 + mix_plain) * cm * cos_m;
                const double wd =
                    (a2 + mix_conj) * sp * sin_p + (a2 + mix_plain) * sm * sin_m;
                nxx += meas * bxx * wn;
                nyy += meas * byy * wn;
                dxx += meas * bxx * wd;
                dyy += meas * byy * wd;
            }
        }
        out.noise[0][0] = pref_ * nxx;
        out.noise[1][1] = pref_ * nyy;
        out.dissipation[0][0] = pref_ * dxx;
        out.dissipation[1][1] = pref_ * dyy;
        return out;
    }

    // (1 / 2 hbar^2) int_0^inf dtau N_xx(tau) exp(-(tau/tau_c)^2), the
    // Gaussian-regularized localization rate; approaches Lambda_xx as tau_c
    // grows. Numeric tau quadrature resolving the fastest oscillation.
    double regularized_lambda(double tau_c) const {
        const double t_end = 5.0 * tau_c;
        const double period = pi / u_max_over_h_; // half period of cos(2 w_max tau)
        const int panels = std::max(64, static_cast<int>(t_end / period) + 1);
        double acc = 0.0;
        for (int p = 0; p < panels; ++p) {
            const double a = t_end * p / panels;
            const double b = t_end * (p + 1) / panels;
            acc += gauss_integrate(
                [&](double tau) {
                    return sample(tau).noise[0][0] * std::exp(-(tau / tau_c) * (tau / tau_c));
                },
                a, b, 8);
        }
        return acc / (2.0 * hbar_ * hbar_);
    }

    size_t node_count() const { return nodes_.size(); }

private:
    struct Node {
        double w, weight, n;
        complexd alpha;
        double g[3], dxx[3], dyy[3];
    };
    std::vector<Node> nodes_;
    double pref_ = 0.0;
    double hbar_ = 0.0;
    double u_max_over_h_ = 0.0;
};

inline KernelSample noise_kernel(const Scenario& sc, double tau,
                                 const KernelSettings& settings = {}) {
    return KernelTable(sc, settings).sample(tau);
}

inline KernelSample dissipation_kernel(const Scenario& sc, double tau,
                                       const KernelSettings& settings = {}) {
    return KernelTable(sc, settings).sample(tau);
}

} // namespace qbrown
