// Acceptance suite: every release criterion with its tolerance pinned in
// code, one pass/fail line per criterion. Exit code 0 iff all pass.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "qbrown/coefficients.hpp"
#include "qbrown/density_matrix.hpp"
#include "qbrown/kernels.hpp"
#include "qbrown/kicks.hpp"
#include "qbrown/langevin.hpp"

using namespace qbrown;

namespace {

struct Criterion {
    int id;
    std::string name;
    bool pass;
    std::string detail;
    double seconds;
};

std::vector<Criterion> g_results;

class Timer {
public:
    Timer() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

void record(int id, const std::string& name, bool pass, const std::string& detail,
            double seconds) {
    g_results.push_back({id, name, pass, detail, seconds});
    std::printf("[%s] %2d %-26s %s  (%.1f s)\n", pass ? "PASS" : "FAIL", id, name.c_str(),
                detail.c_str(), seconds);
    std::fflush(stdout);
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

Scenario si_scenario(const MediumModel& medium, double z, double T) {
    Scenario sc;
    sc.particle = ParticleModel::make(1e-18, PolarizabilityModel::lorentz(4e-39, 7e15, 1e12));
    sc.medium = medium;
    sc.z = z;
    sc.environment = ThermalEnvironment{T};
    return sc;
}

// ---- criteria 1-3: identity suite over 20 random scenarios ----------------

void criteria_identities() {
    Timer timer;
    std::mt19937_64 rng(20260810);
    std::uniform_real_distribution<double> logT(std::log(10.0), std::log(1000.0));
    std::uniform_real_distribution<double> logz(std::log(1e-7), std::log(1e-4));

    double max_fdr = 0.0, max_diff = 0.0, max_drag = 0.0;
    for (int i = 0; i < 20; ++i) {
        const MediumModel medium =
            (i % 2 == 0) ? MediumModel::drude(1.37e16, 4.05e13) : MediumModel::perfect_mirror();
        const Scenario sc = si_scenario(medium, std::exp(logz(rng)), std::exp(logT(rng)));
        const auto set = compute_coefficient_set(sc, false);
        const double kBT = sc.constants.kB * sc.environment.temperature;
        const double h2 = sc.constants.hbar * sc.constants.hbar;
        for (int a = 0; a < 2; ++a) {
            const double lam = set.lambda.total[a][a];
            const double dif = set.diffusion.total[a][a];
            const double xi = set.drag.total[a][a];
            max_fdr = std::max(max_fdr,
                               std::abs(2.0 * sc.particle.mass * set.gamma.total[a][a] * kBT -
                                        h2 * lam) /
                                   (h2 * lam));
            max_diff = std::max(max_diff, std::abs(dif - 2.0 * h2 * lam) / dif);
            max_drag = std::max(max_drag, std::abs(xi - dif / (2.0 * kBT)) / xi);
        }
    }
    const double elapsed = timer.seconds();
    record(1, "fdr-identity",
           max_fdr < 1e-10 && elapsed < 60.0,
           "max |2 M Gamma kBT - h^2 Lambda| / h^2 Lambda = " + fmt(max_fdr) + ", runtime " +
               fmt(elapsed) + " s < 60 s",
           elapsed);
    record(2, "diffusion-decoherence", max_diff < 1e-10,
           "max |D - 2 h^2 Lambda| / D = " + fmt(max_diff), elapsed);
    record(3, "drag-identity", max_drag < 1e-12,
           "max |xi - D / 2 kBT| / xi = " + fmt(max_drag), elapsed);
}

// ---- criterion 4: free-space closed forms ----------------------------------

void criterion_free_space() {
    Timer timer;
    const Scenario sc = si_scenario(MediumModel::vacuum(), 1e-6, 300.0);
    const auto set = compute_coefficient_set(sc, false);

    const auto& k = sc.constants;
    auto spectral_moment = [&](double w) {
        if (w <= 0) return 0.0;
        const double u = k.hbar * w / (k.kB * sc.environment.temperature);
        if (u > 700.0) return 0.0;
        const double n = 1.0 / std::expm1(u);
        const double a2 = std::norm(polarizability_at(sc.particle.polarizability, w));
        return std::pow(w, 8) * a2 * n * (n + 1.0);
    };
    const double wmax = 80.0 * k.kB * sc.environment.temperature / k.hbar;
    const double peak = spectral_moment(3.0 * k.kB * 300.0 / k.hbar) * wmax;
    const double moment = oracles::adaptive_simpson(spectral_moment, 0.0, wmax, 1e-12 * peak);
    const double denom = std::pow(pi, 3) * k.eps0 * k.eps0 * std::pow(k.c, 8);
    const double lam_closed = moment / (18.0 * denom);
    const double dif_closed = k.hbar * k.hbar * moment / (9.0 * denom);
    const double drag_closed = k.hbar * k.hbar * moment / (18.0 * k.kB * 300.0 * denom);

    const double e_lam = std::abs(set.lambda.total[0][0] - lam_closed) / lam_closed;
    const double e_dif = std::abs(set.diffusion.total[0][0] - dif_closed) / dif_closed;
    const double e_drag = std::abs(set.drag.total[0][0] - drag_closed) / drag_closed;
    const double elapsed = timer.seconds();
    record(4, "free-space-oracle",
           e_lam < 1e-6 && e_dif < 1e-6 && e_drag < 1e-6 && elapsed < 10.0,
           "rel errs vs closed forms: Lambda " + fmt(e_lam) + ", D " + fmt(e_dif) + ", xi " +
               fmt(e_drag) + ", runtime " + fmt(elapsed) + " s < 10 s",
           elapsed);
}

// ---- criterion 5: image-dipole oracle ---------------------------------------

void criterion_image_dipole() {
    Timer timer;
    const auto kNat = PhysicalConstants::natural();
    const MediumModel mirror = MediumModel::perfect_mirror();
    KParQuadrature quad;
    quad.target_rel_tol = 1e-9;
    // w z / c spanning [0.1, 50]
    const double zw[10][2] = {{0.05, 1.0}, {0.2, 1.0},  {0.5, 1.0}, {1.0, 1.0},
                              {2.0, 1.0},  {1.0, 4.0},  {5.0, 1.0}, {10.0, 1.0},
                              {1.0, 17.0}, {25.0, 1.0}};
    double worst = 0.0;
    for (const auto& p : zw) {
        const double z = p[0], w = p[1];
        const auto numeric = scattering_green_coincidence(z, w, mirror, quad, kNat);
        const auto image =
            oracles::image_dipole_scattering(Vec3{0, 0, z}, Vec3{0, 0, z}, w, kNat);
        double scale = 0.0;
        for (int q = 0; q < 3; ++q) scale += std::abs(image(q, q));
        for (int pp = 0; pp < 3; ++pp)
            for (int q = 0; q < 3; ++q)
                worst = std::max(worst, std::abs(numeric.values(pp, q) - image(pp, q)) / scale);
    }
    record(5, "image-dipole-oracle", worst < 1e-6,
           "max componentwise mismatch " + fmt(worst) + " over 10 (z, w) pairs, wz/c in [0.1, 50]",
           timer.seconds());
}

// ---- criterion 6: coincidence-derivative oracle ------------------------------

void criterion_coincidence_derivatives() {
    Timer timer;
    const auto kNat = PhysicalConstants::natural();
    const double w = 1.0;
    const auto analytic = free_green_lateral_derivatives(w, kNat);
    auto im_g = [&](const Vec3& s, int p, int q) -> double {
        const double r = std::sqrt(s[0] * s[0] + s[1] * s[1] + s[2] * s[2]);
        if (r == 0) return free_green_coincidence_im(w, kNat)(p, q).real();
        return free_green(s, Vec3{0, 0, 0}, w, kNat).values(p, q).imag();
    };
    double worst = 0.0;
    for (int axis = 0; axis < 2; ++axis)
        for (int p = 0; p < 3; ++p) {
            auto fd = [&](double h) {
                Vec3 plus{0, 0, 0}, minus{0, 0, 0};
                plus[axis] = h;
                minus[axis] = -h;
                return -(im_g(plus, p, p) - 2.0 * im_g(Vec3{0, 0, 0}, p, p) +
                         im_g(minus, p, p)) /
                       (h * h);
            };
            const double extr = oracles::richardson(fd, 1e-2, 3);
            worst = std::max(worst, std::abs(analytic.values[axis][axis](p, p).imag() - extr) /
                                        std::abs(extr));
        }
    record(6, "coincidence-derivative", worst < 1e-7,
           "max rel mismatch analytic vs Richardson finite differences " + fmt(worst),
           timer.seconds());
}

// ---- criterion 7: kick-ensemble decoherence ----------------------------------

void criterion_kick_decoherence() {
    Timer timer;
    const Scenario sc = si_scenario(MediumModel::perfect_mirror(), 1e-6, 300.0);
    const auto set = compute_coefficient_set(sc, false);
    const double hbar = sc.constants.hbar;
    const double dval = set.diffusion.total[0][0];
    const size_t n = 100000;
    const double delta_t = 1.0;
    const auto ensemble = sample_kicks(set.diffusion.total, delta_t, n, 20260810);
    const double a1 = std::sqrt(2.0 * hbar * hbar / (dval * delta_t));
    const double f = decoherence_factor(ensemble, Vec2{a1, 0.0}, hbar);

    // bootstrap sigma
    const uint64_t key = rng::derive_stream(20260810, "acceptance-bootstrap");
    double bsum = 0.0, bsum2 = 0.0;
    const int nboot = 200;
    for (int b = 0; b < nboot; ++b) {
        complexd acc(0.0, 0.0);
        for (size_t i = 0; i < n; ++i) {
            const auto blk = rng::philox_block(key, b, i);
            const size_t pick =
                static_cast<size_t>(((static_cast<uint64_t>(blk[0]) << 32) | blk[1]) % n);
            const double phase = -ensemble.samples[pick][0] * a1 / hbar;
            acc += complexd(std::cos(phase), std::sin(phase));
        }
        const double fb = std::abs(acc) / static_cast<double>(n);
        bsum += fb;
        bsum2 += fb * fb;
    }
    const double sigma =
        std::sqrt(std::max(0.0, bsum2 / nboot - (bsum / nboot) * (bsum / nboot)));
    const bool factor_ok = std::abs(f - std::exp(-1.0)) <= 3.0 * sigma;

    std::vector<double> xs, ys;
    for (double scale : {0.4, 0.55, 0.7, 0.85, 1.0}) {
        const double a = a1 * scale;
        xs.push_back(a * a);
        ys.push_back(-std::log(decoherence_factor(ensemble, Vec2{a, 0.0}, hbar)));
    }
    double slope, icpt;
    oracles::linear_fit(xs, ys, slope, icpt);
    const double slope_expected = dval * delta_t / (2.0 * hbar * hbar);
    const double slope_err = std::abs(slope - slope_expected) / slope_expected;
    const double elapsed = timer.seconds();
    record(7, "kick-decoherence",
           factor_ok && slope_err < 0.02 && elapsed < 30.0,
           "factor " + fmt(f) + " vs 1/e (3 sigma = " + fmt(3.0 * sigma) + "), slope err " +
               fmt(slope_err) + ", runtime " + fmt(elapsed) + " s < 30 s",
           elapsed);
}

// ---- criterion 8: master-equation decoherence --------------------------------

void criterion_master_decoherence() {
    Timer timer;
    // natural units, rate-scaled grid
    const double lambda = 0.6;
    CoefficientSet coeffs;
    coeffs.lambda.total[0][0] = coeffs.lambda.total[1][1] = lambda;
    const int n = 256;
    auto grid = gaussian_pure_state(n, 2.0, 0.4, 0.0, 0.0, 1.0);
    auto initial = grid;
    EvolveTerms terms;
    terms.decoherence = true;
    const double t_end = 0.15 / lambda;
    const int steps = 250;
    evolve_density_matrix(grid, coeffs, 1.0, t_end / steps, steps, terms,
                          PhysicalConstants::natural());
    double worst = 0.0;
    for (int off : {30, 70, 150}) {
        const int i = n / 2 - off / 2, j = n / 2 + (off + 1) / 2;
        const double a = grid.x[i] - grid.x[j];
        const double measured =
            -std::log(std::abs(grid.at(i, j)) / std::abs(initial.at(i, j))) / t_end;
        worst = std::max(worst, std::abs(measured - lambda * a * a) / (lambda * a * a));
    }
    const double elapsed = timer.seconds();
    record(8, "master-decoherence", worst < 1e-3 && elapsed < 30.0,
           "max rel rate error " + fmt(worst) + " over 3 separations, 256-node grid, runtime " +
               fmt(elapsed) + " s < 30 s",
           elapsed);
}

// ---- criterion 9: equipartition -----------------------------------------------

void criterion_equipartition() {
    Timer timer;
    const Scenario sc = si_scenario(MediumModel::perfect_mirror(), 1e-6, 300.0);
    const auto set = compute_coefficient_set(sc, false);
    const double gamma = set.gamma.total[0][0];
    const double kBT = sc.constants.kB * 300.0;
    const size_t n = 100000;
    const double dt = 0.004 / (2.0 * gamma);
    const int steps = static_cast<int>(10.0 / (2.0 * gamma) / dt);
    LangevinState st;
    st.r.assign(n, Vec2{0.0, 0.0});
    st.p.assign(n, Vec2{0.0, 0.0});
    const auto out = evolve_langevin(st, set.gamma.total, set.diffusion.total,
                                     sc.particle.mass, dt, steps, 20260810);
    const auto m = wigner_moments(out);
    const double expect = sc.particle.mass * kBT;
    const double e0 = std::abs(m.cov_p[0][0] - expect) / expect;
    const double e1 = std::abs(m.cov_p[1][1] - expect) / expect;
    record(9, "equipartition", e0 < 0.015 && e1 < 0.015,
           "<p^2>/axis rel err " + fmt(e0) + ", " + fmt(e1) +
               " vs M kB T after 10 relaxation times, n = 1e5",
           timer.seconds());
}

// ---- criterion 10: planar-symmetry zeros --------------------------------------

void criterion_planar_zeros() {
    Timer timer;
    bool ok = true;
    std::string detail;
    for (const MediumModel& medium :
         {MediumModel::perfect_mirror(), MediumModel::drude(1.37e16, 4.05e13)}) {
        Scenario sc = si_scenario(medium, 1e-6, 300.0);
        sc.spectral.target_rel_tol = 1e-8;
        const auto c1 = cp_force_lateral(sc);
        Scenario up = sc, dn = sc;
        up.z *= 1.01;
        dn.z *= 0.99;
        const double fz =
            std::abs((cp_potential_first(up) - cp_potential_first(dn)) / (0.02 * sc.z));
        const auto set = compute_coefficient_set(sc, false);
        const double lam_off = std::abs(set.lambda.total[0][1]) / set.lambda.total[0][0];
        const double gam_off = std::abs(set.gamma.total[0][1]) / set.gamma.total[0][0];
        ok = ok && std::abs(c1[0]) <= 1e-10 * fz && std::abs(c1[1]) <= 1e-10 * fz &&
             lam_off < 1e-10 && gam_off < 1e-10;
        detail += "|C1|/Fz " + fmt(std::abs(c1[0]) / fz) + ", Lambda_xy/diag " + fmt(lam_off) +
                  "; ";
    }
    record(10, "planar-symmetry-zeros", ok, detail, timer.seconds());
}

// ---- criterion 11: zero-temperature null ---------------------------------------

void criterion_zero_temperature() {
    Timer timer;
    Scenario sc = si_scenario(MediumModel::drude(1.37e16, 4.05e13), 1e-6, 0.0);
    const auto lam = lambda_coefficient(sc);
    const auto gam = gamma_coefficient(sc);
    const auto dif = diffusion_coefficient(sc);
    bool ok = true;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            ok = ok && lam.total[i][j] == 0.0 && gam.total[i][j] == 0.0 &&
                 dif.total[i][j] == 0.0;
    record(11, "zero-temperature-null", ok,
           "Lambda, Gamma, D identically zero at T = 0 (exact)", timer.seconds());
}

// ---- criterion 12: kernel consistency ------------------------------------------

void criterion_kernels() {
    Timer timer;
    Scenario sc;
    sc.constants = PhysicalConstants::natural();
    sc.particle = ParticleModel::make(2.0, PolarizabilityModel::lorentz(0.5, 40.0, 0.5));
    sc.medium = MediumModel::drude(1.1, 0.05);
    sc.z = 0.8;
    sc.environment = ThermalEnvironment{1.0};

    KernelSettings ks;
    ks.u_max = 25.0;
    KernelTable table(sc, ks);

    double parity = 0.0;
    for (double tau : {0.17, 0.9, 2.3}) {
        const auto plus = table.sample(tau);
        const auto minus = table.sample(-tau);
        parity = std::max(parity, std::abs(plus.noise[0][0] - minus.noise[0][0]) /
                                      std::abs(plus.noise[0][0]));
        parity =
            std::max(parity, std::abs(plus.dissipation[0][0] + minus.dissipation[0][0]) /
                                 std::abs(plus.dissipation[0][0]));
    }

    const auto lambda = lambda_coefficient(sc);
    const double l1 = table.regularized_lambda(1.5);
    const double l2 = table.regularized_lambda(3.0);
    const double l3 = table.regularized_lambda(6.0);
    const double r12 = (4.0 * l2 - l1) / 3.0;
    const double r23 = (4.0 * l3 - l2) / 3.0;
    const double extrapolated = (16.0 * r23 - r12) / 15.0;
    const double lam_err = std::abs(extrapolated - lambda.total[0][0]) / lambda.total[0][0];
    const double elapsed = timer.seconds();
    record(12, "kernel-consistency",
           parity < 1e-9 && lam_err < 0.02 && elapsed < 120.0,
           "parity residual " + fmt(parity) + ", regularized-integral Lambda err " +
               fmt(lam_err) + ", runtime " + fmt(elapsed) + " s < 120 s",
           elapsed);
}

// ---- criterion 13: quadrature self-convergence ----------------------------------

void criterion_self_convergence() {
    Timer timer;
    double worst = 0.0;
    std::string where;
    const std::vector<Scenario> standard = {
        si_scenario(MediumModel::drude(1.37e16, 4.05e13), 1e-6, 300.0),
        si_scenario(MediumModel::perfect_mirror(), 1e-6, 300.0),
        si_scenario(MediumModel::drude(1.37e16, 4.05e13), 5e-6, 77.0),
        si_scenario(MediumModel::vacuum(), 1e-6, 300.0),
    };
    for (size_t i = 0; i < standard.size(); ++i) {
        const auto coarse = compute_coefficient_set(standard[i], true);
        const auto fine = compute_coefficient_set(refined(standard[i]), true);
        auto cmp = [&](double a, double b, const char* tag) {
            if (b == 0.0 && a == 0.0) return;
            const double rel = std::abs(a - b) / std::max(std::abs(b), 1e-300);
            if (rel > worst) {
                worst = rel;
                where = "scenario " + std::to_string(i) + " " + tag;
            }
        };
        cmp(coarse.lambda.total[0][0], fine.lambda.total[0][0], "lambda");
        cmp(coarse.gamma.total[0][0], fine.gamma.total[0][0], "gamma");
        cmp(coarse.diffusion.total[0][0], fine.diffusion.total[0][0], "diffusion");
        cmp(coarse.drag.total[0][0], fine.drag.total[0][0], "drag");
        cmp(coarse.u1.total, fine.u1.total, "u1");
        cmp(coarse.u2.total, fine.u2.total, "u2");
        cmp(coarse.c2.total[0][0], fine.c2.total[0][0], "c2");
    }
    record(13, "self-convergence", worst < 1e-9,
           "max coefficient change under grid doubling " + fmt(worst) +
               (where.empty() ? "" : " (" + where + ")"),
           timer.seconds());
}

// ---- criterion 14: retarded Casimir-Polder exponent ------------------------------

void criterion_cp_exponent() {
    Timer timer;
    Scenario sc = si_scenario(MediumModel::perfect_mirror(), 1e-6, 0.0);
    std::vector<double> xs, ys;
    for (int i = 0; i < 9; ++i) {
        const double z = 1e-6 * std::pow(10.0, i / 8.0);
        sc.z = z;
        const double u1 = cp_potential_first(sc);
        xs.push_back(std::log(z));
        ys.push_back(std::log(std::abs(u1)));
    }
    double slope, icpt;
    oracles::linear_fit(xs, ys, slope, icpt);
    const double err = std::abs(-slope - 4.0);
    record(14, "cp-retardation-exponent", err < 0.05,
           "|U1| ~ z^-n with n = " + fmt(-slope) + " over one decade (target 4.0 +- 0.05)",
           timer.seconds());
}

} // namespace

int main() {
    std::printf("acceptance suite\n----------------\n");
    criteria_identities();
    criterion_free_space();
    criterion_image_dipole();
    criterion_coincidence_derivatives();
    criterion_kick_decoherence();
    criterion_master_decoherence();
    criterion_equipartition();
    criterion_planar_zeros();
    criterion_zero_temperature();
    criterion_kernels();
    criterion_self_convergence();
    criterion_cp_exponent();

    int failed = 0;
    for (const auto& c : g_results)
        if (!c.pass) ++failed;
    std::printf("----------------\n%zu criteria, %d failed\n", g_results.size(), failed);
    return failed == 0 ? 0 : 1;
}
