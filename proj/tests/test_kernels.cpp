#include <doctest.h>

#include <cmath>

#include "qbrown/coefficients.hpp"
#include "qbrown/kernels.hpp"

using namespace qbrown;

namespace {
Scenario kernel_scenario(bool with_surface) {
    Scenario sc;
    sc.constants = PhysicalConstants::natural();
    // far-detuned resonance: alpha is essentially real across the thermal
    // band, which is the regime the closed-form coefficients assume
    sc.particle = ParticleModel::make(2.0, PolarizabilityModel::lorentz(0.5, 40.0, 0.5));
    sc.medium = with_surface ? MediumModel::drude(1.1, 0.05) : MediumModel::vacuum();
    sc.z = 0.8;
    sc.environment = ThermalEnvironment{1.0};
    return sc;
}
} // namespace

TEST_CASE("kernel parity: noise even, dissipation odd") {
    KernelTable table(kernel_scenario(true), KernelSettings{});
    for (double tau : {0.13, 0.9, 2.7}) {
        const auto plus = table.sample(tau);
        const auto minus = table.sample(-tau);
        for (int i = 0; i < 2; ++i) {
            const double scale = std::abs(plus.noise[i][i]) + 1e-300;
            CHECK(std::abs(plus.noise[i][i] - minus.noise[i][i]) < 1e-9 * scale);
            CHECK(std::abs(plus.dissipation[i][i] + minus.dissipation[i][i]) <
                  1e-9 * (std::abs(plus.dissipation[i][i]) + 1e-300));
        }
    }
}

TEST_CASE("dissipation kernel vanishes at tau = 0") {
    KernelTable table(kernel_scenario(true), KernelSettings{});
    const auto s = table.sample(0.0);
    CHECK(s.dissipation[0][0] == 0.0);
    CHECK(s.dissipation[1][1] == 0.0);
    CHECK(s.noise[0][0] > 0.0);
}

TEST_CASE("noise and dissipation accessors return the same sample") {
    Scenario sc = kernel_scenario(false);
    const auto a = noise_kernel(sc, 0.4);
    const auto b = dissipation_kernel(sc, 0.4);
    CHECK(a.noise[0][0] == b.noise[0][0]);
    CHECK(a.dissipation[0][0] == b.dissipation[0][0]);
    CHECK(a.tau == 0.4);
}

TEST_CASE("kernels require finite temperature") {
    Scenario sc = kernel_scenario(false);
    sc.environment.temperature = 0.0;
    CHECK_THROWS_AS(KernelTable(sc, KernelSettings{}), domain_error);
}

TEST_CASE("regularized noise integral extrapolates to the localization rate") {
    // vacuum case: cheap and has a closed-form cross-check through
    // lambda_coefficient
    Scenario sc = kernel_scenario(false);
    const auto lambda = lambda_coefficient(sc);
    // tau_c must stay within what the coarse grid resolves (tau_c * du < ~2),
    // and the delta-approximation error scales as 1/tau_c^2, so a doubling
    // ladder extrapolates cleanly
    KernelSettings ks;
    ks.u_max = 25.0;
    KernelTable table(sc, ks);

    const double tb = 1.0; // hbar / kB T in natural units
    const double tc1 = 1.5 * tb, tc2 = 3.0 * tb, tc3 = 6.0 * tb;
    const double l1 = table.regularized_lambda(tc1);
    const double l2 = table.regularized_lambda(tc2);
    const double l3 = table.regularized_lambda(tc3);
    // 3-point Richardson in 1/tau_c^2
    const double r12 = (4.0 * l2 - l1) / 3.0;
    const double r23 = (4.0 * l3 - l2) / 3.0;
    const double extrapolated = (16.0 * r23 - r12) / 15.0;
    CHECK(extrapolated == doctest::Approx(lambda.total[0][0]).epsilon(0.02));
}
