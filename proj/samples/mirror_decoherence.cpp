// Decoherence and momentum diffusion of a nanoparticle above a perfect
// mirror, with the kick-ensemble correspondence checked on the spot.

#include <cstdio>

#include "qbrown/coefficients.hpp"
#include "qbrown/kicks.hpp"

int main() {
    using namespace qbrown;

    Scenario sc;
    sc.particle = ParticleModel::make(1e-18, PolarizabilityModel::lorentz(4e-39, 7e15, 1e12));
    sc.medium = MediumModel::perfect_mirror();
    sc.environment = ThermalEnvironment{300.0};

    std::printf("# z [m]    Lambda_xx [1/m^2 s]   (free, surface)        D = 2 hbar^2 Lambda\n");
    for (double z : {2e-7, 1e-6, 5e-6, 2.5e-5}) {
        sc.z = z;
        const auto set = compute_coefficient_set(sc, false);
        std::printf("%9.2e  %12.6e  (%.4e, %+.4e)  %12.6e\n", z, set.lambda.total[0][0],
                    set.lambda.free[0][0], set.lambda.surface[0][0],
                    set.diffusion.total[0][0]);
    }

    // decoherence factor from accumulated momentum kicks vs the master-equation
    // exponent at one separation
    sc.z = 1e-6;
    const auto set = compute_coefficient_set(sc, false);
    const double hbar = sc.constants.hbar;
    const double dt = 1.0;
    auto kicks = sample_kicks(set.diffusion.total, dt, 100000, 42);
    const double a =
        std::sqrt(2.0 * hbar * hbar / (set.diffusion.total[0][0] * dt)); // unit exponent
    std::printf("\nkick-ensemble factor at unit exponent: %.4f (expected %.4f)\n",
                decoherence_factor(kicks, Vec2{a, 0.0}, hbar), std::exp(-1.0));
    return 0;
}
