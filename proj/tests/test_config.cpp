#include <doctest.h>

#include <string>

#include "qbrown/config.hpp"

using namespace qbrown;

namespace {
const char* kMinimal = R"(
# minimal scenario: mirror, single height, single temperature
[medium]
type = mirror
[geometry]
z = 1e-6
[environment]
temperature = 300
)";
} // namespace

TEST_CASE("minimal config fills defaults and validates") {
    RunConfig cfg = parse_config_text(kMinimal);
    CHECK(cfg.medium_kind == "mirror");
    CHECK(cfg.z.values.size() == 1);
    CHECK(cfg.z.values[0] == 1e-6);
    CHECK(cfg.temperature.values[0] == 300.0);
    CHECK(cfg.spectral.u_max == 60.0);
    CHECK(cfg.kpar.propagating_nodes == 64);
    CHECK(cfg.kpar.evanescent_nodes == 128);
    CHECK(cfg.outputs.size() == 4);
    CHECK_FALSE(cfg.phase_space);
}

TEST_CASE("validation errors name the offending fields and accumulate") {
    const char* bad = R"(
[particle]
mass = -2
[medium]
type = drude
omega_p = 1e16
gamma_d = 0
[environment]
temperature = -10
)";
    try {
        parse_config_text(bad);
        FAIL("expected config_error");
    } catch (const config_error& e) {
        const std::string msg = e.what();
        CHECK(msg.find("particle.mass") != std::string::npos);
        CHECK(msg.find("medium.gamma_d") != std::string::npos);
        CHECK(msg.find("environment.temperature") != std::string::npos);
    }
}

TEST_CASE("sweeps must have at least two points and increase") {
    try {
        parse_config_text("[geometry]\nz = list 1e-6\n");
        FAIL("expected config_error");
    } catch (const config_error& e) {
        CHECK(std::string(e.what()).find("at least 2 points") != std::string::npos);
    }
    try {
        parse_config_text("[geometry]\nz = list 2e-6 1e-6\n");
        FAIL("expected config_error");
    } catch (const config_error& e) {
        CHECK(std::string(e.what()).find("strictly increasing") != std::string::npos);
    }
    RunConfig log_cfg = parse_config_text("[geometry]\nz = log 1e-7 1e-4 4\n");
    REQUIRE(log_cfg.z.values.size() == 4);
    CHECK(log_cfg.z.values[0] == doctest::Approx(1e-7));
    CHECK(log_cfg.z.values[3] == doctest::Approx(1e-4));
    CHECK(log_cfg.z.values[1] == doctest::Approx(1e-6));
}

TEST_CASE("parse errors carry line numbers") {
    try {
        parse_config_text("valid = 1\n[unterminated\n");
        FAIL("expected config_error");
    } catch (const config_error& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
    try {
        parse_config_text("\n\nno equals sign here\n");
        FAIL("expected config_error");
    } catch (const config_error& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
    // 'valid = 1' alone is an unknown key
    try {
        parse_config_text("valid = 1\n");
        FAIL("expected config_error");
    } catch (const config_error& e) {
        CHECK(std::string(e.what()).find("unknown key") != std::string::npos);
    }
}

TEST_CASE("unknown enum values are rejected with options listed") {
    try {
        parse_config_text("[medium]\ntype = metal\n");
        FAIL("expected config_error");
    } catch (const config_error& e) {
        const std::string msg = e.what();
        CHECK(msg.find("drude") != std::string::npos);
        CHECK(msg.find("metal") != std::string::npos);
    }
}

TEST_CASE("drag at zero temperature is rejected at load time") {
    try {
        parse_config_text("[environment]\ntemperature = 0\n[outputs]\ncoefficients = drag\n");
        FAIL("expected config_error");
    } catch (const config_error& e) {
        CHECK(std::string(e.what()).find("drag") != std::string::npos);
    }
    // but lambda at T = 0 is fine
    RunConfig cfg = parse_config_text(
        "[environment]\ntemperature = 0\n[outputs]\ncoefficients = lambda\n");
    CHECK(cfg.temperature.values[0] == 0.0);
}

TEST_CASE("canonicalization round-trips") {
    const char* cfg_text = R"(
constants = natural
seed = 42
[particle]
mass = 2
polarizability = lorentz
alpha0 = 0.5
omega0 = 2
gamma = 0.1
[medium]
type = drude
omega_p = 1.1
gamma_d = 0.05
[geometry]
z = list 0.5 1.0 2.0
[environment]
temperature = 1
[outputs]
coefficients = lambda diffusion
phase_space = on
)";
    const RunConfig a = parse_config_text(cfg_text);
    const std::string canon_a = canonical_config(a);
    const RunConfig b = parse_config_text(canon_a);
    const std::string canon_b = canonical_config(b);
    CHECK(canon_a == canon_b);
    CHECK(b.seed == 42);
    CHECK(b.z.values.size() == 3);
    CHECK(b.phase_space);
}
