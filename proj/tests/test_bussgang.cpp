#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fhq/quantizer.hpp"

#include <cmath>
#include <complex>

using namespace fhq;

TEST_CASE("three-bit quantizer satisfies the Bussgang identities") {
    const auto cb = design_lloyd_max(3);
    BussgangSetup setup;
    setup.seed = 2024;
    const auto r = bussgang_check(cb, setup);
    CHECK(r.sample_count == 1'000'000);
    CHECK(std::abs(r.estimated_gain - (1.0 - cb.distortion)) < 0.005);
    CHECK(std::abs(r.estimated_gain.real() - 0.9655) < 0.005);
    CHECK(std::abs(r.cross_correlation_x_eta) < 0.01);
    CHECK(std::abs(r.cross_correlation_y_eta) < 0.01);
    CHECK(std::abs(r.output_power_ratio - 1.0) < 0.01);
    CHECK(r.input_power == doctest::Approx(2.0).epsilon(0.01));
}

TEST_CASE("identities hold for a complex channel and a different noise level") {
    const auto cb = design_lloyd_max(2);
    BussgangSetup setup;
    setup.signal_power = 2.5;
    setup.channel = {0.6, -0.8};
    setup.noise_var = 0.3;
    setup.sample_count = 500'000;
    setup.seed = 5;
    const auto r = bussgang_check(cb, setup);
    CHECK(std::abs(r.estimated_gain - (1.0 - cb.distortion)) < 0.005);
    CHECK(std::abs(r.cross_correlation_x_eta) < 0.01);
    CHECK(std::abs(r.output_power_ratio - 1.0) < 0.01);
    CHECK(r.input_power == doctest::Approx(2.8).epsilon(0.01));
}

TEST_CASE("parallel and serial checks agree bit for bit") {
    const auto cb = design_lloyd_max(2);
    BussgangSetup setup;
    setup.sample_count = 3 * kBussgangChunk + 12345;
    setup.seed = 99;
    const auto a = bussgang_check(cb, setup);
    const auto b = bussgang_check_serial(cb, setup);
    CHECK(a.estimated_gain == b.estimated_gain);
    CHECK(a.cross_correlation_x_eta == b.cross_correlation_x_eta);
    CHECK(a.cross_correlation_y_eta == b.cross_correlation_y_eta);
    CHECK(a.output_power_ratio == b.output_power_ratio);
    CHECK(a.input_power == b.input_power);
    CHECK(a.sample_count == b.sample_count);
}

TEST_CASE("the check is deterministic in its seed") {
    const auto cb = design_lloyd_max(1);
    BussgangSetup setup;
    setup.sample_count = 100'000;
    setup.seed = 3;
    const auto a = bussgang_check(cb, setup);
    const auto b = bussgang_check(cb, setup);
    CHECK(a.estimated_gain == b.estimated_gain);
    setup.seed = 4;
    CHECK(bussgang_check(cb, setup).estimated_gain != a.estimated_gain);
}

TEST_CASE("degenerate inputs are rejected") {
    const auto cb = design_lloyd_max(1);
    BussgangSetup setup;
    setup.sample_count = 10;
    setup.signal_power = 0.0;
    CHECK_THROWS_AS(bussgang_check(cb, setup), std::invalid_argument);
    setup.signal_power = 1.0;
    setup.noise_var = -1.0;
    CHECK_THROWS_AS(bussgang_check(cb, setup), std::invalid_argument);
    setup.noise_var = 1.0;
    setup.sample_count = 0;
    CHECK_THROWS_AS(bussgang_check_serial(cb, setup), std::invalid_argument);
}
