#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fhq/rate_model.hpp"
#include "fhq/rng.hpp"

#include <cmath>
#include <random>

using namespace fhq;

TEST_CASE("stream_rate examples") {
    CHECK(stream_rate(1.0, 1.0, 1.0, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(stream_rate(5.0, 3.0, 0.1, 1.0) == 0.0);
    CHECK(stream_rate(1e12, 1e3, 1.0, 0.25) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(stream_rate(0.0, 2.0, 1.0, 0.1) == 0.0);
    CHECK(stream_rate(3.0, 1.0, 1.0, 0.0) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("stream_rate stays accurate at tiny SNR") {
    const double snr = 1e-14;
    CHECK(stream_rate(snr, 1.0, 1.0, 0.0) == doctest::Approx(snr / std::log(2.0)).epsilon(1e-10));
}

TEST_CASE("stream_rate rejects invalid inputs") {
    CHECK_THROWS_AS(stream_rate(-1.0, 1.0, 1.0, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(stream_rate(1.0, -1.0, 1.0, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(stream_rate(1.0, 1.0, 0.0, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(stream_rate(1.0, 1.0, 1.0, -0.1), std::invalid_argument);
    CHECK_THROWS_AS(stream_rate(1.0, 1.0, 1.0, 1.5), std::invalid_argument);
}

TEST_CASE("rate caps and monotonicity over random inputs") {
    Engine engine(derive_seed(42, 0));
    std::uniform_real_distribution<double> log_u(-4.0, 4.0), beta_u(1e-6, 1.0);
    for (int trial = 0; trial < 5000; ++trial) {
        const double p = std::pow(10.0, log_u(engine));
        const double s = std::pow(10.0, log_u(engine));
        const double n = std::pow(10.0, log_u(engine));
        const double beta = beta_u(engine);
        const double r = stream_rate(p, s, n, beta);
        CHECK(r >= 0.0);
        CHECK(r <= std::log2(1.0 / beta) * (1.0 + 1e-12));
        CHECK(r <= std::log1p(p * s * s / n) / std::log(2.0) * (1.0 + 1e-12));
        CHECK(stream_rate(2.0 * p, s, n, beta) >= r);
        CHECK(stream_rate(p, s, 2.0 * n, beta) <= r);
        CHECK(stream_rate(p, s, n, 0.5 * beta) >= r);
    }
}

TEST_CASE("sum_rate and ideal_rate") {
    const auto& model = DistortionModel::lloyd_max();
    const std::vector<double> s = {1.0, 1.0};

    auto two = make_allocation({1.0, 1.0}, {60, 60}, s, 1.0, model);
    CHECK(sum_rate(two, s, 1.0) == doctest::Approx(2.0).epsilon(1e-12));

    auto none = make_allocation({1.0, 1.0}, {0, 0}, s, 1.0, model);
    CHECK(sum_rate(none, s, 1.0) == 0.0);
    CHECK(none.active_count == 0);

    StreamAllocation unit;
    unit.powers = {1.0, 1.0};
    unit.distortions = {0.0, 0.0};
    CHECK(sum_rate(unit, s, 1.0) == doctest::Approx(2.0));

    CHECK(ideal_rate(std::vector<double>{3.0}, std::vector<double>{1.0}, 1.0) == doctest::Approx(2.0));
    CHECK(ideal_rate(std::vector<double>{1.0, 1.0}, std::vector<double>{1.0, std::sqrt(3.0)}, 1.0) ==
          doctest::Approx(3.0));
    CHECK(ideal_rate(unit.powers, s, 1.0) == doctest::Approx(sum_rate(unit, s, 1.0)).epsilon(1e-15));

    StreamAllocation bad;
    bad.powers = {1.0};
    CHECK_THROWS_AS(sum_rate(bad, s, 1.0), std::invalid_argument);
    bad.powers = {1.0, 1.0, 1.0};
    bad.distortions = {0.0, 0.0, 0.0};
    CHECK_THROWS_AS(sum_rate(bad, s, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(ideal_rate(bad.powers, s, 1.0), std::invalid_argument);
}

TEST_CASE("make_allocation keeps the stream invariants") {
    const auto& model = DistortionModel::lloyd_max();
    Engine engine(derive_seed(42, 1));
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> bits_u(0, 8);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> s = {3.0 * u(engine) + 2.0, 2.0 * u(engine) + 0.5, 0.4 * u(engine)};
        std::vector<double> p = {u(engine), u(engine) < 0.3 ? 0.0 : u(engine), u(engine)};
        std::vector<int> b = {bits_u(engine), bits_u(engine), bits_u(engine)};
        const auto a = make_allocation(p, b, s, 0.7, model);
        REQUIRE(a.size() == 3);
        CHECK(a.distortions.size() == 3);
        CHECK(a.stream_rates.size() == 3);
        double total = 0.0;
        int active = 0;
        for (std::size_t i = 0; i < 3; ++i) {
            CHECK(a.distortions[i] == model(b[i]));
            CHECK(a.stream_rates[i] == stream_rate(p[i], s[i], 0.7, model(b[i])));
            if (p[i] == 0.0 || b[i] == 0) CHECK(a.stream_rates[i] == 0.0);
            total += a.stream_rates[i];
            active += p[i] > 0.0 && b[i] > 0;
        }
        CHECK(a.sum_rate == doctest::Approx(total).epsilon(1e-15));
        CHECK(a.sum_rate == doctest::Approx(sum_rate(a, s, 0.7)).epsilon(1e-15));
        CHECK(a.sum_rate <= ideal_rate(p, s, 0.7) + 1e-12);
        CHECK(a.active_count == active);
        CHECK(a.total_bits() == b[0] + b[1] + b[2]);
    }
    CHECK_THROWS_AS(make_allocation({1.0}, {1, 2}, std::vector<double>{1.0, 1.0}, 1.0, model), std::invalid_argument);
    CHECK_THROWS_AS(make_allocation({1.0, 1.0}, {1, 2}, std::vector<double>{1.0}, 1.0, model), std::invalid_argument);
}
