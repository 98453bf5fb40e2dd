#include <doctest.h>

#include <cmath>

#include "mgsim/common.hpp"
#include "mgsim/filters.hpp"

using namespace mgsim;

TEST_CASE("low-pass fixed point: output equal to input stays put") {
    LowPass f(100.0, 1e-4, 42.0);
    for (int k = 0; k < 100; ++k) CHECK(f.update(42.0) == doctest::Approx(42.0).epsilon(1e-15));
}

TEST_CASE("low-pass step response tracks the analytic exponential") {
    // forward Euler at dt*wc = 0.01 stays within 1% of 1 - exp(-wc t)
    const double wc = 2.0 * 3.14159265358979323846 * 10.0;
    const double dt = 0.01 / wc;
    LowPass f(wc, dt);
    double t = 0.0;
    for (int k = 1; k <= 3000; ++k) {
        const double y = f.update(1.0);
        t = k * dt;
        const double ref = 1.0 - std::exp(-wc * t);
        if (ref > 0.05) CHECK(std::fabs(y - ref) / ref < 0.01);
    }
    CHECK(t > 3.0 / wc);  // ran well past the time constant
}

TEST_CASE("one large step at dt*wc just below 1 lands within 1% of the input") {
    LowPass f(0.99, 1.0);
    CHECK(f.update(1.0) == doctest::Approx(0.99));
}

TEST_CASE("unstable discretizations are rejected") {
    CHECK_THROWS_AS(LowPass(1.0, 1.0), ConfigError);
    CHECK_THROWS_AS(LowPass(2000.0, 1e-3), ConfigError);
    CHECK_THROWS_AS(LowPass(-5.0, 1e-3), ConfigError);
    CHECK_THROWS_AS(LowPass(5.0, -1e-3), ConfigError);
}

TEST_CASE("reset pins the state") {
    LowPass f(10.0, 1e-3, 0.0);
    f.update(100.0);
    f.reset(7.0);
    CHECK(f.value() == 7.0);
}
