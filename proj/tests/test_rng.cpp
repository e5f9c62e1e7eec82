#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "phaseloom/errors.hpp"
#include "phaseloom/rng.hpp"

using namespace phaseloom;

TEST_CASE("philox4x32-10 matches the reference known-answer vectors") {
    // Random123 kat_vectors for philox4x32x10.
    auto zero = philox4x32({0, 0, 0, 0}, {0, 0});
    CHECK(zero[0] == 0x6627e8d5u);
    CHECK(zero[1] == 0xe169c58du);
    CHECK(zero[2] == 0xbc57ac4cu);
    CHECK(zero[3] == 0x9b00dbd8u);

    auto ones = philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                           {0xffffffffu, 0xffffffffu});
    CHECK(ones[0] == 0x408f276du);
    CHECK(ones[1] == 0x41c83b0eu);
    CHECK(ones[2] == 0xa20bc7c6u);
    CHECK(ones[3] == 0x6d5451fdu);
}

TEST_CASE("streams are reproducible and independent") {
    CounterRng a(42, 7), b(42, 7), c(42, 8);
    bool same = true, differ = false;
    for (int i = 0; i < 64; ++i) {
        const auto va = a.next_u32();
        same = same && (va == b.next_u32());
        differ = differ || (va != c.next_u32());
    }
    CHECK(same);
    CHECK(differ);
}

TEST_CASE("uniform doubles land in [0,1) with a sane mean") {
    CounterRng rng(1, 0);
    double sum = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const double u = rng.next_double();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        sum += u;
    }
    CHECK(std::abs(sum / n - 0.5) < 0.01);
}

TEST_CASE("gaussian moments") {
    CounterRng rng(2, 0);
    const int n = 200000;
    double s = 0.0, s2 = 0.0, s3 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double g = rng.next_gaussian();
        s += g;
        s2 += g * g;
        s3 += g * g * g;
    }
    CHECK(std::abs(s / n) < 0.01);
    CHECK(std::abs(s2 / n - 1.0) < 0.02);
    CHECK(std::abs(s3 / n) < 0.05);
}

TEST_CASE("poisson moments across both sampler branches") {
    for (double lambda : {0.3, 2.0, 9.5, 30.0, 400.0, 20000.0}) {
        CounterRng rng(3, static_cast<std::uint64_t>(lambda * 10));
        const int n = 100000;
        double s = 0.0, s2 = 0.0;
        for (int i = 0; i < n; ++i) {
            const double k = static_cast<double>(rng.next_poisson(lambda));
            s += k;
            s2 += k * k;
        }
        const double mean = s / n;
        const double var = s2 / n - mean * mean;
        // mean and variance both equal lambda; allow ~5 sigma sampling slack
        const double mean_tol = 5.0 * std::sqrt(lambda / n);
        const double var_tol = 5.0 * lambda * std::sqrt(3.0 / n) + 0.05;
        CHECK(std::abs(mean - lambda) < std::max(mean_tol, 0.01));
        CHECK(std::abs(var - lambda) < var_tol);
    }
}

TEST_CASE("poisson edge cases") {
    CounterRng rng(4, 0);
    CHECK(rng.next_poisson(0.0) == 0);
    CHECK_THROWS_AS(rng.next_poisson(-1.0), DomainError);
}

TEST_CASE("hash64 mixes its arguments") {
    CHECK(hash64(1) != hash64(2));
    CHECK(hash64(1, 2) != hash64(2, 1));
    CHECK(hash64(1, 2, 3) != hash64(1, 2, 4));
    CHECK(hash64(0, 0, 0) != 0);
}
