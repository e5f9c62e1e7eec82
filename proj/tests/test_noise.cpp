#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "phaseloom/errors.hpp"
#include "phaseloom/noise.hpp"
#include "support/test_util.hpp"

using namespace phaseloom;

TEST_CASE("disabled pipeline is the exact identity") {
    NoiseSpec spec;
    spec.poisson_enabled = false;
    spec.gaussian_enabled = false;
    const RealField img = testutil::random_positive_field({64, 64}, 5);
    const auto out = add_noise({img, img}, spec);
    REQUIRE(out.size() == 2);
    for (std::size_t i = 0; i < img.size(); ++i) {
        CHECK(out[0][i] == img[i]);
        CHECK(out[1][i] == img[i]);
    }
}

TEST_CASE("same seed gives bitwise identical output, different seed differs") {
    NoiseSpec spec;
    spec.seed = 99;
    const RealField img = testutil::random_positive_field({32, 32}, 6);
    const auto a = add_noise({img}, spec);
    const auto b = add_noise({img}, spec);
    bool identical = true;
    for (std::size_t i = 0; i < img.size(); ++i) identical = identical && a[0][i] == b[0][i];
    CHECK(identical);

    spec.seed = 100;
    const auto c = add_noise({img}, spec);
    bool differs = false;
    for (std::size_t i = 0; i < img.size(); ++i) differs = differs || a[0][i] != c[0][i];
    CHECK(differs);
}

TEST_CASE("input is left untouched") {
    NoiseSpec spec;
    spec.seed = 1;
    const RealField img = testutil::random_positive_field({16, 16}, 7);
    const RealField copy = img;
    (void)add_noise({img}, spec);
    for (std::size_t i = 0; i < img.size(); ++i) CHECK(img[i] == copy[i]);
}

TEST_CASE("gaussian stage hits the requested snr on a large constant image") {
    NoiseSpec spec;
    spec.poisson_enabled = false;
    spec.gaussian_enabled = true;
    spec.snr_db = 10.0;
    spec.seed = 11;
    const RealField img({1000, 1000}, 3.0);
    const auto noisy = add_noise({img}, spec);
    // measure against the unclamped signal; clamping affects few pixels at 10 dB
    double sig = 0.0, noi = 0.0;
    for (std::size_t i = 0; i < img.size(); ++i) {
        sig += img[i] * img[i];
        const double d = noisy[0][i] - img[i];
        noi += d * d;
    }
    const double snr_db = 10.0 * std::log10(sig / noi);
    CHECK(std::abs(snr_db - 10.0) <= 0.5);
}

TEST_CASE("poisson stage preserves the peak and the mean at a large budget") {
    NoiseSpec spec;
    spec.poisson_enabled = true;
    spec.gaussian_enabled = false;
    spec.peak_photons = 1e4;
    spec.seed = 21;
    RealField img({200, 200}, 0.0);
    for (std::size_t i = 0; i < img.size(); ++i) img[i] = 0.5 + 0.5 * ((i * 37) % 100) / 100.0;
    const double peak_before = 0.995;
    const auto noisy = add_noise({img}, spec);
    double peak_after = 0.0, mean_in = 0.0, mean_out = 0.0;
    for (std::size_t i = 0; i < img.size(); ++i) {
        peak_after = std::max(peak_after, noisy[0][i]);
        mean_in += img[i];
        mean_out += noisy[0][i];
    }
    CHECK(peak_after == doctest::Approx(peak_before).epsilon(1e-12));
    CHECK(mean_out / mean_in == doctest::Approx(1.0).epsilon(0.01));
    bool changed = false;
    for (std::size_t i = 0; i < img.size(); ++i) changed = changed || noisy[0][i] != img[i];
    CHECK(changed);
}

TEST_CASE("output has no negative entries") {
    NoiseSpec spec;
    spec.snr_db = -5.0;  // violent noise to force many negatives pre-clamp
    spec.poisson_enabled = false;
    spec.seed = 31;
    const RealField img({64, 64}, 1.0);
    const auto noisy = add_noise({img}, spec);
    for (double v : noisy[0].data) CHECK(v >= 0.0);
}

TEST_CASE("invalid inputs are rejected") {
    NoiseSpec spec;
    RealField img({4, 4}, 1.0);
    img[3] = -0.25;
    CHECK_THROWS_AS(add_noise({img}, spec), DomainError);

    NoiseSpec bad;
    bad.peak_photons = 0.0;
    CHECK_THROWS_AS(add_noise({RealField({4, 4}, 1.0)}, bad), ParameterError);
}
