#include "phaseloom/rng.hpp"

#include <cmath>

#include "phaseloom/errors.hpp"

namespace phaseloom {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(const std::array<std::uint32_t, 4>& counter,
                                        const std::array<std::uint32_t, 2>& key) {
    std::array<std::uint32_t, 4> x = counter;
    std::uint32_t k0 = key[0];
    std::uint32_t k1 = key[1];
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kPhiloxM0, x[0], hi0, lo0);
        mulhilo(kPhiloxM1, x[2], hi1, lo1);
        x = {hi1 ^ x[1] ^ k0, lo1, hi0 ^ x[3] ^ k1, lo0};
        k0 += kWeyl0;
        k1 += kWeyl1;
    }
    return x;
}

std::uint32_t CounterRng::next_u32() {
    if (buffered_ == 0) {
        const std::array<std::uint32_t, 4> counter = {
            static_cast<std::uint32_t>(block_index_),
            static_cast<std::uint32_t>(block_index_ >> 32),
            static_cast<std::uint32_t>(stream_),
            static_cast<std::uint32_t>(stream_ >> 32)};
        const std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(seed_),
                                                  static_cast<std::uint32_t>(seed_ >> 32)};
        buffer_ = philox4x32(counter, key);
        ++block_index_;
        buffered_ = 4;
    }
    return buffer_[4 - buffered_--];
}

std::uint64_t CounterRng::next_u64() {
    const std::uint64_t hi = next_u32();
    const std::uint64_t lo = next_u32();
    return (hi << 32) | lo;
}

double CounterRng::next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double CounterRng::next_gaussian() {
    if (has_gaussian_spare_) {
        has_gaussian_spare_ = false;
        return gaussian_spare_;
    }
    double u1 = next_double();
    const double u2 = next_double();
    if (u1 <= 0.0) u1 = 0x1.0p-53;  // keep log finite
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * M_PI * u2;
    gaussian_spare_ = radius * std::sin(angle);
    has_gaussian_spare_ = true;
    return radius * std::cos(angle);
}

std::uint64_t CounterRng::next_poisson(double lambda) {
    if (!(lambda >= 0.0)) throw DomainError("poisson rate must be >= 0");
    if (lambda == 0.0) return 0;
    if (lambda < 10.0) {
        // Inversion by sequential search on the cdf.
        const double limit = std::exp(-lambda);
        std::uint64_t k = 0;
        double product = next_double();
        while (product > limit) {
            ++k;
            product *= next_double();
        }
        return k;
    }
    // PTRD, W. Hormann, "The transformed rejection method for generating
    // Poisson random variables" (1993). Exact for lambda >= 10.
    const double smu = std::sqrt(lambda);
    const double b = 0.931 + 2.53 * smu;
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    const double log_lambda = std::log(lambda);
    for (;;) {
        double u = next_double() - 0.5;
        double v = next_double();
        const double us = 0.5 - std::abs(u);
        const double kf = std::floor((2.0 * a / us + b) * u + lambda + 0.43);
        if (us >= 0.07 && v <= v_r) return static_cast<std::uint64_t>(kf);
        if (kf < 0.0 || (us < 0.013 && v > us)) continue;
        const double lhs = std::log(v * inv_alpha / (a / (us * us) + b));
        const double rhs = kf * log_lambda - lambda - std::lgamma(kf + 1.0);
        if (lhs <= rhs) return static_cast<std::uint64_t>(kf);
    }
}

std::uint64_t hash64(std::uint64_t a) { return splitmix64(a); }

std::uint64_t hash64(std::uint64_t a, std::uint64_t b) {
    return splitmix64(splitmix64(a) ^ b);
}

std::uint64_t hash64(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    return splitmix64(splitmix64(splitmix64(a) ^ b) ^ c);
}

}  // namespace phaseloom
