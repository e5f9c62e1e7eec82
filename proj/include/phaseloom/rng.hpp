#pragma once

#include <array>
#include <cstdint>

namespace phaseloom {

// Counter-based random generator: Philox-4x32-10 (Salmon et al., the
// Random123 reference constants). A generator is identified by a 64-bit
// seed (the key) and a 64-bit stream id; draws are a pure function of
// (seed, stream, block index), so streams can be consumed in parallel
// and results never depend on thread scheduling.
std::array<std::uint32_t, 4> philox4x32(const std::array<std::uint32_t, 4>& counter,
                                        const std::array<std::uint32_t, 2>& key);

class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream)
        : seed_(seed), stream_(stream) {}

    std::uint32_t next_u32();
    std::uint64_t next_u64();

    // Uniform on [0, 1) with 53-bit resolution.
    double next_double();

    // Standard normal via Box-Muller (consumes uniforms in pairs).
    double next_gaussian();

    // Poisson(lambda). Inversion by search for small lambda, Hormann's
    // PTRD transformed rejection otherwise. lambda must be >= 0.
    std::uint64_t next_poisson(double lambda);

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t block_index_ = 0;
    std::array<std::uint32_t, 4> buffer_{};
    int buffered_ = 0;
    double gaussian_spare_ = 0.0;
    bool has_gaussian_spare_ = false;
};

// Mixes any number of 64-bit values into one (splitmix64 finalizer
// chain). Used to derive per-run and per-pixel stream keys.
std::uint64_t hash64(std::uint64_t a);
std::uint64_t hash64(std::uint64_t a, std::uint64_t b);
std::uint64_t hash64(std::uint64_t a, std::uint64_t b, std::uint64_t c);

}  // namespace phaseloom
