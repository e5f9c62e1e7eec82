#pragma once

#include <cstdint>
#include <vector>

#include "phaseloom/field.hpp"

namespace phaseloom {

// Two-stage detector noise: shot noise on peak-normalized images at an
// explicit photon budget, then additive white Gaussian noise at a target
// SNR relative to the measured image power, then clamping of negatives.
struct NoiseSpec {
    double snr_db = 10.0;
    double peak_photons = 1e4;
    std::uint64_t seed = 0;
    bool poisson_enabled = true;
    bool gaussian_enabled = true;
};

// Pure function of (images, spec); bitwise reproducible for a fixed
// seed regardless of evaluation order. Negative inputs are rejected.
std::vector<RealField> add_noise(const std::vector<RealField>& images, const NoiseSpec& spec);

}  // namespace phaseloom
