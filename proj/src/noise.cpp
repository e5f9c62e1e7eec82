#include "phaseloom/noise.hpp"

#include <algorithm>
#include <cmath>

#include "phaseloom/errors.hpp"
#include "phaseloom/rng.hpp"

namespace phaseloom {

namespace {

constexpr std::uint64_t kPoissonTag = 0x706F6973ull;   // "pois"
constexpr std::uint64_t kGaussianTag = 0x67617573ull;  // "gaus"

double peak_of(const RealField& img) {
    double peak = 0.0;
    for (double v : img.data) peak = std::max(peak, v);
    return peak;
}

}  // namespace

std::vector<RealField> add_noise(const std::vector<RealField>& images, const NoiseSpec& spec) {
    if (spec.poisson_enabled && !(spec.peak_photons > 0.0))
        throw ParameterError("peak_photons must be positive when the Poisson stage is enabled");
    for (const RealField& img : images)
        for (double v : img.data)
            if (!(v >= 0.0)) throw DomainError("add_noise: input intensities must be >= 0");

    std::vector<RealField> out = images;
    for (std::size_t d = 0; d < out.size(); ++d) {
        RealField& img = out[d];

        if (spec.poisson_enabled) {
            const double original_peak = peak_of(img);
            if (original_peak > 0.0) {
                // Normalize to unit peak, draw per-pixel photon counts at
                // the photon budget, then restore the original peak.
                for (std::size_t i = 0; i < img.size(); ++i) {
                    CounterRng rng(spec.seed, hash64(kPoissonTag, d, i));
                    const double rate = img[i] / original_peak * spec.peak_photons;
                    img[i] = static_cast<double>(rng.next_poisson(rate)) / spec.peak_photons;
                }
                const double noisy_peak = peak_of(img);
                if (noisy_peak > 0.0) {
                    const double scale = original_peak / noisy_peak;
                    for (double& v : img.data) v *= scale;
                }
            }
        }

        if (spec.gaussian_enabled && std::isfinite(spec.snr_db)) {
            double power = 0.0;
            for (double v : img.data) power += v * v;
            power /= static_cast<double>(img.size());
            const double sigma = std::sqrt(power / std::pow(10.0, spec.snr_db / 10.0));
            if (sigma > 0.0) {
                for (std::size_t i = 0; i < img.size(); ++i) {
                    CounterRng rng(spec.seed, hash64(kGaussianTag, d, i));
                    img[i] += sigma * rng.next_gaussian();
                }
            }
        }

        if (spec.poisson_enabled || spec.gaussian_enabled)
            for (double& v : img.data) v = std::max(0.0, v);
    }
    return out;
}

}  // namespace phaseloom
