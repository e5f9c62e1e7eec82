// Scratch numeric probes used during development; removed before release.
#include <cstdio>
#include <cmath>
#include <vector>

#include "phaseloom/analysis.hpp"
#include "phaseloom/fft.hpp"
#include "phaseloom/field.hpp"
#include "phaseloom/forward_model.hpp"
#include "phaseloom/grid.hpp"
#include "phaseloom/noise.hpp"
#include "phaseloom/projectors.hpp"
#include "phaseloom/rng.hpp"
#include "phaseloom/solvers.hpp"
#include "phaseloom/zernike.hpp"

using namespace phaseloom;

int main() {
    // 1. Philox known-answer probe.
    {
        auto r = philox4x32({0, 0, 0, 0}, {0, 0});
        std::printf("philox zero: %08x %08x %08x %08x\n", r[0], r[1], r[2], r[3]);
        auto r2 = philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                             {0xffffffffu, 0xffffffffu});
        std::printf("philox ones: %08x %08x %08x %08x\n", r2[0], r2[1], r2[2], r2[3]);
    }

    // 2. FFT unitarity + adjoint round trip on 32x32, m=3.
    {
        Grid grid(32, 10.0);
        CounterRng rng(7, 1);
        std::vector<double> z = {-1.0, 0.0, 1.0};
        PropagationSpec spec(grid, make_diversities(z, grid));
        ComplexField x = ComplexField::grid(32);
        for (auto& v : x.data) v = cdouble(rng.next_gaussian(), rng.next_gaussian());
        ComplexField y = propagate(x, spec);
        std::printf("isometry |My|/|x| - 1 = %.3e\n", norm(y) / norm(x) - 1.0);
        ComplexField xb = adjoint(y, spec);
        double err = 0;
        for (size_t i = 0; i < x.size(); ++i) err += std::norm(xb[i] - x[i]);
        std::printf("roundtrip err = %.3e\n", std::sqrt(err) / norm(x));
    }

    // 3. Zernike Gram on 256 grid with Table-1 radius.
    {
        Grid grid = Grid::from_physical(256, 0.25, 0.633, 0.44);
        std::printf("radius_px(256) = %.3f  aperture px = %zu\n", grid.aperture_radius_px(),
                    grid.aperture_pixel_count());
        auto basis = zernike_basis(10, grid);
        double worst = 0;
        const double n_ap = static_cast<double>(grid.aperture_pixel_count());
        for (int a = 0; a < 10; ++a)
            for (int b = 0; b <= a; ++b) {
                double g = dot(basis[a], basis[b]) / n_ap;
                double target = (a == b) ? 1.0 : 0.0;
                worst = std::max(worst, std::abs(g - target));
            }
        std::printf("gram max deviation (first 10) = %.4f\n", worst);
    }

    // 4. sigma2 on 16x16, m=5 defocus diversities, smooth random truth.
    {
        Grid grid = Grid::from_physical(16, 0.25, 0.633, 0.44);
        std::printf("16x16 radius = %.3f px, aperture = %zu px\n", grid.aperture_radius_px(),
                    grid.aperture_pixel_count());
        PropagationSpec spec(grid, make_diversities({-2, -1, 0, 1, 2}, grid));
        // truth: uniform amplitude, smooth phase from a few Zernikes
        ComplexField x_hat = ComplexField::grid(16);
        CounterRng rng(42, 0);
        std::vector<RealField> zb = zernike_basis(8, grid);
        RealField phase = RealField::grid(16);
        for (size_t j = 1; j < zb.size(); ++j) {
            double c = rng.next_gaussian() * 0.5;
            for (size_t i = 0; i < phase.size(); ++i) phase[i] += c * zb[j][i];
        }
        for (size_t i = 0; i < x_hat.size(); ++i)
            if (grid.inside(i)) x_hat[i] = std::polar(1.0, phase[i]);
        ComplexField y_hat = propagate(x_hat, spec);
        double min_mag = 1e300, max_mag = 0;
        for (auto& v : y_hat.data) {
            min_mag = std::min(min_mag, std::abs(v));
            max_mag = std::max(max_mag, std::abs(v));
        }
        std::printf("min |y| = %.3e max = %.3e\n", min_mag, max_mag);
        SpectralReport rep = spectral_report_dense(x_hat, spec);
        std::printf("dense: s1=%.12f s2=%.6f smin=%.3e align=%.12f\n", rep.sigma1,
                    rep.sigma2, rep.sigma_min, rep.u1_alignment);
        SpectralReport rp = spectral_report_power(x_hat, spec);
        std::printf("power: s2=%.8f (dense %.8f) diff=%.2e\n", rp.sigma2, rep.sigma2,
                    std::abs(rp.sigma2 - rep.sigma2));
    }

    // 5. Poisson sampler statistics.
    {
        for (double lam : {0.5, 5.0, 50.0, 5000.0}) {
            CounterRng rng(9, static_cast<uint64_t>(lam * 100));
            const int nsamp = 200000;
            double s = 0, s2 = 0;
            for (int i = 0; i < nsamp; ++i) {
                double k = static_cast<double>(rng.next_poisson(lam));
                s += k;
                s2 += k * k;
            }
            double mean = s / nsamp;
            double var = s2 / nsamp - mean * mean;
            std::printf("poisson lam=%.1f mean=%.3f var=%.3f\n", lam, mean, var);
        }
    }

    // 6. Gaussian SNR probe: constant image, 10 dB.
    {
        RealField img({1000, 1000}, 2.5);
        NoiseSpec ns;
        ns.poisson_enabled = false;
        ns.gaussian_enabled = true;
        ns.snr_db = 10.0;
        ns.seed = 11;
        auto noisy = add_noise({img}, ns);
        // measure SNR before clamping bias: reconstruct noise as out-in
        double sig = 0, noi = 0;
        for (size_t i = 0; i < img.size(); ++i) {
            sig += img[i] * img[i];
            double d = noisy[0][i] - img[i];
            noi += d * d;
        }
        std::printf("empirical gaussian SNR = %.3f dB\n", 10 * std::log10(sig / noi));
    }
    return 0;
}
