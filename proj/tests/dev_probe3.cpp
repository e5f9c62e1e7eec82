// Scratch probe: noisy 128x128 pipeline quality (smoothed rms, solver ordering).
#include <cstdio>
#include <cmath>
#include <vector>

#include "phaseloom/analysis.hpp"
#include "phaseloom/field.hpp"
#include "phaseloom/forward_model.hpp"
#include "phaseloom/grid.hpp"
#include "phaseloom/noise.hpp"
#include "phaseloom/projectors.hpp"
#include "phaseloom/rng.hpp"
#include "phaseloom/solvers.hpp"
#include "phaseloom/zernike.hpp"

using namespace phaseloom;

static RealField smooth_truth_phase(const Grid& grid, uint64_t seed, double target_rms) {
    CounterRng rng(seed, 0);
    auto zb = zernike_basis(15, grid);
    RealField phase = RealField::grid(grid.side());
    for (size_t j = 1; j < zb.size(); ++j) {
        double c = rng.next_gaussian();
        for (size_t i = 0; i < phase.size(); ++i) phase[i] += c * zb[j][i];
    }
    // piston-removed rms over aperture -> target
    double mean = 0;
    for (size_t i = 0; i < phase.size(); ++i)
        if (grid.inside(i)) mean += phase[i];
    mean /= grid.aperture_pixel_count();
    double rms = 0;
    for (size_t i = 0; i < phase.size(); ++i)
        if (grid.inside(i)) rms += (phase[i] - mean) * (phase[i] - mean);
    rms = std::sqrt(rms / grid.aperture_pixel_count());
    double s = target_rms / rms;
    double maxabs = 0;
    for (size_t i = 0; i < phase.size(); ++i) {
        phase[i] = grid.inside(i) ? (phase[i] - mean) * s : 0.0;
        maxabs = std::max(maxabs, std::abs(phase[i]));
    }
    std::printf("  truth rms=%.3f maxabs=%.3f\n", target_rms, maxabs);
    return phase;
}

int main(int argc, char**) {
    const size_t side = 128;
    Grid grid = Grid::from_physical(side, 0.25, 0.633, 0.44);
    std::printf("radius=%.2f px aperture=%zu\n", grid.aperture_radius_px(),
                grid.aperture_pixel_count());
    PropagationSpec spec(grid, make_diversities({-2, -1, 0, 1, 2}, grid));
    const size_t m = 5;

    for (uint64_t seed = 1; seed <= (argc > 1 ? 5u : 1u); ++seed) {
        RealField truth_phase = smooth_truth_phase(grid, 1000 + seed, 1.0);
        RealField amp = grid.mask_field();
        ComplexField x_hat = ComplexField::grid(side);
        for (size_t i = 0; i < x_hat.size(); ++i)
            if (grid.inside(i)) x_hat[i] = std::polar(1.0, truth_phase[i]);

        auto psfs = simulate_psfs(amp, truth_phase, spec);
        NoiseSpec ns;
        ns.poisson_enabled = true;
        ns.gaussian_enabled = true;
        ns.peak_photons = 1e4;
        ns.snr_db = 10.0;
        ns.seed = 500 + seed;
        auto noisy = add_noise(psfs, ns);

        RealField r({m, side, side});
        for (size_t d = 0; d < m; ++d)
            for (size_t i = 0; i < side * side; ++i)
                r[d * side * side + i] = noisy[d][i] / static_cast<double>(m);
        Measurement meas(r);
        Prior prior = Prior::none();
        SolveEnv env{spec, prior, meas};

        ComplexField y0 = init_random(spec, prior, grid, 900 + seed);

        for (const char* solver : {"DRAP", "RAAR", "AP"}) {
            Schedule sched =
                std::string(solver) == "DRAP"
                    ? Schedule({SolverSpec(OperatorKind::DRAP, 0.45, 100),
                                SolverSpec(OperatorKind::AP, 0.0, 20)})
                    : (std::string(solver) == "RAAR"
                           ? Schedule({SolverSpec(OperatorKind::RAAR, 0.8, 120)})
                           : Schedule({SolverSpec(OperatorKind::AP, 0.0, 120)}));
            RunOptions opts;
            opts.reference = &x_hat;
            opts.truth_phase = &truth_phase;
            opts.grid = &grid;
            RunResult res = run(sched, y0, env, opts);

            // restored phase from final iterate
            ComplexField x_rec = spec.apply_adjoint(res.y_final);
            cdouble alpha = optimal_phase(x_rec, x_hat);
            RealField phase_rec = RealField::grid(side);
            for (size_t i = 0; i < x_rec.size(); ++i)
                phase_rec[i] = grid.inside(i) ? std::arg(alpha * x_rec[i]) : 0.0;
            RealField smoothed = zernike_smooth(phase_rec, 37, grid);
            double rms_raw = rms_error(phase_rec, truth_phase, grid);
            double rms_sm = rms_error(smoothed, truth_phase, grid);
            // rms at iteration 100 and trailing std over iterations 101..120
            double rms_100 = res.trace[99].rms.value();
            double mean_t = 0, sd = 0;
            for (size_t k = 100; k < 120; ++k) mean_t += res.trace[k].rms.value();
            mean_t /= 20;
            for (size_t k = 100; k < 120; ++k) {
                double dvi = res.trace[k].rms.value() - mean_t;
                sd += dvi * dvi;
            }
            sd = std::sqrt(sd / 20);
            std::printf("  seed=%llu %-4s raw=%.4f smoothed=%.4f rms@100=%.4f trail_sd=%.5f\n",
                        (unsigned long long)seed, solver, rms_raw, rms_sm, rms_100, sd);
        }
    }
    return 0;
}
