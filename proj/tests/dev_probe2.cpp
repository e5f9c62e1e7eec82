// Scratch probe: DRAP empirical rate vs sigma2 on 16x16 instances.
#include <cstdio>
#include <cmath>
#include <vector>

#include "phaseloom/analysis.hpp"
#include "phaseloom/field.hpp"
#include "phaseloom/forward_model.hpp"
#include "phaseloom/grid.hpp"
#include "phaseloom/projectors.hpp"
#include "phaseloom/rng.hpp"
#include "phaseloom/solvers.hpp"
#include "phaseloom/zernike.hpp"

using namespace phaseloom;

static ComplexField make_truth(const Grid& grid, uint64_t seed, double coeff_scale) {
    CounterRng rng(seed, 0);
    auto zb = zernike_basis(8, grid);
    RealField phase = RealField::grid(grid.side());
    for (size_t j = 1; j < zb.size(); ++j) {
        double c = rng.next_gaussian() * coeff_scale;
        for (size_t i = 0; i < phase.size(); ++i) phase[i] += c * zb[j][i];
    }
    ComplexField x = ComplexField::grid(grid.side());
    for (size_t i = 0; i < x.size(); ++i)
        if (grid.inside(i)) x[i] = std::polar(1.0, phase[i]);
    return x;
}

int main() {
    for (double radius : {2.78, 4.0, 5.0, 6.0, 7.0}) {
        Grid grid(16, radius);
        PropagationSpec spec(grid, make_diversities({-2, -1, 0, 1, 2}, grid));
        ComplexField x_hat = make_truth(grid, 42, 0.5);
        ComplexField y_hat = propagate(x_hat, spec);
        double min_mag = 1e300;
        for (auto& v : y_hat.data) min_mag = std::min(min_mag, std::abs(v));

        SpectralReport rep = spectral_report_dense(x_hat, spec);

        // measurement and env
        RealField r(y_hat.shape);
        for (size_t i = 0; i < y_hat.size(); ++i) r[i] = std::norm(y_hat[i]);
        Measurement meas(r);
        Prior prior = Prior::none();
        SolveEnv env{spec, prior, meas};

        // perturbed start at dist_opt ~ 0.01 ||x_hat||
        CounterRng rng(7, 3);
        ComplexField g = ComplexField::grid(16);
        for (auto& v : g.data) v = cdouble(rng.next_gaussian(), rng.next_gaussian());
        double d1 = dist_opt(lincomb(1.0, x_hat, 1.0, g), x_hat);
        double t = 0.01 * norm(x_hat) / d1;
        ComplexField x0 = lincomb(1.0, x_hat, t, g);
        // refine
        double d = dist_opt(x0, x_hat);
        t *= 0.01 * norm(x_hat) / d;
        x0 = lincomb(1.0, x_hat, t, g);
        ComplexField y0 = propagate(x0, spec);

        Schedule sched({SolverSpec(OperatorKind::DRAP, 0.45, 500)});
        RunOptions opts;
        opts.reference = &x_hat;
        RunResult res = run(sched, y0, env, opts);
        // find first iter reaching 1e-8 * ||x_hat||
        double target = 1e-8 * norm(x_hat);
        size_t hit = 0;
        bool reached = false;
        for (auto& row : res.trace)
            if (row.dist_opt <= target) { hit = row.iter; reached = true; break; }
        // empirical contraction on pre-floor segment
        Trace trunc;
        for (auto& row : res.trace) {
            trunc.push_back(row);
            if (row.dist_opt <= target) break;
        }
        double rate = 0;
        try {
            rate = contraction_estimate(trunc, 20);
        } catch (...) { rate = -1; }
        std::printf(
            "radius=%.2f ap=%3zu min|y|=%.1e  s2=%.6f  reached=%d at %zu  rate=%.4f\n",
            radius, grid.aperture_pixel_count(), min_mag, rep.sigma2, reached ? 1 : 0,
            hit, rate);
    }
    return 0;
}
