// Scratch probe: zero-aberration noiseless instance, all six kinds, 50 iters.
#include <cstdio>
#include <cmath>
#include "phaseloom/analysis.hpp"
#include "phaseloom/forward_model.hpp"
#include "phaseloom/grid.hpp"
#include "phaseloom/projectors.hpp"
#include "phaseloom/solvers.hpp"

using namespace phaseloom;

int main() {
    for (size_t side : {16, 32}) {
        Grid grid(side, side * 0.3);
        PropagationSpec spec(grid, make_diversities({-2, -1, 0, 1, 2}, grid));
        RealField amp = grid.mask_field();
        RealField zero_phase = RealField::grid(side);
        ComplexField x_hat = ComplexField::grid(side);
        for (size_t i = 0; i < x_hat.size(); ++i) x_hat[i] = amp[i];
        ComplexField y_hat = propagate(x_hat, spec);
        RealField r(y_hat.shape);
        for (size_t i = 0; i < y_hat.size(); ++i) r[i] = std::norm(y_hat[i]);
        Measurement meas(r);
        Prior prior = Prior::none();
        SolveEnv env{spec, prior, meas};
        struct K { OperatorKind k; double relax; const char* name; };
        for (K k : {K{OperatorKind::AP, 0, "AP"}, K{OperatorKind::DR, 0, "DR"},
                    K{OperatorKind::KMDR, 0.7, "KMDR"}, K{OperatorKind::HIO, 0.7, "HIO"},
                    K{OperatorKind::RAAR, 0.8, "RAAR"}, K{OperatorKind::DRAP, 0.45, "DRAP"}}) {
            ComplexField y0 = init_random(spec, prior, grid, 5);
            Schedule sched({SolverSpec(k.k, k.relax, 50)});
            RunResult res = run(sched, y0, env);
            ComplexField x_rec = spec.apply_adjoint(res.y_final);
            cdouble alpha = optimal_phase(x_rec, x_hat);
            // absolute rms of restored phase over aperture, piston removed
            double mean = 0;
            for (size_t i = 0; i < x_rec.size(); ++i)
                if (grid.inside(i)) mean += std::arg(alpha * x_rec[i]);
            mean /= grid.aperture_pixel_count();
            double rms = 0;
            for (size_t i = 0; i < x_rec.size(); ++i)
                if (grid.inside(i)) {
                    double v = std::arg(alpha * x_rec[i]) - mean;
                    rms += v * v;
                }
            rms = std::sqrt(rms / grid.aperture_pixel_count());
            std::printf("side=%zu %-4s abs phase rms after 50 iters = %.3e  dist=%.3e\n",
                        side, k.name, rms, dist_opt(x_rec, x_hat) / norm(x_hat));
        }
    }
    return 0;
}
