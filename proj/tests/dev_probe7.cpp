// Scratch probe: smallest grids where zero-phase noiseless hits 1e-8 in 50 iters.
#include <cstdio>
#include <cmath>
#include "phaseloom/analysis.hpp"
#include "phaseloom/forward_model.hpp"
#include "phaseloom/grid.hpp"
#include "phaseloom/projectors.hpp"
#include "phaseloom/solvers.hpp"

using namespace phaseloom;

int main() {
    struct K { OperatorKind k; double relax; const char* name; };
    for (size_t side : {4, 6, 8, 10}) {
        for (double rf : {0.25, 0.35, 0.45}) {
            Grid grid(side, side * rf);
            PropagationSpec spec(grid, make_diversities({-2, -1, 0, 1, 2}, grid));
            ComplexField x_hat = ComplexField::grid(side);
            for (size_t i = 0; i < x_hat.size(); ++i) x_hat[i] = grid.inside(i) ? 1.0 : 0.0;
            ComplexField y_hat = propagate(x_hat, spec);
            RealField r(y_hat.shape);
            for (size_t i = 0; i < y_hat.size(); ++i) r[i] = std::norm(y_hat[i]);
            Measurement meas(r);
            Prior prior = Prior::none();
            SolveEnv env{spec, prior, meas};
            double worst = 0; const char* worst_name = "";
            for (K k : {K{OperatorKind::AP, 0, "AP"}, K{OperatorKind::DR, 0, "DR"},
                        K{OperatorKind::KMDR, 0.7, "KMDR"}, K{OperatorKind::HIO, 0.7, "HIO"},
                        K{OperatorKind::RAAR, 0.8, "RAAR"}, K{OperatorKind::DRAP, 0.45, "DRAP"}}) {
                for (uint64_t seed : {1, 2, 3}) {
                    ComplexField y0 = init_random(spec, prior, grid, seed);
                    Schedule sched({SolverSpec(k.k, k.relax, 50)});
                    RunResult res = run(sched, y0, env);
                    ComplexField x_rec = spec.apply_adjoint(res.y_final);
                    cdouble alpha = optimal_phase(x_rec, x_hat);
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
                    if (rms > worst) { worst = rms; worst_name = k.name; }
                }
            }
            std::printf("side=%2zu radius=%.2f ap=%2zu worst(3 seeds x 6 kinds)=%.2e (%s)\n",
                        side, side * rf, grid.aperture_pixel_count(), worst, worst_name);
        }
    }
    return 0;
}
