#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "phaseloom/field.hpp"
#include "phaseloom/forward_model.hpp"
#include "phaseloom/grid.hpp"

namespace phaseloom {

// One record per solver iteration. rms is present only when a truth
// phase was supplied; elapsed_s is cumulative wall time and is zero
// unless timing was requested (deterministic output is the default).
struct TraceRow {
    std::size_t iter = 0;
    double dist_opt = 0.0;
    double step_norm = 0.0;
    std::optional<double> rms;
    double elapsed_s = 0.0;
};

using Trace = std::vector<TraceRow>;

// Unit scalar alpha minimizing ||alpha x - ref||; falls back to 1 when
// the inner product vanishes (every unit factor is then optimal).
cdouble optimal_phase(const ComplexField& x, const ComplexField& ref);

// min over unit alpha of ||alpha x - ref||.
double dist_opt(const ComplexField& x, const ComplexField& ref);

// Relative rms error over aperture pixels with per-field piston (mean)
// removal: ||phi_hat - phi|| / ||phi||.
double rms_error(const RealField& phi_hat, const RealField& phi, const Grid& grid);

// Least-squares projection of the aperture samples onto the first
// n_modes Fringe Zernike modes, evaluated back on the aperture.
RealField zernike_smooth(const RealField& phi, std::size_t n_modes, const Grid& grid);

struct SpectralReport {
    double sigma1 = 0.0;
    double sigma2 = 0.0;
    double sigma_min = 0.0;
    double u1_alignment = 0.0;  // cosine between u1 and |y_hat|
    bool rate_bound_ok = false;  // sigma2 < 1
};

// Spectrum of the real decomposition [Re(L) -Im(L)] of L = Y* M at the
// solution x_hat. Dense SVD when 2n <= dense_limit, otherwise deflated
// power iteration on the known top singular pair. Requires the
// reference intensities to vanish nowhere.
SpectralReport spectral_report(const ComplexField& x_hat, const ForwardOperator& op,
                               std::size_t dense_limit = 512);
SpectralReport spectral_report_dense(const ComplexField& x_hat, const ForwardOperator& op);
SpectralReport spectral_report_power(const ComplexField& x_hat, const ForwardOperator& op);

std::string to_json(const SpectralReport& report);

// Geometric-mean per-iteration contraction of dist_opt after burn_in;
// rows at or below the underflow floor 1e-14 are excluded.
double contraction_estimate(const Trace& trace, std::size_t burn_in);

// Residuals ||T(y+eps v) - T(y) - eps J v|| / eps of the first-order
// model J of the relaxed operator at the solution, one per eps.
std::vector<double> first_order_check(const ComplexField& x_hat, const ForwardOperator& op,
                                      double lambda, const ComplexField& v,
                                      const std::vector<double>& eps_list);

}  // namespace phaseloom
