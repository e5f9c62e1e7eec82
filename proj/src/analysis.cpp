#include "phaseloom/analysis.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>

#include <json.hpp>

#include "phaseloom/errors.hpp"
#include "phaseloom/projectors.hpp"
#include "phaseloom/rng.hpp"
#include "phaseloom/solvers.hpp"
#include "phaseloom/zernike.hpp"

namespace phaseloom {

namespace {

constexpr double kDistUnderflow = 1e-14;

std::vector<cdouble> unit_phases(const ComplexField& y_hat) {
    std::vector<cdouble> unit(y_hat.size());
    for (std::size_t i = 0; i < y_hat.size(); ++i) {
        const double mag = std::abs(y_hat[i]);
        if (mag == 0.0)
            throw AssumptionError("reference intensities vanish somewhere; spectrum undefined");
        unit[i] = y_hat[i] / mag;
    }
    return unit;
}

// B w = L^T (L w) for the real decomposition L = [Re(L) -Im(L)],
// evaluated matrix-free through the operator.
Eigen::VectorXd apply_gram(const Eigen::VectorXd& w, const ForwardOperator& op,
                           const std::vector<cdouble>& unit,
                           const std::vector<std::size_t>& domain_shape) {
    const std::size_t n = op.domain_size();
    ComplexField x(domain_shape);
    for (std::size_t i = 0; i < n; ++i) x[i] = cdouble(w[i], w[n + i]);
    const ComplexField mx = op.apply(x);
    ComplexField back(mx.shape);
    for (std::size_t i = 0; i < mx.size(); ++i) {
        const double u = (std::conj(unit[i]) * mx[i]).real();  // (L x)_i real part
        back[i] = unit[i] * u;
    }
    const ComplexField z = op.apply_adjoint(back);
    Eigen::VectorXd out(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = z[i].real();
        out[n + i] = z[i].imag();
    }
    return out;
}

Eigen::VectorXd real_decomposition(const ComplexField& x) {
    Eigen::VectorXd v(2 * x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        v[i] = x[i].real();
        v[x.size() + i] = x[i].imag();
    }
    return v;
}

}  // namespace

cdouble optimal_phase(const ComplexField& x, const ComplexField& ref) {
    if (!same_shape(x, ref)) throw DimensionError("optimal_phase: shape mismatch");
    const cdouble s = dot(x, ref);
    const double mag = std::abs(s);
    if (mag == 0.0) return cdouble(1.0, 0.0);  // every unit factor is optimal
    return s / mag;
}

double dist_opt(const ComplexField& x, const ComplexField& ref) {
    const cdouble alpha = optimal_phase(x, ref);
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) sum += std::norm(alpha * x[i] - ref[i]);
    return std::sqrt(sum);
}

double rms_error(const RealField& phi_hat, const RealField& phi, const Grid& grid) {
    if (!same_shape(phi_hat, phi) || phi.size() != grid.pixel_count())
        throw DimensionError("rms_error: shape mismatch");
    double mean_hat = 0.0, mean_ref = 0.0;
    const double count = static_cast<double>(grid.aperture_pixel_count());
    for (std::size_t i = 0; i < phi.size(); ++i) {
        if (!grid.inside(i)) continue;
        mean_hat += phi_hat[i];
        mean_ref += phi[i];
    }
    mean_hat /= count;
    mean_ref /= count;
    double err = 0.0, ref = 0.0;
    for (std::size_t i = 0; i < phi.size(); ++i) {
        if (!grid.inside(i)) continue;
        const double d = (phi_hat[i] - mean_hat) - (phi[i] - mean_ref);
        const double r = phi[i] - mean_ref;
        err += d * d;
        ref += r * r;
    }
    if (ref == 0.0)
        throw DomainError("rms_error: reference phase is zero after piston removal");
    return std::sqrt(err / ref);
}

RealField zernike_smooth(const RealField& phi, std::size_t n_modes, const Grid& grid) {
    if (n_modes < 1 || n_modes > kMaxFringeMode)
        throw ParameterError("zernike_smooth: mode count must be in 1..37");
    if (phi.size() != grid.pixel_count()) throw DimensionError("zernike_smooth: shape mismatch");

    const std::vector<RealField> basis = zernike_basis(n_modes, grid);
    std::vector<std::size_t> aperture;
    aperture.reserve(grid.aperture_pixel_count());
    for (std::size_t i = 0; i < phi.size(); ++i)
        if (grid.inside(i)) aperture.push_back(i);

    Eigen::MatrixXd a(aperture.size(), n_modes);
    Eigen::VectorXd b(aperture.size());
    for (std::size_t row = 0; row < aperture.size(); ++row) {
        b[row] = phi[aperture[row]];
        for (std::size_t col = 0; col < n_modes; ++col)
            a(row, col) = basis[col][aperture[row]];
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    if (qr.rank() < static_cast<Eigen::Index>(n_modes))
        throw ConditioningError("zernike_smooth: basis is rank deficient on this grid");
    const Eigen::VectorXd coeffs = qr.solve(b);

    RealField out = RealField::grid(grid.side());
    for (std::size_t row = 0; row < aperture.size(); ++row) {
        double v = 0.0;
        for (std::size_t col = 0; col < n_modes; ++col)
            v += coeffs[col] * a(row, col);
        out[aperture[row]] = v;
    }
    return out;
}

SpectralReport spectral_report_dense(const ComplexField& x_hat, const ForwardOperator& op) {
    if (x_hat.size() != op.domain_size())
        throw DimensionError("spectral_report: x_hat shape mismatch");
    const ComplexField y_hat = op.apply(x_hat);
    const std::vector<cdouble> unit = unit_phases(y_hat);

    const std::size_t n = op.domain_size();
    const std::size_t big_n = op.range_size();
    Eigen::MatrixXd l_real(big_n, 2 * n);
    ComplexField e(op.domain_shape());
    for (std::size_t k = 0; k < 2 * n; ++k) {
        std::fill(e.data.begin(), e.data.end(), cdouble(0.0, 0.0));
        e[k % n] = (k < n) ? cdouble(1.0, 0.0) : cdouble(0.0, 1.0);
        const ComplexField col = op.apply(e);
        for (std::size_t i = 0; i < big_n; ++i)
            l_real(i, k) = (std::conj(unit[i]) * col[i]).real();
    }

    Eigen::BDCSVD<Eigen::MatrixXd> svd(l_real, Eigen::ComputeThinU);
    const Eigen::VectorXd& sigma = svd.singularValues();

    Eigen::VectorXd mag(big_n);
    for (std::size_t i = 0; i < big_n; ++i) mag[i] = std::abs(y_hat[i]);

    SpectralReport report;
    report.sigma1 = sigma[0];
    report.sigma2 = sigma[1];
    report.sigma_min = sigma[sigma.size() - 1];
    report.u1_alignment = std::abs(svd.matrixU().col(0).dot(mag)) / mag.norm();
    report.rate_bound_ok = report.sigma2 < 1.0;
    return report;
}

SpectralReport spectral_report_power(const ComplexField& x_hat, const ForwardOperator& op) {
    if (x_hat.size() != op.domain_size())
        throw DimensionError("spectral_report: x_hat shape mismatch");
    const ComplexField y_hat = op.apply(x_hat);
    const std::vector<cdouble> unit = unit_phases(y_hat);
    const std::vector<std::size_t> dshape = op.domain_shape();
    const std::size_t n = op.domain_size();
    const double x_norm = norm(x_hat);

    // Top singular pair is known in closed form: v1 = G(x_hat)/||x_hat||
    // maps to |y_hat|. The second value comes from subspace iteration on
    // the Gram operator with v1 deflated.
    Eigen::VectorXd v1 = real_decomposition(x_hat) / x_norm;
    ComplexField neg_j_x(x_hat.shape);
    for (std::size_t i = 0; i < n; ++i) neg_j_x[i] = cdouble(0.0, -1.0) * x_hat[i];

    Eigen::VectorXd l_v1(op.range_size());
    for (std::size_t i = 0; i < y_hat.size(); ++i)
        l_v1[i] = (std::conj(unit[i]) * y_hat[i]).real() / x_norm;

    SpectralReport report;
    report.sigma1 = l_v1.norm();
    {
        const ComplexField mj = op.apply(neg_j_x);
        double s = 0.0;
        for (std::size_t i = 0; i < mj.size(); ++i) {
            const double c = (std::conj(unit[i]) * mj[i]).real() / x_norm;
            s += c * c;
        }
        report.sigma_min = std::sqrt(s);
    }
    Eigen::VectorXd mag(op.range_size());
    for (std::size_t i = 0; i < y_hat.size(); ++i) mag[i] = std::abs(y_hat[i]);
    report.u1_alignment = std::abs(l_v1.dot(mag)) / (l_v1.norm() * mag.norm());

    constexpr std::size_t kBlock = 4;
    constexpr std::size_t kMaxIters = 10000;
    constexpr double kTol = 1e-8;

    std::vector<Eigen::VectorXd> block(kBlock, Eigen::VectorXd(2 * n));
    for (std::size_t j = 0; j < kBlock; ++j) {
        CounterRng rng(0x5EEDu, j);
        for (std::size_t i = 0; i < 2 * n; ++i) block[j][i] = rng.next_double() - 0.5;
    }

    auto orthonormalize = [&](std::vector<Eigen::VectorXd>& vs) {
        for (std::size_t j = 0; j < vs.size(); ++j) {
            vs[j] -= v1.dot(vs[j]) * v1;
            for (std::size_t k = 0; k < j; ++k) vs[j] -= vs[k].dot(vs[j]) * vs[k];
            const double nj = vs[j].norm();
            if (nj > 0.0) vs[j] /= nj;
        }
    };

    orthonormalize(block);
    double sigma2 = 0.0;
    for (std::size_t it = 0; it < kMaxIters; ++it) {
        std::vector<Eigen::VectorXd> applied(kBlock);
        for (std::size_t j = 0; j < kBlock; ++j)
            applied[j] = apply_gram(block[j], op, unit, dshape);
        // Rayleigh-Ritz on the current block.
        Eigen::MatrixXd small(kBlock, kBlock);
        for (std::size_t a = 0; a < kBlock; ++a)
            for (std::size_t b = 0; b < kBlock; ++b) small(a, b) = block[a].dot(applied[b]);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (small + small.transpose()));
        const double lead = es.eigenvalues().maxCoeff();
        const double estimate = std::sqrt(std::max(0.0, lead));
        block = std::move(applied);
        orthonormalize(block);
        if (it > 0 && std::abs(estimate - sigma2) <= kTol * std::max(1.0, estimate)) {
            sigma2 = estimate;
            break;
        }
        sigma2 = estimate;
    }
    report.sigma2 = sigma2;
    report.rate_bound_ok = report.sigma2 < 1.0;
    return report;
}

SpectralReport spectral_report(const ComplexField& x_hat, const ForwardOperator& op,
                               std::size_t dense_limit) {
    if (2 * op.domain_size() <= dense_limit) return spectral_report_dense(x_hat, op);
    return spectral_report_power(x_hat, op);
}

std::string to_json(const SpectralReport& report) {
    nlohmann::ordered_json j;
    j["sigma1"] = report.sigma1;
    j["sigma2"] = report.sigma2;
    j["sigma_min"] = report.sigma_min;
    j["u1_alignment"] = report.u1_alignment;
    j["rate_bound_ok"] = report.rate_bound_ok;
    return j.dump();
}

double contraction_estimate(const Trace& trace, std::size_t burn_in) {
    double log_sum = 0.0;
    std::size_t ratios = 0;
    for (std::size_t i = burn_in; i + 1 < trace.size(); ++i) {
        const double d0 = trace[i].dist_opt;
        const double d1 = trace[i + 1].dist_opt;
        if (d0 <= kDistUnderflow || d1 <= kDistUnderflow) continue;
        log_sum += std::log(d1 / d0);
        ++ratios;
    }
    if (ratios < 4)
        throw EstimationError("contraction_estimate: not enough usable trace rows");
    return std::exp(log_sum / static_cast<double>(ratios));
}

std::vector<double> first_order_check(const ComplexField& x_hat, const ForwardOperator& op,
                                      double lambda, const ComplexField& v,
                                      const std::vector<double>& eps_list) {
    if (x_hat.size() != op.domain_size() || v.size() != op.range_size())
        throw DimensionError("first_order_check: shape mismatch");
    for (std::size_t i = 0; i + 1 < eps_list.size(); ++i)
        if (!(eps_list[i] > eps_list[i + 1]) || !(eps_list[i + 1] > 0.0))
            throw ParameterError("first_order_check: eps_list must be positive decreasing");
    if (!eps_list.empty() && !(eps_list[0] > 0.0))
        throw ParameterError("first_order_check: eps_list must be positive decreasing");

    const ComplexField y_hat = op.apply(x_hat);
    const std::vector<cdouble> unit = unit_phases(y_hat);

    RealField r(y_hat.shape);
    for (std::size_t i = 0; i < y_hat.size(); ++i) r[i] = std::norm(y_hat[i]);
    const Measurement meas(std::move(r));
    const Prior prior = Prior::none();
    const SolveEnv env{op, prior, meas};

    // J v = Y grad(Y* v) with
    // grad(mu) = lambda (I - LL*) mu + j ((1+lambda) LL* - lambda I) Im(mu).
    const std::size_t big_n = y_hat.size();
    ComplexField mu(y_hat.shape);
    for (std::size_t i = 0; i < big_n; ++i) mu[i] = std::conj(unit[i]) * v[i];

    auto apply_ll_star = [&](const ComplexField& w) {
        ComplexField t(w.shape);
        for (std::size_t i = 0; i < big_n; ++i) t[i] = unit[i] * w[i];
        const ComplexField mmt = op.apply(op.apply_adjoint(t));
        ComplexField out(w.shape);
        for (std::size_t i = 0; i < big_n; ++i) out[i] = std::conj(unit[i]) * mmt[i];
        return out;
    };

    const ComplexField ll_mu = apply_ll_star(mu);
    ComplexField im_mu(mu.shape);
    for (std::size_t i = 0; i < big_n; ++i) im_mu[i] = cdouble(mu[i].imag(), 0.0);
    const ComplexField ll_im = apply_ll_star(im_mu);

    ComplexField jacobian_dir(y_hat.shape);
    for (std::size_t i = 0; i < big_n; ++i) {
        const cdouble grad = lambda * (mu[i] - ll_mu[i]) +
                             cdouble(0.0, 1.0) * ((1.0 + lambda) * ll_im[i] -
                                                  lambda * im_mu[i]);
        jacobian_dir[i] = unit[i] * grad;
    }

    const ComplexField t_at_solution = step_drap_explicit(y_hat, lambda, env);

    std::vector<double> residuals;
    residuals.reserve(eps_list.size());
    for (double eps : eps_list) {
        ComplexField y_eps(y_hat.shape);
        for (std::size_t i = 0; i < big_n; ++i) {
            y_eps[i] = y_hat[i] + eps * v[i];
            if (std::abs(y_eps[i]) == 0.0)
                throw AssumptionError("first_order_check: perturbed point has zero entries");
        }
        const ComplexField t_eps = step_drap_explicit(y_eps, lambda, env);
        double sum = 0.0;
        for (std::size_t i = 0; i < big_n; ++i)
            sum += std::norm(t_eps[i] - t_at_solution[i] - eps * jacobian_dir[i]);
        residuals.push_back(std::sqrt(sum) / eps);
    }
    return residuals;
}

}  // namespace phaseloom
