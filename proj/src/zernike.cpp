#include "phaseloom/zernike.hpp"

#include <cmath>

#include "phaseloom/errors.hpp"

namespace phaseloom {

namespace {

double factorial(int k) {
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;  // exact in double for k <= 18
}

double radial_poly(int n, int m_abs, double rho) {
    double sum = 0.0;
    for (int k = 0; k <= (n - m_abs) / 2; ++k) {
        const double coeff = ((k % 2 == 0) ? 1.0 : -1.0) * factorial(n - k) /
                             (factorial(k) * factorial((n + m_abs) / 2 - k) *
                              factorial((n - m_abs) / 2 - k));
        sum += coeff * std::pow(rho, n - 2 * k);
    }
    return sum;
}

}  // namespace

ZernikeMode fringe_mode(std::size_t j_fringe) {
    if (j_fringe < 1 || j_fringe > kMaxFringeMode)
        throw ParameterError("unsupported Zernike mode index (Fringe set is 1..37)");
    if (j_fringe == 37) return {12, 0};  // appended 12th-order spherical
    // Group s holds indices s^2+1 .. (s+1)^2.
    int s = 0;
    while (static_cast<std::size_t>((s + 1) * (s + 1)) < j_fringe) ++s;
    const int d = (s + 1) * (s + 1) - static_cast<int>(j_fringe);
    const int m_abs = (d + 1) / 2;
    const int n = 2 * s - m_abs;
    const int m = (d % 2 == 0) ? m_abs : -m_abs;
    return {n, m};
}

double zernike_value(std::size_t j_fringe, double rho, double theta) {
    const ZernikeMode mode = fringe_mode(j_fringe);
    const int m_abs = std::abs(mode.azimuthal_order);
    const double norm_factor = (m_abs == 0) ? std::sqrt(mode.radial_degree + 1.0)
                                            : std::sqrt(2.0 * (mode.radial_degree + 1.0));
    const double radial = radial_poly(mode.radial_degree, m_abs, rho);
    double angular = 1.0;
    if (mode.azimuthal_order > 0) angular = std::cos(m_abs * theta);
    if (mode.azimuthal_order < 0) angular = std::sin(m_abs * theta);
    return norm_factor * radial * angular;
}

RealField zernike(std::size_t j_fringe, const Grid& grid) {
    fringe_mode(j_fringe);  // range check up front
    RealField field = RealField::grid(grid.side());
    for (std::size_t idx = 0; idx < field.size(); ++idx) {
        if (!grid.inside(idx)) continue;
        field[idx] = zernike_value(j_fringe, grid.rho(idx), grid.theta(idx));
    }
    return field;
}

std::vector<RealField> zernike_basis(std::size_t count, const Grid& grid) {
    if (count < 1 || count > kMaxFringeMode)
        throw ParameterError("Zernike basis size must be in 1..37");
    std::vector<RealField> basis;
    basis.reserve(count);
    for (std::size_t j = 1; j <= count; ++j) basis.push_back(zernike(j, grid));
    return basis;
}

}  // namespace phaseloom
