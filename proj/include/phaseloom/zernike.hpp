#pragma once

#include <cstddef>
#include <vector>

#include "phaseloom/field.hpp"
#include "phaseloom/grid.hpp"

namespace phaseloom {

// Zernike modes in the 37-term Fringe set: indices 1..36 follow the
// Fringe ordering formula, index 37 is the 12th-order spherical term
// appended by the Zygo / Code V convention. m > 0 selects cos(m theta),
// m < 0 selects sin(|m| theta).
struct ZernikeMode {
    int radial_degree;    // n
    int azimuthal_order;  // m, signed
};

constexpr std::size_t kMaxFringeMode = 37;

ZernikeMode fringe_mode(std::size_t j_fringe);

// Unit-RMS radial normalization over the continuous unit disk
// (sqrt(n+1) for m = 0, sqrt(2(n+1)) otherwise), evaluated on the
// discrete aperture; zero outside.
RealField zernike(std::size_t j_fringe, const Grid& grid);

std::vector<RealField> zernike_basis(std::size_t count, const Grid& grid);

// Value of mode j at normalized radius rho and azimuth theta (unit disk).
double zernike_value(std::size_t j_fringe, double rho, double theta);

}  // namespace phaseloom
