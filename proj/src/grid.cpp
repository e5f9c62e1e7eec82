#include "phaseloom/grid.hpp"

#include <cmath>

#include "phaseloom/errors.hpp"

namespace phaseloom {

Grid::Grid(std::size_t side, double aperture_radius_px)
    : side_(side), radius_px_(aperture_radius_px), center_(side / 2) {
    if (side_ == 0) throw ParameterError("grid side must be positive");
    if (!(radius_px_ > 0.0)) throw ParameterError("aperture radius must be positive");
    mask_.resize(side_ * side_, 0);
    for (std::size_t i = 0; i < side_; ++i) {
        for (std::size_t j = 0; j < side_; ++j) {
            const double dy = static_cast<double>(i) - static_cast<double>(center_);
            const double dx = static_cast<double>(j) - static_cast<double>(center_);
            if (std::hypot(dx, dy) <= radius_px_) {
                mask_[i * side_ + j] = 1;
                ++aperture_count_;
            }
        }
    }
    if (aperture_count_ == 0) throw ParameterError("aperture contains no pixels");
}

Grid Grid::from_physical(std::size_t side, double numerical_aperture,
                         double wavelength_um, double pixel_um) {
    if (!(numerical_aperture > 0.0) || !(wavelength_um > 0.0) || !(pixel_um > 0.0))
        throw ParameterError("physical grid parameters must be positive");
    const double radius =
        numerical_aperture * pixel_um * static_cast<double>(side) / wavelength_um;
    return Grid(side, radius);
}

double Grid::rho(std::size_t idx) const {
    const double dy = static_cast<double>(idx / side_) - static_cast<double>(center_);
    const double dx = static_cast<double>(idx % side_) - static_cast<double>(center_);
    return std::hypot(dx, dy) / radius_px_;
}

double Grid::theta(std::size_t idx) const {
    const double dy = static_cast<double>(idx / side_) - static_cast<double>(center_);
    const double dx = static_cast<double>(idx % side_) - static_cast<double>(center_);
    return std::atan2(dy, dx);
}

RealField Grid::mask_field() const {
    RealField f = RealField::grid(side_);
    for (std::size_t i = 0; i < mask_.size(); ++i) f[i] = mask_[i] ? 1.0 : 0.0;
    return f;
}

}  // namespace phaseloom
