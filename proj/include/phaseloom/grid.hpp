#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "phaseloom/field.hpp"

namespace phaseloom {

// Square sampling grid with a centered circular pupil. The pupil center
// sits at index (side/2, side/2), matching the fft shift convention used
// by the propagation transform, so the unaberrated focal spot lands at
// the grid center.
class Grid {
public:
    // Direct construction from a pixel radius.
    Grid(std::size_t side, double aperture_radius_px);

    // Physical parameters; the pixel radius follows the Fourier-optics
    // sampling relation  radius_px = NA * pixel_size * side / wavelength.
    static Grid from_physical(std::size_t side, double numerical_aperture,
                              double wavelength_um, double pixel_um);

    std::size_t side() const { return side_; }
    std::size_t pixel_count() const { return side_ * side_; }
    double aperture_radius_px() const { return radius_px_; }
    std::size_t aperture_pixel_count() const { return aperture_count_; }

    bool inside(std::size_t idx) const { return mask_[idx] != 0; }
    const std::vector<std::uint8_t>& mask() const { return mask_; }

    // Radius of pixel idx normalized so the aperture edge is 1.
    double rho(std::size_t idx) const;
    // Azimuth of pixel idx about the pupil center.
    double theta(std::size_t idx) const;

    RealField mask_field() const;

private:
    std::size_t side_ = 0;
    double radius_px_ = 0.0;
    std::size_t center_ = 0;
    std::vector<std::uint8_t> mask_;
    std::size_t aperture_count_ = 0;
};

}  // namespace phaseloom
