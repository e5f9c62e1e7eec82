#include "phaseloom/forward_model.hpp"

#include <cmath>

#include "phaseloom/errors.hpp"
#include "phaseloom/fft.hpp"
#include "phaseloom/zernike.hpp"

namespace phaseloom {

PropagationSpec::PropagationSpec(Grid grid, std::vector<RealField> diversities)
    : grid_(std::move(grid)), diversities_(std::move(diversities)) {
    if (diversities_.size() < 2)
        throw ParameterError("at least 2 diversity channels are required");
    const std::size_t n = grid_.pixel_count();
    phasors_.reserve(diversities_.size());
    for (const RealField& phi : diversities_) {
        if (phi.shape != std::vector<std::size_t>{grid_.side(), grid_.side()})
            throw DimensionError("diversity field shape does not match grid");
        std::vector<cdouble> phasor(n);
        for (std::size_t i = 0; i < n; ++i)
            phasor[i] = std::polar(1.0, phi[i]);
        phasors_.push_back(std::move(phasor));
    }
}

std::vector<std::size_t> PropagationSpec::domain_shape() const {
    return {grid_.side(), grid_.side()};
}

std::vector<std::size_t> PropagationSpec::range_shape() const {
    return {image_count(), grid_.side(), grid_.side()};
}

ComplexField PropagationSpec::apply(const ComplexField& x) const {
    const std::size_t n = pupil_size();
    const std::size_t side = grid_.side();
    if (x.size() != n) throw DimensionError("propagate: input is not pupil sized");
    const std::size_t m = image_count();
    ComplexField y(range_shape());
    const double scale = 1.0 / std::sqrt(static_cast<double>(m));
    std::vector<cdouble> channel(n);
    for (std::size_t d = 0; d < m; ++d) {
        const std::vector<cdouble>& phasor = phasors_[d];
        for (std::size_t i = 0; i < n; ++i) channel[i] = phasor[i] * x[i];
        dft2_centered(channel.data(), y.data.data() + d * n, side);
        for (std::size_t i = 0; i < n; ++i) y[d * n + i] *= scale;
    }
    return y;
}

ComplexField PropagationSpec::apply_adjoint(const ComplexField& y) const {
    const std::size_t n = pupil_size();
    const std::size_t side = grid_.side();
    const std::size_t m = image_count();
    if (y.size() != m * n) throw DimensionError("adjoint: input is not stack sized");
    ComplexField x(domain_shape());
    const double scale = 1.0 / std::sqrt(static_cast<double>(m));
    std::vector<cdouble> channel(n);
    for (std::size_t d = 0; d < m; ++d) {
        idft2_centered(y.data.data() + d * n, channel.data(), side);
        const std::vector<cdouble>& phasor = phasors_[d];
        for (std::size_t i = 0; i < n; ++i)
            x[i] += scale * std::conj(phasor[i]) * channel[i];
    }
    return x;
}

std::vector<RealField> make_diversities(const std::vector<double>& z_list, const Grid& grid) {
    if (z_list.empty()) throw ParameterError("diversity list must be non-empty");
    const RealField defocus = zernike(4, grid);
    std::vector<RealField> out;
    out.reserve(z_list.size());
    for (double z : z_list) {
        RealField phi = RealField::grid(grid.side());
        for (std::size_t i = 0; i < phi.size(); ++i) phi[i] = M_PI * z * defocus[i];
        out.push_back(std::move(phi));
    }
    return out;
}

ComplexField propagate(const ComplexField& x, const PropagationSpec& spec) {
    return spec.apply(x);
}

ComplexField adjoint(const ComplexField& y, const PropagationSpec& spec) {
    return spec.apply_adjoint(y);
}

std::vector<RealField> simulate_psfs(const RealField& amplitude, const RealField& phase,
                                     const PropagationSpec& spec) {
    const Grid& grid = spec.grid();
    const std::size_t n = grid.pixel_count();
    const std::size_t side = grid.side();
    if (amplitude.size() != n || phase.size() != n)
        throw DimensionError("simulate_psfs: field shape does not match grid");
    for (std::size_t i = 0; i < n; ++i) {
        if (amplitude[i] < 0.0) throw DomainError("simulate_psfs: amplitude must be >= 0");
        if (amplitude[i] > 0.0 && !grid.inside(i))
            throw DomainError("simulate_psfs: amplitude must vanish outside the aperture");
    }
    std::vector<RealField> images;
    images.reserve(spec.image_count());
    std::vector<cdouble> pupil(n), focal(n);
    for (std::size_t d = 0; d < spec.image_count(); ++d) {
        const RealField& phi = spec.diversities()[d];
        for (std::size_t i = 0; i < n; ++i)
            pupil[i] = amplitude[i] * std::polar(1.0, phase[i] + phi[i]);
        dft2_centered(pupil.data(), focal.data(), side);
        RealField p = RealField::grid(side);
        for (std::size_t i = 0; i < n; ++i) p[i] = std::norm(focal[i]);
        images.push_back(std::move(p));
    }
    return images;
}

}  // namespace phaseloom
