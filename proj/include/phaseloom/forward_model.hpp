#pragma once

#include <cstddef>
#include <vector>

#include "phaseloom/field.hpp"
#include "phaseloom/grid.hpp"

namespace phaseloom {

// Abstract isometric measurement operator. Implementations guarantee
// adjoint(apply(x)) == x up to rounding and <apply(x), y> == <x, adjoint(y)>.
class ForwardOperator {
public:
    virtual ~ForwardOperator() = default;
    virtual std::size_t domain_size() const = 0;
    virtual std::size_t range_size() const = 0;
    virtual ComplexField apply(const ComplexField& x) const = 0;
    virtual ComplexField apply_adjoint(const ComplexField& y) const = 0;
    // Shape metadata for constructing vectors in either space.
    virtual std::vector<std::size_t> domain_shape() const = 0;
    virtual std::vector<std::size_t> range_shape() const = 0;
};

// Matrix-free propagation operator: m phase-diversity channels, each a
// pointwise phase factor followed by the centered unitary DFT, stacked
// and scaled by 1/sqrt(m). Isometric by construction.
class PropagationSpec final : public ForwardOperator {
public:
    PropagationSpec(Grid grid, std::vector<RealField> diversities);

    const Grid& grid() const { return grid_; }
    const std::vector<RealField>& diversities() const { return diversities_; }
    std::size_t image_count() const { return diversities_.size(); }
    std::size_t pupil_size() const { return grid_.pixel_count(); }
    std::size_t stack_size() const { return image_count() * pupil_size(); }

    std::size_t domain_size() const override { return pupil_size(); }
    std::size_t range_size() const override { return stack_size(); }
    ComplexField apply(const ComplexField& x) const override;
    ComplexField apply_adjoint(const ComplexField& y) const override;
    std::vector<std::size_t> domain_shape() const override;
    std::vector<std::size_t> range_shape() const override;

private:
    Grid grid_;
    std::vector<RealField> diversities_;
    std::vector<std::vector<cdouble>> phasors_;  // exp(j phi_d), precomputed
};

// Defocus diversities phi_d = pi * z_d * Z4, with Z4 the unit-RMS Fringe
// defocus mode.
std::vector<RealField> make_diversities(const std::vector<double>& z_list, const Grid& grid);

ComplexField propagate(const ComplexField& x, const PropagationSpec& spec);
ComplexField adjoint(const ComplexField& y, const PropagationSpec& spec);

// Intensity images |F(amplitude * exp(j(phase + phi_d)))|^2, one per
// diversity channel, without the 1/m stacking factor.
std::vector<RealField> simulate_psfs(const RealField& amplitude, const RealField& phase,
                                     const PropagationSpec& spec);

}  // namespace phaseloom
