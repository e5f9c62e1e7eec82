#pragma once

#include <cstddef>

#include "phaseloom/field.hpp"

namespace phaseloom {

// Centered unitary 2-D DFT on a side x side grid:
//   forward  F  = fftshift o DFT  o ifftshift, scaled by 1/side
//   inverse  F* = fftshift o IDFT o ifftshift, scaled by 1/side
// F is exactly unitary (F* F = I) and maps a pupil centered at
// (side/2, side/2) to a focal pattern centered at the same pixel.
// Plans are cached per grid side; execution is thread safe and the
// output is a pure function of the input (bitwise reproducible).
void dft2_centered(const cdouble* in, cdouble* out, std::size_t side);
void idft2_centered(const cdouble* in, cdouble* out, std::size_t side);

ComplexField dft2_centered(const ComplexField& x);
ComplexField idft2_centered(const ComplexField& x);

}  // namespace phaseloom
