#pragma once

#include <filesystem>
#include <string>

#include "phaseloom/analysis.hpp"
#include "phaseloom/field.hpp"

namespace phaseloom {

// CXF1 container: bytes 0-3 magic "CXF1", byte 4 element code (0 = f64
// real, 1 = complex f64 interleaved re,im), byte 5 ndim, then ndim
// little-endian u64 dims, then the row-major little-endian f64 payload.

void write_cxf(const std::filesystem::path& path, const RealField& field);
void write_cxf(const std::filesystem::path& path, const ComplexField& field);

RealField read_cxf_real(const std::filesystem::path& path);
ComplexField read_cxf_complex(const std::filesystem::path& path);

// Header: iter,dist_opt,step_norm,rms,elapsed_s. rms cells are empty
// when the run had no truth phase. Values are written with shortest
// round-trip formatting, so identical traces serialize identically.
void write_trace_csv(const std::filesystem::path& path, const Trace& trace);

// 16-bit binary PGM preview, linearly scaled to the field's range.
void write_pgm16(const std::filesystem::path& path, const RealField& field,
                 std::size_t rows, std::size_t cols);

std::string format_double(double v);

}  // namespace phaseloom
