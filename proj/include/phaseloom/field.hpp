#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace phaseloom {

using cdouble = std::complex<double>;

// Fields are dense row-major arrays with an explicit shape. A pupil-plane
// signal has shape {side, side}; a measurement stack {m, side, side};
// lifted vectors are plain 1-D {len}. All arithmetic treats the data as
// flat; the shape is carried for validation and file output.

struct RealField {
    std::vector<std::size_t> shape;
    std::vector<double> data;

    RealField() = default;
    explicit RealField(std::vector<std::size_t> shp, double fill = 0.0);

    static RealField grid(std::size_t side, double fill = 0.0);
    static RealField vector(std::size_t len, double fill = 0.0);

    std::size_t size() const { return data.size(); }
    double& operator[](std::size_t i) { return data[i]; }
    double operator[](std::size_t i) const { return data[i]; }
};

struct ComplexField {
    std::vector<std::size_t> shape;
    std::vector<cdouble> data;

    ComplexField() = default;
    explicit ComplexField(std::vector<std::size_t> shp, cdouble fill = {});

    static ComplexField grid(std::size_t side, cdouble fill = {});
    static ComplexField vector(std::size_t len, cdouble fill = {});

    std::size_t size() const { return data.size(); }
    cdouble& operator[](std::size_t i) { return data[i]; }
    const cdouble& operator[](std::size_t i) const { return data[i]; }
};

bool same_shape(const RealField& a, const RealField& b);
bool same_shape(const ComplexField& a, const ComplexField& b);

double norm(const RealField& f);
double norm(const ComplexField& f);

// Hermitian inner product, conjugate-linear in the first argument.
cdouble dot(const ComplexField& a, const ComplexField& b);
double dot(const RealField& a, const RealField& b);

bool all_finite(const RealField& f);
bool all_finite(const ComplexField& f);

// a*x + b*y, elementwise; shapes must match.
ComplexField lincomb(cdouble a, const ComplexField& x, cdouble b, const ComplexField& y);

}  // namespace phaseloom
