#include "phaseloom/field.hpp"

#include <cmath>

#include "phaseloom/errors.hpp"

namespace phaseloom {

namespace {

std::size_t shape_product(const std::vector<std::size_t>& shape) {
    std::size_t total = 1;
    for (std::size_t d : shape) total *= d;
    return shape.empty() ? 0 : total;
}

}  // namespace

RealField::RealField(std::vector<std::size_t> shp, double fill)
    : shape(std::move(shp)), data(shape_product(shape), fill) {}

RealField RealField::grid(std::size_t side, double fill) {
    return RealField({side, side}, fill);
}

RealField RealField::vector(std::size_t len, double fill) {
    return RealField({len}, fill);
}

ComplexField::ComplexField(std::vector<std::size_t> shp, cdouble fill)
    : shape(std::move(shp)), data(shape_product(shape), fill) {}

ComplexField ComplexField::grid(std::size_t side, cdouble fill) {
    return ComplexField({side, side}, fill);
}

ComplexField ComplexField::vector(std::size_t len, cdouble fill) {
    return ComplexField({len}, fill);
}

bool same_shape(const RealField& a, const RealField& b) { return a.shape == b.shape; }
bool same_shape(const ComplexField& a, const ComplexField& b) { return a.shape == b.shape; }

double norm(const RealField& f) {
    double s = 0.0;
    for (double v : f.data) s += v * v;
    return std::sqrt(s);
}

double norm(const ComplexField& f) {
    double s = 0.0;
    for (const cdouble& v : f.data) s += std::norm(v);
    return std::sqrt(s);
}

cdouble dot(const ComplexField& a, const ComplexField& b) {
    if (a.size() != b.size()) throw DimensionError("dot: size mismatch");
    cdouble s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

double dot(const RealField& a, const RealField& b) {
    if (a.size() != b.size()) throw DimensionError("dot: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

bool all_finite(const RealField& f) {
    for (double v : f.data)
        if (!std::isfinite(v)) return false;
    return true;
}

bool all_finite(const ComplexField& f) {
    for (const cdouble& v : f.data)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
}

ComplexField lincomb(cdouble a, const ComplexField& x, cdouble b, const ComplexField& y) {
    if (!same_shape(x, y)) throw DimensionError("lincomb: shape mismatch");
    ComplexField out(x.shape);
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = a * x[i] + b * y[i];
    return out;
}

}  // namespace phaseloom
