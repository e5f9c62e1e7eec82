#include "phaseloom/projectors.hpp"

#include <atomic>
#include <cmath>

#include "phaseloom/errors.hpp"

namespace phaseloom {

namespace {

std::atomic<std::uint64_t> g_b_evals{0};
std::atomic<std::uint64_t> g_a_evals{0};

// y/|y| with the fixed selection 1 at zero entries.
inline cdouble unit_factor(cdouble y) {
    const double mag = std::abs(y);
    if (mag == 0.0) return cdouble(1.0, 0.0);
    return y / mag;
}

}  // namespace

Prior Prior::with_amplitude(RealField a) {
    for (double v : a.data)
        if (!(v >= 0.0)) throw DomainError("prior amplitude must be >= 0");
    Prior p;
    p.kind = Kind::Amplitude;
    p.amplitude = std::move(a);
    return p;
}

Measurement::Measurement(RealField r_in) : r(std::move(r_in)) {
    bool positive = !r.data.empty();
    for (double v : r.data) {
        if (!(v >= 0.0)) throw DomainError("measurement must be >= 0 elementwise");
        if (v <= 0.0) positive = false;
    }
    strictly_positive = positive;
}

ComplexField project_B(const ComplexField& y, const Measurement& meas) {
    if (y.size() != meas.r.size()) throw DimensionError("project_B: shape mismatch");
    g_b_evals.fetch_add(1, std::memory_order_relaxed);
    ComplexField out(y.shape);
    for (std::size_t i = 0; i < y.size(); ++i)
        out[i] = std::sqrt(meas.r[i]) * unit_factor(y[i]);
    return out;
}

ComplexField project_prior(const ComplexField& x, const Prior& prior) {
    if (prior.kind == Prior::Kind::None) return x;
    if (x.size() != prior.amplitude.size())
        throw DimensionError("project_prior: shape mismatch");
    ComplexField out(x.shape);
    for (std::size_t i = 0; i < x.size(); ++i)
        out[i] = prior.amplitude[i] * unit_factor(x[i]);
    return out;
}

ComplexField project_A(const ComplexField& y, const Prior& prior, const ForwardOperator& op) {
    if (y.size() != op.range_size()) throw DimensionError("project_A: shape mismatch");
    g_a_evals.fetch_add(1, std::memory_order_relaxed);
    return op.apply(project_prior(op.apply_adjoint(y), prior));
}

LiftedOperator::LiftedOperator(PropagationSpec base) : base_(std::move(base)) {}

ComplexField LiftedOperator::apply(const ComplexField& x) const {
    const std::size_t n = base_.pupil_size();
    if (x.size() != n) throw DimensionError("lifted apply: input is not pupil sized");
    const double m = static_cast<double>(base_.image_count());
    const double top = std::sqrt(m / (m + 1.0));
    const double bottom = 1.0 / std::sqrt(m + 1.0);
    const ComplexField yb = base_.apply(x);
    ComplexField out({range_size()});
    for (std::size_t i = 0; i < yb.size(); ++i) out[i] = top * yb[i];
    for (std::size_t i = 0; i < n; ++i) out[yb.size() + i] = bottom * x[i];
    return out;
}

ComplexField LiftedOperator::apply_adjoint(const ComplexField& y) const {
    const std::size_t n = base_.pupil_size();
    const std::size_t big_n = base_.stack_size();
    if (y.size() != big_n + n) throw DimensionError("lifted adjoint: shape mismatch");
    const double m = static_cast<double>(base_.image_count());
    const double top = std::sqrt(m / (m + 1.0));
    const double bottom = 1.0 / std::sqrt(m + 1.0);
    ComplexField stack(base_.range_shape());
    for (std::size_t i = 0; i < big_n; ++i) stack[i] = y[i];
    ComplexField x = base_.apply_adjoint(stack);
    for (std::size_t i = 0; i < n; ++i) x[i] = top * x[i] + bottom * y[big_n + i];
    return x;
}

LiftedProblem lift(const PropagationSpec& spec, const Measurement& meas,
                   const RealField& amplitude) {
    if (meas.r.size() != spec.stack_size()) throw DimensionError("lift: measurement shape");
    if (amplitude.size() != spec.pupil_size()) throw DimensionError("lift: amplitude shape");
    for (double v : amplitude.data)
        if (!(v >= 0.0)) throw DomainError("lift: amplitude must be >= 0");
    const double m = static_cast<double>(spec.image_count());
    RealField r_bold = RealField::vector(spec.stack_size() + spec.pupil_size());
    for (std::size_t i = 0; i < meas.r.size(); ++i)
        r_bold[i] = m / (m + 1.0) * meas.r[i];
    for (std::size_t i = 0; i < amplitude.size(); ++i)
        r_bold[meas.r.size() + i] = amplitude[i] * amplitude[i] / (m + 1.0);
    return LiftedProblem{LiftedOperator(spec), Measurement(std::move(r_bold))};
}

namespace projection_counters {

void reset() {
    g_b_evals.store(0, std::memory_order_relaxed);
    g_a_evals.store(0, std::memory_order_relaxed);
}

std::uint64_t b_evaluations() { return g_b_evals.load(std::memory_order_relaxed); }
std::uint64_t a_evaluations() { return g_a_evals.load(std::memory_order_relaxed); }

}  // namespace projection_counters

}  // namespace phaseloom
