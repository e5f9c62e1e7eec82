#pragma once

#include <cstdint>
#include <optional>

#include "phaseloom/field.hpp"
#include "phaseloom/forward_model.hpp"

namespace phaseloom {

// A priori constraint on the pupil-plane signal: either none (all of
// C^n) or a known pointwise amplitude |x| = a.
struct Prior {
    enum class Kind { None, Amplitude };

    Kind kind = Kind::None;
    RealField amplitude;  // meaningful only for Kind::Amplitude

    static Prior none() { return {}; }
    static Prior with_amplitude(RealField a);
};

// Measured squared moduli r on the stacked measurement space, already in
// the 1/m scaling of the product formulation. strictly_positive records
// whether min(r) > 0, which gates the spectral analysis.
struct Measurement {
    RealField r;
    bool strictly_positive = false;

    explicit Measurement(RealField r_in);
};

// Nearest point on {y : |y|^2 = r}; zero entries map to sqrt(r) (the
// single-valued selection with unit factor 1).
ComplexField project_B(const ComplexField& y, const Measurement& meas);

// Pointwise amplitude projector (or identity for Prior::None), same zero
// convention as project_B.
ComplexField project_prior(const ComplexField& x, const Prior& prior);

// Projector onto the range of the operator under the prior:
// P_A(y) = M P_chi(M* y).
ComplexField project_A(const ComplexField& y, const Prior& prior, const ForwardOperator& op);

// Amplitude-constrained problem rewritten as an unconstrained one in
// dimension N+n: the operator stacks sqrt(m/(m+1)) M over
// 1/sqrt(m+1) I, and the measurement becomes (m r ; a^2)/(m+1).
class LiftedOperator final : public ForwardOperator {
public:
    explicit LiftedOperator(PropagationSpec base);

    const PropagationSpec& base() const { return base_; }

    std::size_t domain_size() const override { return base_.pupil_size(); }
    std::size_t range_size() const override { return base_.stack_size() + base_.pupil_size(); }
    ComplexField apply(const ComplexField& x) const override;
    ComplexField apply_adjoint(const ComplexField& y) const override;
    std::vector<std::size_t> domain_shape() const override { return base_.domain_shape(); }
    std::vector<std::size_t> range_shape() const override { return {range_size()}; }

private:
    PropagationSpec base_;
};

struct LiftedProblem {
    LiftedOperator op;
    Measurement meas;
};

LiftedProblem lift(const PropagationSpec& spec, const Measurement& meas,
                   const RealField& amplitude);

// Global projector-evaluation counters (step-cost instrumentation).
namespace projection_counters {
void reset();
std::uint64_t b_evaluations();
std::uint64_t a_evaluations();
}  // namespace projection_counters

}  // namespace phaseloom
