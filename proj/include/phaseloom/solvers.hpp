#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "phaseloom/analysis.hpp"
#include "phaseloom/field.hpp"
#include "phaseloom/forward_model.hpp"
#include "phaseloom/projectors.hpp"

namespace phaseloom {

enum class OperatorKind { AP, DR, KMDR, HIO, RAAR, DRAP };

OperatorKind operator_kind_from_name(const std::string& name);
std::string operator_kind_name(OperatorKind kind);

// Relaxation legality: DRAP accepts [0, 1]; KMDR, HIO and RAAR accept
// (0, 1]; AP and DR ignore the parameter.
struct SolverSpec {
    OperatorKind kind = OperatorKind::AP;
    double relax = 0.0;
    std::size_t max_iters = 1;

    SolverSpec() = default;
    SolverSpec(OperatorKind kind, double relax, std::size_t max_iters);
};

struct Schedule {
    std::vector<SolverSpec> stages;

    explicit Schedule(std::vector<SolverSpec> stages_in);
    std::size_t total_iters() const;
};

struct SolveEnv {
    const ForwardOperator& op;
    const Prior& prior;
    const Measurement& meas;
};

// One application of the named fixed-point operator. Every kind costs
// one project_B and one project_A evaluation.
ComplexField step(OperatorKind kind, double relax, const ComplexField& y, const SolveEnv& env);

// Fused explicit form of the relaxed step (modulus projection expanded
// inline); agrees with step(DRAP, ...) to rounding.
ComplexField step_drap_explicit(const ComplexField& y, double lambda, const SolveEnv& env);

struct RunOptions {
    const ComplexField* reference = nullptr;    // pupil-space truth for dist_opt
    const RealField* truth_phase = nullptr;     // aperture truth for per-iteration rms
    const Grid* grid = nullptr;                 // required when truth_phase is set
    bool record_timing = false;                 // fill elapsed_s with wall time
    double divergence_factor = 1e6;             // abort when step norm exceeds this * ||y0||
};

struct RunResult {
    Trace trace;
    ComplexField y_final;
    std::vector<std::size_t> stage_ends;  // cumulative iteration count per stage
};

// Executes the stages sequentially, one trace row per iteration. Throws
// DivergenceError when the step norm explodes.
RunResult run(const Schedule& schedule, const ComplexField& y0, const SolveEnv& env,
              const RunOptions& options = {});

// Pupil field with the given amplitude (aperture indicator when null)
// and i.i.d. uniform random phase; deterministic in the seed.
ComplexField random_pupil_field(const Grid& grid, const RealField* amplitude,
                                std::uint64_t seed);

// Random feasible starting point y0 = M x0 in the range of the operator.
ComplexField init_random(const ForwardOperator& op, const Prior& prior, const Grid& grid,
                         std::uint64_t seed);

}  // namespace phaseloom
