#include "phaseloom/solvers.hpp"

#include <chrono>
#include <cmath>

#include "phaseloom/errors.hpp"
#include "phaseloom/rng.hpp"

namespace phaseloom {

namespace {

void check_relax(OperatorKind kind, double relax) {
    switch (kind) {
        case OperatorKind::AP:
        case OperatorKind::DR:
            return;  // no relaxation parameter
        case OperatorKind::DRAP:
            if (!(relax >= 0.0 && relax <= 1.0))
                throw ParameterError("DRAP relaxation must lie in [0, 1]");
            return;
        case OperatorKind::KMDR:
        case OperatorKind::HIO:
        case OperatorKind::RAAR:
            if (!(relax > 0.0 && relax <= 1.0))
                throw ParameterError("relaxation must lie in (0, 1]; zero is not allowed for KMDR, HIO and RAAR");
            return;
    }
    throw ParameterError("unknown operator kind");
}

double wrap_to_pi(double a) {
    while (a > M_PI) a -= 2.0 * M_PI;
    while (a <= -M_PI) a += 2.0 * M_PI;
    return a;
}

}  // namespace

OperatorKind operator_kind_from_name(const std::string& name) {
    if (name == "AP" || name == "ap") return OperatorKind::AP;
    if (name == "DR" || name == "dr") return OperatorKind::DR;
    if (name == "KMDR" || name == "kmdr") return OperatorKind::KMDR;
    if (name == "HIO" || name == "hio") return OperatorKind::HIO;
    if (name == "RAAR" || name == "raar") return OperatorKind::RAAR;
    if (name == "DRAP" || name == "drap") return OperatorKind::DRAP;
    throw ParameterError("unknown operator kind: " + name);
}

std::string operator_kind_name(OperatorKind kind) {
    switch (kind) {
        case OperatorKind::AP: return "AP";
        case OperatorKind::DR: return "DR";
        case OperatorKind::KMDR: return "KMDR";
        case OperatorKind::HIO: return "HIO";
        case OperatorKind::RAAR: return "RAAR";
        case OperatorKind::DRAP: return "DRAP";
    }
    return "?";
}

SolverSpec::SolverSpec(OperatorKind kind_in, double relax_in, std::size_t max_iters_in)
    : kind(kind_in), relax(relax_in), max_iters(max_iters_in) {
    check_relax(kind, relax);
    if (max_iters == 0) throw ParameterError("max_iters must be positive");
}

Schedule::Schedule(std::vector<SolverSpec> stages_in) : stages(std::move(stages_in)) {
    if (stages.empty()) throw ParameterError("schedule must have at least one stage");
}

std::size_t Schedule::total_iters() const {
    std::size_t total = 0;
    for (const SolverSpec& s : stages) total += s.max_iters;
    return total;
}

ComplexField step(OperatorKind kind, double relax, const ComplexField& y, const SolveEnv& env) {
    check_relax(kind, relax);
    if (y.size() != env.op.range_size()) throw DimensionError("step: input shape mismatch");

    const ComplexField b = project_B(y, env.meas);
    switch (kind) {
        case OperatorKind::AP:
            return project_A(b, env.prior, env.op);
        case OperatorKind::DR: {
            // P_A(2b - y) - b + y
            const ComplexField pa = project_A(lincomb(2.0, b, -1.0, y), env.prior, env.op);
            return lincomb(1.0, pa, 1.0, lincomb(-1.0, b, 1.0, y));
        }
        case OperatorKind::KMDR: {
            const ComplexField pa = project_A(lincomb(2.0, b, -1.0, y), env.prior, env.op);
            ComplexField out(y.shape);
            for (std::size_t i = 0; i < y.size(); ++i) {
                const cdouble dr = pa[i] - b[i] + y[i];
                out[i] = relax * dr + (1.0 - relax) * y[i];
            }
            return out;
        }
        case OperatorKind::HIO: {
            // P_A((1+beta) b - y) - (beta b - y)
            const ComplexField pa =
                project_A(lincomb(1.0 + relax, b, -1.0, y), env.prior, env.op);
            ComplexField out(y.shape);
            for (std::size_t i = 0; i < y.size(); ++i)
                out[i] = pa[i] - (relax * b[i] - y[i]);
            return out;
        }
        case OperatorKind::RAAR: {
            const ComplexField pa = project_A(lincomb(2.0, b, -1.0, y), env.prior, env.op);
            ComplexField out(y.shape);
            for (std::size_t i = 0; i < y.size(); ++i) {
                const cdouble dr = pa[i] - b[i] + y[i];
                out[i] = relax * dr + (1.0 - relax) * b[i];
            }
            return out;
        }
        case OperatorKind::DRAP: {
            // P_A((1+lambda) b - lambda y) - lambda (b - y)
            const ComplexField pa =
                project_A(lincomb(1.0 + relax, b, -relax, y), env.prior, env.op);
            ComplexField out(y.shape);
            for (std::size_t i = 0; i < y.size(); ++i)
                out[i] = pa[i] - relax * (b[i] - y[i]);
            return out;
        }
    }
    throw ParameterError("unknown operator kind");
}

ComplexField step_drap_explicit(const ComplexField& y, double lambda, const SolveEnv& env) {
    check_relax(OperatorKind::DRAP, lambda);
    if (y.size() != env.op.range_size() || y.size() != env.meas.r.size())
        throw DimensionError("step: input shape mismatch");

    // Modulus projection expanded inline; combination built in one pass.
    ComplexField b(y.shape);
    ComplexField arg(y.shape);
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double mag = std::abs(y[i]);
        const cdouble unit = (mag == 0.0) ? cdouble(1.0, 0.0) : y[i] / mag;
        b[i] = std::sqrt(env.meas.r[i]) * unit;
        arg[i] = (1.0 + lambda) * b[i] - lambda * y[i];
    }
    ComplexField out = env.op.apply(project_prior(env.op.apply_adjoint(arg), env.prior));
    for (std::size_t i = 0; i < y.size(); ++i) out[i] -= lambda * (b[i] - y[i]);
    return out;
}

RunResult run(const Schedule& schedule, const ComplexField& y0, const SolveEnv& env,
              const RunOptions& options) {
    if (y0.size() != env.op.range_size()) throw DimensionError("run: y0 shape mismatch");
    if (options.truth_phase != nullptr && options.grid == nullptr)
        throw ParameterError("run: rms tracking needs the grid");

    const double y0_norm = norm(y0);
    const double guard = options.divergence_factor * (y0_norm > 0.0 ? y0_norm : 1.0);

    RunResult result{{}, y0, {}};
    result.trace.reserve(schedule.total_iters());
    const auto t_start = std::chrono::steady_clock::now();

    std::size_t iter = 0;
    for (const SolverSpec& stage : schedule.stages) {
        for (std::size_t k = 0; k < stage.max_iters; ++k, ++iter) {
            ComplexField y_next = step(stage.kind, stage.relax, result.y_final, env);
            const double step_norm = norm(lincomb(1.0, y_next, -1.0, result.y_final));
            if (step_norm > guard)
                throw DivergenceError("iteration diverged: step norm " +
                                      std::to_string(step_norm));
            result.y_final = std::move(y_next);

            TraceRow row;
            row.iter = iter;
            row.step_norm = step_norm;
            if (options.reference != nullptr) {
                const ComplexField x = env.op.apply_adjoint(result.y_final);
                row.dist_opt = dist_opt(x, *options.reference);
                if (options.truth_phase != nullptr) {
                    const cdouble alpha = optimal_phase(x, *options.reference);
                    RealField phase(x.shape);
                    for (std::size_t i = 0; i < x.size(); ++i)
                        phase[i] = options.grid->inside(i) ? std::arg(alpha * x[i]) : 0.0;
                    row.rms = rms_error(phase, *options.truth_phase, *options.grid);
                }
            }
            if (options.record_timing) {
                row.elapsed_s =
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
                        .count();
            }
            result.trace.push_back(std::move(row));
        }
        result.stage_ends.push_back(iter);
    }
    return result;
}

ComplexField random_pupil_field(const Grid& grid, const RealField* amplitude,
                                std::uint64_t seed) {
    if (amplitude != nullptr && amplitude->size() != grid.pixel_count())
        throw DimensionError("random_pupil_field: amplitude shape mismatch");
    ComplexField x = ComplexField::grid(grid.side());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double amp = amplitude != nullptr ? (*amplitude)[i] : (grid.inside(i) ? 1.0 : 0.0);
        if (amp == 0.0) continue;
        CounterRng rng(seed, hash64(0x696E6974ull, i));  // per-pixel stream
        x[i] = std::polar(amp, wrap_to_pi(2.0 * M_PI * rng.next_double()));
    }
    return x;
}

ComplexField init_random(const ForwardOperator& op, const Prior& prior, const Grid& grid,
                         std::uint64_t seed) {
    const RealField* amp =
        prior.kind == Prior::Kind::Amplitude ? &prior.amplitude : nullptr;
    return op.apply(random_pupil_field(grid, amp, seed));
}

}  // namespace phaseloom
