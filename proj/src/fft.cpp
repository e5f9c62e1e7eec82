#include "phaseloom/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <vector>

#include "phaseloom/errors.hpp"

namespace phaseloom {

namespace {

// FFTW's planner is not thread safe; executing a cached plan on fresh
// buffers via fftw_execute_dft is. Plans use FFTW_ESTIMATE (input is not
// clobbered during planning, algorithm choice is stable) and
// FFTW_UNALIGNED so std::vector storage is acceptable.
class PlanCache {
public:
    fftw_plan get(std::size_t side, int sign) {
        std::lock_guard<std::mutex> lock(mutex_);
        const auto key = std::make_pair(side, sign);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;
        std::vector<fftw_complex> scratch(side * side);
        fftw_plan plan = fftw_plan_dft_2d(static_cast<int>(side), static_cast<int>(side),
                                          scratch.data(), scratch.data(), sign,
                                          FFTW_ESTIMATE | FFTW_UNALIGNED);
        if (plan == nullptr) throw Error("fftw planning failed");
        plans_.emplace(key, plan);
        return plan;
    }

private:
    std::mutex mutex_;
    std::map<std::pair<std::size_t, int>, fftw_plan> plans_;
};

PlanCache& plan_cache() {
    static PlanCache cache;
    return cache;
}

// fftshift moves index 0 to floor(side/2); ifftshift is its inverse.
void cyclic_shift(const cdouble* in, cdouble* out, std::size_t side, std::size_t shift) {
    for (std::size_t i = 0; i < side; ++i) {
        const std::size_t ii = (i + shift) % side;
        for (std::size_t j = 0; j < side; ++j) {
            out[ii * side + (j + shift) % side] = in[i * side + j];
        }
    }
}

void transform(const cdouble* in, cdouble* out, std::size_t side, int sign) {
    const std::size_t n = side * side;
    std::vector<cdouble> work(n);
    const std::size_t half_down = side - side / 2;  // ifftshift amount
    cyclic_shift(in, work.data(), side, half_down % side);
    fftw_plan plan = plan_cache().get(side, sign);
    fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(work.data()),
                     reinterpret_cast<fftw_complex*>(work.data()));
    cyclic_shift(work.data(), out, side, side / 2);
    const double scale = 1.0 / static_cast<double>(side);
    for (std::size_t i = 0; i < n; ++i) out[i] *= scale;
}

}  // namespace

void dft2_centered(const cdouble* in, cdouble* out, std::size_t side) {
    transform(in, out, side, FFTW_FORWARD);
}

void idft2_centered(const cdouble* in, cdouble* out, std::size_t side) {
    transform(in, out, side, FFTW_BACKWARD);
}

ComplexField dft2_centered(const ComplexField& x) {
    if (x.shape.size() != 2 || x.shape[0] != x.shape[1])
        throw DimensionError("dft2: field must be a square grid");
    ComplexField out(x.shape);
    dft2_centered(x.data.data(), out.data.data(), x.shape[0]);
    return out;
}

ComplexField idft2_centered(const ComplexField& x) {
    if (x.shape.size() != 2 || x.shape[0] != x.shape[1])
        throw DimensionError("idft2: field must be a square grid");
    ComplexField out(x.shape);
    idft2_centered(x.data.data(), out.data.data(), x.shape[0]);
    return out;
}

}  // namespace phaseloom
