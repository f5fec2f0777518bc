#include "syksd/grid.hpp"

#include <fftw3.h>

#include <mutex>
#include <unordered_map>

namespace syksd {

// FFTW's planner is not thread-safe; plan creation is serialized, execution is not.
// Plans are cached per thread and per size, created unaligned so they can run on
// any buffer via fftw_execute_dft.
namespace {

std::mutex planner_mutex;

struct PlanPair {
    fftw_plan plus;   // sum_k exp(+2*pi*i*j*k/n) x_k  (FFTW "backward" sign)
    fftw_plan minus;  // sum_j exp(-2*pi*i*j*k/n) X_j  (FFTW "forward" sign)
};

PlanPair& plans_for(int n) {
    thread_local std::unordered_map<int, PlanPair> cache;
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    std::lock_guard<std::mutex> lock(planner_mutex);
    std::vector<cxd> a(n), b(n);
    auto* in = reinterpret_cast<fftw_complex*>(a.data());
    auto* out = reinterpret_cast<fftw_complex*>(b.data());
    PlanPair p;
    p.plus = fftw_plan_dft_1d(n, in, out, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    p.minus = fftw_plan_dft_1d(n, in, out, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    return cache.emplace(n, p).first->second;
}

} // namespace

void forward_transform_raw(const TimeGrid& g, const cxd* in, cxd* out) {
    auto& p = plans_for(g.n);
    fftw_execute_dft(p.plus,
                     reinterpret_cast<fftw_complex*>(const_cast<cxd*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
    for (int j = 0; j < g.n; ++j) out[j] *= g.dt;
}

void inverse_transform_raw(const TimeGrid& g, const cxd* in, cxd* out) {
    auto& p = plans_for(g.n);
    fftw_execute_dft(p.minus,
                     reinterpret_cast<fftw_complex*>(const_cast<cxd*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
    for (int k = 0; k < g.n; ++k) out[k] /= g.T;
}

GridFunction forward_transform(const GridFunction& f) {
    if (f.domain != Domain::Time)
        throw std::invalid_argument("forward_transform: input must be in the time domain");
    GridFunction F(f.grid, Domain::Frequency);
    forward_transform_raw(f.grid, f.values.data(), F.values.data());
    return F;
}

GridFunction inverse_transform(const GridFunction& F) {
    if (F.domain != Domain::Frequency)
        throw std::invalid_argument("inverse_transform: input must be in the frequency domain");
    GridFunction f(F.grid, Domain::Time);
    inverse_transform_raw(F.grid, F.values.data(), f.values.data());
    return f;
}

} // namespace syksd
