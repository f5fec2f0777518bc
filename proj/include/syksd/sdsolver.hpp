// sdsolver.hpp - the fixed-point engine: G -> Sigma -> D -> G with mixing and enforcement
#pragma once

#include "syksd/model.hpp"
#include "syksd/symmetry.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>

namespace syksd {

// Sigma_ab(t) = i (J^2 q/4) s_ab G_ab^{q-1}(t)  plus a frequency-independent
// delta term kept exact (never discretized onto the grid).
struct SelfEnergy {
    TwoPointFunction smooth;  // same domain as the G it was built from (time here)
    Mat2 delta;               // -i * dissipation_matrix(gamma, v)

    explicit SelfEnergy(const TimeGrid& g) : smooth(g) {}
};

struct EnforceSet {
    bool kms = false;
    bool conj = false;

    bool any() const { return kms || conj; }
    bool operator==(const EnforceSet&) const = default;
};

struct SolverConfig {
    double mixing = 0.5;          // alpha in (0, 1]
    int max_iterations = 5000;
    double convergence_tol = 1e-9;  // on the max-abs SD-map update |G_new - G|
    EnforceSet enforce{};
    std::uint64_t seed = 1;       // random-ansatz seed (ignored for warm starts)
    double amplitude = 0.3;
    double envelope_tau = 2.0;
    std::optional<TwoPointFunction> warm_start;  // overrides the random ansatz when set
    double regularizer = 0.0;     // eps added as -i*eps*I to D(w) only when det is near-singular

    void validate() const {
        if (!(mixing > 0.0 && mixing <= 1.0))
            throw std::invalid_argument("SolverConfig: mixing must be in (0, 1]");
        if (!(convergence_tol > 0.0))
            throw std::invalid_argument("SolverConfig: convergence_tol must be > 0");
        if (max_iterations < 1)
            throw std::invalid_argument("SolverConfig: max_iterations must be >= 1");
        if (!(amplitude > 0.0) || !(envelope_tau > 0.0))
            throw std::invalid_argument("SolverConfig: amplitude and envelope_tau must be > 0");
        if (regularizer < 0.0)
            throw std::invalid_argument("SolverConfig: regularizer must be >= 0");
    }
};

struct SolutionRecord {
    TwoPointFunction G;      // time domain; self-consistent with sigma below
    std::optional<SelfEnergy> sigma;      // droppable for bulk storage; recomputable from G
    ModelParams params;
    SolverConfig config;     // stored without the warm-start payload (see warm_started)
    bool warm_started = false;
    bool converged = false;
    int iterations = 0;
    double final_update = 0.0;            // max-abs SD-map update at exit
    std::optional<cxd> action;            // filled by the action module
    std::optional<SymmetryLabel> label;   // filled by classify
    std::optional<double> stationarity;   // filled by observables

    explicit SolutionRecord(const TimeGrid& g) : G(g) {}
};

struct SingularKernelError : std::runtime_error {
    double omega;
    explicit SingularKernelError(double w);
};

struct DivergenceError : std::runtime_error {
    int iteration;
    explicit DivergenceError(int it);
};

// Smooth part i (J^2 q/4) s_ab G^{q-1} pointwise in time; throws std::overflow_error
// when |G|^{q-1} leaves the floating-point range (a diverging iterate).
SelfEnergy self_energy(const TwoPointFunction& G, const ModelParams& p);

// D(w) = i (m w^2/2) diag(1,-1) + i*Sigma_smooth(w) + i*delta  for one frequency.
// The kinetic sign follows the same convention resolution as free_kernel: at J=0
// this reduces to free_kernel exactly.
Mat2 dyson_kernel(const Mat2& sigma_smooth_w, const Mat2& sigma_delta,
                  const ModelParams& p, double omega);

// G(w) = -1/2 D^{-1}(w) for every grid frequency, returned in the time domain.
// Near-singular kernels (|det| < 1e-14) throw unless regularizer > 0, in which
// case -i*eps*I is added to D at the offending frequencies only.
TwoPointFunction dyson_step(const SelfEnergy& sigma, const ModelParams& p,
                            double regularizer = 0.0);

// Damped fixed-point iteration with optional per-step symmetry projection.
// Convergence is tested on the unmixed update; once it passes, the projected
// full step is stored after verifying it is itself a fixed point, so the record
// satisfies the enforced relations exactly and the SD residual within
// convergence_tol.  Failed verifications fall back to the damped dynamics.
// Oscillating updates halve alpha (floor mixing/64); a decreasing trend over a
// 64-iteration window doubles it back.  Deterministic given (params, config, grid).
SolutionRecord iterate(const ModelParams& p, const SolverConfig& cfg, const TimeGrid& g);

// amplitude * (smoothed unit-RMS complex gaussian sequence) * exp(-d(t,0)/tau),
// d = circle distance.  Moving-average smoothing width n/128.  Deterministic in
// seed via an explicitly coded Box-Muller on mt19937_64 (identical across platforms).
TwoPointFunction random_ansatz(const TimeGrid& g, std::uint64_t seed,
                               double amplitude, double envelope_tau);

// Adds seeded complex gaussian noise of scale eps to every sample; continuation
// scans use this to let symmetry-broken branches emerge from symmetric ones.
void perturb(TwoPointFunction& G, std::uint64_t seed, double eps);

} // namespace syksd
