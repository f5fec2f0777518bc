// observables.hpp - late-time stationarity filter; decay-rate / frequency extraction
#pragma once

#include "syksd/sdsolver.hpp"

#include <array>
#include <optional>

namespace syksd {

struct DecayFit {
    int a = 0, b = 0;
    double amplitude = 0.0;               // A in A exp(-Gamma t) cos(Omega t)
    double decay_rate = 0.0;              // Gamma >= 0
    std::optional<double> frequency;      // Omega; absent for non-oscillatory fits
    bool oscillatory = false;
    double fit_residual = 0.0;            // rms residual of the log-linear fit
    int maxima_used = 0;
    std::optional<double> imag_decay_rate;  // same pipeline on Im G, diagnostic only
    std::optional<double> imag_frequency;
};

struct StationarityMetric {
    double value = 0.0;
    std::pair<double, double> window;  // (t_start, t_end) inside (0, T/2)
};

// value = dt * sum over the window of max_ab |G_ab(t_k)|, window
// [(1-f) T/2, T/2] in circle distance from t = 0, so both late-time approaches
// contribute; that makes the metric invariant under the symmetry orbit (the KMS
// transposition swaps the two approaches).
StationarityMetric stationarity(const TwoPointFunction& G, double window_fraction = 0.1);

// Peak position of |component(w)|: oscillatory iff the arg-max is off w = 0.
// Throws std::invalid_argument on an identically zero component.
bool classify_oscillatory(const TimeGrid& g, const std::vector<cxd>& component);

struct FitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Gamma from a least-squares line through (t_i, log |Re G(t_i)|), taken at the
// local maxima of |Re G| for oscillatory components and at all usable samples
// (above 1e-12) otherwise; throws FitError when too few points qualify.
DecayFit fit_decay(const TimeGrid& g, const std::vector<cxd>& component, bool oscillatory);

// Omega of the de-damped signal g(t) = Re G(t) exp(Gamma t) on (0, T/2):
// pi / mean spacing of sign changes, refined by parabolic interpolation of the
// extrema positions (the de-damping removes the extremum offset
// tan(Omega t*) = -Gamma/Omega of the damped signal).  Throws FitError with
// fewer than 2 sign changes.
double fit_frequency(const TimeGrid& g, const std::vector<cxd>& component, double gamma_rate);

// Full pipeline per component; per-component failures yield absent fits and
// never abort the record.
std::array<std::optional<DecayFit>, 4> extract_all(const SolutionRecord& rec);

} // namespace syksd
