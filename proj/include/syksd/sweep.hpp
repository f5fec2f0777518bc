// sweep.hpp - multi-start discovery, continuation scans, branch tracking, phase diagrams
#pragma once

#include "syksd/action.hpp"
#include "syksd/observables.hpp"

#include <cstdint>
#include <vector>

namespace syksd {

struct SweepSpec {
    std::vector<double> v_values;     // strictly monotone when continuation is on
    std::vector<double> gamma_values;
    int seeds_per_point = 8;
    std::vector<EnforceSet> enforcement_set = default_enforcement_set();
    enum class Continuation { NONE, BIDIRECTIONAL } continuation = Continuation::BIDIRECTIONAL;
    double refine_step = 0.25;        // internal ladder spacing for marches between v_values
    double dedup_tol = 1e-4;          // relative L2, up to the symmetry orbit
    double stationarity_threshold = 1e-4;  // records at or above are kept but not counted
    double window_fraction = 0.1;
    ActionScheme scheme = ActionScheme::RAW;

    static std::vector<EnforceSet> default_enforcement_set() {
        return {EnforceSet{false, false}, EnforceSet{true, false},
                EnforceSet{false, true}, EnforceSet{true, true}};
    }
    void validate() const;
};

struct Branch {
    Label label = Label::NONE;
    std::vector<std::pair<double, SolutionRecord>> points;  // ascending v
    enum class Provenance { CONTINUATION, SYMMETRY_SEEDED } provenance =
        Provenance::CONTINUATION;
};

struct PhasePoint {
    double gamma = 0.0, v = 0.0;
    int solution_count = 0;           // deduplicated stationary converged records
    std::vector<Label> labels;        // one per counted record, most symmetric first
    Label dominant_label = Label::NONE;
    bool dominance_switch = false;    // dominant label differs from the previous v on this row
};

// Deterministic per-trial seed stream (splitmix-style avalanche of the indices).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t point,
                          std::uint64_t subset, std::uint64_t trial);

// seeds_per_point random starts for every enforcement subset; converged records
// deduplicated up to the symmetry orbit, with label, stationarity, and action
// attached (non-stationary ones stay in, flagged by their stationarity value).
std::vector<SolutionRecord> solve_point(const ModelParams& p, const SweepSpec& spec,
                                        const SolverConfig& base, const TimeGrid& g,
                                        std::uint64_t base_seed,
                                        std::uint64_t point_index = 0);

// Multi-seed solves at both endpoint v's, then warm-start marches over the
// refined ladder in both directions, one pass per enforcement subset compatible
// with the endpoint solution's label (a small seeded kick precedes each rung so
// symmetry-broken branches can leave symmetric parents).  Non-converged rungs
// become gaps; passes are split into branches at label changes, gaps, and
// continuity violations (L2 jump > 0.5 norm), then deduplicated.
std::vector<Branch> continuation_scan(const ModelParams& p, const SweepSpec& spec,
                                      double gamma, const SolverConfig& base,
                                      const TimeGrid& g, std::uint64_t base_seed);

// Everything distinct at a single (gamma, v): solve_point there, plus the
// records a continuation scan of the surrounding v-range deposits at v.  This is
// the discovery protocol behind the solve command and the appendix counts; the
// symmetry-broken branch in the crossing region has no random-start basin and is
// only reachable by marching.
std::vector<SolutionRecord> discover_point(const ModelParams& p, const SweepSpec& spec,
                                           const SolverConfig& base, const TimeGrid& g,
                                           std::uint64_t base_seed);

// Per grid point: merged discovery (per-row continuation + per-point multi-start),
// stationary counts and labels, dominance, and switch flags along each row.
// Rows are independent work units for the worker pool.
std::vector<PhasePoint> phase_diagram(const ModelParams& p, const SweepSpec& spec,
                                      const SolverConfig& base, const TimeGrid& g,
                                      std::uint64_t base_seed, int workers,
                                      std::vector<Branch>* branches_out = nullptr);

} // namespace syksd
