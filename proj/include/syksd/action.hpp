// action.hpp - complex on-shell action of a converged solution; saddle dominance
#pragma once

#include "syksd/sdsolver.hpp"

#include <vector>

namespace syksd {

enum class ActionScheme { RAW, FREE_SUBTRACTED };

struct ActionValue {
    cxd density;           // logdet_part + interaction_part, action per flavor
    cxd logdet_part;
    cxd interaction_part;
    ActionScheme scheme;
};

struct UnwrapError : std::runtime_error {
    double omega;  // frequency at which the phase jump exceeded pi/2
    explicit UnwrapError(double w);
};

// density = -(1/2T) sum_n [log det D(w_n) - ref_n]
//           + dt sum_k sum_ab (J^2/4)(q-1) s_ab G_ab(t_k)^q
// The log determinant is anchored on the principal branch at the largest |w| and
// continued by phase-unwrapping along ascending w, folding adjacent jumps into
// (-pi, pi]; a jump beyond pi/2 raises UnwrapError (grid too coarse).
// ref_n = 0 for RAW; log det of the J=0 kernel (same m, gamma, v) for
// FREE_SUBTRACTED.  Differences between solutions at equal parameters are
// scheme-independent.
ActionValue on_shell_action(const SolutionRecord& rec, ActionScheme scheme);

struct DominanceResult {
    std::size_t index;
    bool tie;
};

// The dominant saddle minimizes Re(density); the direction is fixed by the
// observed handoff at the branch crossing, where the real parts of competing
// branches intersect and the dominant solution changes sides.  Ties within 1e-9
// go to the more symmetric label (KC > C > K > NONE) and are flagged.
DominanceResult dominant(const std::vector<const SolutionRecord*>& records);

inline DominanceResult dominant(const std::vector<SolutionRecord>& records) {
    std::vector<const SolutionRecord*> ptrs;
    ptrs.reserve(records.size());
    for (const auto& r : records) ptrs.push_back(&r);
    return dominant(ptrs);
}

} // namespace syksd
