#include "syksd/action.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace syksd {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;

// log det D along ascending omega (slot s maps to j = (s + n/2) mod n), phase
// anchored at the most negative frequency and unwrapped stepwise.
std::vector<cxd> unwrapped_logdet(const TimeGrid& g, const std::vector<cxd>& det_by_j) {
    std::vector<cxd> out(g.n);
    double phase = 0.0, prev_arg = 0.0;
    for (int s = 0; s < g.n; ++s) {
        const int j = (s + g.n / 2) % g.n;
        const cxd d = det_by_j[j];
        const double mag = std::abs(d);
        if (mag < 1e-14) throw SingularKernelError(g.omega(j));
        const double a = std::arg(d);
        if (s == 0) {
            phase = a;  // principal branch at the largest |omega|
        } else {
            double jump = a - prev_arg;
            while (jump > kPi) jump -= 2.0 * kPi;
            while (jump <= -kPi) jump += 2.0 * kPi;
            if (std::abs(jump) > kPi / 2.0) throw UnwrapError(g.omega(j));
            phase += jump;
        }
        prev_arg = a;
        out[j] = cxd(std::log(mag), phase);
    }
    return out;
}

std::vector<cxd> kernel_determinants(const SelfEnergy& sigma, const ModelParams& p) {
    const TimeGrid& g = sigma.smooth.grid;
    TwoPointFunction sw(g);
    for (int i = 0; i < 4; ++i)
        forward_transform_raw(g, sigma.smooth.comp[i].data(), sw.comp[i].data());
    std::vector<cxd> dets(g.n);
    for (int j = 0; j < g.n; ++j) {
        Mat2 swj;
        for (int i = 0; i < 4; ++i) swj.e[i] = sw.comp[i][j];
        dets[j] = dyson_kernel(swj, sigma.delta, p, g.omega(j)).det();
    }
    return dets;
}

cxd ipow(cxd z, int e) {
    cxd r = 1.0;
    while (e-- > 0) r *= z;
    return r;
}

int label_rank(Label l) {
    switch (l) {
        case Label::KC: return 3;
        case Label::C: return 2;
        case Label::K: return 1;
        default: return 0;
    }
}
} // namespace

UnwrapError::UnwrapError(double w)
    : std::runtime_error("log-det phase jump exceeds pi/2 at omega = " + std::to_string(w) +
                         " (grid too coarse)"),
      omega(w) {}

ActionValue on_shell_action(const SolutionRecord& rec, ActionScheme scheme) {
    if (!rec.converged)
        throw std::invalid_argument("on_shell_action: record is not converged");
    const TimeGrid& g = rec.G.grid;
    const ModelParams& p = rec.params;

    SelfEnergy local(g);
    const SelfEnergy* sigma = rec.sigma ? &*rec.sigma : (local = self_energy(rec.G, p), &local);

    const std::vector<cxd> logdet = unwrapped_logdet(g, kernel_determinants(*sigma, p));

    cxd logdet_sum = 0.0;
    if (scheme == ActionScheme::FREE_SUBTRACTED) {
        std::vector<cxd> free_dets(g.n);
        for (int j = 0; j < g.n; ++j) free_dets[j] = free_kernel(p, g.omega(j)).det();
        const std::vector<cxd> ref = unwrapped_logdet(g, free_dets);
        for (int j = 0; j < g.n; ++j) logdet_sum += logdet[j] - ref[j];
    } else {
        for (int j = 0; j < g.n; ++j) logdet_sum += logdet[j];
    }

    cxd inter = 0.0;
    const double pref = (p.J * p.J / 4.0) * (p.q - 1);
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            const auto& comp = rec.G.c(a, b);
            cxd acc = 0.0;
            for (int k = 0; k < g.n; ++k) acc += ipow(comp[k], p.q);
            inter += s_ab(a, b) * pref * acc;
        }

    ActionValue val;
    val.scheme = scheme;
    val.logdet_part = -logdet_sum / (2.0 * g.T);
    val.interaction_part = g.dt * inter;
    val.density = val.logdet_part + val.interaction_part;
    return val;
}

DominanceResult dominant(const std::vector<const SolutionRecord*>& records) {
    if (records.empty()) throw std::invalid_argument("dominant: no solutions given");
    for (const auto* r : records)
        if (!r->action)
            throw std::invalid_argument("dominant: record without an evaluated action");

    double best = records[0]->action->real();
    for (const auto* r : records) best = std::min(best, r->action->real());

    // candidates within the tie window, preferring the more symmetric label
    std::size_t pick = records.size();
    int pick_rank = -1;
    std::size_t in_window = 0;
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (records[i]->action->real() > best + 1e-9) continue;
        ++in_window;
        const Label l = records[i]->label ? records[i]->label->label
                                          : classify(records[i]->G).label;
        if (int r = label_rank(l); r > pick_rank) {
            pick_rank = r;
            pick = i;
        }
    }
    return {pick, in_window > 1};
}

} // namespace syksd
