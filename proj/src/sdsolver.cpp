#include "syksd/sdsolver.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <utility>

namespace syksd {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;

cxd ipow(cxd z, int e) {
    cxd r = 1.0;
    while (e-- > 0) r *= z;
    return r;
}

// Explicit Box-Muller on the raw mt19937_64 stream: std::normal_distribution is
// implementation-defined, this is not.
struct GaussianStream {
    std::mt19937_64 rng;
    explicit GaussianStream(std::uint64_t seed) : rng(seed) {}
    double uniform() {  // (0, 1]
        return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
    }
    cxd complex_normal() {
        double a = std::sqrt(-2.0 * std::log(uniform()));
        double phi = 2.0 * kPi * uniform();
        return cxd(a * std::cos(phi), a * std::sin(phi));
    }
};
} // namespace

SingularKernelError::SingularKernelError(double w)
    : std::runtime_error("singular Dyson kernel at omega = " + std::to_string(w)), omega(w) {}

DivergenceError::DivergenceError(int it)
    : std::runtime_error("iterate diverged at iteration " + std::to_string(it)), iteration(it) {}

SelfEnergy self_energy(const TwoPointFunction& G, const ModelParams& p) {
    SelfEnergy s(G.grid);
    const cxd pref = cxd(0.0, 1.0) * (p.J * p.J * p.q / 4.0);
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            const auto& src = G.c(a, b);
            auto& dst = s.smooth.c(a, b);
            const cxd f = pref * s_ab(a, b);
            for (int k = 0; k < G.grid.n; ++k) {
                cxd val = f * ipow(src[k], p.q - 1);
                if (!std::isfinite(val.real()) || !std::isfinite(val.imag()))
                    throw std::overflow_error(
                        "self_energy: |G|^(q-1) left the floating-point range (diverging iterate)");
                dst[k] = val;
            }
        }
    const Mat2 M = dissipation_matrix(p.gamma, p.v);
    for (int i = 0; i < 4; ++i) s.delta.e[i] = cxd(0.0, -1.0) * M.e[i];
    return s;
}

Mat2 dyson_kernel(const Mat2& sigma_smooth_w, const Mat2& sigma_delta,
                  const ModelParams& p, double omega) {
    const cxd i(0.0, 1.0);
    Mat2 D;
    for (int k = 0; k < 4; ++k) D.e[k] = i * (sigma_smooth_w.e[k] + sigma_delta.e[k]);
    const cxd kin = i * (0.5 * p.m * omega * omega);
    D(0, 0) += kin;
    D(1, 1) -= kin;
    return D;
}

TwoPointFunction dyson_step(const SelfEnergy& sigma, const ModelParams& p,
                            double regularizer) {
    const TimeGrid& g = sigma.smooth.grid;
    TwoPointFunction sw(g);
    for (int i = 0; i < 4; ++i)
        forward_transform_raw(g, sigma.smooth.comp[i].data(), sw.comp[i].data());

    TwoPointFunction Gw(g);
    for (int j = 0; j < g.n; ++j) {
        Mat2 swj;
        for (int i = 0; i < 4; ++i) swj.e[i] = sw.comp[i][j];
        const double w = g.omega(j);
        Mat2 D = dyson_kernel(swj, sigma.delta, p, w);
        cxd det = D.det();
        if (std::abs(det) < 1e-14) {
            if (regularizer > 0.0) {
                D(0, 0) -= cxd(0.0, regularizer);
                D(1, 1) -= cxd(0.0, regularizer);
                det = D.det();
                if (std::abs(det) == 0.0) throw SingularKernelError(w);
            } else {
                throw SingularKernelError(w);
            }
        }
        const cxd f = -0.5 / det;  // -1/2 D^{-1} = -1/(2 det) adj(D)
        Gw.c(0, 0)[j] = f * D(1, 1);
        Gw.c(0, 1)[j] = -f * D(0, 1);
        Gw.c(1, 0)[j] = -f * D(1, 0);
        Gw.c(1, 1)[j] = f * D(0, 0);
    }

    TwoPointFunction G(g);
    for (int i = 0; i < 4; ++i)
        inverse_transform_raw(g, Gw.comp[i].data(), G.comp[i].data());
    return G;
}

SolutionRecord iterate(const ModelParams& p, const SolverConfig& cfg, const TimeGrid& g) {
    p.validate();
    cfg.validate();
    if (cfg.warm_start && !(cfg.warm_start->grid == g))
        throw std::invalid_argument("iterate: warm start lives on a different grid");

    SolutionRecord rec(g);
    rec.params = p;
    rec.config = cfg;
    rec.config.warm_start.reset();
    rec.warm_started = cfg.warm_start.has_value();

    TwoPointFunction G = cfg.warm_start
                             ? *cfg.warm_start
                             : random_ansatz(g, cfg.seed, cfg.amplitude, cfg.envelope_tau);

    auto project = [&](TwoPointFunction& X) {
        if (cfg.enforce.kms) X = project_kms(X);
        if (cfg.enforce.conj) X = project_conjugation(X);
    };

    double alpha = cfg.mixing;
    const double alpha_floor = cfg.mixing / 64.0;
    double u1 = -1.0, u2 = -1.0;  // previous two updates, newest first
    double window_ref = std::numeric_limits<double>::infinity();
    int since_window = 0;
    double last_r = std::numeric_limits<double>::infinity();

    auto tune_alpha = [&](double r) {
        if (u2 >= 0.0 && r > u1 && u1 > u2 && alpha > alpha_floor * (1.0 + 1e-12)) {
            alpha = std::max(alpha / 2.0, alpha_floor);
            u1 = u2 = -1.0;
        } else {
            u2 = u1;
            u1 = r;
        }
        if (++since_window >= 64) {
            if (r < window_ref && alpha < cfg.mixing)
                alpha = std::min(2.0 * alpha, cfg.mixing);
            window_ref = r;
            since_window = 0;
        }
    };

    for (int it = 1; it <= cfg.max_iterations; ++it) {
        SelfEnergy S = self_energy(G, p);
        TwoPointFunction Gn = dyson_step(S, p, cfg.regularizer);
        project(Gn);
        double r = max_abs_diff(G, Gn);

        if (r <= cfg.convergence_tol) {
            // Candidate: the projected full step.  Verify it is itself a fixed
            // point, so the stored G satisfies both the residual bound and the
            // enforced relations exactly (projectors are exact on their own
            // output).  On failure keep the damped dynamics rather than jumping
            // to the full step: where the undamped map is locally expanding the
            // jump re-amplifies the error and the loop never settles.
            SelfEnergy S2 = self_energy(Gn, p);
            TwoPointFunction G2 = dyson_step(S2, p, cfg.regularizer);
            project(G2);
            double r2 = max_abs_diff(Gn, G2);
            if (r2 <= cfg.convergence_tol) {
                rec.G = std::move(Gn);
                rec.sigma.emplace(std::move(S2));
                rec.converged = true;
                rec.iterations = it;
                rec.final_update = r2;
                return rec;
            }
        }

        mix_into(G, Gn, alpha);
        if (G.max_abs() > 1e10) throw DivergenceError(it);
        last_r = r;
        tune_alpha(r);
    }

    rec.G = std::move(G);
    rec.sigma.emplace(self_energy(rec.G, p));
    rec.converged = false;
    rec.iterations = cfg.max_iterations;
    rec.final_update = last_r;
    return rec;
}

TwoPointFunction random_ansatz(const TimeGrid& g, std::uint64_t seed,
                               double amplitude, double envelope_tau) {
    if (!(amplitude > 0.0) || !(envelope_tau > 0.0))
        throw std::invalid_argument("random_ansatz: amplitude and envelope_tau must be > 0");

    GaussianStream gs(seed);
    const int W = std::max(1, g.n / 128);
    TwoPointFunction G(g);
    std::vector<cxd> raw(g.n);

    for (int i = 0; i < 4; ++i) {
        for (int k = 0; k < g.n; ++k) raw[k] = gs.complex_normal();

        auto& dst = G.comp[i];
        auto at = [&](int k) { return raw[((k % g.n) + g.n) % g.n]; };
        cxd acc = 0.0;
        for (int j = 0; j < W; ++j) acc += at(j - W / 2);
        for (int k = 0; k < g.n; ++k) {  // centered circular moving average
            dst[k] = acc / static_cast<double>(W);
            acc -= at(k - W / 2);
            acc += at(k + W - W / 2);
        }

        double ms = 0.0;
        for (const cxd& z : dst) ms += std::norm(z);
        const double rms = std::sqrt(ms / g.n);
        const double scale = amplitude / rms;
        for (int k = 0; k < g.n; ++k)
            dst[k] *= scale * std::exp(-g.circle_dist(k) / envelope_tau);
    }
    return G;
}

void perturb(TwoPointFunction& G, std::uint64_t seed, double eps) {
    GaussianStream gs(seed);
    for (auto& comp : G.comp)
        for (cxd& z : comp) z += eps * gs.complex_normal();
}

} // namespace syksd
