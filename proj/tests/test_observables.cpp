#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "syksd/observables.hpp"

#include <random>

using namespace syksd;

// A exp(-Gamma |t|) * cos(Omega t) on the circle (Omega = 0 -> pure decay),
// with a small imaginary copy so the diagnostic fits have something to chew on
static std::vector<cxd> damped(const TimeGrid& g, double A, double Gamma, double Omega) {
    std::vector<cxd> out(g.n);
    for (int k = 0; k < g.n; ++k) {
        const double t = g.wrapped_time(k);
        const double re = A * std::exp(-Gamma * std::abs(t)) * std::cos(Omega * t);
        out[k] = cxd(re, 0.25 * re);
    }
    return out;
}

TEST_CASE("oscillatory classification from the spectral peak") {
    TimeGrid g(50.0, 2048);
    CHECK(classify_oscillatory(g, damped(g, 3.0, 0.7, 4.0)));
    CHECK(!classify_oscillatory(g, damped(g, 1.0, 1.2, 0.0)));
    std::vector<cxd> zero(g.n, cxd(0, 0));
    CHECK_THROWS_AS(classify_oscillatory(g, zero), std::invalid_argument);
}

TEST_CASE("synthetic oracle: 3 exp(-0.7 t) cos(4 t)") {
    TimeGrid g(50.0, 4096);
    const auto comp = damped(g, 3.0, 0.7, 4.0);
    REQUIRE(classify_oscillatory(g, comp));

    DecayFit f = fit_decay(g, comp, true);
    CHECK(f.oscillatory);
    CHECK(f.decay_rate == doctest::Approx(0.7).epsilon(1e-3));
    // the log-linear fit runs through the maxima of |f|, which sit below the
    // envelope by the factor W / sqrt(G^2 + W^2) (extrema of a damped cosine)
    const double peak = 4.0 / std::hypot(0.7, 4.0);
    CHECK(f.amplitude == doctest::Approx(3.0 * peak).epsilon(2e-3));
    CHECK(f.maxima_used >= 3);
    CHECK(f.fit_residual < 1e-2);

    const double W = fit_frequency(g, comp, f.decay_rate);
    CHECK(W == doctest::Approx(4.0).epsilon(1e-3));
}

TEST_CASE("synthetic oracle: pure decay at rate 1.2") {
    TimeGrid g(50.0, 4096);
    const auto comp = damped(g, 2.0, 1.2, 0.0);
    REQUIRE(!classify_oscillatory(g, comp));

    DecayFit f = fit_decay(g, comp, false);
    CHECK(!f.oscillatory);
    CHECK(f.decay_rate == doctest::Approx(1.2).epsilon(1e-6));
    CHECK(f.amplitude == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(f.fit_residual < 1e-9);
}

TEST_CASE("de-damping removes the extremum offset tan(W t*) = -Gamma/W") {
    // for exp(-G t) cos(W t) every extremum sits early by atan(G/W)/W;
    // after multiplying the decay back out the parabolic vertex lands on k pi / W
    TimeGrid g(50.0, 1 << 15);
    const double Gamma = 0.7, Omega = 4.0;
    const auto comp = damped(g, 3.0, Gamma, Omega);

    auto vertex_near = [&](const std::vector<double>& y, int k0) {
        int k = k0;
        for (int i = k0 - 40; i <= k0 + 40; ++i)
            if (std::abs(y[i]) > std::abs(y[k])) k = i;
        const double num = 0.5 * (std::abs(y[k - 1]) - std::abs(y[k + 1]));
        const double den = std::abs(y[k - 1]) - 2 * std::abs(y[k]) + std::abs(y[k + 1]);
        return g.time(k) + num / den * g.dt;
    };

    std::vector<double> raw(g.n), dedamped(g.n);
    for (int k = 0; k < g.n; ++k) {
        raw[k] = comp[k].real();
        dedamped[k] = comp[k].real() * std::exp(Gamma * g.time(k));
    }
    const int m = 3;  // third interior extremum, at t = 3 pi / Omega
    const double t_true = m * 3.14159265358979324 / Omega;
    const int k0 = static_cast<int>(t_true / g.dt);

    const double offset_raw = t_true - vertex_near(raw, k0);
    const double offset_ded = std::abs(t_true - vertex_near(dedamped, k0));
    const double predicted = std::atan(Gamma / Omega) / Omega;

    CHECK(offset_raw == doctest::Approx(predicted).epsilon(0.02));
    CHECK(offset_ded < 0.05 * predicted);
}

TEST_CASE("property suite: 250 random damped signals recovered to 1e-3") {
    TimeGrid g(50.0, 2048);
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> uG(0.1, 1.2), uW(1.0, 6.0), uA(0.5, 5.0),
        coin(0.0, 1.0);
    int good = 0, total = 0;
    for (int trial = 0; trial < 250; ++trial) {
        const double A = uA(rng), Gamma = uG(rng);
        const bool osc = coin(rng) < 0.7;
        const double Omega = osc ? uW(rng) : 0.0;
        const auto comp = damped(g, A, Gamma, Omega);
        ++total;
        try {
            const bool cls = classify_oscillatory(g, comp);
            if (cls != osc) continue;
            DecayFit f = fit_decay(g, comp, cls);
            if (std::abs(f.decay_rate - Gamma) > 1e-3 * std::max(1.0, Gamma)) continue;
            if (cls) {
                const double W = fit_frequency(g, comp, f.decay_rate);
                if (std::abs(W - Omega) > 1e-3 * Omega) continue;
            }
            ++good;
        } catch (const FitError&) {
        }
    }
    CHECK(good >= total * 99 / 100);
}

TEST_CASE("stationarity: windowed late-time weight, symmetric in the orbit") {
    TimeGrid g(50.0, 2048);
    TwoPointFunction G(g);
    for (int i = 0; i < 4; ++i) G.comp[i] = damped(g, 1.0, 0.5, 3.0);

    StationarityMetric s = stationarity(G, 0.1);
    CHECK(s.window.first == doctest::Approx(0.9 * 25.0));
    CHECK(s.window.second == doctest::Approx(25.0));

    // faster decay -> smaller metric
    TwoPointFunction H(g);
    for (int i = 0; i < 4; ++i) H.comp[i] = damped(g, 1.0, 1.0, 3.0);
    CHECK(stationarity(H, 0.1).value < s.value);
    CHECK(stationarity(H, 0.1).value > 0);

    // wider window -> larger weight
    CHECK(stationarity(G, 0.3).value > s.value);

    // the metric sees both late-time approaches: loading only the ascending
    // half (t just below T/2) and only the descending half (t just above)
    // must give the same value
    TwoPointFunction L(g), R(g);
    const int half = g.n / 2;
    L.comp[0][half - 4] = 1.0;  // t near +T/2 from below
    R.comp[0][half + 4] = 1.0;  // same circle distance, other branch
    CHECK(stationarity(L, 0.1).value == doctest::Approx(stationarity(R, 0.1).value));

    // an exact fixed-point tail: e^{-Gamma T/2} scale
    const double expect_scale = std::exp(-0.5 * 0.9 * 25.0);
    CHECK(s.value > 0.1 * expect_scale);
    CHECK(s.value < 100 * expect_scale);
}

TEST_CASE("extract_all survives hopeless components") {
    TimeGrid g(50.0, 2048);
    SolutionRecord rec(g);
    rec.converged = true;
    rec.G.comp[0] = damped(g, 3.0, 0.7, 4.0);
    rec.G.comp[1] = damped(g, 1.0, 1.2, 0.0);
    // comp[2] identically zero, comp[3] dies immediately
    rec.G.comp[3][0] = 1.0;

    auto fits = extract_all(rec);
    REQUIRE(fits[0].has_value());
    CHECK(fits[0]->decay_rate == doctest::Approx(0.7).epsilon(1e-2));
    REQUIRE(fits[0]->frequency.has_value());
    CHECK(*fits[0]->frequency == doctest::Approx(4.0).epsilon(1e-2));
    CHECK(fits[0]->imag_decay_rate.has_value());
    REQUIRE(fits[1].has_value());
    CHECK(fits[1]->decay_rate == doctest::Approx(1.2).epsilon(1e-3));
    CHECK(!fits[1]->frequency.has_value());
    CHECK(!fits[2].has_value());
    CHECK(!fits[3].has_value());
}
