#include "syksd/observables.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace syksd {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kUsable = 1e-12;  // samples below this are log-fit noise

struct LineFit {
    double slope, intercept, rms;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double denom = n * sxx - sx * sx;
    const double slope = (n * sxy - sx * sy) / denom;
    const double intercept = (sy - slope * sx) / n;
    double r2 = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double e = y[i] - (intercept + slope * x[i]);
        r2 += e * e;
    }
    return {slope, intercept, std::sqrt(r2 / n)};
}
} // namespace

StationarityMetric stationarity(const TwoPointFunction& G, double window_fraction) {
    if (!(window_fraction > 0.0 && window_fraction < 0.5))
        throw std::invalid_argument("stationarity: window_fraction must be in (0, 0.5)");
    const TimeGrid& g = G.grid;
    const double lo = (1.0 - window_fraction) * g.T / 2.0;
    double acc = 0.0;
    for (int k = 0; k < g.n; ++k) {
        if (g.circle_dist(k) < lo) continue;
        double mx = 0.0;
        for (int i = 0; i < 4; ++i) mx = std::max(mx, std::abs(G.comp[i][k]));
        acc += mx;
    }
    return {acc * g.dt, {lo, g.T / 2.0}};
}

bool classify_oscillatory(const TimeGrid& g, const std::vector<cxd>& component) {
    GridFunction f(g, Domain::Time);
    f.values = component;
    const GridFunction F = forward_transform(f);
    double best = 0.0;
    int arg = 0;
    for (int j = 0; j < g.n; ++j) {
        const double a = std::abs(F.values[j]);
        if (a > best) {
            best = a;
            arg = j;
        }
    }
    if (best == 0.0)
        throw std::invalid_argument("classify_oscillatory: zero component");
    return arg != 0;
}

DecayFit fit_decay(const TimeGrid& g, const std::vector<cxd>& component, bool oscillatory) {
    const int half = g.n / 2;
    std::vector<double> ts, logs;
    if (oscillatory) {
        for (int k = 2; k < half - 1; ++k) {
            const double ym = std::abs(component[k - 1].real());
            const double y = std::abs(component[k].real());
            const double yp = std::abs(component[k + 1].real());
            if (y > ym && y > yp && y > kUsable) {
                ts.push_back(g.time(k));
                logs.push_back(std::log(y));
            }
        }
        if (ts.size() < 3)
            throw FitError("fit_decay: fewer than 3 usable maxima in (0, T/2)");
    } else {
        for (int k = 1; k < half; ++k) {
            const double y = std::abs(component[k].real());
            if (y > kUsable) {
                ts.push_back(g.time(k));
                logs.push_back(std::log(y));
            }
        }
        if (ts.size() < 8)
            throw FitError("fit_decay: fewer than 8 usable samples in (0, T/2)");
    }
    const LineFit lf = least_squares(ts, logs);
    DecayFit fit;
    fit.amplitude = std::exp(lf.intercept);
    fit.decay_rate = -lf.slope;
    fit.oscillatory = oscillatory;
    fit.fit_residual = lf.rms;
    fit.maxima_used = static_cast<int>(ts.size());
    return fit;
}

double fit_frequency(const TimeGrid& g, const std::vector<cxd>& component, double gamma_rate) {
    const int half = g.n / 2;
    int last = 0;
    for (int k = 1; k < half; ++k)
        if (std::abs(component[k].real()) > kUsable) last = k;
    if (last < 2) throw FitError("fit_frequency: no usable samples");

    std::vector<double> damped(last + 1);
    for (int k = 1; k <= last; ++k)
        damped[k] = component[k].real() * std::exp(gamma_rate * g.time(k));

    std::vector<double> crossings;
    for (int k = 1; k < last; ++k) {
        const double a = damped[k], b = damped[k + 1];
        if (a * b < 0.0) crossings.push_back(g.time(k) + g.dt * a / (a - b));
    }
    if (crossings.size() < 2)
        throw FitError("fit_frequency: fewer than 2 sign changes");
    const double omega0 =
        kPi * (crossings.size() - 1) / (crossings.back() - crossings.front());

    // refine from extrema positions, parabolic vertex per extremum
    std::vector<double> extrema;
    for (int k = 2; k < last; ++k) {
        const double dm = damped[k] - damped[k - 1];
        const double dp = damped[k + 1] - damped[k];
        if (dm * dp < 0.0) {
            const double denom = damped[k - 1] - 2.0 * damped[k] + damped[k + 1];
            const double off = denom != 0.0 ? 0.5 * (damped[k - 1] - damped[k + 1]) / denom : 0.0;
            extrema.push_back(g.time(k) + off * g.dt);
        }
    }
    if (extrema.size() >= 2)
        return kPi * (extrema.size() - 1) / (extrema.back() - extrema.front());
    return omega0;
}

std::array<std::optional<DecayFit>, 4> extract_all(const SolutionRecord& rec) {
    const TimeGrid& g = rec.G.grid;
    std::array<std::optional<DecayFit>, 4> out;

    auto pipeline = [&](const std::vector<cxd>& comp) -> std::optional<DecayFit> {
        try {
            const bool osc = classify_oscillatory(g, comp);
            DecayFit fit = fit_decay(g, comp, osc);
            if (osc) fit.frequency = fit_frequency(g, comp, fit.decay_rate);
            return fit;
        } catch (const std::exception&) {
            return std::nullopt;
        }
    };

    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            const auto& comp = rec.G.c(a, b);
            auto fit = pipeline(comp);
            if (fit) {
                fit->a = a;
                fit->b = b;
                // imaginary-part diagnostic through the same pipeline
                std::vector<cxd> imag(comp.size());
                for (std::size_t k = 0; k < comp.size(); ++k)
                    imag[k] = cxd(comp[k].imag(), 0.0);
                if (auto ifit = pipeline(imag)) {
                    fit->imag_decay_rate = ifit->decay_rate;
                    fit->imag_frequency = ifit->frequency;
                }
            }
            out[2 * a + b] = std::move(fit);
        }
    return out;
}

} // namespace syksd
