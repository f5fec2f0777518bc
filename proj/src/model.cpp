#include "syksd/model.hpp"

#include <cmath>

namespace syksd {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr cxd kI{0.0, 1.0};
}

Mat2 dissipation_matrix(double gamma, double v) {
    Mat2 M;
    M(0, 0) = cxd{-gamma / 2.0, -v};
    M(0, 1) = cxd{gamma / 2.0, 0.0};
    M(1, 0) = cxd{gamma / 2.0, 0.0};
    M(1, 1) = cxd{-gamma / 2.0, v};
    return M;
}

cxd free_green(const ModelParams& p, int a, int b, double t) {
    if (!(p.v > 0)) throw std::domain_error("free_green: closed form requires v > 0");
    if (t == 0.0) return cxd{};  // sgn(0) = 0
    const double sgn = t > 0 ? 1.0 : -1.0;
    const double w0 = std::sqrt(2.0 * p.v / p.m);
    const double pref = std::sqrt(kPi) / (8.0 * std::pow(p.m * p.v, 1.5));
    const int apb = branch_sign(a) + branch_sign(b);
    const cxd bracket = -p.gamma * t * w0 * std::cos(w0 * t) +
                        (p.gamma - 2.0 * apb * kI * p.v) * std::sin(w0 * t);
    return pref * sgn * bracket;
}

HeisenbergState heisenberg_evolve(const ModelParams& p, const HeisenbergState& s0, double t) {
    const double m = p.m;
    const cxd drive = -2.0 * kI * p.gamma;  // coefficient of X- in dP-/dt

    if (std::abs(p.v) < 1e-14) {
        // free-particle limit: X- is linear in t, X+ picks up the integrated drive
        HeisenbergState s;
        s.Xm = s0.Xm + s0.Pp * t / m;
        s.Pp = s0.Pp;
        s.Xp = s0.Xp + s0.Pm * t / m + (drive / m) * (s0.Xm * t * t / 2.0 + s0.Pp * t * t * t / (6.0 * m));
        s.Pm = s0.Pm + drive * (s0.Xm * t + s0.Pp * t * t / (2.0 * m));
        return s;
    }

    // complex frequency covers v of either sign (cosh/sinh branch for v < 0)
    const cxd w0 = std::sqrt(cxd{2.0 * p.v / m, 0.0});
    const cxd c = std::cos(w0 * t), s = std::sin(w0 * t);

    HeisenbergState out;
    out.Xm = s0.Xm * c + s0.Pp / (m * w0) * s;
    out.Pp = -m * w0 * s0.Xm * s + s0.Pp * c;

    // X+ obeys x'' + w0^2 x = (drive/m) * X-(t); the forcing is exactly on resonance.
    const cxd Fc = (drive / m) * s0.Xm;             // cos component of forcing
    const cxd Fs = (drive / m) * s0.Pp / (m * w0);  // sin component
    const cxd xp = t * (Fc * s - Fs * c) / (2.0 * w0);
    const cxd xp_dot = (Fc * s - Fs * c) / (2.0 * w0) + t * (Fc * c + Fs * s) / 2.0;
    const cxd A = s0.Xp;
    const cxd B = (s0.Pm / m + Fs / (2.0 * w0)) / w0;
    out.Xp = A * c + B * s + xp;
    out.Pm = m * (-A * w0 * s + B * w0 * c + xp_dot);
    return out;
}

Mat2 free_kernel(const ModelParams& p, double omega) {
    const cxd kin = kI * p.m * omega * omega / 2.0;
    Mat2 D;
    D(0, 0) = kin - kI * p.v - p.gamma / 2.0;
    D(0, 1) = cxd{p.gamma / 2.0, 0.0};
    D(1, 0) = cxd{p.gamma / 2.0, 0.0};
    D(1, 1) = -kin + kI * p.v - p.gamma / 2.0;
    return D;
}

} // namespace syksd
