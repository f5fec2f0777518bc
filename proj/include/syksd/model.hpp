// model.hpp - model parameters, dissipation matrix, and the exactly solvable J=0 theory
#pragma once

#include "syksd/grid.hpp"

#include <array>

namespace syksd {

struct ModelParams {
    double m = 1.0;    // mass
    double v = 0.0;    // harmonic coefficient, either sign
    double gamma = 0;  // dissipation strength
    double J = 0.0;    // disorder strength
    int q = 4;         // interaction order, even

    void validate() const {
        if (!(m > 0)) throw std::invalid_argument("ModelParams: m must be > 0");
        if (gamma < 0) throw std::invalid_argument("ModelParams: gamma must be >= 0");
        if (J < 0) throw std::invalid_argument("ModelParams: J must be >= 0");
        if (q < 2 || q % 2 != 0) throw std::invalid_argument("ModelParams: q must be even and >= 2");
    }
};

// s_ab = +1 on the diagonal of the contour indices, -1 off it (a,b in {0,1}).
inline double s_ab(int a, int b) { return a == b ? 1.0 : -1.0; }

// Contour sign value: branch index 0 -> +1, 1 -> -1 (used where formulas need a = +-1).
inline int branch_sign(int a) { return a == 0 ? 1 : -1; }

// Small dense 2x2 complex matrix, row-major.
struct Mat2 {
    std::array<cxd, 4> e{};
    cxd& operator()(int r, int c) { return e[2 * r + c]; }
    const cxd& operator()(int r, int c) const { return e[2 * r + c]; }
    cxd det() const { return e[0] * e[3] - e[1] * e[2]; }
};

// Delta-term matrix of the self-energy: M_{++} = -gamma/2 - i v, M_{--} = conj(M_{++}),
// off-diagonals gamma/2.
Mat2 dissipation_matrix(double gamma, double v);

// Closed-form stationary Green's function of the J=0 theory, v > 0:
//   G_ab(t) = sqrt(pi)*sgn(t)/(8 (m v)^{3/2}) *
//             [ -gamma*t*w0*cos(w0 t) + (gamma - 2(a+b) i v) sin(w0 t) ],  w0 = sqrt(2v/m)
// with sgn(0) = 0 and (a+b) the sum of the two branch signs (+-1 each).
cxd free_green(const ModelParams& p, int a, int b, double t);

// State of the linearized contour equations of motion at J=0.
struct HeisenbergState {
    cxd Xp, Pm, Xm, Pp;  // X_+, P_-, X_-, P_+
};

// Exact evolution of  dX+/dt = P-/m,  dP-/dt = -2v X+ - 2i gamma X-,
//                     dX-/dt = P+/m,  dP+/dt = -2v X-.
// The (X-, P+) pair is a closed oscillator untouched by gamma; it drives (X+, P-)
// resonantly, producing the secular t*cos/t*sin terms.
HeisenbergState heisenberg_evolve(const ModelParams& p, const HeisenbergState& init, double t);

// Frequency-space J=0 kernel:
//   D0(w)_{++} = +i m w^2/2 - i v - gamma/2,  D0(w)_{--} = -i m w^2/2 + i v - gamma/2,
//   off-diagonals gamma/2;  det D0 = (m w^2/2 - v)^2 for every w, gamma.
Mat2 free_kernel(const ModelParams& p, double omega);

} // namespace syksd
