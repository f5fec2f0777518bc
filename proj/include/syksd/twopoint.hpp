// twopoint.hpp - contour-indexed 2x2 matrix of grid functions (G, Sigma, D all use this shape)
#pragma once

#include "syksd/grid.hpp"

#include <array>
#include <cmath>

namespace syksd {

// G_ab(t) with a,b in {0,1} for the {+,-} contour branches; four complex arrays
// over one shared TimeGrid.  Also reused for self-energies and kernels.
struct TwoPointFunction {
    TimeGrid grid;
    std::array<std::vector<cxd>, 4> comp;  // index 2*a + b

    explicit TwoPointFunction(const TimeGrid& g) : grid(g) {
        for (auto& c : comp) c.assign(g.n, cxd{});
    }

    std::vector<cxd>& c(int a, int b) { return comp[2 * a + b]; }
    const std::vector<cxd>& c(int a, int b) const { return comp[2 * a + b]; }

    double l2() const {
        double s = 0;
        for (const auto& v : comp)
            for (const cxd& z : v) s += std::norm(z);
        return std::sqrt(s);
    }

    double max_abs() const {
        double m = 0;
        for (const auto& v : comp)
            for (const cxd& z : v) m = std::max(m, std::abs(z));
        return m;
    }

    bool finite() const {
        for (const auto& v : comp)
            for (const cxd& z : v)
                if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
        return true;
    }
};

// this <- (1-alpha)*this + alpha*other
inline void mix_into(TwoPointFunction& G, const TwoPointFunction& other, double alpha) {
    for (int i = 0; i < 4; ++i)
        for (int k = 0; k < G.grid.n; ++k)
            G.comp[i][k] = (1.0 - alpha) * G.comp[i][k] + alpha * other.comp[i][k];
}

inline double max_abs_diff(const TwoPointFunction& A, const TwoPointFunction& B) {
    double m = 0;
    for (int i = 0; i < 4; ++i)
        for (int k = 0; k < A.grid.n; ++k)
            m = std::max(m, std::abs(A.comp[i][k] - B.comp[i][k]));
    return m;
}

inline double l2_diff(const TwoPointFunction& A, const TwoPointFunction& B) {
    double s = 0;
    for (int i = 0; i < 4; ++i)
        for (int k = 0; k < A.grid.n; ++k)
            s += std::norm(A.comp[i][k] - B.comp[i][k]);
    return std::sqrt(s);
}

} // namespace syksd
