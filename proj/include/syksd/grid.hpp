// grid.hpp - periodic time grid, frequency grid, and the DFT contract
#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

namespace syksd {

using cxd = std::complex<double>;

// Periodic grid for the relative time t = t1 - t2 on a circle of length T.
// Array index k holds t_k = k*dt, with k >= n/2 representing t_k - T (wrap).
// Frequency slot j holds w_j = 2*pi*sig(j)/T, sig(j) = j < n/2 ? j : j - n.
struct TimeGrid {
    double T;
    int n;
    double dt;

    TimeGrid(double period, int n_points) : T(period), n(n_points), dt(period / n_points) {
        if (n_points < 16 || n_points % 2 != 0)
            throw std::invalid_argument("TimeGrid: n_points must be even and >= 16");
        if (!(period > 0))
            throw std::invalid_argument("TimeGrid: period must be positive");
    }

    double time(int k) const { return k * dt; }                      // raw array time in [0, T)
    double wrapped_time(int k) const {                               // signed circle time in [-T/2, T/2)
        return k < n / 2 ? k * dt : k * dt - T;
    }
    double circle_dist(int k) const {                                // |t| on the circle
        int m = k % n; if (m < 0) m += n;
        return std::min(m, n - m) * dt;
    }
    int freq_index(int j) const { return j < n / 2 ? j : j - n; }    // signed mode number
    double omega(int j) const { return 2.0 * 3.141592653589793238462643383279502884 * freq_index(j) / T; }

    bool operator==(const TimeGrid& o) const { return T == o.T && n == o.n; }
};

// Complex function sampled on a TimeGrid, tagged with its current domain.
enum class Domain { Time, Frequency };

struct GridFunction {
    TimeGrid grid;
    Domain domain;
    std::vector<cxd> values;

    GridFunction(const TimeGrid& g, Domain d) : grid(g), domain(d), values(g.n, cxd{}) {}
};

// F(w_j) = dt * sum_k exp(+i w_j t_k) f(t_k).  Discrete delta (1/dt at k=0) -> constant 1.
GridFunction forward_transform(const GridFunction& f);

// f(t_k) = (1/T) * sum_j exp(-i w_j t_k) F(w_j).  Exact inverse of forward_transform.
GridFunction inverse_transform(const GridFunction& F);

// In-place versions working on raw arrays of length grid.n (used in hot loops).
void forward_transform_raw(const TimeGrid& g, const cxd* in, cxd* out);
void inverse_transform_raw(const TimeGrid& g, const cxd* in, cxd* out);

} // namespace syksd
