#pragma once

// Uniform radial and full-line grids with piecewise-constant densities
// (finite-volume convention), mass functions, norms, dilations and the
// symmetric-decreasing rearrangement. Values are immutable after
// construction; every operation returns a fresh object.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "aggdiff/params.hpp"

namespace aggdiff {

inline constexpr double normalized_mass_tol = 1e-10;

struct RadialGrid {
    double r_max = 1.0;
    int n = 8;

    RadialGrid() = default;
    RadialGrid(double r_max_, int n_) : r_max(r_max_), n(n_) {
        if (!(r_max > 0.0)) throw std::invalid_argument("RadialGrid: r_max must be positive");
        if (n < 8) throw std::invalid_argument("RadialGrid: need at least 8 cells");
    }

    double dr() const { return r_max / n; }
    double edge(int i) const { return (r_max * i) / n; }
    double center(int i) const { return (i + 0.5) * dr(); }

    // exact int_{cell i} r^{N-1} dr = (e_{i+1}^N - e_i^N)/N
    double volume_weight(int i, int N) const {
        return (std::pow(edge(i + 1), N) - std::pow(edge(i), N)) / N;
    }

    bool operator==(const RadialGrid& o) const { return r_max == o.r_max && n == o.n; }
};

struct RadialDensity {
    RadialGrid grid;
    int N = 1;
    std::vector<double> values;  // mass per unit N-volume, cell centers

    RadialDensity() = default;
    RadialDensity(RadialGrid g, int N_, std::vector<double> v) : grid(g), N(N_), values(std::move(v)) {
        if (static_cast<int>(values.size()) != grid.n)
            throw std::invalid_argument("RadialDensity: value count does not match grid");
        for (std::size_t i = 0; i < values.size(); ++i)
            if (!(values[i] >= 0.0))
                throw std::invalid_argument("RadialDensity: negative value at cell " + std::to_string(i));
    }
};

struct LineDensity {
    double L = 1.0;  // domain [-L, L]
    int n = 8;
    std::vector<double> values;

    LineDensity() = default;
    LineDensity(double L_, int n_, std::vector<double> v) : L(L_), n(n_), values(std::move(v)) {
        if (!(L > 0.0)) throw std::invalid_argument("LineDensity: L must be positive");
        if (n < 8) throw std::invalid_argument("LineDensity: need at least 8 cells");
        if (static_cast<int>(values.size()) != n)
            throw std::invalid_argument("LineDensity: value count does not match grid");
        for (std::size_t i = 0; i < values.size(); ++i)
            if (!(values[i] >= 0.0))
                throw std::invalid_argument("LineDensity: negative value at cell " + std::to_string(i));
    }

    double dx() const { return 2.0 * L / n; }
    double center(int i) const { return -L + (i + 0.5) * dx(); }
    double edge(int i) const { return -L + i * dx(); }
};

// ---- mass ----------------------------------------------------------------

inline double mass(const RadialDensity& rho) {
    const double sigma = surface_measure(rho.N);
    double s = 0.0;
    for (int i = 0; i < rho.grid.n; ++i) s += rho.values[i] * rho.grid.volume_weight(i, rho.N);
    return sigma * s;
}

inline double mass(const LineDensity& rho) {
    double s = 0.0;
    for (double v : rho.values) s += v;
    return s * rho.dx();
}

template <class Density>
inline bool is_normalized(const Density& rho, double tol = normalized_mass_tol) {
    return std::abs(mass(rho) - 1.0) <= tol;
}

template <class Density>
inline void require_normalized(const Density& rho, const char* who) {
    const double m = mass(rho);
    if (std::abs(m - 1.0) > normalized_mass_tol)
        throw std::invalid_argument(std::string(who) + ": density must have unit mass, got " + std::to_string(m));
}

template <class Density>
inline Density normalized(Density rho) {
    const double m = mass(rho);
    if (!(m > 0.0)) throw std::invalid_argument("normalized: zero density");
    for (double& v : rho.values) v /= m;
    return rho;
}

// M_rho(R) = mass inside the ball of radius R, exact partial-cell volume.
inline double mass_function(const RadialDensity& rho, double R) {
    if (R < 0.0 || R > rho.grid.r_max * (1.0 + 1e-12))
        throw std::invalid_argument("mass_function: R must lie in [0, r_max]");
    R = std::min(R, rho.grid.r_max);
    const double sigma = surface_measure(rho.N);
    double s = 0.0;
    for (int i = 0; i < rho.grid.n; ++i) {
        const double e0 = rho.grid.edge(i), e1 = rho.grid.edge(i + 1);
        if (R >= e1) {
            s += rho.values[i] * rho.grid.volume_weight(i, rho.N);
        } else if (R > e0) {
            s += rho.values[i] * (std::pow(R, rho.N) - std::pow(e0, rho.N)) / rho.N;
            break;
        } else {
            break;
        }
    }
    return sigma * s;
}

// ---- monotonicity and level sets ------------------------------------------

// Largest index violation of rho being non-increasing, or -1 if monotone.
inline int first_monotonicity_violation(const std::vector<double>& v, double slack = 0.0) {
    for (std::size_t i = 0; i + 1 < v.size(); ++i)
        if (v[i + 1] > v[i] + slack) return static_cast<int>(i);
    return -1;
}

// Radius A_H of the superlevel set {rho >= H} for non-increasing rho:
// the largest grid edge such that rho >= H on every cell inside.
inline double level_set_radius(const RadialDensity& rho, double H) {
    if (!(H > 0.0)) throw std::invalid_argument("level_set_radius: H must be positive");
    const double scale = *std::max_element(rho.values.begin(), rho.values.end());
    const int bad = first_monotonicity_violation(rho.values, 1e-13 * scale);
    if (bad >= 0)
        throw std::invalid_argument("level_set_radius: profile not non-increasing, first violation between cells " +
                                    std::to_string(bad) + " and " + std::to_string(bad + 1) + " (" +
                                    std::to_string(rho.values[bad]) + " -> " + std::to_string(rho.values[bad + 1]) + ")");
    for (int i = 0; i < rho.grid.n; ++i)
        if (rho.values[i] < H) return rho.grid.edge(i);
    return rho.grid.r_max;
}

// ---- norms ----------------------------------------------------------------

inline double lp_norm(const RadialDensity& rho, double p) {
    if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: p must be >= 1");
    const double sigma = surface_measure(rho.N);
    double s = 0.0;
    for (int i = 0; i < rho.grid.n; ++i)
        s += std::pow(rho.values[i], p) * rho.grid.volume_weight(i, rho.N);
    return std::pow(sigma * s, 1.0 / p);
}

inline double lp_norm(const LineDensity& rho, double p) {
    if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: p must be >= 1");
    double s = 0.0;
    for (double v : rho.values) s += std::pow(v, p);
    return std::pow(s * rho.dx(), 1.0 / p);
}

inline double l1_distance(const RadialDensity& a, const RadialDensity& b) {
    if (!(a.grid == b.grid) || a.N != b.N)
        throw std::invalid_argument("l1_distance: incompatible grids");
    const double sigma = surface_measure(a.N);
    double s = 0.0;
    for (int i = 0; i < a.grid.n; ++i)
        s += std::abs(a.values[i] - b.values[i]) * a.grid.volume_weight(i, a.N);
    return sigma * s;
}

inline double l1_distance(const LineDensity& a, const LineDensity& b) {
    if (a.n != b.n || a.L != b.L) throw std::invalid_argument("l1_distance: incompatible grids");
    double s = 0.0;
    for (int i = 0; i < a.n; ++i) s += std::abs(a.values[i] - b.values[i]);
    return s * a.dx();
}

// ---- dilation --------------------------------------------------------------

// rho^lambda(x) = lambda^N rho(lambda x). Piecewise-constant densities are
// dilated exactly by rescaling the grid, so mass and every homogeneity law
// hold to rounding; no resampling is involved.
inline RadialDensity dilate(const RadialDensity& rho, double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("dilate: lambda must be positive");
    const double amp = std::pow(lambda, rho.N);
    std::vector<double> v(rho.values);
    for (double& x : v) x *= amp;
    return RadialDensity(RadialGrid(rho.grid.r_max / lambda, rho.grid.n), rho.N, std::move(v));
}

inline LineDensity dilate(const LineDensity& rho, double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("dilate: lambda must be positive");
    std::vector<double> v(rho.values);
    for (double& x : v) x *= lambda;
    return LineDensity(rho.L / lambda, rho.n, std::move(v));
}

// Conservative resampling onto a new radial grid (used when the solver grows
// or shrinks its domain). Mass in each new cell is the exact overlap integral
// of the piecewise-constant source.
inline RadialDensity resample(const RadialDensity& rho, const RadialGrid& g) {
    std::vector<double> v(g.n, 0.0);
    for (int j = 0; j < g.n; ++j) {
        const double a = g.edge(j), b = g.edge(j + 1);
        double cellmass = 0.0;  // int_a^b rho r^{N-1} dr
        const double dr = rho.grid.dr();
        int i0 = std::max(0, static_cast<int>(std::floor(a / dr)));
        int i1 = std::min(rho.grid.n - 1, static_cast<int>(std::floor(b / dr)));
        for (int i = i0; i <= i1; ++i) {
            const double lo = std::max(a, rho.grid.edge(i));
            const double hi = std::min(b, rho.grid.edge(i + 1));
            if (hi > lo)
                cellmass += rho.values[i] * (std::pow(hi, rho.N) - std::pow(lo, rho.N)) / rho.N;
        }
        v[j] = cellmass / g.volume_weight(j, rho.N);
    }
    return RadialDensity(g, rho.N, std::move(v));
}

// ---- rearrangement ---------------------------------------------------------

// Symmetric-decreasing rearrangement of a line density: same multiset of
// cell values, placed center-out. Mass and every Lp norm are preserved
// exactly; the result is centred at 0 by construction.
inline LineDensity rearrange_1d(const LineDensity& rho) {
    std::vector<double> sorted(rho.values);
    std::sort(sorted.begin(), sorted.end(), std::greater<double>());
    std::vector<double> out(rho.n, 0.0);
    int left = rho.n / 2 - 1, right = rho.n / 2;
    bool to_right = true;
    if (rho.n % 2 == 1) { left = rho.n / 2 - 1; right = rho.n / 2; to_right = true; }
    for (double v : sorted) {
        if (to_right && right < rho.n) out[right++] = v;
        else if (left >= 0) out[left--] = v;
        else out[right++] = v;
        to_right = !to_right;
    }
    return LineDensity(rho.L, rho.n, std::move(out));
}

inline double center_of_mass(const LineDensity& rho) {
    double s = 0.0, mtot = 0.0;
    for (int i = 0; i < rho.n; ++i) {
        s += rho.values[i] * rho.center(i);
        mtot += rho.values[i];
    }
    return mtot > 0.0 ? s / mtot : 0.0;
}

// Even extension of an N=1 radial profile to the full line (2n cells).
inline LineDensity even_extension(const RadialDensity& rho) {
    if (rho.N != 1) throw std::invalid_argument("even_extension: only defined for N = 1 profiles");
    const int n = rho.grid.n;
    std::vector<double> v(2 * n, 0.0);
    for (int i = 0; i < n; ++i) {
        v[n + i] = rho.values[i];
        v[n - 1 - i] = rho.values[i];
    }
    return LineDensity(rho.grid.r_max, 2 * n, std::move(v));
}

} // namespace aggdiff
