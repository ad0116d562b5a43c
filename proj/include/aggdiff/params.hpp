#pragma once

// Parameter bundle for the aggregation-diffusion model
//   d/dt rho = Lap rho^m + chi div(rho grad W_k * rho),   W_k = |x|^k / k,
// with dimension N, kernel exponent k in (-N,0), diffusion exponent m > 1
// and interaction strength chi > 0.

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

#include "aggdiff/gamma_functions.hpp"

namespace aggdiff {

enum class Regime { diffusion_dominated, fair_competition, attraction_dominated };

inline const char* regime_name(Regime r) {
    switch (r) {
        case Regime::diffusion_dominated: return "diffusion-dominated";
        case Regime::fair_competition: return "fair-competition";
        case Regime::attraction_dominated: return "attraction-dominated";
    }
    return "?";
}

struct ModelParams {
    int N = 1;          // space dimension
    double k = -0.5;    // kernel exponent, -N < k < 0
    double m = 2.0;     // diffusion exponent, m > 1
    double chi = 1.0;   // interaction strength

    double s = 0.0;     // (k+N)/2 in (0, N/2)
    double m_c = 0.0;   // critical exponent 1 - k/N
    std::optional<double> m_star;  // nullopt = unbounded (1-N <= k < 0, N >= 2)
    double sigma_N = 0.0;          // surface area of S^{N-1}
    Regime regime = Regime::diffusion_dominated;

    bool singular_range() const { return k <= 1.0 - N; }  // drift needs a principal value
    bool m_star_exceeded() const { return m_star.has_value() && m >= *m_star; }
};

inline ModelParams make_params(int N, double k, double m, double chi) {
    if (N < 1) throw std::invalid_argument("make_params: N must be a positive integer");
    if (!(k > -double(N)) || !(k < 0.0))
        throw std::invalid_argument("make_params: k must lie in (-N, 0), got k = " + std::to_string(k) +
                                    " for N = " + std::to_string(N));
    if (!(m > 1.0))
        throw std::invalid_argument("make_params: m must exceed 1 (fast diffusion out of scope)");
    if (!(chi > 0.0))
        throw std::invalid_argument("make_params: chi must be positive");

    ModelParams p;
    p.N = N;
    p.k = k;
    p.m = m;
    p.chi = chi;
    p.s = 0.5 * (k + N);
    p.m_c = 1.0 - k / N;
    if (k < 1.0 - N)
        p.m_star = (2.0 - k - N) / (1.0 - k - N);
    else
        p.m_star = std::nullopt;  // 1-N <= k < 0 (possible only for N >= 2): m* unbounded
    p.sigma_N = surface_measure(N);

    const double tol = 1e-12 * std::max(1.0, std::abs(p.m_c));
    if (std::abs(m - p.m_c) <= tol)
        p.regime = Regime::fair_competition;
    else if (m > p.m_c)
        p.regime = Regime::diffusion_dominated;
    else
        p.regime = Regime::attraction_dominated;
    return p;
}

} // namespace aggdiff
