#pragma once

// Damped fixed-point solver for the Euler-Lagrange characterisation of
// global minimisers,
//
//   rho^{m-1} = ((m-1)/m) (D - chi S_k)_+   on the support,
//
// with the multiplier D fixed each iteration by bisection so the projected
// profile has unit mass. Also the residual diagnostics: EL defect, the 1D
// integral characterisation, support radius, monotonicity, Lipschitz
// estimates, the pointwise inequality behind the 1D minimality proof, and
// the candidate-energy minimality report.

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "aggdiff/energy.hpp"
#include "aggdiff/grid.hpp"
#include "aggdiff/params.hpp"
#include "aggdiff/quadrature.hpp"
#include "aggdiff/riesz.hpp"

namespace aggdiff {

struct SolverConfig {
    double omega = 0.5;        // damping; pure Picard (1.0) can oscillate at the free boundary
    double tol = 1e-10;        // L1 fixed-point tolerance
    int max_iter = 5000;
    double D_lo = -10.0;       // initial multiplier bracket
    double D_hi = 10.0;
    double support_margin = 0.85;  // grow the domain when the support passes this fraction of r_max
    bool auto_domain = true;       // also shrink oversized domains to regain resolution

    void validate() const {
        if (!(omega > 0.0) || !(omega <= 1.0)) throw std::invalid_argument("SolverConfig: omega must lie in (0,1]");
        if (!(tol > 0.0)) throw std::invalid_argument("SolverConfig: tol must be positive");
        if (max_iter < 1) throw std::invalid_argument("SolverConfig: max_iter must be positive");
        if (!(D_lo < D_hi)) throw std::invalid_argument("SolverConfig: D bracket endpoints must be ordered");
        if (!(support_margin > 0.0) || !(support_margin < 1.0))
            throw std::invalid_argument("SolverConfig: support_margin must lie in (0,1)");
    }
};

struct StationaryReport {
    RadialDensity profile;
    PotentialProfile potential;
    double D = 0.0;          // multiplier from the mass bisection
    double D_energy = 0.0;   // D[rho] = 2F + (m-2)/(m-1)||rho||_m^m; recorded, identification not assumed
    double el_residual = 0.0;
    double support_radius = 0.0;
    double monotone_defect = 0.0;
    std::optional<double> char_residual_1d;  // N = 1 only
    int iterations = 0;
    double lipschitz_rho_m1 = 0.0;  // discrete Lipschitz constant of rho^{m-1}
    double lipschitz_rho = 0.0;
    double grad_S_max = 0.0;
    EnergyBreakdown energy;
    bool beyond_mstar = false;  // m >= m*: EL holds for minimisers, stationarity not guaranteed
    int domain_growths = 0;
    bool converged = false;
    bool energy_descent_ok = true;
    double energy_descent_defect = 0.0;  // max positive jump of F after the first 5 iterates
};

inline constexpr double support_threshold_factor = 1e-12;

// ---- EL residual -------------------------------------------------------------

// max over the support of |rho^{m-1} - ((m-1)/m)(D - chi S)_+|, normalised
// by max rho^{m-1}; zero for an exact solution. Depends on D - chi S only.
inline double el_residual(const RadialDensity& rho, const PotentialProfile& pot, double D,
                          const ModelParams& p) {
    if (!(pot.grid == rho.grid)) throw std::invalid_argument("el_residual: grids do not match");
    double max_rho = 0.0;
    for (double v : rho.values) max_rho = std::max(max_rho, v);
    if (max_rho == 0.0) return 0.0;
    const double scale = std::pow(max_rho, p.m - 1.0);
    const double thresh = support_threshold_factor * max_rho;
    double worst = 0.0;
    for (int i = 0; i < rho.grid.n; ++i) {
        if (rho.values[i] <= thresh) continue;
        const double target = std::max(0.0, (p.m - 1.0) / p.m * (D - p.chi * pot.S[i]));
        worst = std::max(worst, std::abs(std::pow(rho.values[i], p.m - 1.0) - target));
    }
    return worst / scale;
}

// ---- pointwise inequality ------------------------------------------------------

struct PointwiseInequality {
    double lhs = 0.0;  // z^{1-m}/(m-1) + z^k/k
    double rhs = 0.0;  // 1/(m-1) + 1/k
    double gap = 0.0;  // lhs - rhs >= 0, zero only at z = 1
};

inline PointwiseInequality pointwise_inequality(double z, double m, double k) {
    if (!(z > 0.0)) throw std::invalid_argument("pointwise_inequality: z must be positive");
    if (!(m > 1.0 - k)) throw std::invalid_argument("pointwise_inequality: requires m > 1 - k");
    PointwiseInequality r;
    r.lhs = std::pow(z, 1.0 - m) / (m - 1.0) + std::pow(z, k) / k;
    r.rhs = 1.0 / (m - 1.0) + 1.0 / k;
    r.gap = r.lhs - r.rhs;
    return r;
}

// ---- 1D integral characterisation ---------------------------------------------

// Residual of rho(p)^m = (chi/2) int int_0^1 |q|^k rho(p-sq) rho(p-sq+q) ds dq
// on the support, normalised by max rho^m. Quadrature: 32-point Gauss in s,
// exact |q|^k cell weights in q against the product sampled at cell
// midpoints through linear interpolation.
inline double char_residual_1d(const LineDensity& rho, const ModelParams& p) {
    if (p.N != 1) throw std::invalid_argument("char_residual_1d: defined only for N = 1");
    const int n = rho.n;
    const double dx = rho.dx();
    double max_rho = 0.0;
    for (double v : rho.values) max_rho = std::max(max_rho, v);
    if (max_rho == 0.0) return 0.0;
    if (rho.values.front() > 1e-10 * max_rho || rho.values.back() > 1e-10 * max_rho)
        throw std::invalid_argument("char_residual_1d: density must be compactly supported in the grid interior");

    auto interp = [&](double x) -> double {
        const double t = (x - rho.center(0)) / dx;
        if (t <= 0.0 || t >= n - 1) return 0.0;
        const int j = static_cast<int>(t);
        const double f = t - j;
        return (1.0 - f) * rho.values[j] + f * rho.values[j + 1];
    };

    // exact cell weights of |q|^k over [d dx, (d+1) dx], d = -n..n-1
    auto qanti = [&](double t) {  // antiderivative of |q|^k
        return (t >= 0.0 ? 1.0 : -1.0) * std::pow(std::abs(t), p.k + 1.0) / (p.k + 1.0);
    };

    const double thresh = support_threshold_factor * max_rho;
    const double scale = std::pow(max_rho, p.m);
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        if (rho.values[i] <= thresh) continue;
        const double pt = rho.center(i);
        double rhs = 0.0;
        for (int d = -n; d < n; ++d) {
            const double q0 = d * dx, q1 = (d + 1) * dx;
            const double w = qanti(q1) - qanti(q0);
            const double qm = (d + 0.5) * dx;
            const double contrib = quad::gauss32_01([&](double s) {
                return interp(pt - s * qm) * interp(pt - s * qm + qm);
            });
            rhs += w * contrib;
        }
        rhs *= 0.5 * p.chi;
        worst = std::max(worst, std::abs(std::pow(rho.values[i], p.m) - rhs));
    }
    return worst / scale;
}

// ---- minimality report ----------------------------------------------------------

struct MinimalityReport {
    double F_bar = 0.0;
    std::vector<double> F_candidates;
    double slack = 0.0;       // 1e-6 |F_bar| quadrature allowance
    double worst_gap = 0.0;   // min (F_candidate - F_bar)
    bool all_above = false;
};

inline MinimalityReport minimality_check_1d(const LineDensity& rho_bar,
                                            const std::vector<LineDensity>& candidates,
                                            const ModelParams& p) {
    MinimalityReport rep;
    rep.F_bar = free_energy(rho_bar, p).F;
    rep.slack = 1e-6 * std::abs(rep.F_bar);
    rep.worst_gap = std::numeric_limits<double>::infinity();
    for (const auto& c : candidates) {
        require_normalized(c, "minimality_check_1d");
        const double Fc = free_energy(c, p).F;
        rep.F_candidates.push_back(Fc);
        rep.worst_gap = std::min(rep.worst_gap, Fc - rep.F_bar);
    }
    rep.all_above = rep.worst_gap >= -rep.slack;
    return rep;
}

// ---- solver ---------------------------------------------------------------------

namespace detail {

// Unit-mass projection G(D) = (((m-1)/m)(D - chi S))_+^{1/(m-1)} with D from
// bisection; mass(G(D)) is non-decreasing in D, so bisection is safe.
struct Projection {
    std::vector<double> values;
    double D = 0.0;
};

inline Projection project_unit_mass(const std::vector<double>& S, const RadialGrid& g,
                                    const ModelParams& p, double D_lo, double D_hi) {
    const double sigma = surface_measure(p.N);
    const double expo = 1.0 / (p.m - 1.0);
    const double fac = (p.m - 1.0) / p.m;
    std::vector<double> G(S.size(), 0.0);
    auto mass_of = [&](double D) {
        double s = 0.0;
        for (std::size_t i = 0; i < S.size(); ++i) {
            const double b = fac * (D - p.chi * S[i]);
            G[i] = b > 0.0 ? std::pow(b, expo) : 0.0;
            s += G[i] * g.volume_weight(static_cast<int>(i), p.N);
        }
        return sigma * s;
    };

    double lo = D_lo, hi = D_hi;
    for (int widen = 0; mass_of(lo) >= 1.0; ++widen) {
        if (widen >= 8) throw std::runtime_error("solve_stationary: multiplier bracket failure (lower end), D_lo = " + std::to_string(lo));
        lo -= 3.0 * (hi - lo);
    }
    for (int widen = 0; mass_of(hi) <= 1.0; ++widen) {
        if (widen >= 8) throw std::runtime_error("solve_stationary: multiplier bracket failure (upper end), D_hi = " + std::to_string(hi));
        hi += 3.0 * (hi - lo);
    }
    double mid = 0.5 * (lo + hi), m_mid = 0.0;
    for (int it = 0; it < 200; ++it) {
        mid = 0.5 * (lo + hi);
        m_mid = mass_of(mid);
        if (std::abs(m_mid - 1.0) <= 1e-12) break;
        (m_mid < 1.0 ? lo : hi) = mid;
    }
    if (std::abs(m_mid - 1.0) > 1e-12) m_mid = mass_of(mid = 0.5 * (lo + hi));
    Projection out;
    out.values = G;
    // G currently holds mass_of(mid)'s state; rescale the tiny residual away
    for (double& v : out.values) v /= m_mid;
    out.D = mid;
    return out;
}

inline double support_radius_of(const RadialDensity& rho) {
    double max_rho = 0.0;
    for (double v : rho.values) max_rho = std::max(max_rho, v);
    const double thresh = support_threshold_factor * max_rho;
    double r = 0.0;
    for (int i = 0; i < rho.grid.n; ++i)
        if (rho.values[i] > thresh) r = rho.grid.edge(i + 1);
    return r;
}

inline double max_abs_increment(const std::vector<double>& v) {
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < v.size(); ++i) worst = std::max(worst, v[i + 1] - v[i]);
    return std::max(worst, 0.0);
}

inline double discrete_lipschitz(const std::vector<double>& v, double h) {
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < v.size(); ++i) worst = std::max(worst, std::abs(v[i + 1] - v[i]));
    return worst / h;
}

} // namespace detail

// Normalized indicator of the unit ball (the existence proof's competitor);
// falls back to a ball of half the domain when r_max < 1.
inline RadialDensity default_initial(const ModelParams& p, const RadialGrid& g) {
    const double R = std::min(1.0, 0.5 * g.r_max);
    std::vector<double> v(g.n, 0.0);
    for (int i = 0; i < g.n; ++i)
        if (g.center(i) < R) v[i] = 1.0;
    return normalized(RadialDensity(g, p.N, std::move(v)));
}

inline StationaryReport solve_stationary(const ModelParams& p, const SolverConfig& cfg,
                                         const RadialDensity& initial) {
    cfg.validate();
    if (initial.N != p.N) throw std::invalid_argument("solve_stationary: density dimension does not match params");
    if (!(p.m > p.m_c))
        throw std::invalid_argument("solve_stationary: requires the diffusion-dominated regime m > m_c");
    require_normalized(initial, "solve_stationary");

    RadialDensity current = initial;
    StationaryReport rep;
    rep.beyond_mstar = p.m_star_exceeded();

    int domain_changes = 0;
    int shrinks_left = 2;
    const double sigma = surface_measure(p.N);

    for (;;) {
        RadialConvolution conv(p, current.grid);
        const RadialGrid g = current.grid;

        std::vector<double> F_history;
        int iter = 0;
        bool converged = false;
        double D = 0.0;
        double last_delta = 0.0;
        std::vector<double> raw;
        for (iter = 0; iter < cfg.max_iter; ++iter) {
            raw = conv.raw(current.values);
            std::vector<double> S(raw.size());
            for (std::size_t i = 0; i < raw.size(); ++i) S[i] = raw[i] / p.k;

            // F of the current iterate from the already-assembled potential
            double Hm = 0.0, cross = 0.0;
            for (int i = 0; i < g.n; ++i) {
                const double w = g.volume_weight(i, p.N);
                Hm += std::pow(current.values[i], p.m) * w;
                cross += raw[i] * current.values[i] * w;
            }
            F_history.push_back(sigma * Hm / (p.m - 1.0) + p.chi * sigma * cross / (2.0 * p.k));

            auto proj = detail::project_unit_mass(S, g, p, cfg.D_lo, cfg.D_hi);
            D = proj.D;
            double delta = 0.0, newmass = 0.0;
            std::vector<double> next(current.values.size());
            for (std::size_t i = 0; i < next.size(); ++i) {
                next[i] = (1.0 - cfg.omega) * current.values[i] + cfg.omega * proj.values[i];
                delta += std::abs(next[i] - current.values[i]) * g.volume_weight(static_cast<int>(i), p.N);
                newmass += next[i] * g.volume_weight(static_cast<int>(i), p.N);
            }
            delta *= sigma;
            newmass *= sigma;
            for (double& v : next) v /= newmass;  // keep Y-membership exact
            current.values = std::move(next);
            last_delta = delta;
            if (delta < cfg.tol) { converged = true; ++iter; break; }
        }

        rep.iterations = iter;
        rep.converged = converged;
        if (!converged)
            throw std::runtime_error("solve_stationary: max_iter = " + std::to_string(cfg.max_iter) +
                                     " exceeded, last L1 update " + std::to_string(last_delta) +
                                     " above tol " + std::to_string(cfg.tol));

        const double support = detail::support_radius_of(current);

        if (support >= cfg.support_margin * g.r_max) {
            if (++domain_changes > 5)
                throw std::runtime_error("solve_stationary: support keeps hitting the domain boundary after 5 growths");
            RadialGrid bigger(g.r_max * 1.5, g.n);
            current = normalized(resample(current, bigger));
            continue;
        }
        if (cfg.auto_domain && shrinks_left > 0 && support < 0.4 * g.r_max) {
            --shrinks_left;
            ++domain_changes;
            RadialGrid snug(2.0 * support, g.n);
            current = normalized(resample(current, snug));
            continue;
        }

        // final diagnostics on the converged grid
        rep.domain_growths = domain_changes;
        rep.profile = current;
        rep.potential = conv.apply(current);
        rep.D = D;
        rep.energy = free_energy(current, p, conv);
        rep.D_energy = rep.energy.D;
        rep.el_residual = el_residual(current, rep.potential, D, p);
        rep.support_radius = support;
        rep.monotone_defect = detail::max_abs_increment(current.values);
        std::vector<double> rho_m1(current.values.size());
        for (std::size_t i = 0; i < rho_m1.size(); ++i) rho_m1[i] = std::pow(current.values[i], p.m - 1.0);
        rep.lipschitz_rho_m1 = detail::discrete_lipschitz(rho_m1, g.dr());
        rep.lipschitz_rho = detail::discrete_lipschitz(current.values, g.dr());
        rep.grad_S_max = detail::discrete_lipschitz(rep.potential.S, g.dr());
        if (p.N == 1) rep.char_residual_1d = char_residual_1d(even_extension(current), p);

        rep.energy_descent_defect = 0.0;
        for (std::size_t j = 5; j + 1 < F_history.size(); ++j)
            rep.energy_descent_defect = std::max(rep.energy_descent_defect, F_history[j + 1] - F_history[j]);
        rep.energy_descent_ok = rep.energy_descent_defect <= 1e-8;
        return rep;
    }
}

// Three-initial uniqueness harness (uniform, triangle, Gaussian-like). The
// first run sizes the domain; all three then share one fixed grid so the
// pairwise L1 distances measure solver spread only. For N = 1 this
// witnesses the uniqueness theorem; for N >= 2 uniqueness is open and the
// distances are reported, never asserted.
struct UniquenessReport {
    std::vector<StationaryReport> runs;
    RadialGrid common_grid;
    std::vector<double> pairwise_l1;  // (0,1), (0,2), (1,2)
    double max_pairwise = 0.0;
};

inline UniquenessReport uniqueness_harness(const ModelParams& p, const SolverConfig& cfg,
                                           const RadialGrid& g0) {
    auto make_initials = [&](const RadialGrid& g) {
        std::vector<RadialDensity> out;
        out.push_back(default_initial(p, g));  // uniform ball
        const double R = std::min(1.0, 0.5 * g.r_max);
        std::vector<double> tri(g.n, 0.0), gauss(g.n, 0.0);
        for (int i = 0; i < g.n; ++i) {
            const double r = g.center(i);
            tri[i] = std::max(0.0, 1.0 - r / R);
            gauss[i] = std::exp(-0.5 * (r / (0.6 * R)) * (r / (0.6 * R)));
        }
        out.push_back(normalized(RadialDensity(g, p.N, std::move(tri))));
        out.push_back(normalized(RadialDensity(g, p.N, std::move(gauss))));
        return out;
    };

    UniquenessReport rep;
    // sizing run
    StationaryReport first = solve_stationary(p, cfg, make_initials(g0)[0]);
    rep.common_grid = first.profile.grid;

    SolverConfig fixed = cfg;
    fixed.auto_domain = false;
    fixed.support_margin = 0.999;  // grid already sized; do not bounce
    for (const auto& init : make_initials(rep.common_grid))
        rep.runs.push_back(solve_stationary(p, fixed, init));

    for (int a = 0; a < 3; ++a)
        for (int b = a + 1; b < 3; ++b) {
            const double d = l1_distance(rep.runs[a].profile, rep.runs[b].profile);
            rep.pairwise_l1.push_back(d);
            rep.max_pairwise = std::max(rep.max_pairwise, d);
        }
    return rep;
}

} // namespace aggdiff
