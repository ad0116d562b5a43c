#pragma once

// Property-test families behind the `verify` CLI subcommand. Each suite
// runs a set of named checks and reports pass/fail with a short detail
// string; the CLI renders the table. Randomized checks draw from a seeded
// generator so runs are reproducible.

#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "aggdiff/energy.hpp"
#include "aggdiff/evolution.hpp"
#include "aggdiff/grid.hpp"
#include "aggdiff/hypergeom.hpp"
#include "aggdiff/params.hpp"
#include "aggdiff/riesz.hpp"
#include "aggdiff/stationary.hpp"

namespace aggdiff::verify {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

namespace detail_v {

inline std::string num(double v) {
    std::ostringstream os;
    os.precision(3);
    os << std::scientific << v;
    return os.str();
}

inline LineDensity random_line_density(std::mt19937_64& rng, double L, int n) {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::vector<double> v(n);
    for (double& x : v) x = U(rng);
    return normalized(LineDensity(L, n, std::move(v)));
}

inline RadialDensity random_radial_density(std::mt19937_64& rng, int N, double r_max, int n,
                                           bool monotone = false) {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::vector<double> v(n);
    for (double& x : v) x = U(rng);
    if (monotone) std::sort(v.begin(), v.end(), std::greater<double>());
    return normalized(RadialDensity(RadialGrid(r_max, n), N, std::move(v)));
}

// F(a,b;c;1) by extrapolation in w = 1-z: four evaluations at w/2^j kill
// the correction terms A w^s + B w + C w^{s+1}, s = c-a-b (kept away from
// integers by the callers), leaving a residual of order w^2.
inline double f21_limit_extrapolated(double a, double b, double c, double w0 = 1e-6) {
    const double s = c - a - b;
    double f[4], p[4], q[4], r[4];
    for (int j = 0; j < 4; ++j) {
        const double w = std::ldexp(w0, -j);
        f[j] = f21(a, b, c, 1.0 - w);
        p[j] = std::pow(w, s);
        q[j] = w;
        r[j] = std::pow(w, s + 1.0);
    }
    // difference away the constant, then solve the 3x3 system for A, B, C
    double g[3], P[3][3];
    for (int j = 0; j < 3; ++j) {
        g[j] = f[j] - f[j + 1];
        P[j][0] = p[j] - p[j + 1];
        P[j][1] = q[j] - q[j + 1];
        P[j][2] = r[j] - r[j + 1];
    }
    double x[3] = {0.0, 0.0, 0.0};
    for (int col = 0; col < 3; ++col) {  // Gauss elimination with partial pivoting
        int piv = col;
        for (int row = col + 1; row < 3; ++row)
            if (std::abs(P[row][col]) > std::abs(P[piv][col])) piv = row;
        std::swap(P[col], P[piv]);
        std::swap(g[col], g[piv]);
        for (int row = col + 1; row < 3; ++row) {
            const double fct = P[row][col] / P[col][col];
            for (int cc = col; cc < 3; ++cc) P[row][cc] -= fct * P[col][cc];
            g[row] -= fct * g[col];
        }
    }
    for (int row = 2; row >= 0; --row) {
        double acc = g[row];
        for (int cc = row + 1; cc < 3; ++cc) acc -= P[row][cc] * x[cc];
        x[row] = acc / P[row][row];
    }
    return f[0] - x[0] * p[0] - x[1] * q[0] - x[2] * r[0];
}

} // namespace detail_v

// ---- hypergeom suite -----------------------------------------------------------

inline std::vector<CheckResult> suite_hypergeom(std::uint64_t seed) {
    std::vector<CheckResult> out;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);

    {  // F(a,b;c;0) = 1 exactly
        bool ok = f21(0.5, 1.0, 3.0, 0.0) == 1.0 && f21(2.0, 0.7, 1.5, 0.0) == 1.0;
        out.push_back({"f21 at z=0 equals 1", ok, ""});
    }
    {  // Euler transformation identity on a randomized admissible sweep
        double worst = 0.0;
        for (int t = 0; t < 1000; ++t) {
            const double a = 0.1 + 2.0 * U(rng);
            const double b = 0.1 + 2.0 * U(rng);
            double c = std::max(a, b) + 0.1 + 2.0 * U(rng);
            const double z = 0.999 * U(rng);
            const double lhs = f21(a, b, c, z);
            const double rhs = f21_transformed(a, b, c, z);
            worst = std::max(worst, std::abs(lhs - rhs) / std::abs(lhs));
        }
        out.push_back({"transformation identity (1000 pts)", worst <= 1e-9,
                       "worst rel " + detail_v::num(worst)});
    }
    {  // derivative identity vs central differences
        double worst = 0.0;
        const double h = 1e-5;
        for (int t = 0; t < 100; ++t) {
            const double a = 0.2 + 1.5 * U(rng);
            const double b = 0.2 + 1.5 * U(rng);
            const double c = std::max(a, b) + 0.2 + 1.5 * U(rng);
            const double z = 0.02 + 0.9 * U(rng);
            const double fd = (f21(a, b, c, z + h) - f21(a, b, c, z - h)) / (2.0 * h);
            const double an = f21_derivative(a, b, c, z);
            worst = std::max(worst, std::abs(fd - an) / std::abs(an));
        }
        out.push_back({"derivative identity vs finite differences (100 pts)", worst <= 1e-6,
                       "worst rel " + detail_v::num(worst)});
    }
    {  // z->1 limit: extrapolation from z = 1 - 1e-6 matches the Gamma form
        double worst = 0.0;
        for (int t = 0; t < 50; ++t) {
            const double a = 0.2 + 1.0 * U(rng);
            const double b = 0.3 + 1.2 * U(rng);
            const double s = 0.2 + 0.6 * U(rng);  // c - a - b, kept away from {0, 1}
            const double c = a + b + s;
            const double lim = f21_limit(a, b, c);
            const double ext = detail_v::f21_limit_extrapolated(a, b, c);
            worst = std::max(worst, std::abs(ext - lim) / std::abs(lim));
        }
        out.push_back({"z->1 limit matches Gamma closed form (extrapolated)", worst <= 1e-8,
                       "worst rel " + detail_v::num(worst)});
    }
    {  // monotone increase toward the limit
        bool ok = true;
        const double a = 0.6, b = 1.1, c = 2.5;
        double prev = 0.0;
        for (double z : {0.0, 0.2, 0.4, 0.6, 0.8, 0.95, 0.999}) {
            const double f = f21(a, b, c, z);
            if (f < prev) ok = false;
            prev = f;
        }
        ok = ok && prev <= f21_limit(a, b, c) * (1.0 + 1e-12);
        out.push_back({"f21 increases in z up to the limit", ok, ""});
    }
    {  // series vs integral representation for z <= 0.5
        double worst = 0.0;
        for (int t = 0; t < 200; ++t) {
            const double a = 0.1 + 1.5 * U(rng);
            const double b = 0.2 + 1.5 * U(rng);
            const double c = b + 0.2 + 1.5 * U(rng);
            const double z = 0.5 * U(rng);
            const double hs = h_integral(a, b, c, z);
            const double hq = aggdiff::detail::h_integral_quadrature(a, b, c, z, 1.0 - z);
            worst = std::max(worst, std::abs(hs - hq) / std::abs(hs));
        }
        out.push_back({"series vs integral representation, z <= 0.5", worst <= 1e-10,
                       "worst rel " + detail_v::num(worst)});
    }
    return out;
}

// ---- model suite -----------------------------------------------------------------

inline std::vector<CheckResult> suite_model(std::uint64_t seed) {
    std::vector<CheckResult> out;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);

    {  // mass_function monotone in R on random densities
        bool ok = true;
        for (int t = 0; t < 100 && ok; ++t) {
            auto rho = detail_v::random_radial_density(rng, 3, 2.0, 64);
            double prev = -1.0;
            for (int j = 0; j <= 40; ++j) {
                const double M = mass_function(rho, 2.0 * j / 40.0);
                if (M < prev - 1e-14) ok = false;
                prev = M;
            }
        }
        out.push_back({"mass_function monotone (100 random densities)", ok, ""});
    }
    {  // dilation composition
        double worst = 0.0;
        for (int t = 0; t < 20; ++t) {
            auto rho = detail_v::random_radial_density(rng, 2, 1.5, 64);
            const double l1 = 0.5 + 2.0 * U(rng), l2 = 0.5 + 2.0 * U(rng);
            auto a = dilate(dilate(rho, l1), l2);
            auto b = dilate(rho, l1 * l2);
            double diff = 0.0;
            for (int i = 0; i < a.grid.n; ++i)
                diff += std::abs(a.values[i] - b.values[i]) * a.grid.volume_weight(i, a.N);
            worst = std::max(worst, surface_measure(a.N) * diff);
        }
        out.push_back({"dilate(l1) then dilate(l2) = dilate(l1*l2)", worst <= 1e-10,
                       "worst L1 " + detail_v::num(worst)});
    }
    {  // rearrangement: idempotent, multiset preserved
        bool ok = true;
        for (int t = 0; t < 50 && ok; ++t) {
            auto rho = detail_v::random_line_density(rng, 2.0, 64);
            auto r1 = rearrange_1d(rho);
            auto r2 = rearrange_1d(r1);
            for (int i = 0; i < rho.n; ++i)
                if (r1.values[i] != r2.values[i]) ok = false;
            auto s0 = rho.values, s1 = r1.values;
            std::sort(s0.begin(), s0.end());
            std::sort(s1.begin(), s1.end());
            if (s0 != s1) ok = false;
        }
        out.push_back({"rearrange_1d idempotent, value multiset preserved", ok, ""});
    }
    {  // m* > m_c wherever m* is finite
        bool ok = true;
        double worst = 1e300;
        for (int N : {1, 2, 3, 4, 6}) {
            for (int j = 1; j <= 50; ++j) {
                const double k = (1.0 - N) - (N - 1.0 + 0.999 * 1.0) * j / 51.0;  // scan below 1-N
                if (!(k > -double(N))) continue;
                auto p = make_params(N, k, 2.0, 1.0);
                if (!p.m_star) { ok = false; continue; }
                worst = std::min(worst, *p.m_star - p.m_c);
                if (!(*p.m_star > p.m_c)) ok = false;
            }
        }
        out.push_back({"m* > m_c on the singular-range sweep", ok, "min gap " + detail_v::num(worst)});
    }
    return out;
}

// ---- riesz suite -------------------------------------------------------------------

inline std::vector<CheckResult> suite_riesz(std::uint64_t seed) {
    std::vector<CheckResult> out;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);

    {  // kernel symmetry
        bool ok = true;
        for (int t = 0; t < 100 && ok; ++t) {
            const int N = 2 + static_cast<int>(3.0 * U(rng));
            const double k = -0.1 - (N - 0.2) * U(rng);
            auto p = make_params(N, k, 2.0, 1.0);
            const double r = 0.1 + 3.0 * U(rng), eta = 0.1 + 3.0 * U(rng);
            if (r == eta) continue;
            const double a = theta(r, eta, p), b = theta(eta, r, p);
            if (std::abs(a - b) > 1e-13 * std::abs(a)) ok = false;
        }
        out.push_back({"theta symmetric in (r, eta)", ok, ""});
    }
    {  // N=1 closed form
        auto p = make_params(1, -0.5, 1.5, 1.0);
        const double v = theta(2.0, 1.0, p);
        const double expect = 1.0 + 1.0 / std::sqrt(3.0);
        out.push_back({"theta N=1 two-point closed form", std::abs(v - expect) < 1e-14,
                       "got " + detail_v::num(v)});
    }
    {  // Newton shell: uniform ball N=3, k=-1, raw = M/r outside
        auto p = make_params(3, -1.0, 2.0, 1.0);
        RadialGrid g(4.0, 256);
        std::vector<double> v(g.n, 0.0);
        for (int i = 0; i < g.n; ++i)
            if (g.center(i) < 1.0) v[i] = 1.0;
        auto rho = normalized(RadialDensity(g, 3, std::move(v)));
        ThetaKernel kern(p);
        double worst = 0.0;
        for (double r : {1.5, 2.0, 3.0, 3.9}) {
            const double raw = raw_riesz_at(rho, kern, r);
            worst = std::max(worst, std::abs(raw - 1.0 / r) * r);
        }
        out.push_back({"uniform ball N=3 k=-1: raw = M/r outside", worst <= 1e-8,
                       "worst rel " + detail_v::num(worst)});
    }
    {  // decay envelopes on all three branches (N=3)
        bool ok = true;
        std::string detail;
        for (double k : {-1.0, -2.0, -2.5}) {
            auto p = make_params(3, k, 2.0, 1.0);
            RadialGrid g(5.0, 200);
            std::vector<double> v(g.n, 0.0);
            for (int i = 0; i < g.n; ++i) {
                const double r = g.center(i);
                if (r < 1.0) v[i] = 1.0 - r * r;  // smooth cap, support B_1
            }
            auto rho = normalized(RadialDensity(g, 3, std::move(v)));
            auto pot = riesz_potential(rho, p);
            auto rep = decay_envelope_check(rho, pot, 1.0, p);
            if (!rep.upper_ok || !rep.lower_ok) {
                ok = false;
                detail += "k=" + std::to_string(k) + " up " + detail_v::num(rep.max_upper_ratio) +
                          " low " + detail_v::num(rep.min_lower_ratio) + "; ";
            }
        }
        out.push_back({"decay envelopes C1/C2/T_k (three branches)", ok, detail});
    }
    {  // fractional constant forms and the Newtonian value
        auto ok1 = std::abs(fractional_constant(3, 1.0) + 1.0 / (4.0 * M_PI)) < 1e-15;
        double worst = 0.0;
        for (int t = 0; t < 50; ++t) {
            const int N = 2 + static_cast<int>(3.0 * U(rng));
            const double k = -0.05 - (N - 0.1) * U(rng);
            const double s = 0.5 * (k + N);
            const double c1 = fractional_constant(N, s);
            const double c2 = fractional_constant_k_form(N, k);
            worst = std::max(worst, std::abs(c1 - c2) / std::abs(c1));
        }
        out.push_back({"fractional constant: two written forms agree", ok1 && worst <= 1e-12,
                       "worst rel " + detail_v::num(worst)});
    }
    {  // K formula spot values
        auto p1 = make_params(2, -1.5, 2.0, 1.0);
        const double k1 = cross_range_K(10.0, p1, 0.3);
        const double e1 = std::pow(10.0, 0.85) + std::pow(10.0, 0.45);
        auto p2 = make_params(3, -2.0, 2.0, 1.0);
        const double H2 = std::exp(2.0);
        const double k2 = cross_range_K(H2, p2, 0.5);
        const double e2 = std::exp(1.0) * (2.0 + std::log1p(std::exp(1.0))) + std::exp(2.0);
        const bool ok = std::abs(k1 - e1) < 1e-12 * e1 && std::abs(k2 - e2) < 1e-12 * e2;
        out.push_back({"cross-range K spot values", ok,
                       "K1 err " + detail_v::num(std::abs(k1 - e1)) + ", K2 err " + detail_v::num(std::abs(k2 - e2))});
    }
    return out;
}

// ---- energy suite -------------------------------------------------------------------

inline std::vector<CheckResult> suite_energy(std::uint64_t seed) {
    std::vector<CheckResult> out;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    auto p = make_params(1, -0.5, 1.8, 1.0);

    {  // dilation law on random 1D densities
        double worst = 0.0;
        for (int t = 0; t < 20; ++t) {
            auto rho = detail_v::random_line_density(rng, 2.0, 128);
            auto e = free_energy(rho, p);
            for (double lam : {0.25, 0.5, 2.0, 4.0}) {
                auto ed = free_energy(dilate(rho, lam), p);
                const double predicted = std::pow(lam, p.N * (p.m - 1.0)) * e.Hm +
                                         std::pow(lam, -p.k) * p.chi * e.Wk;
                worst = std::max(worst, std::abs(ed.F - predicted) / (std::abs(e.Hm) + std::abs(e.Wk)));
            }
        }
        out.push_back({"dilation identity F[rho^l]", worst <= 1e-8, "worst " + detail_v::num(worst)});
    }
    {  // signs and rearrangement direction
        bool ok = true;
        double worst = 0.0;
        for (int t = 0; t < 100 && ok; ++t) {
            auto rho = detail_v::random_line_density(rng, 2.0, 96);
            auto e = free_energy(rho, p);
            if (!(e.Hm > 0.0) || !(e.Wk < 0.0)) ok = false;
            auto er = free_energy(rearrange_1d(rho), p);
            if (std::abs(er.Hm - e.Hm) > 1e-12 * e.Hm) ok = false;  // H_m invariant exactly
            if (er.Wk > e.Wk + 1e-12) ok = false;                   // W_k non-increasing
            worst = std::max(worst, er.Wk - e.Wk);
        }
        out.push_back({"signs + rearrangement direction (100 densities)", ok,
                       "max W_k increase " + detail_v::num(worst)});
    }
    {  // HLS ratio invariances
        double worst = 0.0;
        auto rho = detail_v::random_line_density(rng, 2.0, 128);
        const double base = hls_ratio(rho, p);
        for (double lam : {0.5, 2.0, 5.0})
            worst = std::max(worst, std::abs(hls_ratio(dilate(rho, lam), p) - base) / base);
        for (double c : {0.5, 2.0}) {
            auto scaled = rho;
            for (double& v : scaled.values) v *= c;
            worst = std::max(worst, std::abs(hls_ratio(scaled, p) - base) / base);
        }
        out.push_back({"hls_ratio invariant under dilation and mass scaling", worst <= 1e-6,
                       "worst rel " + detail_v::num(worst)});
    }
    {  // multiplier reconstruction
        auto rho = detail_v::random_line_density(rng, 2.0, 96);
        auto e = free_energy(rho, p);
        const double lm = std::pow(lp_norm(rho, p.m), p.m);
        const double D2 = 2.0 * e.F + (p.m - 2.0) / (p.m - 1.0) * lm;
        out.push_back({"D matches independent recomputation", std::abs(e.D - D2) <= 1e-12 * std::abs(D2),
                       "diff " + detail_v::num(std::abs(e.D - D2))});
    }
    return out;
}

// ---- stationary suite ----------------------------------------------------------------

inline std::vector<CheckResult> suite_stationary(std::uint64_t seed) {
    std::vector<CheckResult> out;
    (void)seed;

    {  // pointwise inequality sweep
        const double m = 1.8, k = -0.5;
        double min_gap = 1e300, gap_at_1 = pointwise_inequality(1.0, m, k).gap;
        bool ok = std::abs(gap_at_1) <= 1e-12;
        for (int j = 0; j < 10000; ++j) {
            const double z = std::pow(10.0, -3.0 + 6.0 * j / 9999.0);
            const double gap = pointwise_inequality(z, m, k).gap;
            if (gap < -1e-15) ok = false;
            if (std::abs(z - 1.0) > 1e-3) min_gap = std::min(min_gap, gap);
        }
        out.push_back({"pointwise inequality: gap >= 0, equality only at z=1", ok && min_gap > 0.0,
                       "min off-1 gap " + detail_v::num(min_gap)});
    }
    {  // small 1D solve + diagnostics
        auto p = make_params(1, -0.5, 1.8, 1.0);
        SolverConfig cfg;
        RadialGrid g(3.0, 128);
        auto rep = solve_stationary(p, cfg, default_initial(p, g));
        bool ok = rep.converged && rep.el_residual < 1e-5 && rep.monotone_defect <= 10.0 * cfg.tol &&
                  rep.support_radius < rep.profile.grid.r_max &&
                  rep.profile.values.back() < 1e-10;
        out.push_back({"1D solve (n=128): EL residual, monotone, compact support", ok,
                       "el " + detail_v::num(rep.el_residual) + ", iters " + std::to_string(rep.iterations)});
    }
    {  // gauge invariance of the EL residual
        auto p = make_params(1, -0.5, 1.8, 1.0);
        RadialGrid g(2.0, 64);
        auto rho = default_initial(p, g);
        RadialConvolution conv(p, g);
        auto pot = conv.apply(rho);
        const double D = 0.3;
        const double r0 = el_residual(rho, pot, D, p);
        PotentialProfile shifted = pot;
        const double c = 0.37;
        for (auto& v : shifted.S) v += c;
        const double r1 = el_residual(rho, shifted, D + p.chi * c, p);
        out.push_back({"el_residual gauge invariance (S+c, D+chi c)", std::abs(r0 - r1) <= 1e-12,
                       "diff " + detail_v::num(std::abs(r0 - r1))});
    }
    return out;
}

// ---- evolution suite -------------------------------------------------------------------

inline std::vector<CheckResult> suite_evolution(std::uint64_t seed) {
    std::vector<CheckResult> out;
    (void)seed;
    auto p = make_params(1, -0.5, 1.8, 1.0);

    {  // potential closed form: rho = 1/2 on [-1,1], S(0) = -4
        LineDensity rho(2.0, 128, std::vector<double>(128, 0.0));
        std::vector<double> v(128, 0.0);
        for (int i = 0; i < 128; ++i)
            if (std::abs(-2.0 + (i + 0.5) * (4.0 / 128.0)) < 1.0) v[i] = 0.5;
        rho = LineDensity(2.0, 128, std::move(v));
        auto S = potential_1d(rho, p);
        // S at the center: the two central cells straddle x = 0
        const double S0 = 0.5 * (S[63] + S[64]);
        out.push_back({"potential_1d closed form at the origin", std::abs(S0 + 4.0) < 2e-3,
                       "S(0) = " + detail_v::num(S0)});
    }
    {  // short run: mass conservation, dissipation, positivity, parity
        EvolutionConfig cfg;
        cfg.t_end = 1.0;
        cfg.L = 3.0;
        cfg.n = 128;
        cfg.output_stride = 25;
        std::vector<double> v(cfg.n, 0.0);
        LineDensity init(cfg.L, cfg.n, v);
        {
            std::vector<double> w(cfg.n, 0.0);
            for (int i = 0; i < cfg.n; ++i)
                if (std::abs(init.center(i)) < 1.0) w[i] = 1.0;
            init = normalized(LineDensity(cfg.L, cfg.n, std::move(w)));
        }
        auto trace = evolve(init, p, cfg);
        bool parity = true;
        for (int i = 0; i < cfg.n / 2; ++i)
            if (std::abs(trace.final.values[i] - trace.final.values[cfg.n - 1 - i]) > 1e-13) parity = false;
        bool ok = trace.max_mass_drift <= 1e-12 && trace.dissipation_ok && parity;
        out.push_back({"short run: mass 1e-12, F dissipation, parity", ok,
                       "drift " + detail_v::num(trace.max_mass_drift) + ", maxjump " +
                           detail_v::num(trace.max_energy_jump)});
    }
    return out;
}

// ---- dispatch ------------------------------------------------------------------------

inline std::vector<std::string> suite_names() {
    return {"model", "hypergeom", "riesz", "energy", "stationary", "evolution", "all"};
}

inline std::vector<CheckResult> run_suite(const std::string& name, std::uint64_t seed) {
    if (name == "model") return suite_model(seed);
    if (name == "hypergeom") return suite_hypergeom(seed);
    if (name == "riesz") return suite_riesz(seed);
    if (name == "energy") return suite_energy(seed);
    if (name == "stationary") return suite_stationary(seed);
    if (name == "evolution") return suite_evolution(seed);
    if (name == "all") {
        std::vector<CheckResult> all;
        for (const auto& s : {"model", "hypergeom", "riesz", "energy", "stationary", "evolution"}) {
            auto part = run_suite(s, seed);
            for (auto& c : part) c.name = std::string(s) + ": " + c.name;
            all.insert(all.end(), part.begin(), part.end());
        }
        return all;
    }
    throw std::invalid_argument("verify: unknown suite '" + name + "'; known: model, hypergeom, riesz, energy, stationary, evolution, all");
}

} // namespace aggdiff::verify
