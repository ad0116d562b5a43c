#pragma once

// Radial Riesz potentials S_k = W_k * rho through the angular kernel
//
//   |x|^k * rho(x) = int_0^inf Theta_k(|x|, eta) rho(eta) eta^{N-1} d eta,
//   Theta_k(r,eta) = r^k vartheta_k(eta/r)  (eta < r),  symmetric in (r,eta),
//   vartheta_k(u)  = 2^{N-2} sigma_{N-1} (1+u)^k H(-k/2, (N-1)/2; N-1; 4u/(1+u)^2),
//
// together with the far-field envelope constants C1, C2 and T_k, the
// cross-range bound K_{k,q,N}, and the fractional-Laplacian constant.
//
// N = 1 bypasses the hypergeometrics: Theta_k(r,eta) = |r-eta|^k + (r+eta)^k
// with exact per-cell antiderivatives.

#include <cmath>
#include <memory>
#include <stdexcept>
#include <vector>

#include "aggdiff/gamma_functions.hpp"
#include "aggdiff/grid.hpp"
#include "aggdiff/hypergeom.hpp"
#include "aggdiff/parallel.hpp"
#include "aggdiff/params.hpp"
#include "aggdiff/quadrature.hpp"

namespace aggdiff {

struct PotentialProfile {
    RadialGrid grid;
    std::vector<double> raw;  // (|.|^k * rho)(r_i), strictly positive
    std::vector<double> S;    // S_k(r_i) = raw/k, negative for k < 0
};

namespace detail {

struct HyperParams {
    double a, b, c;     // -k/2, (N-1)/2, N-1
    double pref;        // 2^{N-2} sigma_{N-1}
    double beta_bc;     // Gamma(b)Gamma(c-b)/Gamma(c)
    double exp_s;       // c - a - b = (k+N-1)/2
    int branch;         // +1: k > 1-N, 0: k = 1-N, -1: k < 1-N
};

inline HyperParams hyper_params(const ModelParams& p) {
    if (p.N < 2) throw std::logic_error("hyper_params: N = 1 never routes through hypergeometrics");
    HyperParams h;
    h.a = -0.5 * p.k;
    h.b = 0.5 * (p.N - 1);
    h.c = double(p.N - 1);
    h.pref = std::pow(2.0, p.N - 2) * surface_measure(p.N - 1);
    h.beta_bc = std::exp(log_gamma(h.b) + log_gamma(h.c - h.b) - log_gamma(h.c));
    h.exp_s = h.c - h.a - h.b;
    const double edge = 1.0 - p.N;  // k = 1-N across branches
    if (std::abs(p.k - edge) < 1e-12) h.branch = 0;
    else h.branch = (p.k > edge) ? +1 : -1;
    return h;
}

// vartheta_k(u) for u in [0,1), any branch; w-aware so u -> 1 stays accurate.
// Ratios that round onto the diagonal are clamped one ulp below it.
inline double vartheta_eval(const HyperParams& h, double k, double u) {
    if (u > 1.0 - 1e-15) u = 1.0 - 1e-15;
    const double opu = 1.0 + u;
    const double z = 4.0 * u / (opu * opu);
    const double w = ((1.0 - u) / opu) * ((1.0 - u) / opu);
    const double F = (u == 0.0) ? 1.0 : f21_core(h.a, h.b, h.c, z, w);
    return h.pref * std::pow(opu, k) * h.beta_bc * F;
}

// Limit of vartheta at u = 1 (finite only for k > 1-N).
inline double vartheta_at_one(const HyperParams& h, double k) {
    const double Flim = std::exp(log_gamma(h.c) + log_gamma(h.exp_s) - log_gamma(h.c - h.a) - log_gamma(h.c - h.b));
    return h.pref * std::pow(2.0, k) * h.beta_bc * Flim;
}

// Coefficient g1 in vartheta(u) ~ g1 * w^{(k+N-1)/2} as u -> 1 for k < 1-N.
inline double vartheta_singular_coeff(const HyperParams& h, double k) {
    return h.pref * std::pow(2.0, k) *
           std::exp(log_gamma(h.c - h.b) + log_gamma(h.a + h.b - h.c) - log_gamma(h.a));
}

} // namespace detail

// Angular kernel cache: vartheta_k sampled on a 4096-point grid over
// u in [0, 1 - 1e-4], log-spaced toward u = 1 (uniform in tau = -log(1-u))
// with monotone cubic interpolation. Beyond the cached range evaluation
// switches to the near-diagonal connection branch of f21, which costs a
// few terms only. For k < 1-N the bounded factor vartheta * w^{-s} is
// stored so the interpolant never sees the singularity.
class ThetaKernel {
public:
    explicit ThetaKernel(const ModelParams& p) : p_(p) {
        if (p_.N == 1) return;
        h_ = detail::hyper_params(p_);
        const int n = 4096;
        tau_max_ = -std::log(cache_edge_);
        const double dt = tau_max_ / (n - 1);
        std::vector<double> samples(n);
        for (int i = 0; i < n; ++i) {
            const double u = 1.0 - std::exp(-i * dt);
            double v = detail::vartheta_eval(h_, p_.k, u);
            if (h_.branch < 0) v *= std::pow(w_of_u(u), -h_.exp_s);
            samples[i] = v;
        }
        cache_ = PchipUniform(0.0, dt, std::move(samples));
    }

    const ModelParams& params() const { return p_; }

    double vartheta_direct(double u) const {
        return detail::vartheta_eval(h_, p_.k, u);
    }

    double vartheta(double u) const {
        if (u >= 1.0 - cache_edge_) return vartheta_direct(u);
        const double tau = -std::log1p(-u);
        double v = cache_(tau);
        if (h_.branch < 0) v *= std::pow(w_of_u(u), h_.exp_s);
        return v;
    }

    // Theta_k(r, eta) via the cache; use the free function theta() for
    // uncached pointwise evaluation.
    double operator()(double r, double eta) const {
        if (!(r > 0.0) || !(eta > 0.0))
            throw std::invalid_argument("ThetaKernel: radii must be positive");
        if (p_.N == 1)
            return std::pow(std::abs(r - eta), p_.k) + std::pow(r + eta, p_.k);
        const double hi = std::max(r, eta), lo = std::min(r, eta);
        if (lo == hi) {
            if (h_.branch <= 0)
                throw std::invalid_argument("ThetaKernel: diagonal r = eta is infinite for k <= 1-N");
            return std::pow(hi, p_.k) * detail::vartheta_at_one(h_, p_.k);
        }
        return std::pow(hi, p_.k) * vartheta(std::min(lo / hi, 1.0 - 1e-15));
    }

    int branch() const { return p_.N == 1 ? -1 : h_.branch; }
    double exponent() const { return p_.N == 1 ? 0.5 * (p_.k) : h_.exp_s; }  // (k+N-1)/2
    double singular_coeff() const { return detail::vartheta_singular_coeff(h_, p_.k); }

private:
    static double w_of_u(double u) {
        const double q = (1.0 - u) / (1.0 + u);
        return q * q;
    }
    static constexpr double cache_edge_ = 1e-4;

    ModelParams p_;
    detail::HyperParams h_{};
    PchipUniform cache_;
    double tau_max_ = 0.0;
};

// Pointwise Theta_k(r,eta) by direct (uncached) evaluation.
inline double theta(double r, double eta, const ModelParams& p) {
    if (!(r > 0.0) || !(eta > 0.0))
        throw std::invalid_argument("theta: radii must be positive");
    if (p.N == 1) {
        if (r == eta) throw std::invalid_argument("theta: diagonal r = eta is infinite for k < 0 in 1D");
        return std::pow(std::abs(r - eta), p.k) + std::pow(r + eta, p.k);
    }
    const auto h = detail::hyper_params(p);
    const double hi = std::max(r, eta), lo = std::min(r, eta);
    if (lo == hi) {
        if (h.branch <= 0)
            throw std::invalid_argument("theta: diagonal r = eta is infinite for k <= 1-N");
        return std::pow(hi, p.k) * detail::vartheta_at_one(h, p.k);
    }
    return std::pow(hi, p.k) * detail::vartheta_eval(h, p.k, lo / hi);
}

// ---- cellwise kernel integrals ---------------------------------------------

namespace detail {

// int_{e0}^{e1} Theta_k(r, eta) eta^{N-1} d eta for a single cell, exact in
// 1D, graded Gauss panels otherwise. The cell containing r is split at the
// singularity; for k < 1-N the innermost sliver is integrated analytically
// against the known leading power (1-u)^{k+N-1}.
inline double kernel_cell_integral(const ThetaKernel& kern, double r, double e0, double e1) {
    const ModelParams& p = kern.params();
    const double k = p.k;
    const int N = p.N;

    if (N == 1) {
        auto anti_same = [&](double eta) {  // antiderivative of |r-eta|^k
            const double t = eta - r;
            return (t >= 0.0 ? 1.0 : -1.0) * std::pow(std::abs(t), k + 1.0) / (k + 1.0);
        };
        auto anti_sum = [&](double eta) {   // antiderivative of (r+eta)^k
            return std::pow(r + eta, k + 1.0) / (k + 1.0);
        };
        return (anti_same(e1) - anti_same(e0)) + (anti_sum(e1) - anti_sum(e0));
    }

    auto f = [&](double eta) { return kern(r, eta) * std::pow(eta, N - 1); };
    const double width = e1 - e0;

    if (r > e0 && r < e1) {
        // singular cell: split at eta = r; the sliver below 2^-32 of the
        // cell width is integrated analytically (k < 1-N) or is negligible
        const int levels = 32;
        double s = 0.0;
        if (r - e0 > 0.0) s += quad::graded_toward(f, e0, r, /*steep_at_a=*/false, levels, false);
        if (e1 - r > 0.0) s += quad::graded_toward(f, r, e1, /*steep_at_a=*/true, levels, false);
        if (kern.branch() < 0) {
            // analytic sliver: integrand ~ S0 t^{k+N-1} with t = |eta - r|
            const double S0 = std::pow(r, k) * kern.singular_coeff() *
                              std::pow(2.0 * r, 1.0 - k - N) * std::pow(r, N - 1.0);
            const double kn = k + N;
            const double t_left = (r - e0) * std::ldexp(1.0, -levels);
            const double t_right = (e1 - r) * std::ldexp(1.0, -levels);
            s += S0 * (std::pow(t_left, kn) + std::pow(t_right, kn)) / kn;
        }
        return s;
    }

    const double dist = (r <= e0) ? e0 - r : r - e1;
    if (dist < 4.0 * width) {
        // near cell: grade toward the edge closest to the singularity
        const bool steep_at_a = (r <= e0);
        return quad::graded_toward(f, e0, e1, steep_at_a, 10, true);
    }
    return quad::gauss6(f, e0, e1);
}

} // namespace detail

// Precomputed kernel weights for one (grid, params) pair:
//   raw_i = sum_j W[i,j] rho_j,  W[i,j] = int_{cell j} Theta_k(r_i, eta) eta^{N-1} d eta.
// Building the matrix costs O(n^2) kernel cell integrals; applying it is a
// plain matvec, so solver iterations reuse the geometry for free.
class RadialConvolution {
public:
    RadialConvolution(const ModelParams& p, const RadialGrid& g)
        : p_(p), g_(g), kern_(p) {
        const int n = g_.n;
        W_.assign(static_cast<std::size_t>(n) * n, 0.0);
        parallel_for(0, n, [&](int i) {
            const double r = g_.center(i);
            for (int j = 0; j < n; ++j)
                W_[static_cast<std::size_t>(i) * n + j] =
                    detail::kernel_cell_integral(kern_, r, g_.edge(j), g_.edge(j + 1));
        });
    }

    const RadialGrid& grid() const { return g_; }
    const ModelParams& params() const { return p_; }
    const ThetaKernel& kernel() const { return kern_; }

    std::vector<double> raw(const std::vector<double>& rho_values) const {
        const int n = g_.n;
        std::vector<double> out(n, 0.0);
        parallel_for(0, n, [&](int i) {
            const double* row = &W_[static_cast<std::size_t>(i) * n];
            double s = 0.0;
            for (int j = 0; j < n; ++j) s += row[j] * rho_values[j];
            out[i] = s;
        });
        return out;
    }

    PotentialProfile apply(const RadialDensity& rho) const {
        if (!(rho.grid == g_) || rho.N != p_.N)
            throw std::invalid_argument("RadialConvolution: density grid does not match");
        PotentialProfile out;
        out.grid = g_;
        out.raw = raw(rho.values);
        out.S.resize(out.raw.size());
        for (std::size_t i = 0; i < out.raw.size(); ++i) out.S[i] = out.raw[i] / p_.k;
        return out;
    }

private:
    ModelParams p_;
    RadialGrid g_;
    ThetaKernel kern_;
    std::vector<double> W_;
};

// (|.|^k * rho)(r) at an arbitrary radius r >= 0, no precomputed matrix.
inline double raw_riesz_at(const RadialDensity& rho, const ThetaKernel& kern, double r) {
    const ModelParams& p = kern.params();
    if (r < 0.0) throw std::invalid_argument("raw_riesz_at: radius must be nonnegative");
    double s = 0.0;
    if (r == 0.0) {
        // Theta_k(0, eta) = eta^k vartheta_k(0); cell integrals are exact powers
        const double v0 = (p.N == 1) ? 2.0 : kern.vartheta(0.0);
        const double kn = p.k + p.N;
        for (int j = 0; j < rho.grid.n; ++j) {
            const double e0 = rho.grid.edge(j), e1 = rho.grid.edge(j + 1);
            s += rho.values[j] * v0 * (std::pow(e1, kn) - std::pow(e0, kn)) / kn;
        }
        return s;
    }
    for (int j = 0; j < rho.grid.n; ++j) {
        if (rho.values[j] == 0.0) continue;
        s += rho.values[j] * detail::kernel_cell_integral(kern, r, rho.grid.edge(j), rho.grid.edge(j + 1));
    }
    return s;
}

// Full potential profile of a normalized density (builds the weight matrix;
// prefer holding a RadialConvolution when applying it repeatedly).
inline PotentialProfile riesz_potential(const RadialDensity& rho, const ModelParams& p) {
    require_normalized(rho, "riesz_potential");
    RadialConvolution conv(p, rho.grid);
    return conv.apply(rho);
}

// ---- far-field envelope (Riesz potential estimates) ------------------------

// C1 bound constant for 1-N < k < 0 (needs N >= 2).
inline double decay_constant_C1(const ModelParams& p) {
    if (!(p.k > 1.0 - p.N))
        throw std::invalid_argument("decay_constant_C1: requires k > 1-N");
    const auto h = detail::hyper_params(p);
    return h.pref * std::exp(log_gamma(h.b) + log_gamma(h.exp_s) - log_gamma(h.c - h.a));
}

// C2 bound constant for -N < k <= 1-N.
inline double decay_constant_C2(const ModelParams& p) {
    if (!(p.k <= 1.0 - p.N + 1e-12))
        throw std::invalid_argument("decay_constant_C2: requires k <= 1-N");
    if (p.N == 1) return 2.0;  // |r-eta|^k + (r+eta)^k <= 2 T_k(r,R) r^k for eta <= R < r
    const auto h = detail::hyper_params(p);
    if (h.branch == 0) {
        const double Nn = p.N;
        const double g = std::exp(2.0 * log_gamma(0.5 * (Nn - 1.0)) - log_gamma(Nn - 1.0));
        const double extra = (Nn - 1.0) * gamma_real(Nn) / (2.0 * std::pow(gamma_real(0.5 * (Nn + 1.0)), 2));
        return h.pref * g * std::max(1.0, extra);
    }
    return h.pref * std::exp(log_gamma(h.c - h.b) + log_gamma(h.a + h.b - h.c) - log_gamma(h.a));
}

// Far-field amplification factor T_k(|x|, R) for a ball-supported density.
inline double t_factor(double r, double R, const ModelParams& p) {
    if (!(r > R)) throw std::invalid_argument("t_factor: requires |x| > R");
    const double ratio = (r + R) / (r - R);
    if (std::abs(p.k - (1.0 - p.N)) < 1e-12) return 1.0 + std::log(ratio);
    return std::pow(ratio, 1.0 - p.k - p.N);
}

struct DecayCheck {
    double r = 0.0;
    double upper_ratio = 0.0;  // raw / (C * T_k * r^k), T_k = 1 on the C1 branch
    double lower_ratio = 0.0;  // raw / ((r+1)^k M_rho(1))
};

struct DecayReport {
    bool singular_branch = false;  // k <= 1-N: C2/T_k branch, else C1
    double C_upper = 0.0;
    double R_support = 0.0;
    double mass_unit_ball = 0.0;
    std::vector<DecayCheck> checks;  // grid centers r > R_support
    double max_upper_ratio = 0.0;    // over asserted cells
    double min_lower_ratio = 0.0;
    bool upper_ok = false;  // max_upper_ratio <= 1 + 1e-6
    bool lower_ok = false;  // min_lower_ratio >= 1/(1 + 1e-6)
};

// Diagnostic report for the upper envelopes raw <= C1 r^k (k > 1-N) or
// raw <= C2 T_k(r,R) r^k (k <= 1-N, support in B_R), and the lower bound
// raw >= M_rho(1) (r+1)^k, on every grid center beyond the support.
// On the singular branch the first cell past R is reported but excluded
// from the assertion; the bound's sharpness there is not established.
inline DecayReport decay_envelope_check(const RadialDensity& rho, const PotentialProfile& pot,
                                        double R_support, const ModelParams& p) {
    if (!(pot.grid == rho.grid))
        throw std::invalid_argument("decay_envelope_check: potential grid does not match density");
    if (rho.grid.r_max < 4.0 * R_support)
        throw std::invalid_argument("decay_envelope_check: need r_max >= 4 R_support");
    for (int i = 0; i < rho.grid.n; ++i)
        if (rho.grid.center(i) > R_support && rho.values[i] > 1e-14)
            throw std::invalid_argument("decay_envelope_check: density has mass beyond R_support");

    DecayReport rep;
    rep.singular_branch = (p.k <= 1.0 - p.N + 1e-12);
    rep.C_upper = rep.singular_branch ? decay_constant_C2(p) : decay_constant_C1(p);
    rep.R_support = R_support;
    rep.mass_unit_ball = mass_function(rho, std::min(1.0, rho.grid.r_max));

    const double tol = 1.0 + 1e-6;
    double max_upper = 0.0, min_lower = std::numeric_limits<double>::infinity();
    bool first_beyond = true;
    for (int i = 0; i < rho.grid.n; ++i) {
        const double r = rho.grid.center(i);
        if (r <= R_support) continue;
        DecayCheck c;
        c.r = r;
        const double rk = std::pow(r, p.k);
        const double envelope = rep.singular_branch ? rep.C_upper * t_factor(r, R_support, p) * rk
                                                    : rep.C_upper * rk;
        c.upper_ratio = pot.raw[i] / envelope;
        c.lower_ratio = pot.raw[i] / (std::pow(r + 1.0, p.k) * rep.mass_unit_ball);
        rep.checks.push_back(c);
        const bool assert_this = !(rep.singular_branch && first_beyond);
        if (assert_this) max_upper = std::max(max_upper, c.upper_ratio);
        min_lower = std::min(min_lower, c.lower_ratio);
        first_beyond = false;
    }
    rep.max_upper_ratio = max_upper;
    rep.min_lower_ratio = min_lower;
    rep.upper_ok = max_upper <= tol;
    rep.lower_ok = min_lower >= 1.0 / tol;
    return rep;
}

// ---- cross-range interaction bound ------------------------------------------

// K_{k,q,N}(H) from the cross-range interaction estimate.
inline double cross_range_K(double H, const ModelParams& p, double q) {
    if (!(H >= 1.0)) throw std::invalid_argument("cross_range_K: requires H >= 1");
    if (!(q >= 0.0) || !(q < p.m / p.N))
        throw std::invalid_argument("cross_range_K: q must lie in [0, m/N)");
    if (std::abs(p.k - (1.0 - p.N)) < 1e-12)
        return std::pow(H, 1.0 - q) * (2.0 + std::log1p(std::pow(H, q))) + std::pow(H, q * (p.N - 1.0));
    return std::pow(H, 1.0 - q * (p.k + p.N)) + std::pow(H, -p.k * q);
}

// Empirical ratio [cross-range interaction] / [M_rho(A_H) K_{k,q,N}(H)].
// Returns 0 when the superlevel set is empty.
inline double cross_range_ratio(const RadialDensity& rho, double H, const ModelParams& p, double q) {
    const double AH = level_set_radius(rho, H);
    if (AH <= 0.0) return 0.0;
    const double M_AH = mass_function(rho, AH);
    if (M_AH <= 0.0) return 0.0;
    if (std::pow(H, -q) < 2.0 * AH)
        throw std::invalid_argument("cross_range_ratio: H^{-q} >= 2 A_H fails, outside the lemma's hypothesis");

    // inner density rho restricted to B_{A_H}; A_H is a grid edge so the
    // split is exact
    RadialDensity inner = rho;
    const int n = rho.grid.n;
    int inner_cells = 0;
    for (int i = 0; i < n; ++i) {
        if (rho.grid.edge(i + 1) <= AH * (1.0 + 1e-14)) inner_cells = i + 1;
        else inner.values[i] = 0.0;
    }
    if (inner_cells == 0) return 0.0;

    ThetaKernel kern(p);
    auto inner_raw = [&](double r) { return raw_riesz_at(inner, kern, r); };

    // outer integral sigma_N int_{A_H}^{r_max} rho(r) inner_raw(r) r^{N-1} dr;
    // near the touching radius inner_raw is steep, so the first outer cells
    // are integrated with graded panels
    const double sigma = surface_measure(p.N);
    double num = 0.0;
    for (int i = inner_cells; i < n; ++i) {
        if (rho.values[i] == 0.0) continue;
        const double e0 = rho.grid.edge(i), e1 = rho.grid.edge(i + 1);
        auto f = [&](double r) { return inner_raw(r) * std::pow(r, p.N - 1); };
        double cell;
        if (e0 < 2.0 * AH)
            cell = quad::graded_toward(f, e0, e1, /*steep_at_a=*/true, 14, true);
        else
            cell = quad::gauss4(f, e0, e1);
        num += sigma * rho.values[i] * cell;
    }
    return num / (M_AH * cross_range_K(H, p, q));
}

// ---- fractional Laplacian constant ------------------------------------------

// c_{N,s} = (2s-N) Gamma(N/2-s) / (pi^{N/2} 4^s Gamma(s)), s in (0, N/2).
inline double fractional_constant(int N, double s) {
    if (!(s > 0.0) || !(s < 0.5 * N))
        throw std::invalid_argument("fractional_constant: s must lie strictly inside (0, N/2)");
    return (2.0 * s - N) * gamma_real(0.5 * N - s) /
           (std::pow(M_PI, 0.5 * N) * std::pow(4.0, s) * gamma_real(s));
}

// Same constant written in k = 2s - N: k Gamma(-k/2) / (pi^{N/2} 2^{k+N} Gamma((k+N)/2)).
inline double fractional_constant_k_form(int N, double k) {
    if (!(k > -double(N)) || !(k < 0.0))
        throw std::invalid_argument("fractional_constant_k_form: k must lie in (-N, 0)");
    return k * gamma_real(-0.5 * k) /
           (std::pow(M_PI, 0.5 * N) * std::pow(2.0, k + N) * gamma_real(0.5 * (k + N)));
}

} // namespace aggdiff
