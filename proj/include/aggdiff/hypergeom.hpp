#pragma once

// Gauss hypergeometric function 2F1(a,b;c;z) on z in [0,1) for positive
// parameters with c - b > 0, plus the integral-normalised variant
//   H(a,b;c;z) = Gamma(b) Gamma(c-b) / Gamma(c) * F(a,b;c;z)
// and the z->1 limit and Euler transformation identities.
//
// Evaluation: the Gauss series for z <= 1/2; for z > 1/2 the series in
// (1-z) obtained from the standard connection formula, which stays
// accurate uniformly up to z = 1 - 1e-15 (the plain series loses all
// precision there when c-a-b is close to 0). When c-a-b sits within
// 1e-5 of a nonzero integer the connection coefficients are ill
// conditioned and we integrate the defining representation instead.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "aggdiff/gamma_functions.hpp"

namespace aggdiff {

namespace detail {

inline constexpr int f21_max_terms = 100000;

// Plain Gauss series sum_j (a)_j (b)_j / ((c)_j j!) z^j.
// Caller guarantees convergence; c must not be a non-positive integer.
inline double gauss_series(double a, double b, double c, double z) {
    double term = 1.0, sum = 1.0;
    for (int j = 0; j < f21_max_terms; ++j) {
        term *= (a + j) * (b + j) / ((c + j) * (j + 1.0)) * z;
        sum += term;
        if (std::abs(term) < 1e-16 * std::abs(sum)) return sum;
    }
    throw std::runtime_error("gauss_series: no convergence within term cap");
}

// F(a,b;a+b;z) via the logarithmic connection series in w = 1-z.
inline double gauss_log_case(double a, double b, double w) {
    const double pref = gamma_real(a + b) / (gamma_real(a) * gamma_real(b));
    const double lw = std::log(w);
    double p = 1.0;
    double h = 2.0 * digamma(1.0) - digamma(a) - digamma(b);
    double sum = p * (h - lw);
    for (int j = 0; j < f21_max_terms; ++j) {
        p *= (a + j) * (b + j) / ((j + 1.0) * (j + 1.0)) * w;
        h += 2.0 / (j + 1.0) - 1.0 / (a + j) - 1.0 / (b + j);
        const double term = p * (h - lw);
        sum += term;
        if (std::abs(term) < 1e-16 * std::abs(sum)) return pref * sum;
    }
    throw std::runtime_error("gauss_log_case: no convergence within term cap");
}

// Tanh-sinh quadrature of H(a,b;c;z) = int_0^1 (1-zt)^{-a} (1-t)^{c-b-1} t^{b-1} dt.
// Needs b > 0 and c - b > 0. The factor 1 - z t is evaluated as w + z(1-t)
// so the boundary layer at t -> 1 keeps full precision for w = 1-z small.
inline double h_integral_quadrature(double a, double b, double c, double z, double w) {
    const double pb = b - 1.0, pc = c - b - 1.0;
    auto eval = [&](double t, double one_minus_t) {
        const double base = w + z * one_minus_t;
        return std::pow(base, -a) * std::pow(one_minus_t, pc) * std::pow(t, pb);
    };
    // nodes t = (1 + tanh((pi/2) sinh(u)))/2 on u in (-U, U); U sized so the
    // truncated tail stays below 1e-15 even for endpoint exponents near -1
    const double U = 5.5;
    double h = 0.5, prev = 0.0, result = 0.0;
    // level 0
    {
        double s = eval(0.5, 0.5) * (M_PI / 4.0);
        for (double u = h; u <= U; u += h) {
            const double x = 0.5 * M_PI * std::sinh(u);
            const double ex = std::exp(-2.0 * std::abs(x));
            const double tm = ex / (1.0 + ex);        // min(t, 1-t)
            const double sech2 = 4.0 * ex / ((1.0 + ex) * (1.0 + ex));
            const double wgt = (M_PI / 4.0) * std::cosh(u) * sech2;
            if (tm <= 0.0 || wgt < 1e-320) continue;
            s += wgt * (eval(1.0 - tm, tm) + eval(tm, 1.0 - tm));
        }
        result = s * h;
    }
    for (int level = 1; level <= 10; ++level) {
        prev = result;
        h *= 0.5;
        double s = 0.0;
        for (double u = h; u <= U; u += 2.0 * h) {
            const double x = 0.5 * M_PI * std::sinh(u);
            const double ex = std::exp(-2.0 * std::abs(x));
            const double tm = ex / (1.0 + ex);
            const double sech2 = 4.0 * ex / ((1.0 + ex) * (1.0 + ex));
            const double wgt = (M_PI / 4.0) * std::cosh(u) * sech2;
            if (tm <= 0.0 || wgt < 1e-320) continue;
            s += wgt * (eval(1.0 - tm, tm) + eval(tm, 1.0 - tm));
        }
        result = 0.5 * prev + s * h;
        if (level >= 5 && std::abs(result - prev) < 1e-14 * std::abs(result)) break;
    }
    return result;
}

// Core evaluator; w = 1-z supplied by the caller so that arguments with
// z indistinguishable from 1 in double precision still resolve.
inline double f21_core(double a, double b, double c, double z, double w) {
    if (z <= 0.5) return gauss_series(a, b, c, z);

    const double s = c - a - b;
    const double sr = std::round(s);
    if (std::abs(s - sr) < 1e-5) {
        if (s == 0.0) return gauss_log_case(a, b, w);
        // near-integer exponent: connection coefficients cancel badly
        return gamma_real(c) / (gamma_real(b) * gamma_real(c - b)) *
               h_integral_quadrature(a, b, c, z, w);
    }
    const double coef1 = gamma_real(c) * gamma_real(s) * inv_gamma(c - a) * inv_gamma(c - b);
    const double coef2 = gamma_real(c) * gamma_real(-s) * inv_gamma(a) * inv_gamma(b);
    double t1 = 0.0, t2 = 0.0;
    if (coef1 != 0.0) t1 = coef1 * gauss_series(a, b, 1.0 - s, w);
    if (coef2 != 0.0) t2 = coef2 * std::pow(w, s) * gauss_series(c - a, c - b, 1.0 + s, w);
    return t1 + t2;
}

inline void f21_check_params(double a, double b, double c, double z, const char* who) {
    if (!(a >= 0.0) || !(b > 0.0) || !(c > 0.0))
        throw std::invalid_argument(std::string(who) + ": parameters must satisfy a >= 0, b > 0, c > 0");
    if (!(c - b > 0.0))
        throw std::invalid_argument(std::string(who) + ": c - b must be positive, got " + std::to_string(c - b));
    if (z < 0.0)
        throw std::invalid_argument(std::string(who) + ": z < 0 not supported");
    if (z >= 1.0)
        throw std::invalid_argument(std::string(who) + ": z >= 1 rejected, use the z->1 limit");
}

} // namespace detail

// F(a,b;c;z) for z in [0,1), a >= 0, b > 0, c > b.
inline double f21(double a, double b, double c, double z) {
    detail::f21_check_params(a, b, c, z, "f21");
    if (a == 0.0 || z == 0.0) return 1.0;
    return detail::f21_core(a, b, c, z, 1.0 - z);
}

// lim_{z->1} F(a,b;c;z) = Gamma(c) Gamma(c-a-b) / (Gamma(c-a) Gamma(c-b)),
// finite when c > a+b. Exposed for all positive-gamma-argument parameters,
// not only under the stricter textbook hypotheses c > 1, b > 1.
inline double f21_limit(double a, double b, double c) {
    if (a == 0.0) return 1.0;
    if (!(a > 0.0) || !(b > 0.0) || !(c > 0.0))
        throw std::invalid_argument("f21_limit: parameters must be positive");
    if (!(c - a - b > 0.0))
        throw std::invalid_argument("f21_limit: requires c > a + b, the limit is divergent otherwise");
    return std::exp(log_gamma(c) + log_gamma(c - a - b) - log_gamma(c - a) - log_gamma(c - b));
}

// Right-hand side of the Euler transformation
//   F(a,b;c;z) = (1-z)^{c-a-b} F(c-a,c-b;c;z).
inline double f21_transformed(double a, double b, double c, double z) {
    if (!(c - a > 0.0) || !(c - b > 0.0))
        throw std::invalid_argument("f21_transformed: requires c - a > 0 and c - b > 0");
    if (z < 0.0 || z >= 1.0)
        throw std::invalid_argument("f21_transformed: z must lie in [0,1)");
    const double w = 1.0 - z;
    // inner call has parameters (c-a, c-b; c), whose "c - b" slot equals b > 0
    if (z == 0.0) return 1.0;
    return std::pow(w, c - a - b) * detail::f21_core(c - a, c - b, c, z, w);
}

// H(a,b;c;z) = Gamma(b) Gamma(c-b) / Gamma(c) * F(a,b;c;z)
//            = int_0^1 (1-zt)^{-a} (1-t)^{c-b-1} t^{b-1} dt.
inline double h_integral(double a, double b, double c, double z) {
    detail::f21_check_params(a, b, c, z, "h_integral");
    const double beta = std::exp(log_gamma(b) + log_gamma(c - b) - log_gamma(c));
    if (a == 0.0 || z == 0.0) return beta;
    return beta * detail::f21_core(a, b, c, z, 1.0 - z);
}

// dF/dz = (ab/c) (1-z)^{c-a-b-1} F(c-a,c-b;c+1;z).
inline double f21_derivative(double a, double b, double c, double z) {
    if (!(c - a > 0.0) || !(c - b > 0.0))
        throw std::invalid_argument("f21_derivative: requires c - a > 0 and c - b > 0");
    if (z < 0.0 || z >= 1.0)
        throw std::invalid_argument("f21_derivative: z must lie in [0,1)");
    const double w = 1.0 - z;
    const double inner = (z == 0.0) ? 1.0 : detail::f21_core(c - a, c - b, c + 1.0, z, w);
    return (a * b / c) * std::pow(w, c - a - b - 1.0) * inner;
}

} // namespace aggdiff
