#pragma once

// Free energy F = H_m + chi W_k, its components, the multiplier
// D[rho] = 2 F + (m-2)/(m-1) ||rho||_m^m, and the scale-invariant HLS ratio.
//
// 1D interaction uses exact cell-pair integrals of |x-y|^k via the double
// antiderivative |t|^{k+2}/((k+1)(k+2)); the radial interaction reuses the
// assembled Riesz potential, W_k = (1/2k) int raw * rho dV, so the energy
// stays consistent with the solver's potential.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "aggdiff/grid.hpp"
#include "aggdiff/params.hpp"
#include "aggdiff/riesz.hpp"

namespace aggdiff {

struct EnergyBreakdown {
    double Hm = 0.0;  // (1/(m-1)) int rho^m
    double Wk = 0.0;  // (1/2) int int |x-y|^k/k rho rho
    double F = 0.0;   // Hm + chi Wk
    double D = 0.0;   // 2F + (m-2)/(m-1) ||rho||_m^m
};

// ---- entropy ----------------------------------------------------------------

inline double entropy(const RadialDensity& rho, double m) {
    if (!(m > 1.0)) throw std::invalid_argument("entropy: m must exceed 1");
    const double sigma = surface_measure(rho.N);
    double s = 0.0;
    for (int i = 0; i < rho.grid.n; ++i)
        s += std::pow(rho.values[i], m) * rho.grid.volume_weight(i, rho.N);
    return sigma * s / (m - 1.0);
}

inline double entropy(const LineDensity& rho, double m) {
    if (!(m > 1.0)) throw std::invalid_argument("entropy: m must exceed 1");
    double s = 0.0;
    for (double v : rho.values) s += std::pow(v, m);
    return s * rho.dx() / (m - 1.0);
}

// ---- interaction ------------------------------------------------------------

namespace detail {

// Exact pair weights for a uniform 1D grid: I[d] = double integral of
// |x-y|^k over two cells spaced d cells apart.
inline std::vector<double> pair_weights_1d(int n, double h, double k) {
    auto Phi = [&](double t) { return std::pow(std::abs(t), k + 2.0) / ((k + 1.0) * (k + 2.0)); };
    std::vector<double> I(n, 0.0);
    for (int d = 0; d < n; ++d)
        I[d] = Phi((d + 1.0) * h) - 2.0 * Phi(double(d) * h) + Phi((d - 1.0) * h);
    return I;
}

// int int |x-y|^k rho rho dx dy, no prefactor; accepts any mass.
inline double interaction_double_integral(const LineDensity& rho, double k) {
    const int n = rho.n;
    const auto I = pair_weights_1d(n, rho.dx(), k);
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
        if (rho.values[i] == 0.0) continue;
        double row = 0.0;
        for (int j = 0; j < n; ++j) row += I[std::abs(i - j)] * rho.values[j];
        s += rho.values[i] * row;
    }
    return s;
}

inline double interaction_double_integral(const RadialDensity& rho, const RadialConvolution& conv) {
    if (!(conv.grid() == rho.grid))
        throw std::invalid_argument("interaction: convolution grid does not match density");
    const auto pot = conv.raw(rho.values);
    const double sigma = surface_measure(rho.N);
    double s = 0.0;
    for (int i = 0; i < rho.grid.n; ++i)
        s += pot[i] * rho.values[i] * rho.grid.volume_weight(i, rho.N);
    return sigma * s;
}

} // namespace detail

inline double interaction(const LineDensity& rho, const ModelParams& p) {
    require_normalized(rho, "interaction");
    return detail::interaction_double_integral(rho, p.k) / (2.0 * p.k);
}

inline double interaction(const RadialDensity& rho, const ModelParams& p, const RadialConvolution& conv) {
    require_normalized(rho, "interaction");
    return detail::interaction_double_integral(rho, conv) / (2.0 * p.k);
}

// ---- free energy ------------------------------------------------------------

namespace detail {

inline EnergyBreakdown assemble(double Hm, double Wk, double m, double chi) {
    EnergyBreakdown e;
    e.Hm = Hm;
    e.Wk = Wk;
    e.F = Hm + chi * Wk;
    e.D = 2.0 * e.F + (m - 2.0) * Hm;  // (m-2)/(m-1) ||rho||_m^m = (m-2) Hm
    return e;
}

} // namespace detail

inline EnergyBreakdown free_energy(const LineDensity& rho, const ModelParams& p) {
    return detail::assemble(entropy(rho, p.m), interaction(rho, p), p.m, p.chi);
}

inline EnergyBreakdown free_energy(const RadialDensity& rho, const ModelParams& p, const RadialConvolution& conv) {
    return detail::assemble(entropy(rho, p.m), interaction(rho, p, conv), p.m, p.chi);
}

inline EnergyBreakdown free_energy(const RadialDensity& rho, const ModelParams& p) {
    RadialConvolution conv(p, rho.grid);
    return free_energy(rho, p, conv);
}

// ---- HLS ratio ----------------------------------------------------------------

// |int int |x-y|^k rho rho| / (||rho||_1^{(k+N)/N} ||rho||_{m_c}^{m_c});
// invariant under dilation and mass scaling, finite by the HLS-type
// inequality. Accepts unnormalized input (both sides are homogeneous).
inline double hls_ratio(const LineDensity& rho, const ModelParams& p) {
    const double m1 = mass(rho);
    if (!(m1 > 0.0)) throw std::invalid_argument("hls_ratio: zero density");
    double mc_norm = 0.0;
    for (double v : rho.values) mc_norm += std::pow(v, p.m_c);
    mc_norm *= rho.dx();
    const double num = std::abs(detail::interaction_double_integral(rho, p.k));
    return num / (std::pow(m1, (p.k + p.N) / p.N) * mc_norm);
}

inline double hls_ratio(const RadialDensity& rho, const ModelParams& p, const RadialConvolution& conv);

inline double hls_ratio(const RadialDensity& rho, const ModelParams& p) {
    RadialConvolution conv(p, rho.grid);
    return hls_ratio(rho, p, conv);
}

inline double hls_ratio(const RadialDensity& rho, const ModelParams& p, const RadialConvolution& conv) {
    const double m1 = mass(rho);
    if (!(m1 > 0.0)) throw std::invalid_argument("hls_ratio: zero density");
    const double sigma = surface_measure(rho.N);
    double mc_norm = 0.0;
    for (int i = 0; i < rho.grid.n; ++i)
        mc_norm += std::pow(rho.values[i], p.m_c) * rho.grid.volume_weight(i, rho.N);
    mc_norm *= sigma;
    const double num = std::abs(detail::interaction_double_integral(rho, conv));
    return num / (std::pow(m1, (p.k + p.N) / p.N) * mc_norm);
}

} // namespace aggdiff
