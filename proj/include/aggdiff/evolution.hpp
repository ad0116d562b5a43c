#pragma once

// Explicit conservative finite-volume scheme for the 1D dynamics
//
//   d/dt rho = (rho (xi_x))_x,   xi = m/(m-1) rho^{m-1} + chi S_k,
//
// with upwind fluxes, no-flux boundaries and the time step limited both by
// the advective CFL on u = -xi_x and the parabolic bound hidden in xi.
// Mass is conserved by telescoping; the free energy is monitored along the
// run and reported sample by sample.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "aggdiff/energy.hpp"
#include "aggdiff/grid.hpp"
#include "aggdiff/params.hpp"

namespace aggdiff {

struct EvolutionConfig {
    double t_end = 10.0;
    double cfl = 0.4;               // advective fraction; < 1/2 guarantees positivity
    double parabolic_safety = 0.4;  // fraction of dx^2 / (2 m max rho^{m-1})
    int output_stride = 200;        // steps between trace samples
    double L = 4.0;                 // domain [-L, L]
    int n = 256;

    void validate() const {
        if (!(t_end > 0.0)) throw std::invalid_argument("EvolutionConfig: t_end must be positive");
        if (!(cfl > 0.0) || !(cfl < 1.0)) throw std::invalid_argument("EvolutionConfig: cfl must lie in (0,1)");
        if (!(parabolic_safety > 0.0) || !(parabolic_safety < 1.0))
            throw std::invalid_argument("EvolutionConfig: parabolic_safety must lie in (0,1)");
        if (output_stride < 1) throw std::invalid_argument("EvolutionConfig: output_stride must be positive");
        if (!(L > 0.0) || n < 8) throw std::invalid_argument("EvolutionConfig: bad domain");
    }
};

struct TraceSample {
    double t = 0.0, mass = 0.0, Hm = 0.0, Wk = 0.0, F = 0.0;
};

struct EvolutionTrace {
    std::vector<TraceSample> samples;
    LineDensity final;
    long steps = 0;
    bool dissipation_ok = true;     // F non-increasing sample-to-sample within 1e-10
    double max_energy_jump = 0.0;
    double max_mass_drift = 0.0;    // relative to the initial mass
};

// Exact translation-invariant cell weights of |x-y|^k on a uniform line
// grid: raw_i = sum_j A[|i-j|] rho_j reproduces the potential of the
// piecewise-constant density with no quadrature error (k+1 > 0).
class LinePotential {
public:
    LinePotential(const ModelParams& p, double L, int n) : k_(p.k), n_(n) {
        if (p.N != 1) throw std::invalid_argument("LinePotential: params must have N = 1");
        if (!(p.k > -1.0) || !(p.k < 0.0))
            throw std::invalid_argument("LinePotential: requires k in (-1, 0)");
        const double dx = 2.0 * L / n;
        auto anti = [&](double t) {
            return (t >= 0.0 ? 1.0 : -1.0) * std::pow(std::abs(t), k_ + 1.0) / (k_ + 1.0);
        };
        A_.resize(n);
        for (int d = 0; d < n; ++d)
            A_[d] = anti((d + 0.5) * dx) - anti((d - 0.5) * dx);
    }

    // (|.|^k * rho)(x_i)
    std::vector<double> raw(const std::vector<double>& rho) const {
        std::vector<double> out(n_, 0.0);
        for (int i = 0; i < n_; ++i) {
            double s = 0.0;
            for (int j = 0; j < n_; ++j) s += A_[std::abs(i - j)] * rho[j];
            out[i] = s;
        }
        return out;
    }

    std::vector<double> S(const std::vector<double>& rho) const {
        auto out = raw(rho);
        for (double& v : out) v /= k_;
        return out;
    }

private:
    double k_;
    int n_;
    std::vector<double> A_;
};

// S_k at the cell centers via the exact cell antiderivatives; consistent
// with the radial N = 1 path on even densities.
inline std::vector<double> potential_1d(const LineDensity& rho, const ModelParams& p) {
    LinePotential pot(p, rho.L, rho.n);
    return pot.S(rho.values);
}

namespace detail {

struct StepFields {
    std::vector<double> S;       // chi-free potential S_k
    std::vector<double> u;       // interface velocities u_{i+1/2}, size n-1
    double max_u = 0.0;
    double max_rho_m1 = 0.0;
};

inline StepFields step_fields(const std::vector<double>& rho, const std::vector<double>& S,
                              const ModelParams& p, double dx) {
    const int n = static_cast<int>(rho.size());
    StepFields f;
    f.S = S;
    std::vector<double> xi(n);
    const double fac = p.m / (p.m - 1.0);
    for (int i = 0; i < n; ++i) {
        const double rm1 = std::pow(rho[i], p.m - 1.0);
        xi[i] = fac * rm1 + p.chi * S[i];
        f.max_rho_m1 = std::max(f.max_rho_m1, rm1);
    }
    f.u.resize(n - 1);
    for (int i = 0; i + 1 < n; ++i) {
        if (rho[i] == 0.0 && rho[i + 1] == 0.0) { f.u[i] = 0.0; continue; }  // vacuum: no flux
        f.u[i] = -(xi[i + 1] - xi[i]) / dx;
        f.max_u = std::max(f.max_u, std::abs(f.u[i]));
    }
    return f;
}

inline void apply_fluxes(std::vector<double>& rho, const std::vector<double>& u, double dt, double dx) {
    const int n = static_cast<int>(rho.size());
    std::vector<double> flux(n - 1);
    for (int i = 0; i + 1 < n; ++i) {
        const double up = std::max(u[i], 0.0), um = std::min(u[i], 0.0);
        flux[i] = up * rho[i] + um * rho[i + 1];
    }
    const double c = dt / dx;
    for (int i = 0; i < n; ++i) {
        const double fr = (i < n - 1) ? flux[i] : 0.0;  // no-flux boundaries
        const double fl = (i > 0) ? flux[i - 1] : 0.0;
        rho[i] -= c * (fr - fl);
    }
}

} // namespace detail

// Hard stability bound: dt <= min(dx/max|u|, dx^2/(2 m max rho^{m-1})).
inline double stability_bound(const LineDensity& rho, const ModelParams& p) {
    const auto S = potential_1d(rho, p);
    const auto f = detail::step_fields(rho.values, S, p, rho.dx());
    const double dx = rho.dx();
    double bound = dx * dx / (2.0 * p.m * std::max(f.max_rho_m1, 1e-300));
    if (f.max_u > 0.0) bound = std::min(bound, dx / f.max_u);
    return bound;
}

// One explicit step; rejects dt above the stability bound.
inline LineDensity step(const LineDensity& rho, const ModelParams& p, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be positive");
    const double bound = stability_bound(rho, p);
    if (dt > bound)
        throw std::invalid_argument("step: dt = " + std::to_string(dt) +
                                    " above the stability bound " + std::to_string(bound));
    const auto S = potential_1d(rho, p);
    const auto f = detail::step_fields(rho.values, S, p, rho.dx());
    std::vector<double> v = rho.values;
    detail::apply_fluxes(v, f.u, dt, rho.dx());
    return LineDensity(rho.L, rho.n, std::move(v));
}

// Evolve to t_end recording mass/H_m/W_k/F every output_stride steps (plus
// the first and last step). `on_sample` receives each sampled state.
inline EvolutionTrace evolve(const LineDensity& initial, const ModelParams& p, const EvolutionConfig& cfg,
                             const std::function<void(double, const LineDensity&)>& on_sample = {}) {
    cfg.validate();
    if (p.N != 1) throw std::invalid_argument("evolve: the gradient-flow simulator is one-dimensional");
    if (initial.n != cfg.n || std::abs(initial.L - cfg.L) > 1e-12 * cfg.L)
        throw std::invalid_argument("evolve: initial data grid does not match the configured domain");
    require_normalized(initial, "evolve");
    if (!(p.m > p.m_c)) throw std::invalid_argument("evolve: requires the diffusion-dominated regime m > m_c");

    const int n = cfg.n;
    const double dx = initial.dx();
    LinePotential pot(p, cfg.L, n);
    std::vector<double> rho = initial.values;

    EvolutionTrace trace;
    const double mass0 = mass(initial);
    double t = 0.0;
    long step_index = 0;
    double prev_F = std::numeric_limits<double>::infinity();

    auto record = [&](const std::vector<double>& raw_vals) {
        if (!trace.samples.empty() && trace.samples.back().t == t) return;
        TraceSample s;
        s.t = t;
        double msum = 0.0, c = 0.0;
        for (double v : rho) {  // Neumaier compensation: drift budget is 1e-12
            const double y = v - c;
            const double tt = msum + y;
            c = (tt - msum) - y;
            msum = tt;
        }
        s.mass = msum * dx;
        double hm = 0.0, cross = 0.0;
        for (int i = 0; i < n; ++i) {
            hm += std::pow(rho[i], p.m);
            cross += raw_vals[i] * rho[i];
        }
        s.Hm = hm * dx / (p.m - 1.0);
        s.Wk = cross * dx / (2.0 * p.k);
        s.F = s.Hm + p.chi * s.Wk;
        trace.max_mass_drift = std::max(trace.max_mass_drift, std::abs(s.mass - mass0) / mass0);
        if (s.F > prev_F + 1e-10) {
            trace.dissipation_ok = false;
        }
        trace.max_energy_jump = std::max(trace.max_energy_jump, s.F - prev_F);
        prev_F = s.F;
        trace.samples.push_back(s);
        if (on_sample) on_sample(t, LineDensity(cfg.L, n, rho));
    };

    while (t < cfg.t_end) {
        auto raw_vals = pot.raw(rho);
        std::vector<double> S(raw_vals);
        for (double& v : S) v /= p.k;
        if (step_index % cfg.output_stride == 0) record(raw_vals);

        const auto f = detail::step_fields(rho, S, p, dx);
        double dt = cfg.parabolic_safety * dx * dx / (2.0 * p.m * std::max(f.max_rho_m1, 1e-300));
        if (f.max_u > 0.0) dt = std::min(dt, cfg.cfl * dx / f.max_u);
        dt = std::min(dt, cfg.t_end - t);
        detail::apply_fluxes(rho, f.u, dt, dx);

        for (int i = 0; i < n; ++i) {
            if (!std::isfinite(rho[i]))
                throw std::runtime_error("evolve: non-finite density at step " + std::to_string(step_index) +
                                         ", cell " + std::to_string(i));
            if (rho[i] < 0.0) {
                if (rho[i] > -1e-15) { rho[i] = 0.0; continue; }  // clip rounding dust only
                throw std::runtime_error("evolve: negative density at step " + std::to_string(step_index) +
                                         ", cell " + std::to_string(i) + ", value " + std::to_string(rho[i]));
            }
        }

        t += dt;
        ++step_index;
    }

    auto raw_vals = pot.raw(rho);
    record(raw_vals);
    trace.steps = step_index;
    trace.final = LineDensity(cfg.L, n, std::move(rho));
    return trace;
}

} // namespace aggdiff
