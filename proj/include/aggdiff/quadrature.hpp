#pragma once

// Small fixed quadrature rules used by the kernel assembly: Gauss-Legendre
// panels and dyadically graded panels toward an integrable endpoint
// singularity.

#include <array>
#include <cmath>
#include <functional>
#include <vector>

namespace aggdiff {

namespace quad {

inline constexpr std::array<double, 2> gl4_x = {0.3399810435848563, 0.8611363115940526};
inline constexpr std::array<double, 2> gl4_w = {0.6521451548625461, 0.3478548451374538};

inline constexpr std::array<double, 3> gl6_x = {0.2386191860831969, 0.6612093864662645, 0.9324695142031521};
inline constexpr std::array<double, 3> gl6_w = {0.4679139345726910, 0.3607615730481386, 0.1713244923791704};

inline constexpr std::array<double, 16> gl32_x = {
    0.0483076656877383, 0.1444719615827965, 0.2392873622521371, 0.3318686022821277,
    0.4213512761306353, 0.5068999089322294, 0.5877157572407623, 0.6630442669302152,
    0.7321821187402897, 0.7944837959679424, 0.8493676137325700, 0.8963211557660521,
    0.9349060759377397, 0.9647622555875064, 0.9856115115452684, 0.9972638618494816};
inline constexpr std::array<double, 16> gl32_w = {
    0.0965400885147278, 0.0956387200792749, 0.0938443990808046, 0.0911738786957639,
    0.0876520930044038, 0.0833119242269467, 0.0781938957870703, 0.0723457941088485,
    0.0658222227763618, 0.0586840934785355, 0.0509980592623762, 0.0428358980222267,
    0.0342738629130214, 0.0253920653092621, 0.0162743947309057, 0.0070186100094701};

template <class F>
inline double gauss4(const F& f, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < 2; ++i)
        s += gl4_w[i] * (f(c - h * gl4_x[i]) + f(c + h * gl4_x[i]));
    return s * h;
}

template <class F>
inline double gauss6(const F& f, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < 3; ++i)
        s += gl6_w[i] * (f(c - h * gl6_x[i]) + f(c + h * gl6_x[i]));
    return s * h;
}

template <class F>
inline double gauss32_01(const F& f) {
    double s = 0.0;
    for (int i = 0; i < 16; ++i)
        s += gl32_w[i] * (f(0.5 - 0.5 * gl32_x[i]) + f(0.5 + 0.5 * gl32_x[i]));
    return 0.5 * s;
}

// Integrate f over [a, b] where f is steep or singular at one endpoint:
// dyadic panels graded toward that end, 6-point Gauss each. `levels`
// halvings reach a relative distance 2^-levels from the endpoint. If
// `close_end` the final sliver gets its own panel (f finite there);
// otherwise it is left out for the caller to treat analytically.
template <class F>
inline double graded_toward(const F& f, double a, double b, bool steep_at_a, int levels, bool close_end) {
    double s = 0.0;
    double lo = a, hi = b;
    double len = b - a;
    for (int l = 0; l < levels; ++l) {
        len *= 0.5;
        if (steep_at_a) {
            const double mid = lo + len;
            s += gauss6(f, mid, hi);
            hi = mid;
        } else {
            const double mid = hi - len;
            s += gauss6(f, lo, mid);
            lo = mid;
        }
    }
    if (close_end) s += gauss6(f, lo, hi);
    return s;
}

} // namespace quad

// Monotone cubic (Fritsch-Butland) interpolation on a uniform grid.
struct PchipUniform {
    double x0 = 0.0, h = 1.0;
    std::vector<double> y, d;  // values and endpoint-limited slopes

    PchipUniform() = default;
    PchipUniform(double x0_, double h_, std::vector<double> y_) : x0(x0_), h(h_), y(std::move(y_)) {
        const std::size_t n = y.size();
        d.assign(n, 0.0);
        if (n < 2) return;
        std::vector<double> del(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) del[i] = (y[i + 1] - y[i]) / h;
        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (del[i - 1] * del[i] <= 0.0) d[i] = 0.0;
            else d[i] = 2.0 * del[i - 1] * del[i] / (del[i - 1] + del[i]);
        }
        auto end_slope = [](double d0, double d1) {
            double s = 1.5 * d0 - 0.5 * d1;  // one-sided parabolic
            if (s * d0 <= 0.0) s = 0.0;
            else if (std::abs(s) > 3.0 * std::abs(d0)) s = 3.0 * d0;
            return s;
        };
        d[0] = end_slope(del[0], del.size() > 1 ? del[1] : del[0]);
        d[n - 1] = end_slope(del[n - 2], del.size() > 1 ? del[del.size() - 2] : del[n - 2]);
    }

    double operator()(double x) const {
        const std::size_t n = y.size();
        double t = (x - x0) / h;
        std::size_t i = static_cast<std::size_t>(std::max(0.0, std::min(double(n - 2), std::floor(t))));
        t -= i;
        const double y0 = y[i], y1 = y[i + 1], d0 = d[i] * h, d1 = d[i + 1] * h;
        const double t2 = t * t, t3 = t2 * t;
        return (2.0 * t3 - 3.0 * t2 + 1.0) * y0 + (t3 - 2.0 * t2 + t) * d0 +
               (-2.0 * t3 + 3.0 * t2) * y1 + (t3 - t2) * d1;
    }
};

} // namespace aggdiff
