#pragma once

// Density CSV files (`r,rho` radial / `x,rho` line, one row per cell
// center, 17 significant digits) and atomic file writes (temp + rename).

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "aggdiff/grid.hpp"

namespace aggdiff {

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void atomic_write(const std::filesystem::path& path, const std::string& content) {
    auto dir = path.parent_path();
    if (!dir.empty()) std::filesystem::create_directories(dir);
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("atomic_write: cannot open " + tmp.string());
        out << content;
        if (!out.good()) throw std::runtime_error("atomic_write: write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

inline std::string to_csv(const RadialDensity& rho) {
    std::string s = "r,rho\n";
    for (int i = 0; i < rho.grid.n; ++i)
        s += format_double(rho.grid.center(i)) + "," + format_double(rho.values[i]) + "\n";
    return s;
}

inline std::string to_csv(const LineDensity& rho) {
    std::string s = "x,rho\n";
    for (int i = 0; i < rho.n; ++i)
        s += format_double(rho.center(i)) + "," + format_double(rho.values[i]) + "\n";
    return s;
}

inline void write_density_csv(const std::filesystem::path& path, const RadialDensity& rho) {
    atomic_write(path, to_csv(rho));
}

inline void write_density_csv(const std::filesystem::path& path, const LineDensity& rho) {
    atomic_write(path, to_csv(rho));
}

namespace detail {

struct CsvColumns {
    std::string header0;
    std::vector<double> x, v;
};

inline CsvColumns read_two_columns(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("density CSV: cannot open " + path.string());
    CsvColumns c;
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("density CSV: empty file " + path.string());
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw std::invalid_argument("density CSV: missing header in " + path.string());
    c.header0 = line.substr(0, comma);
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string a, b;
        if (!std::getline(row, a, ',') || !std::getline(row, b, ','))
            throw std::invalid_argument("density CSV: malformed row '" + line + "'");
        c.x.push_back(std::stod(a));
        c.v.push_back(std::stod(b));
    }
    if (c.x.size() < 8) throw std::invalid_argument("density CSV: need at least 8 cells");
    return c;
}

inline void check_uniform(const std::vector<double>& x, double dx, const char* what) {
    for (std::size_t i = 0; i + 1 < x.size(); ++i)
        if (std::abs((x[i + 1] - x[i]) - dx) > 1e-9 * dx)
            throw std::invalid_argument(std::string("density CSV: ") + what + " grid is not uniform near row " +
                                        std::to_string(i));
}

} // namespace detail

// CSV with header `r,rho`: cell centers (i+1/2) dr on [0, r_max].
inline RadialDensity read_radial_density_csv(const std::filesystem::path& path, int N) {
    auto c = detail::read_two_columns(path);
    if (c.header0 != "r")
        throw std::invalid_argument("density CSV: expected header 'r,rho' in " + path.string());
    const double dx = 2.0 * c.x.front();
    detail::check_uniform(c.x, dx, "radial");
    const int n = static_cast<int>(c.x.size());
    return RadialDensity(RadialGrid(dx * n, n), N, std::move(c.v));
}

// CSV with header `x,rho`: cell centers on [-L, L].
inline LineDensity read_line_density_csv(const std::filesystem::path& path) {
    auto c = detail::read_two_columns(path);
    if (c.header0 != "x")
        throw std::invalid_argument("density CSV: expected header 'x,rho' in " + path.string());
    const int n = static_cast<int>(c.x.size());
    const double dx = (c.x.back() - c.x.front()) / (n - 1);
    detail::check_uniform(c.x, dx, "line");
    const double L = -(c.x.front() - 0.5 * dx);
    if (std::abs((c.x.back() + 0.5 * dx) - L) > 1e-9 * L)
        throw std::invalid_argument("density CSV: line grid is not centered on the origin");
    return LineDensity(L, n, std::move(c.v));
}

// Either kind, dispatched on the header.
inline std::variant<RadialDensity, LineDensity> read_density_csv(const std::filesystem::path& path, int N) {
    auto probe = detail::read_two_columns(path);
    if (probe.header0 == "r") return read_radial_density_csv(path, N);
    if (probe.header0 == "x") return read_line_density_csv(path);
    throw std::invalid_argument("density CSV: unknown header '" + probe.header0 + "' in " + path.string());
}

} // namespace aggdiff
