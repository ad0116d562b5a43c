// aggdiff: stationary states, free energies and 1D gradient-flow dynamics
// of the aggregation-diffusion equation with porous-medium diffusion and
// Riesz-kernel attraction.
//
// Subcommands: stationary, evolve, potential, energy, uniqueness, verify.
// Exit codes: 0 success, 1 validation error, 2 numerical failure.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <variant>

#include <CLI11.hpp>
#include <json.hpp>

#include "aggdiff/config.hpp"
#include "aggdiff/energy.hpp"
#include "aggdiff/evolution.hpp"
#include "aggdiff/grid.hpp"
#include "aggdiff/io.hpp"
#include "aggdiff/riesz.hpp"
#include "aggdiff/stationary.hpp"
#include "aggdiff/verify.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

json report_to_json(const aggdiff::StationaryReport& rep) {
    json j;
    j["converged"] = rep.converged;
    j["iterations"] = rep.iterations;
    j["D"] = rep.D;
    j["D_energy_formula"] = rep.D_energy;  // identification of the two multipliers is recorded, not assumed
    j["el_residual"] = rep.el_residual;
    j["support_radius"] = rep.support_radius;
    j["monotone_defect"] = rep.monotone_defect;
    if (rep.char_residual_1d) j["char_residual_1d"] = *rep.char_residual_1d;
    j["lipschitz_rho_m1"] = rep.lipschitz_rho_m1;
    j["lipschitz_rho"] = rep.lipschitz_rho;
    j["grad_S_max"] = rep.grad_S_max;
    j["energy"] = {{"Hm", rep.energy.Hm}, {"Wk", rep.energy.Wk}, {"F", rep.energy.F}, {"D", rep.energy.D}};
    j["beyond_mstar"] = rep.beyond_mstar;
    j["domain_growths"] = rep.domain_growths;
    j["energy_descent_ok"] = rep.energy_descent_ok;
    j["energy_descent_defect"] = rep.energy_descent_defect;
    j["grid"] = {{"r_max", rep.profile.grid.r_max}, {"n", rep.profile.grid.n}};
    return j;
}

int cmd_stationary(const std::string& config_path, const std::string& initial_path) {
    auto cfg = aggdiff::load_config(config_path);
    if (!cfg.grid) throw std::invalid_argument("stationary: config needs a 'grid' section");
    aggdiff::RadialDensity initial =
        initial_path.empty()
            ? aggdiff::default_initial(cfg.params, *cfg.grid)
            : aggdiff::read_radial_density_csv(initial_path, cfg.params.N);
    if (!initial_path.empty() && !(initial.grid == *cfg.grid))
        throw std::invalid_argument("stationary: initial profile grid does not match config grid");
    if (cfg.params.m_star_exceeded())
        std::cerr << "warning: m >= m*, the EL profile need not be a stationary state in the distributional sense\n";

    auto rep = aggdiff::solve_stationary(cfg.params, cfg.solver, initial);

    const fs::path outdir = cfg.io.output_dir;
    aggdiff::write_density_csv(outdir / "profile.csv", rep.profile);
    aggdiff::atomic_write(outdir / "report.json", report_to_json(rep).dump(2) + "\n");
    std::cout << "converged in " << rep.iterations << " iterations, D = " << aggdiff::format_double(rep.D)
              << ", el_residual = " << aggdiff::format_double(rep.el_residual)
              << ", support " << aggdiff::format_double(rep.support_radius) << "\n";
    return 0;
}

int cmd_evolve(const std::string& config_path, const std::string& initial_path, bool dump_profiles) {
    auto cfg = aggdiff::load_config(config_path);
    auto initial = aggdiff::read_line_density_csv(initial_path);
    const fs::path outdir = cfg.io.output_dir;

    std::string trace_csv = "t,mass,Hm,Wk,F\n";
    auto on_sample = [&](double t, const aggdiff::LineDensity& state) {
        if (dump_profiles) {
            char name[64];
            std::snprintf(name, sizeof name, "profile_%.6f.csv", t);
            aggdiff::write_density_csv(outdir / name, state);
        }
    };
    auto trace = aggdiff::evolve(initial, cfg.params, cfg.evolution, on_sample);
    for (const auto& s : trace.samples)
        trace_csv += aggdiff::format_double(s.t) + "," + aggdiff::format_double(s.mass) + "," +
                     aggdiff::format_double(s.Hm) + "," + aggdiff::format_double(s.Wk) + "," +
                     aggdiff::format_double(s.F) + "\n";
    aggdiff::atomic_write(outdir / "trace.csv", trace_csv);
    aggdiff::write_density_csv(outdir / "final.csv", trace.final);
    std::cout << "evolved " << trace.steps << " steps, final F = "
              << aggdiff::format_double(trace.samples.back().F)
              << ", max mass drift = " << aggdiff::format_double(trace.max_mass_drift) << "\n";
    return 0;
}

int cmd_potential(const std::string& config_path, const std::string& density_path) {
    auto cfg = aggdiff::load_config(config_path);
    auto rho = aggdiff::read_radial_density_csv(density_path, cfg.params.N);
    auto pot = aggdiff::riesz_potential(rho, cfg.params);
    std::string csv = "r,raw_riesz,S_k\n";
    for (int i = 0; i < pot.grid.n; ++i)
        csv += aggdiff::format_double(pot.grid.center(i)) + "," + aggdiff::format_double(pot.raw[i]) + "," +
               aggdiff::format_double(pot.S[i]) + "\n";
    aggdiff::atomic_write(fs::path(cfg.io.output_dir) / "potential.csv", csv);
    std::cout << "wrote potential.csv (" << pot.grid.n << " radii)\n";
    return 0;
}

int cmd_energy(const std::string& config_path, const std::string& density_path) {
    auto cfg = aggdiff::load_config(config_path);
    auto density = aggdiff::read_density_csv(density_path, cfg.params.N);
    json j;
    if (std::holds_alternative<aggdiff::LineDensity>(density)) {
        if (cfg.params.N != 1)
            throw std::invalid_argument("energy: line density requires N = 1 params");
        const auto& rho = std::get<aggdiff::LineDensity>(density);
        auto e = aggdiff::free_energy(rho, cfg.params);
        j = {{"Hm", e.Hm}, {"Wk", e.Wk}, {"F", e.F}, {"D", e.D}, {"hls_ratio", aggdiff::hls_ratio(rho, cfg.params)}};
    } else {
        const auto& rho = std::get<aggdiff::RadialDensity>(density);
        aggdiff::RadialConvolution conv(cfg.params, rho.grid);
        auto e = aggdiff::free_energy(rho, cfg.params, conv);
        j = {{"Hm", e.Hm}, {"Wk", e.Wk}, {"F", e.F}, {"D", e.D},
             {"hls_ratio", aggdiff::hls_ratio(rho, cfg.params, conv)}};
    }
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_uniqueness(const std::string& config_path) {
    auto cfg = aggdiff::load_config(config_path);
    if (!cfg.grid) throw std::invalid_argument("uniqueness: config needs a 'grid' section");
    auto rep = aggdiff::uniqueness_harness(cfg.params, cfg.solver, *cfg.grid);
    json j;
    j["initials"] = {"uniform", "triangle", "gaussian"};
    j["pairwise_l1"] = rep.pairwise_l1;
    j["max_pairwise_l1"] = rep.max_pairwise;
    j["grid"] = {{"r_max", rep.common_grid.r_max}, {"n", rep.common_grid.n}};
    j["uniqueness_proven"] = (cfg.params.N == 1);  // N >= 2 distances are reported, never asserted
    aggdiff::atomic_write(fs::path(cfg.io.output_dir) / "uniqueness.json", j.dump(2) + "\n");
    std::cout << "max pairwise L1 distance = " << aggdiff::format_double(rep.max_pairwise) << "\n";
    return 0;
}

int cmd_verify(const std::string& suite, std::uint64_t seed) {
    auto results = aggdiff::verify::run_suite(suite, seed);
    std::size_t width = 0;
    for (const auto& r : results) width = std::max(width, r.name.size());
    int failed = 0;
    for (const auto& r : results) {
        std::printf("%-*s  %s  %s\n", static_cast<int>(width), r.name.c_str(),
                    r.pass ? "PASS" : "FAIL", r.detail.c_str());
        if (!r.pass) ++failed;
    }
    std::printf("%d/%zu checks passed\n", static_cast<int>(results.size()) - failed, results.size());
    return failed == 0 ? 0 : 2;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"aggregation-diffusion stationary states and gradient-flow dynamics"};
    app.require_subcommand(1);

    std::string config_path, initial_path, density_path, suite = "all";
    std::uint64_t seed = 12345;
    bool dump_profiles = false;

    auto* stationary = app.add_subcommand("stationary", "solve the Euler-Lagrange fixed point");
    stationary->add_option("--config", config_path, "run configuration JSON")->required();
    stationary->add_option("--initial", initial_path, "initial radial profile CSV (default: unit-ball indicator)");

    auto* evolve = app.add_subcommand("evolve", "run the 1D finite-volume dynamics");
    evolve->add_option("--config", config_path, "run configuration JSON")->required();
    evolve->add_option("--initial", initial_path, "initial line profile CSV")->required();
    evolve->add_flag("--dump-profiles", dump_profiles, "write profile_<t>.csv at every sample");

    auto* potential = app.add_subcommand("potential", "Riesz potential of a radial density");
    potential->add_option("--config", config_path, "run configuration JSON")->required();
    potential->add_option("--density", density_path, "density CSV (r,rho)")->required();

    auto* energy = app.add_subcommand("energy", "free-energy breakdown of a density");
    energy->add_option("--config", config_path, "run configuration JSON")->required();
    energy->add_option("--density", density_path, "density CSV (r,rho or x,rho)")->required();

    auto* uniqueness = app.add_subcommand("uniqueness", "three-initial uniqueness harness");
    uniqueness->add_option("--config", config_path, "run configuration JSON")->required();

    auto* verify = app.add_subcommand("verify", "run a property-test family");
    verify->add_option("--suite", suite, "model|hypergeom|riesz|energy|stationary|evolution|all");
    verify->add_option("--seed", seed, "random seed for the property sweeps");

    CLI11_PARSE(app, argc, argv);

    try {
        if (stationary->parsed()) return cmd_stationary(config_path, initial_path);
        if (evolve->parsed()) return cmd_evolve(config_path, initial_path, dump_profiles);
        if (potential->parsed()) return cmd_potential(config_path, density_path);
        if (energy->parsed()) return cmd_energy(config_path, density_path);
        if (uniqueness->parsed()) return cmd_uniqueness(config_path);
        if (verify->parsed()) return cmd_verify(suite, seed);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
