#pragma once

// Run configuration: one strict JSON document. Unknown fields are rejected
// so that experiment configs cannot silently rot.

#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "aggdiff/evolution.hpp"
#include "aggdiff/grid.hpp"
#include "aggdiff/params.hpp"
#include "aggdiff/stationary.hpp"

namespace aggdiff {

struct IoConfig {
    std::string output_dir = ".";
    int precision = 17;
};

struct RunConfig {
    ModelParams params;
    std::optional<RadialGrid> grid;          // stationary / potential / energy / uniqueness
    SolverConfig solver;
    EvolutionConfig evolution;
    IoConfig io;
};

namespace detail {

inline void reject_unknown(const nlohmann::json& obj, std::initializer_list<const char*> known,
                           const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* K : known)
            if (it.key() == K) { ok = true; break; }
        if (!ok)
            throw std::invalid_argument("config: unknown field '" + where + it.key() + "'");
    }
}

template <class T>
inline void read_into(const nlohmann::json& obj, const char* key, T& out) {
    if (obj.contains(key)) out = obj.at(key).get<T>();
}

} // namespace detail

inline RunConfig parse_config(const nlohmann::json& j) {
    using nlohmann::json;
    if (!j.is_object()) throw std::invalid_argument("config: top level must be a JSON object");
    detail::reject_unknown(j, {"params", "grid", "solver", "evolution", "io"}, "");

    if (!j.contains("params")) throw std::invalid_argument("config: missing required section 'params'");
    const json& jp = j.at("params");
    detail::reject_unknown(jp, {"N", "k", "m", "chi"}, "params.");
    for (const char* req : {"N", "k", "m", "chi"})
        if (!jp.contains(req)) throw std::invalid_argument(std::string("config: params.") + req + " is required");

    RunConfig cfg;
    cfg.params = make_params(jp.at("N").get<int>(), jp.at("k").get<double>(),
                             jp.at("m").get<double>(), jp.at("chi").get<double>());

    if (j.contains("grid")) {
        const json& jg = j.at("grid");
        detail::reject_unknown(jg, {"r_max", "n"}, "grid.");
        if (!jg.contains("r_max") || !jg.contains("n"))
            throw std::invalid_argument("config: grid requires r_max and n");
        cfg.grid = RadialGrid(jg.at("r_max").get<double>(), jg.at("n").get<int>());
    }

    if (j.contains("solver")) {
        const json& js = j.at("solver");
        detail::reject_unknown(js, {"omega", "tol", "max_iter", "D_bracket", "support_margin", "auto_domain"},
                               "solver.");
        detail::read_into(js, "omega", cfg.solver.omega);
        detail::read_into(js, "tol", cfg.solver.tol);
        detail::read_into(js, "max_iter", cfg.solver.max_iter);
        detail::read_into(js, "support_margin", cfg.solver.support_margin);
        detail::read_into(js, "auto_domain", cfg.solver.auto_domain);
        if (js.contains("D_bracket")) {
            const auto br = js.at("D_bracket").get<std::vector<double>>();
            if (br.size() != 2) throw std::invalid_argument("config: solver.D_bracket must be [lo, hi]");
            cfg.solver.D_lo = br[0];
            cfg.solver.D_hi = br[1];
        }
        cfg.solver.validate();
    }

    if (j.contains("evolution")) {
        const json& je = j.at("evolution");
        detail::reject_unknown(je, {"t_end", "cfl", "parabolic_safety", "output_stride", "L", "n"}, "evolution.");
        detail::read_into(je, "t_end", cfg.evolution.t_end);
        detail::read_into(je, "cfl", cfg.evolution.cfl);
        detail::read_into(je, "parabolic_safety", cfg.evolution.parabolic_safety);
        detail::read_into(je, "output_stride", cfg.evolution.output_stride);
        detail::read_into(je, "L", cfg.evolution.L);
        detail::read_into(je, "n", cfg.evolution.n);
        cfg.evolution.validate();
    }

    if (j.contains("io")) {
        const json& ji = j.at("io");
        detail::reject_unknown(ji, {"output_dir", "precision"}, "io.");
        detail::read_into(ji, "output_dir", cfg.io.output_dir);
        detail::read_into(ji, "precision", cfg.io.precision);
        if (cfg.io.precision < 15 || cfg.io.precision > 17)
            throw std::invalid_argument("config: io.precision must be 15..17");
    }

    return cfg;
}

inline RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("config: JSON parse error in " + path.string() + ": " + e.what());
    }
    return parse_config(j);
}

} // namespace aggdiff
