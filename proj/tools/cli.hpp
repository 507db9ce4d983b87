#pragma once

// Command-line front end: single-shot computations, parameter sweeps, figure
// presets and the verification suite. run_cli is the whole program; main()
// only forwards argv.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pbphase/pbphase.hpp"

namespace pbphase::cli {

enum ExitCode : int {
    exit_ok = 0,
    exit_verify_failed = 1,
    exit_domain_error = 2,
    exit_usage = 64,
};

using Json = nlohmann::ordered_json;

inline constexpr double nan = std::numeric_limits<double>::quiet_NaN();

struct RunConfig {
    std::string command;
    int n = 0;
    double alpha = 0.0;
    double r = 0.0;
    double eps = 0.0;
    double eps_phase = 0.0;
    double theta0 = -pi;
    std::optional<int> points;
    std::vector<double> xrange;
    std::vector<double> yrange;
    std::optional<int> nx;
    std::optional<int> ny;
    std::string cutoff = "auto";
    std::optional<double> tol;
    std::string format;
    std::string out;

    std::string sweep_param = "alpha";
    double from = 0.0;
    double to = 5.0;
    int steps = 101;
    std::vector<std::string> stats = {"variance_integral"};

    std::string preset;

    std::string lattice = "standard";
    double norm_tol = 1e-9;

    StateParams params() const {
        double phase = eps_phase + (eps < 0.0 ? pi : 0.0);
        phase = std::fmod(phase, 2.0 * pi);
        if (phase < 0.0) {
            phase += 2.0 * pi;
        }
        return {n, alpha, r, std::fabs(eps), eps == 0.0 ? 0.0 : phase};
    }

    ExpansionOptions expansion() const {
        ExpansionOptions opt;
        if (tol) {
            opt.tol_norm = *tol;
        }
        if (cutoff != "auto") {
            opt.fixed_cutoff = std::stoi(cutoff);
        }
        return opt;
    }
};

// ---------------------------------------------------------------- formatting

inline std::string shortest(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline std::string digits17(double v) {
    if (!std::isfinite(v)) {
        return shortest(v);
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline Json json_number(double v) {
    if (std::isfinite(v)) {
        return v;
    }
    return nullptr;
}

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    bool full_digits = false; ///< %.17g instead of shortest round-trip
};

inline std::string metadata_value(const Json& v) {
    return v.is_string() ? v.get<std::string>() : v.dump();
}

inline void write_csv(std::ostream& os, const Json& meta, const Table& t) {
    for (const auto& [key, value] : meta.items()) {
        os << "# " << key << " = " << metadata_value(value) << '\n';
    }
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
        os << (c ? "," : "") << t.columns[c];
    }
    os << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            os << (c ? "," : "") << (t.full_digits ? digits17(row[c]) : shortest(row[c]));
        }
        os << '\n';
    }
}

inline void write_json(std::ostream& os, const Json& meta, const Table& t) {
    Json doc;
    doc["metadata"] = meta;
    Json data = Json::array();
    for (const auto& row : t.rows) {
        Json obj = Json::object();
        for (std::size_t c = 0; c < row.size(); ++c) {
            obj[t.columns[c]] = json_number(row[c]);
        }
        data.push_back(std::move(obj));
    }
    doc["data"] = std::move(data);
    os << doc.dump(2) << '\n';
}

// ---------------------------------------------------------------- output

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// --out wins; otherwise PBPHASE_OUT_DIR/<default_name>; otherwise stdout.
inline std::optional<std::filesystem::path> output_path(const RunConfig& cfg,
                                                        const std::string& default_name) {
    if (!cfg.out.empty()) {
        return std::filesystem::path(cfg.out);
    }
    if (const char* dir = std::getenv("PBPHASE_OUT_DIR"); dir && *dir) {
        return std::filesystem::path(dir) / default_name;
    }
    return std::nullopt;
}

inline void emit(const RunConfig& cfg, const std::string& default_stem, std::ostream& out,
                 const std::function<void(std::ostream&)>& body) {
    const std::string ext = cfg.format == "json" ? ".json" : ".csv";
    const auto path = output_path(cfg, default_stem + ext);
    if (!path) {
        body(out);
        return;
    }
    if (path->has_parent_path()) {
        std::filesystem::create_directories(path->parent_path());
    }
    std::ofstream file(*path, std::ios::binary | std::ios::trunc);
    if (!file) {
        throw UsageError("cannot open output file " + path->string());
    }
    body(file);
}

inline void emit_table(const RunConfig& cfg, const std::string& default_stem, const Json& meta,
                       const Table& t, std::ostream& out) {
    emit(cfg, default_stem, out, [&](std::ostream& os) {
        if (cfg.format == "json") {
            write_json(os, meta, t);
        } else {
            write_csv(os, meta, t);
        }
    });
}

inline Json base_metadata(const RunConfig& cfg) {
    Json m;
    m["artifact"] = std::string("pbphase ") + std::string(version);
    m["command"] = cfg.command;
    return m;
}

inline void add_state_metadata(Json& m, const RunConfig& cfg) {
    m["n"] = cfg.n;
    m["alpha"] = cfg.alpha;
    m["r"] = cfg.r;
    m["eps"] = cfg.eps;
    m["eps_phase"] = cfg.eps_phase;
}

inline void add_expansion_metadata(Json& m, const RunConfig& cfg, const FockExpansion& e) {
    const ExpansionOptions opt = cfg.expansion();
    m["cutoff_mode"] = cfg.cutoff;
    m["tol"] = opt.tol_norm;
    m["cutoff"] = e.cutoff();
    m["tail_mass"] = e.tail_mass();
}

// ---------------------------------------------------------------- computations

inline PhaseWindow resolve_window(const RunConfig& cfg, const FockExpansion& e) {
    if (cfg.points) {
        return PhaseWindow{cfg.theta0, *cfg.points};
    }
    return window_for(e, cfg.theta0);
}

inline GridSpec resolve_grid(const RunConfig& cfg, const StateParams& p) {
    GridSpec g = default_grid_spec(p);
    if (!cfg.xrange.empty()) {
        g.x_min = cfg.xrange[0];
        g.x_max = cfg.xrange[1];
    }
    if (!cfg.yrange.empty()) {
        g.y_min = cfg.yrange[0];
        g.y_max = cfg.yrange[1];
        g.ny = std::max(201, min_fringe_nodes(g.y_min, g.y_max, p.alpha));
    }
    if (cfg.nx) {
        g.nx = *cfg.nx;
    }
    if (cfg.ny) {
        g.ny = *cfg.ny;
    }
    return g;
}

inline const std::vector<std::string>& stat_names() {
    static const std::vector<std::string> names = {
        "mean_phase", "variance_integral", "variance_closed", "n_mean",
        "n_variance", "commutator_mag",    "s_number",        "s_phase"};
    return names;
}

/// Every statistic for one state; undefined values are NaN.
inline std::map<std::string, double> compute_stats(const RunConfig& cfg, const FockExpansion& e) {
    const PhaseWindow w = resolve_window(cfg, e);
    const PhaseStatistics st = phase_statistics(e, w);
    return {
        {"mean_phase", st.mean_phase},
        {"variance_integral", st.phase_variance},
        {"variance_closed", w.theta0 == -pi ? phase_variance_closed(e) : nan},
        {"n_mean", st.n_mean},
        {"n_variance", st.n_variance},
        {"commutator_mag", st.commutator_mag},
        {"s_number", st.s_number.value_or(nan)},
        {"s_phase", st.s_phase.value_or(nan)},
    };
}

inline std::map<std::string, double> compute_stats(const StateParams& p, const RunConfig& cfg) {
    return compute_stats(cfg, expand(p, cfg.expansion()));
}

inline void require_real_eps(const StateParams& p) {
    if (!p.has_real_eps()) {
        throw UsageError("--eps-phase is only supported by the wigner command");
    }
}

// ---------------------------------------------------------------- commands

inline int cmd_coeffs(const RunConfig& cfg, std::ostream& out) {
    const StateParams p = cfg.params();
    require_real_eps(p);
    const FockExpansion e = expand(p, cfg.expansion());
    Json meta = base_metadata(cfg);
    add_state_metadata(meta, cfg);
    add_expansion_metadata(meta, cfg, e);
    Table t{{"m", "re_c", "im_c", "prob"}, {}, true};
    for (int m = 0; m <= e.cutoff(); ++m) {
        t.rows.push_back({static_cast<double>(m), e[m].real(), e[m].imag(), std::norm(e[m])});
    }
    emit_table(cfg, "coeffs", meta, t, out);
    return exit_ok;
}

inline int cmd_phase_dist(const RunConfig& cfg, std::ostream& out) {
    const StateParams p = cfg.params();
    require_real_eps(p);
    const FockExpansion e = expand(p, cfg.expansion());
    const PhaseDistribution d = phase_distribution(e, resolve_window(cfg, e));
    Json meta = base_metadata(cfg);
    add_state_metadata(meta, cfg);
    add_expansion_metadata(meta, cfg, e);
    meta["theta0"] = d.window.theta0;
    meta["points"] = d.window.points;
    Table t{{"theta", "p"}, {}, false};
    for (int k = 0; k < d.window.points; ++k) {
        t.rows.push_back({d.window.theta(k), d.values[k]});
    }
    emit_table(cfg, "phase-dist", meta, t, out);
    return exit_ok;
}

inline int cmd_stats(const RunConfig& cfg, std::ostream& out) {
    const StateParams p = cfg.params();
    require_real_eps(p);
    const FockExpansion e = expand(p, cfg.expansion());
    const auto stats = compute_stats(cfg, e);
    Json meta = base_metadata(cfg);
    add_state_metadata(meta, cfg);
    add_expansion_metadata(meta, cfg, e);
    meta["theta0"] = cfg.theta0;
    meta["points"] = resolve_window(cfg, e).points;
    emit(cfg, "stats", out, [&](std::ostream& os) {
        if (cfg.format == "csv") {
            write_csv(os, meta, Table{{}, {}, false});
            os << "statistic,value\n";
            for (const auto& name : stat_names()) {
                os << name << ',' << shortest(stats.at(name)) << '\n';
            }
            return;
        }
        Json doc;
        doc["metadata"] = meta;
        for (const auto& name : stat_names()) {
            doc[name] = json_number(stats.at(name));
        }
        os << doc.dump(2) << '\n';
    });
    return exit_ok;
}

inline Table wigner_table(const WignerGrid& g) {
    Table t{{"x", "y", "w"}, {}, false};
    t.rows.reserve(g.values.size());
    for (int i = 0; i < g.spec.nx; ++i) {
        for (int j = 0; j < g.spec.ny; ++j) {
            t.rows.push_back({g.spec.x(i), g.spec.y(j), g.at(i, j)});
        }
    }
    return t;
}

inline void add_grid_metadata(Json& m, const GridSpec& g) {
    m["x_min"] = g.x_min;
    m["x_max"] = g.x_max;
    m["y_min"] = g.y_min;
    m["y_max"] = g.y_max;
    m["nx"] = g.nx;
    m["ny"] = g.ny;
}

inline int cmd_wigner(const RunConfig& cfg, std::ostream& out) {
    const StateParams p = cfg.params();
    const GridSpec spec = resolve_grid(cfg, p);
    const WignerGrid g = wigner_grid(p, spec);
    Json meta = base_metadata(cfg);
    add_state_metadata(meta, cfg);
    add_grid_metadata(meta, spec);
    emit_table(cfg, "wigner", meta, wigner_table(g), out);
    return exit_ok;
}

inline int cmd_sweep(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    if (!(cfg.from < cfg.to) || cfg.steps < 2) {
        throw UsageError("sweep needs --from < --to and --steps >= 2");
    }
    for (const auto& s : cfg.stats) {
        if (std::find(stat_names().begin(), stat_names().end(), s) == stat_names().end()) {
            throw UsageError("unknown statistic '" + s + "'");
        }
    }
    require_real_eps(cfg.params());
    Table t{{cfg.sweep_param}, {}, false};
    t.columns.insert(t.columns.end(), cfg.stats.begin(), cfg.stats.end());
    for (int k = 0; k < cfg.steps; ++k) {
        const double v = cfg.from + (cfg.to - cfg.from) * k / (cfg.steps - 1);
        RunConfig point = cfg;
        (cfg.sweep_param == "alpha" ? point.alpha : point.r) = v;
        std::vector<double> row{v};
        try {
            const auto stats = compute_stats(point.params(), point);
            for (const auto& s : cfg.stats) {
                row.push_back(stats.at(s));
            }
        } catch (const SingularState& e) {
            err << "warning: " << cfg.sweep_param << " = " << shortest(v) << ": " << e.what()
                << '\n';
            row.resize(1 + cfg.stats.size(), nan);
        }
        t.rows.push_back(std::move(row));
    }
    Json meta = base_metadata(cfg);
    add_state_metadata(meta, cfg);
    meta["param"] = cfg.sweep_param;
    meta["from"] = cfg.from;
    meta["to"] = cfg.to;
    meta["steps"] = cfg.steps;
    meta["theta0"] = cfg.theta0;
    meta["cutoff_mode"] = cfg.cutoff;
    meta["tol"] = cfg.expansion().tol_norm;
    emit_table(cfg, "sweep", meta, t, out);
    return exit_ok;
}

// ---------------------------------------------------------------- figures

inline const std::vector<std::string>& figure_presets() {
    static const std::vector<std::string> names = {"fig1a", "fig1b", "fig2a", "fig2b", "fig3a",
                                                   "fig3b", "fig3c", "fig3d", "fig4a", "fig4b"};
    return names;
}

inline constexpr double fig3_r_values[] = {0.0, 0.25, 0.5, 0.75, 1.0};
inline constexpr double fig4_alpha_max = 5.0;
inline constexpr int fig4_steps = 101;

inline std::string label(double v) {
    std::string s = shortest(v);
    if (!s.empty() && s[0] == '-') {
        s[0] = 'm';
    }
    return s;
}

struct Curve {
    std::string name;
    StateParams params;
};

inline Table phase_curves(const std::vector<Curve>& curves, const RunConfig& cfg, Json& meta) {
    std::vector<FockExpansion> expansions;
    int points = 1024;
    for (const auto& c : curves) {
        expansions.push_back(expand(c.params, cfg.expansion()));
        points = std::max(points, min_phase_points(expansions.back().cutoff()));
    }
    const PhaseWindow w{-pi, points};
    Table t{{"theta"}, {}, false};
    std::vector<PhaseDistribution> dists;
    for (std::size_t c = 0; c < curves.size(); ++c) {
        t.columns.push_back(curves[c].name);
        dists.push_back(phase_distribution(expansions[c], w));
    }
    for (int k = 0; k < w.points; ++k) {
        std::vector<double> row{w.theta(k)};
        for (const auto& d : dists) {
            row.push_back(d.values[k]);
        }
        t.rows.push_back(std::move(row));
    }
    meta["theta0"] = w.theta0;
    meta["points"] = w.points;
    return t;
}

inline Table alpha_curves(const std::vector<Curve>& curves,
                          const std::vector<std::string>& stat_columns, RunConfig cfg,
                          Json& meta, std::ostream& err) {
    cfg.theta0 = -pi;
    cfg.points.reset();
    Table t{{"alpha"}, {}, false};
    for (const auto& c : curves) {
        for (const auto& s : stat_columns) {
            t.columns.push_back(s + "_" + c.name);
        }
    }
    for (int k = 0; k < fig4_steps; ++k) {
        const double a = fig4_alpha_max * k / (fig4_steps - 1);
        std::vector<double> row{a};
        for (const auto& c : curves) {
            StateParams p = c.params;
            p.alpha = a;
            try {
                const auto stats = compute_stats(p, cfg);
                for (const auto& s : stat_columns) {
                    row.push_back(stats.at(s));
                }
            } catch (const SingularState& e) {
                err << "warning: " << c.name << " alpha = " << shortest(a) << ": " << e.what()
                    << '\n';
                row.insert(row.end(), stat_columns.size(), nan);
            }
        }
        t.rows.push_back(std::move(row));
    }
    meta["theta0"] = -pi;
    meta["alpha_from"] = 0.0;
    meta["alpha_to"] = fig4_alpha_max;
    meta["steps"] = fig4_steps;
    return t;
}

inline int cmd_figure(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const std::string& f = cfg.preset;
    Json meta = base_metadata(cfg);
    meta["preset"] = f;
    meta["tol"] = cfg.expansion().tol_norm;
    Table t;
    auto state = [](int n, double alpha, double r, double eps) {
        return StateParams::with_real_eps(n, alpha, r, eps);
    };
    if (f == "fig1a" || f == "fig1b") {
        const StateParams p = state(1, 1.0, 0.0, f == "fig1a" ? 1.0 : -1.0);
        const GridSpec spec = default_grid_spec(p);
        meta["curves"] = "n=1 alpha=1 r=0 eps=" + label(p.real_eps());
        add_grid_metadata(meta, spec);
        t = wigner_table(wigner_grid(p, spec));
    } else if (f == "fig2a") {
        meta["curves"] = "alpha=2 eps=1 r=0; n in {1, 2}";
        t = phase_curves({{"p_n1", state(1, 2.0, 0.0, 1.0)}, {"p_n2", state(2, 2.0, 0.0, 1.0)}},
                         cfg, meta);
    } else if (f == "fig2b") {
        meta["curves"] = "alpha=1 n=1 r=0; eps in {0, 1, -1}";
        t = phase_curves({{"p_eps0", state(1, 1.0, 0.0, 0.0)},
                          {"p_eps1", state(1, 1.0, 0.0, 1.0)},
                          {"p_epsm1", state(1, 1.0, 0.0, -1.0)}},
                         cfg, meta);
    } else if (f.starts_with("fig3")) {
        static const std::map<std::string, std::tuple<double, double, int>> sets = {
            {"fig3a", {0.0, 1.0, 2}}, {"fig3b", {1.0, 1.0, 2}},
            {"fig3c", {-1.0, 1.0, 2}}, {"fig3d", {1.0, 2.0, 2}}};
        const auto [eps, alpha, n] = sets.at(f);
        std::vector<Curve> curves;
        for (double r : fig3_r_values) {
            curves.push_back({"p_r" + label(r), state(n, alpha, r, eps)});
        }
        meta["curves"] = "eps=" + label(eps) + " alpha=" + label(alpha) + " n=" +
                         std::to_string(n) + "; r in {0, 0.25, 0.5, 0.75, 1}";
        t = phase_curves(curves, cfg, meta);
    } else if (f == "fig4a") {
        meta["curves"] = "variance vs alpha, r=0; (eps, n) in {(0,3), (1,1), (1,3), (-1,3)}";
        t = alpha_curves({{"eps0_n3", state(3, 0.0, 0.0, 0.0)},
                          {"eps1_n1", state(1, 0.0, 0.0, 1.0)},
                          {"eps1_n3", state(3, 0.0, 0.0, 1.0)},
                          {"epsm1_n3", state(3, 0.0, 0.0, -1.0)}},
                         {"variance_integral"}, cfg, meta, err);
    } else if (f == "fig4b") {
        meta["curves"] = "S_N and S_theta vs alpha; (eps, n, r) in {(0,1,0), (0,2,0), (1,1,0), "
                         "(1,2,0), (1,2,0.5)}";
        t = alpha_curves({{"eps0_n1_r0", state(1, 0.0, 0.0, 0.0)},
                          {"eps0_n2_r0", state(2, 0.0, 0.0, 0.0)},
                          {"eps1_n1_r0", state(1, 0.0, 0.0, 1.0)},
                          {"eps1_n2_r0", state(2, 0.0, 0.0, 1.0)},
                          {"eps1_n2_r0.5", state(2, 0.0, 0.5, 1.0)}},
                         {"s_number", "s_phase"}, cfg, meta, err);
    }
    emit_table(cfg, f, meta, t, out);
    return exit_ok;
}

// ---------------------------------------------------------------- verify

struct Check {
    std::string name;
    StateParams params;
    double measured;
    double threshold;
    bool passed;
};

inline std::vector<StateParams> verify_lattice(const std::string& size) {
    const std::vector<int> ns = size == "quick" ? std::vector<int>{0, 1} : std::vector<int>{0, 1, 2, 3};
    const std::vector<double> alphas =
        size == "quick" ? std::vector<double>{0.0, 1.0} : std::vector<double>{0.0, 0.5, 1.0, 2.0};
    const std::vector<double> rs =
        size == "quick" ? std::vector<double>{0.0, 0.5} : std::vector<double>{0.0, 0.25, 0.5, 1.0};
    std::vector<StateParams> out;
    for (int n : ns) {
        for (double a : alphas) {
            for (double r : rs) {
                for (double eps : {0.0, 1.0, -1.0}) {
                    out.push_back(StateParams::with_real_eps(n, a, r, eps));
                }
            }
        }
    }
    return out;
}

inline void check_point(const StateParams& p, double tol, double norm_tol,
                        std::vector<Check>& checks) {
    auto add = [&](const std::string& name, double measured, double threshold) {
        checks.push_back({name, p, measured, threshold, measured < threshold});
    };
    try {
        normalization_constant(p);
    } catch (const SingularState&) {
        bool expand_raises = false;
        try {
            expand(p);
        } catch (const SingularState&) {
            expand_raises = true;
        }
        checks.push_back({"singular_state", p, expand_raises ? 0.0 : 1.0, 0.5, expand_raises});
        return;
    }

    const auto report = oracle::verify_expansion(p, 20, tol);
    add("oracle_equivalence", report.closed_error || report.oracle_error ? nan : report.max_delta,
        10.0 * tol);

    const FockExpansion e = expand(p);
    add("coefficient_norm", std::fabs(e.norm() - 1.0), norm_tol);

    if (p.eps_mod == 1.0) {
        double worst = 0.0;
        const int forbidden = p.real_eps() > 0 ? 1 : 0;
        for (int m = 0; m <= e.cutoff(); ++m) {
            if ((m + p.n) % 2 == forbidden && (e[m].real() != 0.0 || std::signbit(e[m].real()))) {
                worst = std::max(worst, std::fabs(e[m].real()) + 1e-300);
            }
        }
        checks.push_back({"parity_selection", p, worst, 0.0, worst == 0.0});
    }

    const PhaseWindow w = window_for(e);
    const PhaseStatistics st = phase_statistics(e, w);
    add("phase_normalization", std::fabs(phase_distribution(e, w).integral() - 1.0), 1e-8);
    add("variance_cross_method", std::fabs(phase_variance_closed(e) - st.phase_variance), 1e-6);
    add("uncertainty_relation",
        std::max(0.0, 0.25 * st.commutator_mag * st.commutator_mag -
                          st.phase_variance * st.n_variance),
        1e-9);

    const Wavefunction psi(p);
    const double half = oracle::integration_half_width(p, 0);
    add("wavefunction_norm",
        std::fabs(oracle::adaptive_simpson([&](double q) { return std::norm(psi(q)); }, -half,
                                           half, 1e-11) -
                  1.0),
        1e-8);

    const WignerGrid g = wigner_grid(p, default_grid_spec(p));
    add("wigner_normalization", std::fabs(g.integral() - 1.0), 1e-6);
    double worst = 0.0;
    for (const auto& pt : x_marginal(g)) {
        worst = std::max(worst, std::fabs(pt.density - std::norm(psi(pt.q))));
    }
    add("wigner_marginal", worst, 1e-6);
}

inline int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    if (cfg.lattice != "quick" && cfg.lattice != "standard") {
        throw UsageError("--lattice must be quick or standard");
    }
    const double tol = cfg.tol.value_or(1e-9);
    if (!(tol >= 1e-12 && tol <= 1e-6)) {
        throw UsageError("verify --tol must lie in [1e-12, 1e-6]");
    }
    std::vector<Check> checks;
    for (const auto& p : verify_lattice(cfg.lattice)) {
        check_point(p, tol, cfg.norm_tol, checks);
    }

    Json meta = base_metadata(cfg);
    meta["lattice"] = cfg.lattice;
    meta["tol"] = tol;
    meta["norm_tol"] = cfg.norm_tol;
    int failed = 0;
    for (const auto& c : checks) {
        failed += c.passed ? 0 : 1;
    }
    meta["checks"] = static_cast<int>(checks.size());
    meta["failed"] = failed;

    emit(cfg, "verify", out, [&](std::ostream& os) {
        if (cfg.format == "json") {
            Json doc;
            doc["metadata"] = meta;
            doc["checks"] = Json::array();
            for (const auto& c : checks) {
                doc["checks"].push_back({{"check", c.name},
                                         {"n", c.params.n},
                                         {"alpha", c.params.alpha},
                                         {"r", c.params.r},
                                         {"eps", c.params.real_eps()},
                                         {"measured", json_number(c.measured)},
                                         {"threshold", c.threshold},
                                         {"status", c.passed ? "pass" : "fail"}});
            }
            os << doc.dump(2) << '\n';
            return;
        }
        write_csv(os, meta, Table{{}, {}, false});
        os << "check,n,alpha,r,eps,measured,threshold,status\n";
        for (const auto& c : checks) {
            os << c.name << ',' << c.params.n << ',' << shortest(c.params.alpha) << ','
               << shortest(c.params.r) << ',' << shortest(c.params.real_eps()) << ','
               << shortest(c.measured) << ',' << shortest(c.threshold) << ','
               << (c.passed ? "pass" : "fail") << '\n';
        }
    });

    for (const auto& c : checks) {
        if (!c.passed) {
            err << "FAILED " << c.name << " at n=" << c.params.n << " alpha=" << c.params.alpha
                << " r=" << c.params.r << " eps=" << c.params.real_eps()
                << ": measured " << shortest(c.measured) << ", threshold "
                << shortest(c.threshold) << '\n';
        }
    }
    err << "verify: " << checks.size() - failed << "/" << checks.size() << " checks passed\n";
    return failed == 0 ? exit_ok : exit_verify_failed;
}

// ---------------------------------------------------------------- entry point

/// Runs one invocation. `args` excludes the program name.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    CLI::App app{"Phase properties and Wigner functions of superpositions of squeezed and "
                 "displaced number states",
                 "pbphase"};
    app.set_version_flag("--version", std::string(version));
    app.set_config("--config", "", "TOML-style key = value file; flags override it");
    app.require_subcommand(1);
    app.fallthrough();

    app.add_option("--n", cfg.n, "Fock index of the seed state")->check(CLI::NonNegativeNumber);
    app.add_option("--alpha", cfg.alpha, "real displacement");
    app.add_option("--r", cfg.r, "squeeze parameter (>= 0)")->check(CLI::NonNegativeNumber);
    app.add_option("--eps", cfg.eps, "real superposition weight eps");
    app.add_option("--eps-phase", cfg.eps_phase, "extra phase of eps (wigner only)");
    app.add_option("--theta0", cfg.theta0, "phase window start (default -pi)");
    app.add_option("--points", cfg.points, "phase grid points (default max(1024, 8 (M + 1)))");
    app.add_option("--xrange", cfg.xrange, "Wigner x range lo,hi")->delimiter(',')->expected(2);
    app.add_option("--yrange", cfg.yrange, "Wigner y range lo,hi")->delimiter(',')->expected(2);
    app.add_option("--nx", cfg.nx, "Wigner x nodes");
    app.add_option("--ny", cfg.ny, "Wigner y nodes");
    app.add_option("--cutoff", cfg.cutoff, "Fock cutoff: auto or an integer")
        ->check([](const std::string& s) -> std::string {
            if (s == "auto") {
                return {};
            }
            int v = 0;
            const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
            if (res.ec != std::errc{} || res.ptr != s.data() + s.size() || v < 0) {
                return "must be 'auto' or a non-negative integer";
            }
            return {};
        });
    app.add_option("--tol", cfg.tol,
                   "expansion norm tolerance (default 1e-10); oracle tolerance for verify "
                   "(default 1e-9)");
    app.add_option("--format", cfg.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--out", cfg.out, "output file (default: $PBPHASE_OUT_DIR/<name> or stdout)");

    app.add_subcommand("coeffs", "Fock coefficients C_m: m, re_c, im_c, prob");
    app.add_subcommand("phase-dist", "phase distribution P(theta) on the phase window");
    app.add_subcommand("stats", "phase and number statistics (JSON by default)");
    app.add_subcommand("wigner", "Wigner function on a grid, long form x, y, w");

    auto* sweep = app.add_subcommand("sweep", "statistics along alpha or r");
    sweep->add_option("--param", cfg.sweep_param, "alpha or r")
        ->check(CLI::IsMember({"alpha", "r"}));
    sweep->add_option("--from", cfg.from, "first value");
    sweep->add_option("--to", cfg.to, "last value");
    sweep->add_option("--steps", cfg.steps, "number of values (>= 2)");
    sweep->add_option("--stats", cfg.stats, "comma-separated statistics")->delimiter(',');

    auto* figure = app.add_subcommand(
        "figure",
        "data behind a figure preset. fig1a/b: Wigner grid, n=1, alpha=1, eps=+1/-1. "
        "fig2a: P(theta), alpha=2, eps=1, n=1,2. fig2b: alpha=1, n=1, eps=0,1,-1. "
        "fig3a-d: P(theta) for (eps, alpha, n) = (0,1,2), (1,1,2), (-1,1,2), (1,2,2) at "
        "r = 0, 0.25, 0.5, 0.75, 1 (preset constants). fig4a: phase variance vs alpha in "
        "[0, 5] (101 values). fig4b: S_N and S_theta vs alpha in [0, 5], theta0 = -pi");
    figure->add_option("preset", cfg.preset, "preset name")
        ->required()
        ->check(CLI::IsMember(figure_presets()));

    auto* verify = app.add_subcommand("verify", "oracle and invariant suite over the lattice");
    verify->add_option("--lattice", cfg.lattice, "quick or standard (default)")
        ->check(CLI::IsMember({"quick", "standard"}));
    verify->add_option("--norm-tol", cfg.norm_tol, "coefficient norm tolerance (default 1e-9)");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            app.exit(e, out, err);
            return exit_ok;
        }
        err << "usage error: " << e.what() << '\n';
        return exit_usage;
    }

    cfg.command = app.get_subcommands().front()->get_name();
    if (cfg.format.empty()) {
        cfg.format = cfg.command == "stats" ? "json" : "csv";
    }

    try {
        if (cfg.command == "coeffs") {
            return cmd_coeffs(cfg, out);
        }
        if (cfg.command == "phase-dist") {
            return cmd_phase_dist(cfg, out);
        }
        if (cfg.command == "stats") {
            return cmd_stats(cfg, out);
        }
        if (cfg.command == "wigner") {
            return cmd_wigner(cfg, out);
        }
        if (cfg.command == "sweep") {
            return cmd_sweep(cfg, out, err);
        }
        if (cfg.command == "figure") {
            return cmd_figure(cfg, out, err);
        }
        return cmd_verify(cfg, out, err);
    } catch (const Error& e) {
        err << to_string(e.kind()) << ": " << e.what() << '\n';
        return exit_domain_error;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::invalid_argument& e) {
        err << "usage error: " << e.what() << '\n';
        return exit_usage;
    }
}

} // namespace pbphase::cli
