#pragma once

// Command implementations behind the hamsplit binary. Each cmd_* reads one
// input document, delegates to a single library operation, prints the JSON
// report to `out` and writes requested artifacts into the output directory.
// Exit codes: 0 success, 2 honest negative, 1 usage or input error.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hamsplit/io.hpp"
#include "hamsplit/partitions.hpp"
#include "hamsplit/scenarios.hpp"
#include "hamsplit/separability.hpp"
#include "hamsplit/solver.hpp"
#include "hamsplit/svg.hpp"

namespace hamsplit::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 1;
inline constexpr int kExitNegative = 2;

/// Every field is optional so that flags can be layered over a config file.
struct RunConfig {
    std::optional<std::vector<double>> alphas;
    std::optional<double> mass_tol;
    std::optional<std::size_t> grid;
    std::optional<std::size_t> starts;
    std::optional<std::uint64_t> seed;
    std::optional<std::vector<std::string>> methods;
    std::optional<std::string> out_dir;
    std::optional<std::vector<std::string>> emit;
    std::optional<bool> certify;
    std::optional<std::ptrdiff_t> dim;

    /// Fields set here win over those in `base`.
    RunConfig over(const RunConfig& base) const {
        RunConfig r = base;
        if (alphas) r.alphas = alphas;
        if (mass_tol) r.mass_tol = mass_tol;
        if (grid) r.grid = grid;
        if (starts) r.starts = starts;
        if (seed) r.seed = seed;
        if (methods) r.methods = methods;
        if (out_dir) r.out_dir = out_dir;
        if (emit) r.emit = emit;
        if (certify) r.certify = certify;
        if (dim) r.dim = dim;
        return r;
    }

    void validate() const {
        if (mass_tol && !(*mass_tol > 0.0 && std::isfinite(*mass_tol))) throw InputError("--tol must be positive");
        if (grid && *grid < 1) throw InputError("--grid must be at least 1");
        if (starts && *starts < 1) throw InputError("--starts must be at least 1");
        if (dim && *dim < 1) throw InputError("--dim must be at least 1");
        if (alphas) {
            for (double a : *alphas) {
                if (!(a >= 0.0 && a <= 1.0)) throw InputError("--alpha values must lie in [0, 1]");
            }
        }
        if (emit) {
            for (const auto& e : *emit) {
                if (e != "json" && e != "csv" && e != "svg") throw InputError("--emit accepts json, csv, svg (got '" + e + "')");
            }
        }
        if (methods) {
            for (const auto& m : *methods) {
                if (m != "newton" && m != "grid" && m != "miranda") throw InputError("unknown method '" + m + "'");
            }
        }
    }

    bool emits(const std::string& what) const {
        if (!emit) return what == "json";
        return std::find(emit->begin(), emit->end(), what) != emit->end();
    }

    SolverConfig solver() const {
        SolverConfig c;
        if (mass_tol) c.mass_tol = *mass_tol;
        if (grid) c.resolution = std::max<std::size_t>(*grid, 8);
        if (starts) c.starts = *starts;
        if (seed) c.seed = *seed;
        if (certify) c.certify = *certify;
        if (methods) {
            c.methods.clear();
            for (const auto& m : *methods) c.methods.push_back(method_from_string(m));
        }
        return c;
    }
};

/// Reads {"schema": 1, "kind": "config", ...}; unknown keys are rejected.
inline RunConfig config_from_json(const Json& j, const std::string& path = "config") {
    io::check_schema(j, path);
    static const std::set<std::string> known{"schema", "kind", "alpha", "tol", "grid", "starts", "seed",
                                             "methods", "out", "emit", "certify", "dim"};
    for (const auto& [key, value] : j.items()) {
        if (!known.count(key)) throw InputError(path + "." + key + ": unknown key");
    }
    auto count = [&](const char* key) -> std::size_t {
        const auto v = io::integer(j[key], path + "." + key);
        if (v < 1) throw InputError(path + "." + key + ": must be at least 1");
        return static_cast<std::size_t>(v);
    };
    auto strings = [&](const char* key) {
        const Json& a = j[key];
        if (!a.is_array()) throw InputError(path + "." + key + ": expected an array of strings");
        std::vector<std::string> out;
        for (const auto& s : a) {
            if (!s.is_string()) throw InputError(path + "." + key + ": expected an array of strings");
            out.push_back(s.get<std::string>());
        }
        return out;
    };
    RunConfig c;
    if (j.contains("alpha")) c.alphas = j["alpha"].is_array() ? io::numbers(j["alpha"], path + ".alpha")
                                                               : std::vector<double>{io::number(j["alpha"], path + ".alpha")};
    if (j.contains("tol")) c.mass_tol = io::number(j["tol"], path + ".tol");
    if (j.contains("grid")) c.grid = count("grid");
    if (j.contains("starts")) c.starts = count("starts");
    if (j.contains("seed")) c.seed = static_cast<std::uint64_t>(io::integer(j["seed"], path + ".seed"));
    if (j.contains("methods")) c.methods = strings("methods");
    if (j.contains("emit")) c.emit = strings("emit");
    if (j.contains("dim")) c.dim = static_cast<std::ptrdiff_t>(count("dim"));
    if (j.contains("out")) {
        if (!j["out"].is_string()) throw InputError(path + ".out: expected a string");
        c.out_dir = j["out"].get<std::string>();
    }
    if (j.contains("certify")) {
        if (!j["certify"].is_boolean()) throw InputError(path + ".certify: expected a boolean");
        c.certify = j["certify"].get<bool>();
    }
    return c;
}

namespace detail {

/// Writes the report and the requested artifacts; JSON always goes to `out`.
struct Emitter {
    const RunConfig& config;
    std::ostream& out;
    std::string stem;

    std::filesystem::path dir() const { return config.out_dir ? std::filesystem::path(*config.out_dir) : "."; }

    void write(const std::string& suffix, const std::string& text) const {
        std::filesystem::create_directories(dir());
        const auto path = dir() / (stem + suffix);
        std::ofstream f(path);
        if (!f) throw InputError(path.string() + ": cannot write");
        f << text;
    }

    void json(const Json& j) const {
        out << j.dump(2) << "\n";
        if (config.out_dir && config.emits("json")) write(".json", j.dump(2) + "\n");
    }

    void csv(const std::string& suffix, const std::string& text) const {
        if (config.emits("csv")) write(suffix + ".csv", text);
    }

    void svg(const std::string& suffix, const std::function<std::string()>& make) const {
        if (config.emits("svg")) write(suffix + ".svg", make());
    }
};

inline std::vector<double> alphas_or(const RunConfig& c, std::vector<double> fallback) {
    return c.alphas ? *c.alphas : std::move(fallback);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Commands

inline int cmd_split(const std::string& problem_file, const RunConfig& config, std::ostream& out) {
    Problem p = io::problem_from_json(io::read_file(problem_file));
    if (config.alphas) p.alphas = *config.alphas;
    p.validate();
    const SolverConfig sc = config.solver();
    const SplitOutcome o = find_split(p, sc);
    std::optional<VerifyReport> verify;
    if (o.found()) verify = verify_split(p, o.split->hyperplane, o.mass_tol);

    const detail::Emitter em{config, out, "split"};
    em.json(io::to_json(o, p.alphas, verify ? &*verify : nullptr));
    em.csv("_scan", csv_scan(o.scan));
    if (p.dim() == 2) {
        em.svg("", [&] {
            std::optional<Hyperplane> h;
            if (o.found()) h = o.split->hyperplane;
            std::vector<CurveSample> curves;
            for (std::size_t i = 0; i < p.measures.size(); ++i) {
                if (p.alphas[i] > 0.0 && p.alphas[i] < 1.0) {
                    curves.push_back(sample_central_sphere(p.measures[i], support_hull(p.measures[i]), p.alphas[i], 360));
                }
            }
            return svg_split(p, h, o.found() ? "splitting line and central spheres" : "no splitting line found", curves);
        });
    }
    if (!o.found() || !verify->pass) return kExitNegative;
    if (sc.certify && !(o.split->certificate && o.split->certificate->verdict == Verdict::certified)) return kExitNegative;
    return kExitOk;
}

/// Accepts {"sets": [[point, ...], ...]} or a problem, whose measures are
/// replaced by points covering their supports.
inline int cmd_separability(const std::string& file, const RunConfig& config, std::ostream& out) {
    const Json j = io::read_file(file);
    io::check_schema(j, "input");
    std::vector<PointSet> sets;
    if (j.contains("sets")) {
        const Json& s = j["sets"];
        if (!s.is_array() || s.empty()) throw InputError("input.sets: expected a nonempty array");
        for (std::size_t i = 0; i < s.size(); ++i) sets.push_back(io::points(s[i], "input.sets[" + std::to_string(i) + "]"));
    } else if (j.contains("measures")) {
        const Problem p = io::problem_from_json(j, "input");
        sets = support_point_sets(p.measures);
    } else {
        throw InputError("input: expected \"sets\" or \"measures\"");
    }
    const SeparabilityReport r = check_separable(sets);
    detail::Emitter{config, out, "separability"}.json(io::to_json(r));
    return r.separable ? kExitOk : kExitNegative;
}

/// Input: {"measure": ..., "container": ... (optional), "alpha": ... (optional)}.
inline int cmd_central_sphere(const std::string& file, const RunConfig& config, std::ostream& out) {
    const Json j = io::read_file(file);
    io::check_schema(j, "input");
    const Measure m = io::measure_from_json(io::field(j, "measure", "input"), "input.measure");
    if (m.dim() != 2) throw UnsupportedError("central-sphere: only planar measures are supported");
    const ConvexSet container =
        j.contains("container") ? io::convex_set_from_json(j["container"], "input.container") : support_hull(m);
    double alpha = j.contains("alpha") ? io::number(j["alpha"], "input.alpha") : 0.5;
    if (config.alphas) {
        if (config.alphas->size() != 1) throw InputError("--alpha: central-sphere takes a single ratio");
        alpha = config.alphas->front();
    }
    if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("alpha must lie in (0, 1)");
    const std::size_t grid = std::max<std::size_t>(config.grid.value_or(scenario_constants::kCurveGrid), 16);

    const CurveSample curve = sample_central_sphere(m, container, alpha, grid);
    const int turning = turning_number(curve);
    const int refined = turning_number(sample_central_sphere(m, container, alpha, 2 * grid));
    const Vec centroid = container.centroid();
    double offset = 0.0;
    std::size_t fallbacks = 0;
    for (std::size_t i = 0; i < curve.points.size(); ++i) {
        offset = std::max(offset, (curve.points[i] - centroid).norm());
        fallbacks += curve.fallback[i] ? 1 : 0;
    }
    Json doc = io::document("central_sphere");
    doc["alpha"] = alpha;
    doc["grid"] = grid;
    doc["turning_number"] = turning;
    doc["turning_number_refined"] = refined;
    doc["whitney_index"] = std::abs(turning);
    doc["stable"] = turning == refined;
    doc["container_centroid"] = io::to_json(centroid);
    doc["max_centroid_offset"] = offset;
    doc["fallback_count"] = fallbacks;
    doc["curve"] = io::to_json(curve);

    const detail::Emitter em{config, out, "central_sphere"};
    em.json(doc);
    em.csv("", csv_curve(curve));
    em.svg("", [&] { return svg_curve(m, container, curve, "central sphere, turning number " + std::to_string(turning)); });
    return turning == refined ? kExitOk : kExitNegative;
}

/// Input: {"measure": ..., "alphas": [a1, a2, a3, a4], "normal": [x, y] (optional)}.
inline int cmd_two_lines(const std::string& file, const RunConfig& config, std::ostream& out) {
    const Json j = io::read_file(file);
    io::check_schema(j, "input");
    const Measure m = io::measure_from_json(io::field(j, "measure", "input"), "input.measure");
    std::vector<double> a = j.contains("alphas") ? io::numbers(j["alphas"], "input.alphas") : std::vector<double>{};
    a = detail::alphas_or(config, a);
    if (a.size() != 4) throw InputError("two-lines: exactly four ratios are required");
    Vec v(2);
    v << 0.0, 1.0;
    if (j.contains("normal")) {
        v = io::vec(j["normal"], "input.normal");
        if (v.size() != 2 || v.norm() == 0.0) throw InputError("input.normal: expected a nonzero planar vector");
        v.normalize();
    }
    const TwoLineOutcome o = two_line_partition(m, {a[0], a[1], a[2], a[3]}, v, config.solver());
    const detail::Emitter em{config, out, "two_lines"};
    em.json(io::to_json(o));
    em.csv("_scan", csv_scan(o.split.scan));
    if (o.partition) em.svg("", [&] { return svg_two_lines(m, *o.partition, "two-line partition"); });
    const double tol = o.split.mass_tol;
    return o.partition && o.partition->residual_norm <= tol ? kExitOk : kExitNegative;
}

/// Certifies the file's "hyperplane" if present, otherwise solves first.
inline int cmd_certify(const std::string& problem_file, const RunConfig& config, std::ostream& out) {
    const Json j = io::read_file(problem_file);
    Problem p = io::problem_from_json(j);
    if (config.alphas) p.alphas = *config.alphas;
    p.validate();
    SolverConfig sc = config.solver();
    sc.certify = false;
    std::optional<Hyperplane> h;
    std::optional<SplitOutcome> solved;
    if (j.contains("hyperplane")) {
        h = io::hyperplane_from_json(j["hyperplane"], "problem.hyperplane");
    } else {
        solved = find_split(p, sc);
        if (solved->found()) h = solved->split->hyperplane;
    }
    Json doc = io::document("certificate");
    std::optional<MirandaCertificate> cert;
    if (h) cert = certify_split(p, *h, sc.certify_grid);
    doc["hyperplane"] = h ? io::to_json(*h) : Json(nullptr);
    doc["certified"] = cert && cert->verdict == Verdict::certified;
    doc["certificate"] = cert ? io::to_json(*cert) : Json(nullptr);
    if (solved) doc["scan"] = io::to_json(solved->scan);
    detail::Emitter{config, out, "certificate"}.json(doc);
    return doc["certified"].get<bool>() ? kExitOk : kExitNegative;
}

inline int cmd_scenario(const std::string& name, const RunConfig& config, std::ostream& out) {
    const auto& names = scenario_names();
    if (std::find(names.begin(), names.end(), name) == names.end()) {
        std::string all;
        for (const auto& n : names) all += (all.empty() ? "" : ", ") + n;
        throw InputError("unknown scenario '" + name + "' (known: " + all + ")");
    }
    const Scenario s = build_scenario(name, config.alphas.value_or(std::vector<double>{}), config.seed.value_or(7),
                                      config.dim.value_or(3));
    ScenarioConfig sc;
    sc.solver = config.solver();
    sc.solver.seed = 0;  // the seed selects the random instance, not the lattice rotation
    if (config.grid) {
        sc.scan_resolution = *config.grid;
        sc.curve_grid = std::max<std::size_t>(*config.grid, 16);
        sc.solver.resolution = 0;
    }
    const ScenarioReport r = run_scenario(s, sc);
    Json doc = io::to_json(r);
    doc["scenario"] = io::to_json(s);

    const detail::Emitter em{config, out, name};
    em.json(doc);
    if (r.scan) em.csv("_scan", csv_scan(*r.scan));
    if (r.curve) {
        em.csv("_curve", csv_curve(*r.curve));
        em.svg("_curve", [&] {
            return svg_curve(*s.probe_measure, *s.probe_container, *r.curve,
                             name + ": turning number " + std::to_string(r.turning.value_or(0)));
        });
    }
    if (s.problem && s.dim == 2) {
        em.svg("", [&] {
            std::optional<Hyperplane> h;
            if (r.outcome && r.outcome->found()) h = r.outcome->split->hyperplane;
            return svg_split(*s.problem, h, name + ": " + r.observed);
        });
    }
    if (!r.probes.empty()) {
        em.svg("_probes", [&] {
            CurveSample c = sample_central_sphere(*s.probe_measure, *s.probe_container, s.alphas.front(), sc.curve_grid);
            SvgCanvas canvas = SvgCanvas::around({bounding_ball(*s.probe_measure)});
            draw_support(canvas, *s.probe_measure, svg_palette()[0]);
            canvas.polyline(c.points, svg_palette()[1], true, 1.0);
            for (const auto& p : r.probes) {
                canvas.dot(p.left, "#2ca02c", 4.0);
                canvas.dot(p.right, "#9467bd", 4.0);
            }
            canvas.caption(name + ": central points either side of the vertical");
            return canvas.str();
        });
    }
    return r.pass ? kExitOk : kExitNegative;
}

// ---------------------------------------------------------------------------
// Argument parsing

inline int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const InputError*>(&e) || dynamic_cast<const DimensionError*>(&e) ||
        dynamic_cast<const DomainError*>(&e) || dynamic_cast<const UnsupportedError*>(&e)) {
        return kExitInput;
    }
    if (dynamic_cast<const Error*>(&e)) return kExitNegative;
    return kExitInput;
}

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"hamsplit: uneven hyperplane splittings of probability measures"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Expand help for every subcommand");

    RunConfig flags;
    std::string config_file;
    std::string input;
    std::vector<double> alphas;
    double tol = 0.0;
    std::size_t grid = 0, starts = 0;
    std::uint64_t seed = 0;
    std::string out_dir;
    std::vector<std::string> emit, methods;
    bool certify = false;
    std::ptrdiff_t dim = 0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--alpha", alphas, "Target ratios a1,...,an")->delimiter(',');
        sub->add_option("--tol", tol, "Mass tolerance (default 1e-6 analytic, 1e-3 quadrature)");
        sub->add_option("--grid", grid, "Scan resolution on the sphere, or curve samples for central spheres");
        sub->add_option("--starts", starts, "Multistart count");
        sub->add_option("--seed", seed, "Seed for lattice rotation or random scenarios");
        sub->add_option("--methods", methods, "Method order: newton,grid,miranda")->delimiter(',');
        sub->add_option("--out", out_dir, "Directory for emitted artifacts");
        sub->add_option("--emit", emit, "Artifacts to write: json,csv,svg")->delimiter(',');
        sub->add_flag("--certify", certify, "Run the Miranda certification pass");
        sub->add_option("--config", config_file, "JSON config file; flags win over it");
    };

    struct Command {
        const char* name;
        const char* help;
        const char* input_help;
        int (*run)(const std::string&, const RunConfig&, std::ostream&);
    };
    const Command commands[] = {
        {"split", "Find a hyperplane with mu_i(H+) = alpha_i; exit 2 when none is found", "Problem JSON", cmd_split},
        {"separability", "Check that point sets or measure supports are separated; exit 2 if not", "Sets or problem JSON",
         cmd_separability},
        {"central-sphere", "Sample the central sphere of a planar measure and its turning number", "Measure JSON",
         cmd_central_sphere},
        {"two-lines", "Cut a planar measure into four parts of prescribed masses", "Measure JSON", cmd_two_lines},
        {"certify", "Miranda certificate for a splitting (given or solved); exit 2 if uncertified", "Problem JSON",
         cmd_certify},
        {"scenario", "Run a built-in scenario: concentric_discs, collinear_balls, pentagon, three_caps, random_separated",
         "Scenario name", cmd_scenario},
    };
    std::vector<CLI::App*> subs;
    for (const auto& c : commands) {
        CLI::App* sub = app.add_subcommand(c.name, c.help);
        sub->add_option("input", input, c.input_help)->required();
        add_common(sub);
        if (std::string(c.name) == "scenario") sub->add_option("--dim", dim, "Dimension for random_separated");
        subs.push_back(sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "hamsplit: " << e.what() << "\n";
        for (CLI::App* sub : subs) {
            if (sub->parsed()) {
                err << sub->help();
                return kExitInput;
            }
        }
        err << app.help();
        return kExitInput;
    }

    try {
        for (CLI::App* sub : subs) {
            if (!sub->parsed()) continue;
            if (sub->count("--alpha")) flags.alphas = alphas;
            if (sub->count("--tol")) flags.mass_tol = tol;
            if (sub->count("--grid")) flags.grid = grid;
            if (sub->count("--starts")) flags.starts = starts;
            if (sub->count("--seed")) flags.seed = seed;
            if (sub->count("--methods")) flags.methods = methods;
            if (sub->count("--out")) flags.out_dir = out_dir;
            if (sub->count("--emit")) flags.emit = emit;
            if (sub->count("--certify")) flags.certify = certify;
            if (sub->get_option_no_throw("--dim") && sub->count("--dim")) flags.dim = dim;
            RunConfig base;
            if (!config_file.empty()) base = config_from_json(io::read_file(config_file));
            const RunConfig config = flags.over(base);
            config.validate();
            for (const auto& c : commands) {
                if (sub->get_name() == c.name) return c.run(input, config, out);
            }
        }
    } catch (const std::exception& e) {
        err << "hamsplit: " << e.what() << "\n";
        return exit_code_for(e);
    }
    return kExitInput;
}

}  // namespace hamsplit::cli
