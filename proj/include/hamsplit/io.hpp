#pragma once

// JSON encoding of inputs and reports. Every top-level document carries
// "schema": 1 and a "kind" tag; field names match schema/hamsplit.schema.json.

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "hamsplit/auxiliary.hpp"
#include "hamsplit/convex_set.hpp"
#include "hamsplit/core.hpp"
#include "hamsplit/measures.hpp"
#include "hamsplit/miranda.hpp"
#include "hamsplit/partitions.hpp"
#include "hamsplit/scenarios.hpp"
#include "hamsplit/separability.hpp"
#include "hamsplit/solver.hpp"

namespace hamsplit {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

/// Malformed input document; the message names the offending location.
class InputError : public Error {
public:
    using Error::Error;
};

namespace io {

inline Json document(const std::string& kind) { return Json{{"schema", kSchemaVersion}, {"kind", kind}}; }

// ---------------------------------------------------------------------------
// Reading helpers

inline const Json& field(const Json& j, const std::string& key, const std::string& path) {
    if (!j.is_object()) throw InputError(path + ": expected an object");
    const auto it = j.find(key);
    if (it == j.end()) throw InputError(path + "." + key + ": missing");
    return *it;
}

inline double number(const Json& j, const std::string& path) {
    if (!j.is_number()) throw InputError(path + ": expected a number");
    const double x = j.get<double>();
    if (!std::isfinite(x)) throw InputError(path + ": non-finite number");
    return x;
}

inline double number(const Json& j, const std::string& key, const std::string& path) {
    return number(field(j, key, path), path + "." + key);
}

inline std::int64_t integer(const Json& j, const std::string& path) {
    if (!j.is_number_integer()) throw InputError(path + ": expected an integer");
    return j.get<std::int64_t>();
}

inline std::vector<double> numbers(const Json& j, const std::string& path) {
    if (!j.is_array()) throw InputError(path + ": expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

inline Vec vec(const Json& j, const std::string& path) {
    const auto xs = numbers(j, path);
    if (xs.empty()) throw InputError(path + ": empty vector");
    return Eigen::Map<const Vec>(xs.data(), static_cast<Eigen::Index>(xs.size()));
}

inline PointSet points(const Json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) throw InputError(path + ": expected a nonempty array of points");
    PointSet out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(vec(j[i], path + "[" + std::to_string(i) + "]"));
    for (std::size_t i = 1; i < out.size(); ++i) {
        if (out[i].size() != out[0].size()) throw InputError(path + "[" + std::to_string(i) + "]: dimension mismatch");
    }
    return out;
}

inline void check_schema(const Json& j, const std::string& path) {
    if (!j.is_object()) throw InputError(path + ": expected an object");
    const auto it = j.find("schema");
    if (it == j.end()) return;
    if (!it->is_number_integer() || it->get<int>() != kSchemaVersion) {
        throw InputError(path + ".schema: unsupported schema version (expected 1)");
    }
}

/// Parses text, reporting syntax errors with line and column.
inline Json parse(const std::string& text, const std::string& source) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        std::size_t line = 1, column = 1;
        const std::size_t stop = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
        for (std::size_t i = 0; i < stop; ++i) {
            if (text[i] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
        std::string what = e.what();
        const auto pos = what.find("syntax error");
        if (pos != std::string::npos) what = what.substr(pos);
        throw InputError(source + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + what);
    }
}

inline Json read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError(path + ": cannot open file");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path);
}

// ---------------------------------------------------------------------------
// Basic values

inline Json to_json(const Vec& v) {
    Json a = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

inline Json to_json(const PointSet& ps) {
    Json a = Json::array();
    for (const auto& p : ps) a.push_back(to_json(p));
    return a;
}

inline Json to_json(const Hyperplane& h) { return Json{{"normal", to_json(h.normal())}, {"offset", h.offset()}}; }

inline Hyperplane hyperplane_from_json(const Json& j, const std::string& path) {
    const Vec normal = vec(field(j, "normal", path), path + ".normal");
    const double offset = number(j, "offset", path);
    if (normal.norm() == 0.0) throw InputError(path + ".normal: zero vector");
    if (std::abs(normal.norm() - 1.0) <= kUnitTolerance) return Hyperplane(normal, offset);
    return Hyperplane::normalized(normal, offset);
}

// ---------------------------------------------------------------------------
// Measures and sets

inline Json to_json(const Measure& m) {
    return std::visit(
        [](const auto& x) -> Json {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, UniformBall>) {
                return {{"type", "uniform_ball"}, {"center", to_json(x.center)}, {"radius", x.radius}};
            } else if constexpr (std::is_same_v<T, SmoothCap>) {
                return {{"type", "smooth_cap"}, {"center", to_json(x.center)}, {"radius", x.radius}, {"exponent", x.exponent}};
            } else if constexpr (std::is_same_v<T, UniformPolytope>) {
                Json j{{"type", "uniform_polytope"}, {"vertices", to_json(x.vertices)}};
                if (x.cloud) j["quadrature_nodes"] = x.quadrature_nodes;
                return j;
            } else if constexpr (std::is_same_v<T, Mixture>) {
                Json parts = Json::array();
                for (const auto& p : x.parts) parts.push_back(to_json(p));
                return {{"type", "mixture"}, {"weights", x.weights}, {"components", parts}};
            } else if constexpr (std::is_same_v<T, KernelCloud>) {
                return {{"type", "kernel_cloud"}, {"points", to_json(x.points)}, {"bandwidth", x.bandwidth}, {"exponent", x.exponent}};
            } else {
                return {{"type", "restricted"}, {"base", to_json(*x.base)}, {"halfspace", to_json(x.halfspace)}};
            }
        },
        m.model());
}

inline Measure measure_from_json(const Json& j, const std::string& path) {
    const Json& t = field(j, "type", path);
    if (!t.is_string()) throw InputError(path + ".type: expected a string");
    const std::string type = t.get<std::string>();
    auto exponent = [&](int fallback) {
        return j.contains("exponent") ? static_cast<int>(integer(j["exponent"], path + ".exponent")) : fallback;
    };
    try {
        if (type == "uniform_ball") {
            return Measure::uniform_ball(vec(field(j, "center", path), path + ".center"), number(j, "radius", path));
        }
        if (type == "smooth_cap") {
            return Measure::smooth_cap(vec(field(j, "center", path), path + ".center"), number(j, "radius", path), exponent(2));
        }
        if (type == "uniform_polytope") {
            std::size_t nodes = kDefaultPolytopeNodes;
            if (j.contains("quadrature_nodes")) {
                const auto q = integer(j["quadrature_nodes"], path + ".quadrature_nodes");
                if (q < 1024) throw InputError(path + ".quadrature_nodes: must be at least 1024");
                nodes = static_cast<std::size_t>(q);
            }
            return Measure::uniform_polytope(points(field(j, "vertices", path), path + ".vertices"), nodes);
        }
        if (type == "mixture") {
            const Json& comps = field(j, "components", path);
            if (!comps.is_array() || comps.empty()) throw InputError(path + ".components: expected a nonempty array");
            std::vector<Measure> parts;
            for (std::size_t i = 0; i < comps.size(); ++i) {
                parts.push_back(measure_from_json(comps[i], path + ".components[" + std::to_string(i) + "]"));
            }
            std::vector<double> weights(parts.size(), 1.0);
            if (j.contains("weights")) weights = numbers(j["weights"], path + ".weights");
            return Measure::mixture(std::move(weights), std::move(parts));
        }
        if (type == "kernel_cloud") {
            return Measure::kernel_cloud(points(field(j, "points", path), path + ".points"), number(j, "bandwidth", path), exponent(2));
        }
        if (type == "restricted") {
            return Measure::restricted(measure_from_json(field(j, "base", path), path + ".base"),
                                       hyperplane_from_json(field(j, "halfspace", path), path + ".halfspace"));
        }
    } catch (const InputError&) {
        throw;
    } catch (const Error& e) {
        throw InputError(path + ": " + e.what());
    }
    throw InputError(path + ".type: unknown measure type '" + type + "'");
}

inline Json to_json(const ConvexSet& s) {
    if (s.is_ball()) return {{"type", "ball"}, {"center", to_json(s.as_ball().center)}, {"radius", s.as_ball().radius}};
    return {{"type", "polytope"}, {"vertices", to_json(s.vertices())}};
}

inline ConvexSet convex_set_from_json(const Json& j, const std::string& path) {
    const Json& t = field(j, "type", path);
    if (!t.is_string()) throw InputError(path + ".type: expected a string");
    const std::string type = t.get<std::string>();
    try {
        if (type == "ball") return ConvexSet::ball(vec(field(j, "center", path), path + ".center"), number(j, "radius", path));
        if (type == "polytope") return ConvexSet::polytope(points(field(j, "vertices", path), path + ".vertices"));
    } catch (const InputError&) {
        throw;
    } catch (const Error& e) {
        throw InputError(path + ": " + e.what());
    }
    throw InputError(path + ".type: unknown set type '" + type + "'");
}

// ---------------------------------------------------------------------------
// Problems

inline Json to_json(const Problem& p) {
    Json j = document("problem");
    Json ms = Json::array();
    for (const auto& m : p.measures) ms.push_back(to_json(m));
    j["measures"] = ms;
    j["alphas"] = p.alphas;
    if (p.separators) {
        Json ss = Json::array();
        for (const auto& s : *p.separators) ss.push_back(to_json(s));
        j["separators"] = ss;
    }
    return j;
}

/// Measures and ratios; validation of counts is left to the caller so that
/// dimension errors surface with the solver's wording.
inline Problem problem_from_json(const Json& j, const std::string& path = "problem") {
    check_schema(j, path);
    Problem p;
    const Json& ms = field(j, "measures", path);
    if (!ms.is_array() || ms.empty()) throw InputError(path + ".measures: expected a nonempty array");
    for (std::size_t i = 0; i < ms.size(); ++i) p.measures.push_back(measure_from_json(ms[i], path + ".measures[" + std::to_string(i) + "]"));
    if (j.contains("alphas")) p.alphas = numbers(j["alphas"], path + ".alphas");
    if (j.contains("separators")) {
        const Json& ss = j["separators"];
        if (!ss.is_array()) throw InputError(path + ".separators: expected an array");
        std::vector<ConvexSet> sets;
        for (std::size_t i = 0; i < ss.size(); ++i) sets.push_back(convex_set_from_json(ss[i], path + ".separators[" + std::to_string(i) + "]"));
        p.separators = std::move(sets);
    }
    return p;
}

// ---------------------------------------------------------------------------
// Reports

inline Json to_json(const MirandaCertificate& c) {
    Json conds = Json::array();
    for (const auto& f : c.conditions) {
        conds.push_back({{"axis", f.axis},
                         {"sign", f.sign},
                         {"satisfied", f.satisfied},
                         {"min_observed", f.min_observed},
                         {"sample_count", f.sample_count}});
    }
    const char* verdict = c.verdict == Verdict::certified ? "certified" : (c.verdict == Verdict::refuted ? "refuted" : "inconclusive");
    return {{"box", {{"lower", to_json(c.box.lower)}, {"upper", to_json(c.box.upper)}}},
            {"grid_density", c.grid_density},
            {"orientation", c.orientation},
            {"verdict", verdict},
            {"conditions", conds}};
}

inline Json to_json(const ResidualScan& s) {
    return {{"resolution", s.resolution},
            {"best_v", to_json(s.best_v)},
            {"best_norm", s.best_norm},
            {"histogram", {{"edges", s.histogram_edges}, {"counts", s.histogram}}}};
}

inline Json to_json(const SplitResult& r) {
    Json j{{"hyperplane", to_json(r.hyperplane)},
           {"achieved", r.achieved},
           {"residual_norm", r.residual_norm},
           {"method", to_string(r.method)},
           {"evaluations", r.evaluations},
           {"plateau", r.plateau}};
    if (r.certificate) j["certificate"] = to_json(*r.certificate);
    return j;
}

inline Json to_json(const VerifyReport& v) {
    return {{"pass", v.pass},
            {"tol", v.tol},
            {"refined", v.refined},
            {"refined_error", v.refined_error},
            {"monte_carlo", v.monte_carlo},
            {"monte_carlo_error", v.monte_carlo_error},
            {"residual_norm", v.residual_norm}};
}

inline Json to_json(const SplitOutcome& o, const std::vector<double>& alphas, const VerifyReport* verify = nullptr) {
    Json j = document("split");
    j["found"] = o.found();
    j["alphas"] = alphas;
    j["mass_tol"] = o.mass_tol;
    if (o.split) j["result"] = to_json(*o.split);
    if (verify) j["verify"] = to_json(*verify);
    if (o.separators_separated) j["separators_separated"] = *o.separators_separated;
    j["scan"] = to_json(o.scan);
    return j;
}

inline Json to_json(const SeparabilityReport& r) {
    Json j = document("separability");
    j["separable"] = r.separable;
    j["margin"] = r.margin;
    Json ws = Json::array();
    for (const auto& w : r.witnesses) {
        ws.push_back({{"pattern", w.pattern.signs}, {"hyperplane", to_json(w.hyperplane)}, {"margin", w.margin}});
    }
    j["witnesses"] = ws;
    j["failing_pattern"] = r.failing_pattern ? Json(r.failing_pattern->signs) : Json(nullptr);
    return j;
}

inline Json to_json(const CurveSample& c) {
    Json pts = Json::array();
    for (std::size_t i = 0; i < c.points.size(); ++i) {
        pts.push_back({{"angle", c.angles[i]}, {"point", to_json(c.points[i])}, {"fallback", static_cast<bool>(c.fallback[i])}});
    }
    return pts;
}

inline Json to_json(const QuadPartition& q) {
    return {{"h1", to_json(q.h1)},
            {"h2", to_json(q.h2)},
            {"alphas", q.alphas},
            {"quadrant_masses", q.quadrant_masses},
            {"residual_norm", q.residual_norm}};
}

inline Json to_json(const TwoLineOutcome& o) {
    Json j = document("two_lines");
    j["found"] = o.partition.has_value();
    j["h2"] = to_json(o.h2);
    j["lambda1"] = o.lambda1;
    j["lambda2"] = o.lambda2;
    j["container_masses"] = o.container_masses;
    if (o.partition) j["partition"] = to_json(*o.partition);
    j["scan"] = to_json(o.split.scan);
    return j;
}

inline Json to_json(const DiscontinuityProbe& p) {
    return {{"epsilon", p.epsilon},
            {"left", to_json(p.left)},
            {"right", to_json(p.right)},
            {"gap", p.gap},
            {"left_fallback", p.left_fallback},
            {"right_fallback", p.right_fallback}};
}

inline Json to_json(const Scenario& s) {
    Json j = document("scenario_spec");
    j["name"] = s.name;
    j["expected"] = to_string(s.expected);
    j["alphas"] = s.alphas;
    j["seed"] = s.seed;
    j["dim"] = s.dim;
    if (s.problem) j["problem"] = to_json(*s.problem);
    if (s.probe_measure) j["probe_measure"] = to_json(*s.probe_measure);
    if (s.probe_container) j["probe_container"] = to_json(*s.probe_container);
    if (s.expected_turning) j["expected_turning"] = *s.expected_turning;
    return j;
}

inline Expected expected_from_string(const std::string& s, const std::string& path) {
    if (s == "solvable") return Expected::solvable;
    if (s == "not_solvable") return Expected::not_solvable;
    if (s == "turning_number") return Expected::turning_number;
    if (s == "discontinuity") return Expected::discontinuity;
    throw InputError(path + ": unknown expectation '" + s + "'");
}

inline Scenario scenario_from_json(const Json& j, const std::string& path = "scenario") {
    check_schema(j, path);
    Scenario s;
    const Json& name = field(j, "name", path);
    if (!name.is_string()) throw InputError(path + ".name: expected a string");
    s.name = name.get<std::string>();
    const Json& expected = field(j, "expected", path);
    if (!expected.is_string()) throw InputError(path + ".expected: expected a string");
    s.expected = expected_from_string(expected.get<std::string>(), path + ".expected");
    s.alphas = numbers(field(j, "alphas", path), path + ".alphas");
    s.seed = static_cast<std::uint64_t>(integer(field(j, "seed", path), path + ".seed"));
    s.dim = static_cast<std::ptrdiff_t>(integer(field(j, "dim", path), path + ".dim"));
    if (j.contains("problem")) s.problem = problem_from_json(j["problem"], path + ".problem");
    if (j.contains("probe_measure")) s.probe_measure = measure_from_json(j["probe_measure"], path + ".probe_measure");
    if (j.contains("probe_container")) s.probe_container = convex_set_from_json(j["probe_container"], path + ".probe_container");
    if (j.contains("expected_turning")) s.expected_turning = static_cast<int>(integer(j["expected_turning"], path + ".expected_turning"));
    return s;
}

inline Json to_json(const ScenarioReport& r) {
    Json j = document("scenario");
    j["name"] = r.name;
    j["expected"] = to_string(r.expected);
    j["observed"] = r.observed;
    j["pass"] = r.pass;
    j["notes"] = r.notes;
    if (r.outcome) {
        Json o{{"found", r.outcome->found()}, {"mass_tol", r.outcome->mass_tol}};
        if (r.outcome->split) o["result"] = to_json(*r.outcome->split);
        j["split"] = o;
    }
    if (r.verify) j["verify"] = to_json(*r.verify);
    if (r.scan) j["scan"] = to_json(*r.scan);
    if (r.analytic_gap) j["analytic_gap"] = *r.analytic_gap;
    if (r.turning) j["turning_number"] = *r.turning;
    if (r.turning_refined) j["turning_number_refined"] = *r.turning_refined;
    if (r.centroid_offset) j["centroid_offset"] = *r.centroid_offset;
    if (!r.probes.empty()) {
        Json ps = Json::array();
        for (const auto& p : r.probes) ps.push_back(to_json(p));
        j["probes"] = ps;
    }
    return j;
}

}  // namespace io
}  // namespace hamsplit
