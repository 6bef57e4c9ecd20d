#include "chronoscale/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "chronoscale/errors.hpp"

namespace chronoscale {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

SchemaError::SchemaError(std::string path, const std::string& message)
    : std::runtime_error(path.empty() ? message : path + ": " + message), path_(std::move(path)) {}

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }
std::string index(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

void require_object(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw SchemaError(path, "expected an object");
    const std::set<std::string> keys(allowed.begin(), allowed.end());
    for (const auto& item : j.items()) {
        if (!keys.count(item.key())) throw SchemaError(join(path, item.key()), "unknown field");
    }
}

const json& required(const json& obj, const char* key, const std::string& path) {
    auto it = obj.find(key);
    if (it == obj.end()) throw SchemaError(join(path, key), "required field is missing");
    return *it;
}

double as_number(const json& j, const std::string& path) {
    if (!j.is_number()) throw SchemaError(path, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw SchemaError(path, "must be finite");
    return v;
}

double number(const json& obj, const char* key, const std::string& path) {
    return as_number(required(obj, key, path), join(path, key));
}

double number_or(const json& obj, const char* key, const std::string& path, double fallback) {
    auto it = obj.find(key);
    return it == obj.end() ? fallback : as_number(*it, join(path, key));
}

/// null stands for the given infinity.
double extended(const json& j, const std::string& path, double infinity) {
    if (j.is_null()) return infinity;
    return as_number(j, path);
}

std::optional<double> optional_number(const json& obj, const char* key, const std::string& path) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    return as_number(*it, join(path, key));
}

std::size_t count(const json& obj, const char* key, const std::string& path, std::size_t fallback) {
    auto it = obj.find(key);
    if (it == obj.end()) return fallback;
    if (!it->is_number_integer() || it->get<long long>() < 1) {
        throw SchemaError(join(path, key), "expected a positive integer");
    }
    return it->get<std::size_t>();
}

std::string text(const json& obj, const char* key, const std::string& path, const std::string& fallback = {}) {
    auto it = obj.find(key);
    if (it == obj.end()) return fallback;
    if (!it->is_string()) throw SchemaError(join(path, key), "expected a string");
    return it->get<std::string>();
}

std::vector<double> numbers(const json& j, const std::string& path, bool allow_scalar) {
    if (allow_scalar && j.is_number()) return {as_number(j, path)};
    if (!j.is_array()) throw SchemaError(path, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_number(j[i], index(path, i)));
    return out;
}

std::vector<Piece> parse_pieces(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) throw SchemaError(path, "expected a nonempty array of pieces");
    std::vector<Piece> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string p = index(path, i);
        const json& item = j[i];
        if (item.is_number()) {
            const double t = as_number(item, p);
            out.push_back({t, t});
            continue;
        }
        if (!item.is_array() || item.size() != 2) throw SchemaError(p, "expected [lo, hi] or a number");
        out.push_back({extended(item[0], index(p, 0), -kInfinity), extended(item[1], index(p, 1), kInfinity)});
    }
    return out;
}

ScaleSpec parse_scale(const json& j, const std::string& path) {
    if (!j.is_object()) throw SchemaError(path, "expected an object");
    const std::string kind = text(j, "kind", path);
    if (kind == "real") {
        require_object(j, path, {"kind", "lo", "hi"});
        spec::RealLine s;
        if (j.contains("lo")) s.lo = extended(j["lo"], join(path, "lo"), -kInfinity);
        if (j.contains("hi")) s.hi = extended(j["hi"], join(path, "hi"), kInfinity);
        return s;
    }
    if (kind == "h_integers") {
        require_object(j, path, {"kind", "h", "origin"});
        return spec::HIntegers{number(j, "h", path), number_or(j, "origin", path, 0.0)};
    }
    if (kind == "periodic") {
        require_object(j, path, {"kind", "a", "b", "origin"});
        return spec::PeriodicUnion{number(j, "a", path), number(j, "b", path), number_or(j, "origin", path, 0.0)};
    }
    if (kind == "pattern") {
        require_object(j, path, {"kind", "period", "origin", "pieces"});
        return spec::Pattern{PeriodicGenerator{number(j, "period", path), number_or(j, "origin", path, 0.0),
                                               parse_pieces(required(j, "pieces", path), join(path, "pieces"))}};
    }
    if (kind == "pieces") {
        require_object(j, path, {"kind", "pieces"});
        return spec::PieceList{parse_pieces(required(j, "pieces", path), join(path, "pieces"))};
    }
    throw SchemaError(join(path, "kind"), "unknown scale kind '" + kind + "'");
}

FunctionSpec parse_function(const json& j, const std::string& path) {
    if (!j.is_object()) throw SchemaError(path, "expected an object");
    const std::string name = text(j, "name", path);
    if (name == "linear") {
        require_object(j, path, {"name", "rate", "forcing"});
        catalog::Linear s;
        s.rate = numbers(required(j, "rate", path), join(path, "rate"), true);
        if (j.contains("forcing")) s.forcing = numbers(j["forcing"], join(path, "forcing"), false);
        return s;
    }
    if (name == "logistic") {
        require_object(j, path, {"name", "r", "capacity"});
        return catalog::Logistic{number(j, "r", path), number(j, "capacity", path)};
    }
    if (name == "polynomial") {
        require_object(j, path, {"name", "coefficients"});
        return catalog::Polynomial{numbers(required(j, "coefficients", path), join(path, "coefficients"), false)};
    }
    if (name == "constant") {
        require_object(j, path, {"name", "value"});
        return catalog::Constant{numbers(required(j, "value", path), join(path, "value"), true)};
    }
    if (name == "reset") {
        require_object(j, path, {"name", "value"});
        return catalog::Reset{numbers(required(j, "value", path), join(path, "value"), true)};
    }
    throw SchemaError(join(path, "name"), "unknown catalog function '" + name + "'");
}

SolveOptions parse_options(const json& j, const std::string& path) {
    require_object(j, path, {"rtol", "atol", "max_step", "max_norm", "min_step", "max_jumps", "boundary_tolerance"});
    SolveOptions o;
    o.rtol = number_or(j, "rtol", path, o.rtol);
    o.atol = number_or(j, "atol", path, o.atol);
    if (j.contains("max_step")) o.max_step = extended(j["max_step"], join(path, "max_step"), kInfinity);
    o.max_norm = number_or(j, "max_norm", path, o.max_norm);
    o.min_step = number_or(j, "min_step", path, o.min_step);
    o.max_jumps = count(j, "max_jumps", path, o.max_jumps);
    o.boundary_tolerance = number_or(j, "boundary_tolerance", path, o.boundary_tolerance);
    auto positive = [&](double v, const char* key) {
        if (!(v > 0.0)) throw SchemaError(join(path, key), "must be positive");
    };
    positive(o.rtol, "rtol");
    positive(o.atol, "atol");
    positive(o.max_step, "max_step");
    positive(o.max_norm, "max_norm");
    positive(o.min_step, "min_step");
    positive(o.boundary_tolerance, "boundary_tolerance");
    return o;
}

TheoremSpec parse_theorem(const json& j, const std::string& path) {
    require_object(j, path, {"a", "b", "epsilon", "M", "N", "L", "max_iter", "tolerance", "nodes_per_unit"});
    TheoremSpec t;
    t.a = number(j, "a", path);
    t.b = number(j, "b", path);
    t.epsilon = number_or(j, "epsilon", path, t.epsilon);
    t.M = optional_number(j, "M", path);
    t.N = optional_number(j, "N", path);
    t.L = optional_number(j, "L", path);
    t.max_iter = count(j, "max_iter", path, t.max_iter);
    t.tolerance = number_or(j, "tolerance", path, t.tolerance);
    t.nodes_per_unit = number_or(j, "nodes_per_unit", path, t.nodes_per_unit);
    if (!(t.a > 0.0)) throw SchemaError(join(path, "a"), "must be positive");
    if (!(t.b > 0.0)) throw SchemaError(join(path, "b"), "must be positive");
    if (!(t.epsilon > 0.0 && t.epsilon < 1.0)) throw SchemaError(join(path, "epsilon"), "must lie in (0, 1)");
    for (auto [value, key] : {std::pair{t.M, "M"}, std::pair{t.N, "N"}, std::pair{t.L, "L"}}) {
        if (value && *value < 0.0) throw SchemaError(join(path, key), "must be nonnegative");
    }
    if (!(t.tolerance > 0.0)) throw SchemaError(join(path, "tolerance"), "must be positive");
    if (!(t.nodes_per_unit > 0.0)) throw SchemaError(join(path, "nodes_per_unit"), "must be positive");
    return t;
}

StateDomainSpec parse_domain(const json& j, const std::string& path) {
    if (!j.is_object()) throw SchemaError(path, "expected an object");
    const std::string kind = text(j, "kind", path);
    if (kind == "constant") {
        require_object(j, path, {"kind"});
        return domain::Constant{};
    }
    if (kind == "state_gap") {
        require_object(j, path, {"kind", "at", "coefficient"});
        domain::StateGap g{number(j, "at", path), number(j, "coefficient", path)};
        if (g.coefficient < 0.0) throw SchemaError(join(path, "coefficient"), "must be nonnegative");
        return g;
    }
    throw SchemaError(join(path, "kind"), "unknown state domain kind '" + kind + "'");
}

ordered_json extended_json(double v) {
    if (std::isinf(v)) return nullptr;
    return v;
}

ordered_json pieces_json(const std::vector<Piece>& pieces) {
    ordered_json arr = ordered_json::array();
    for (const Piece& p : pieces) arr.push_back(ordered_json::array({extended_json(p.lo), extended_json(p.hi)}));
    return arr;
}

ordered_json scale_json(const ScaleSpec& s) {
    return std::visit(Overloaded{
                          [](const spec::RealLine& r) {
                              return ordered_json{{"kind", "real"}, {"lo", extended_json(r.lo)}, {"hi", extended_json(r.hi)}};
                          },
                          [](const spec::HIntegers& h) {
                              return ordered_json{{"kind", "h_integers"}, {"h", h.h}, {"origin", h.origin}};
                          },
                          [](const spec::PeriodicUnion& p) {
                              return ordered_json{{"kind", "periodic"}, {"a", p.a}, {"b", p.b}, {"origin", p.origin}};
                          },
                          [](const spec::Pattern& p) {
                              return ordered_json{{"kind", "pattern"},
                                                  {"period", p.generator.period},
                                                  {"origin", p.generator.origin},
                                                  {"pieces", pieces_json(p.generator.pattern)}};
                          },
                          [](const spec::PieceList& p) {
                              return ordered_json{{"kind", "pieces"}, {"pieces", pieces_json(p.pieces)}};
                          },
                      },
                      s);
}

ordered_json function_json(const FunctionSpec& f) {
    ordered_json out{{"name", std::string(function_name(f))}};
    std::visit(Overloaded{
                   [&](const catalog::Linear& s) {
                       out["rate"] = s.rate;
                       if (!s.forcing.empty()) out["forcing"] = s.forcing;
                   },
                   [&](const catalog::Logistic& s) {
                       out["r"] = s.r;
                       out["capacity"] = s.capacity;
                   },
                   [&](const catalog::Polynomial& s) { out["coefficients"] = s.coefficients; },
                   [&](const catalog::Constant& s) { out["value"] = s.value; },
                   [&](const catalog::Reset& s) { out["value"] = s.value; },
               },
               f);
    return out;
}

}  // namespace

Scenario parse_scenario(const json& doc) {
    require_object(doc, "", {"name", "description", "scale", "snap_tolerance", "rhs", "t0", "y0", "t_end", "options",
                             "theorem", "state_domain"});
    Scenario s;
    s.name = text(doc, "name", "");
    s.description = text(doc, "description", "");
    s.scale = parse_scale(required(doc, "scale", ""), "scale");
    s.snap_tolerance = number_or(doc, "snap_tolerance", "", 0.0);
    if (s.snap_tolerance < 0.0) throw SchemaError("snap_tolerance", "must be nonnegative");

    const json& rhs = required(doc, "rhs", "");
    require_object(rhs, "rhs", {"kind", "f", "J"});
    const std::string kind = text(rhs, "kind", "rhs", "increment");
    const auto parsed_kind = parse_transition_kind(kind);
    if (!parsed_kind) throw SchemaError("rhs.kind", "expected assignment, increment or delta_rate");
    s.kind = *parsed_kind;
    s.f = parse_function(required(rhs, "f", "rhs"), "rhs.f");
    s.J = parse_function(required(rhs, "J", "rhs"), "rhs.J");

    s.t0 = number(doc, "t0", "");
    s.y0 = numbers(required(doc, "y0", ""), "y0", true);
    if (s.y0.empty()) throw SchemaError("y0", "must have at least one entry");
    s.t_end = number(doc, "t_end", "");
    if (s.t0 > s.t_end) throw SchemaError("t_end", "must not precede t0");
    if (doc.contains("options")) s.options = parse_options(doc["options"], "options");
    if (doc.contains("theorem")) s.theorem = parse_theorem(doc["theorem"], "theorem");
    if (doc.contains("state_domain")) s.state_domain = parse_domain(doc["state_domain"], "state_domain");

    const auto n = static_cast<Eigen::Index>(s.y0.size());
    for (auto [fn, path] : {std::pair{&s.f, "rhs.f"}, std::pair{&s.J, "rhs.J"}}) {
        try {
            validate_function(*fn, n);
        } catch (const Error& e) {
            throw SchemaError(path, e.what());
        }
    }

    std::optional<TimeScale> ts;
    try {
        ts = make_scale(s.scale);
    } catch (const Error& e) {
        throw SchemaError("scale", e.what());
    }
    if (s.snap_tolerance > 0.0) {
        if (auto snapped = snap_to_scale(*ts, s.t0, s.snap_tolerance)) s.t0 = *snapped;
        if (auto snapped = snap_to_scale(*ts, s.t_end, s.snap_tolerance)) s.t_end = *snapped;
    }
    if (!s.state_domain) {
        if (!ts->contains(s.t0)) throw SchemaError("t0", "is not a point of the time scale");
        if (!ts->contains(s.t_end)) throw SchemaError("t_end", "is not a point of the time scale");
    }
    return s;
}

Scenario parse_scenario_text(const std::string& text_doc) {
    json doc;
    try {
        doc = json::parse(text_doc);
    } catch (const json::parse_error& e) {
        throw SchemaError("", std::string("malformed JSON: ") + e.what());
    }
    return parse_scenario(doc);
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("", "cannot open scenario file " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_scenario_text(buffer.str());
}

ordered_json to_json(const Scenario& s) {
    ordered_json out;
    out["name"] = s.name;
    out["description"] = s.description;
    out["scale"] = scale_json(s.scale);
    out["snap_tolerance"] = s.snap_tolerance;
    out["rhs"] = ordered_json{{"kind", std::string(to_string(s.kind))}, {"f", function_json(s.f)}, {"J", function_json(s.J)}};
    out["t0"] = s.t0;
    out["y0"] = s.y0;
    out["t_end"] = s.t_end;
    out["options"] = ordered_json{{"rtol", s.options.rtol},
                                  {"atol", s.options.atol},
                                  {"max_step", extended_json(s.options.max_step)},
                                  {"max_norm", s.options.max_norm},
                                  {"min_step", s.options.min_step},
                                  {"max_jumps", s.options.max_jumps},
                                  {"boundary_tolerance", s.options.boundary_tolerance}};
    if (s.theorem) {
        const TheoremSpec& t = *s.theorem;
        ordered_json th{{"a", t.a}, {"b", t.b}, {"epsilon", t.epsilon}};
        if (t.M) th["M"] = *t.M;
        if (t.N) th["N"] = *t.N;
        if (t.L) th["L"] = *t.L;
        th["max_iter"] = t.max_iter;
        th["tolerance"] = t.tolerance;
        th["nodes_per_unit"] = t.nodes_per_unit;
        out["theorem"] = th;
    }
    if (s.state_domain) {
        out["state_domain"] = std::visit(
            Overloaded{
                [](const domain::Constant&) { return ordered_json{{"kind", "constant"}}; },
                [](const domain::StateGap& g) {
                    return ordered_json{{"kind", "state_gap"}, {"at", g.at}, {"coefficient", g.coefficient}};
                },
            },
            *s.state_domain);
    }
    return out;
}

std::string emit_scenario(const Scenario& scenario) { return to_json(scenario).dump(2) + "\n"; }

TimeScale build_scale(const Scenario& scenario) { return make_scale(scenario.scale); }

PiecewiseRHS build_rhs(const Scenario& scenario) {
    const auto n = static_cast<Eigen::Index>(scenario.y0.size());
    return PiecewiseRHS{instantiate(scenario.f, n), instantiate(scenario.J, n), scenario.kind, n};
}

StateDomain build_domain(const Scenario& scenario) {
    if (!scenario.state_domain || std::holds_alternative<domain::Constant>(*scenario.state_domain)) {
        TimeScale ts = build_scale(scenario);
        return StateDomain{[ts](const Vector&) { return ts; }};
    }
    const auto gap = std::get<domain::StateGap>(*scenario.state_domain);
    return StateDomain{[gap](const Vector& x) {
        const double width = gap.coefficient * x.norm();
        if (width == 0.0) return make_scale(spec::RealLine{});
        return make_scale(spec::PieceList{{Piece{-kInfinity, gap.at}, Piece{gap.at + width, kInfinity}}});
    }};
}

Vector initial_state(const Scenario& scenario) {
    return Eigen::Map<const Vector>(scenario.y0.data(), static_cast<Eigen::Index>(scenario.y0.size()));
}

}  // namespace chronoscale
