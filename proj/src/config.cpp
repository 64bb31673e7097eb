#include "etl/config.hpp"

#include <cmath>
#include <numbers>

#include "etl/samplers.hpp"

namespace etl::config {

namespace {

const char* kSchemaText = R"json({
  "$schema": "http://json-schema.org/draft-07/schema#",
  "title": "etl experiment config",
  "type": "object",
  "required": ["experiment"],
  "additionalProperties": false,
  "properties": {
    "experiment": {
      "type": "string",
      "enum": ["additive_transfer", "multiplicative_transfer", "liminf_limsup", "ess_limsup", "tauberian",
               "fatou_dct", "folner_reduction", "density", "density_sections", "density_convergence",
               "continuous_limit", "bounds", "weyl", "heisenberg_contract", "gp_distribution"]
    },
    "name": {"type": "string"},
    "seed": {"type": "integer", "minimum": 0},
    "sampler": {"$ref": "#/definitions/sampler"},
    "sequence": {"$ref": "#/definitions/sequence"},
    "set": {"$ref": "#/definitions/set"},
    "scheme": {"$ref": "#/definitions/scheme"},
    "schedule": {"$ref": "#/definitions/schedule"},
    "continuous_schedule": {"$ref": "#/definitions/schedule"},
    "quadrature": {"$ref": "#/definitions/quadrature"},
    "tolerance": {"$ref": "#/definitions/tolerance"},
    "t_sampling": {"$ref": "#/definitions/t_sampling"},
    "params": {"type": "object"},
    "output": {
      "type": "object",
      "additionalProperties": false,
      "properties": {
        "dir": {"type": "string"},
        "report": {"type": "string"},
        "series": {"type": "string"}
      }
    }
  },
  "definitions": {
    "sampler": {
      "type": "object",
      "required": ["kind"],
      "properties": {
        "kind": {
          "type": "string",
          "enum": ["constant", "trig", "sawtooth", "indicator", "decay", "log_square_wave", "log2_parity",
                   "product", "torus_orbit", "heisenberg_orbit", "multiple_average", "intersection_measure"]
        },
        "dim": {"type": "integer", "minimum": 1},
        "axis": {"type": "integer", "minimum": 0},
        "factors": {"type": "array", "minItems": 1, "items": {"$ref": "#/definitions/sampler"}}
      }
    },
    "sequence": {
      "type": "object",
      "required": ["kind"],
      "properties": {
        "kind": {"type": "string", "enum": ["running_average", "log_sine", "shift", "dilate"]},
        "of": {"$ref": "#/definitions/sampler"}
      }
    },
    "set": {
      "type": "object",
      "required": ["kind"],
      "properties": {
        "kind": {"type": "string", "enum": ["periodic", "geometric", "frac_window", "residue", "everything", "box"]}
      }
    },
    "scheme": {
      "type": "object",
      "properties": {
        "kind": {"type": "string", "enum": ["standard", "uniform", "two_sided_standard", "two_sided_uniform", "folner"]},
        "folner": {"type": "object"}
      }
    },
    "schedule": {
      "type": "object",
      "properties": {
        "lengths": {"type": "array", "minItems": 1, "items": {"type": "number", "exclusiveMinimum": 0}},
        "start": {"type": ["number", "array"]},
        "ratio": {"type": "number", "exclusiveMinimum": 1},
        "count": {"type": "integer", "minimum": 1},
        "boxes": {"type": "array", "minItems": 1, "items": {"type": "object", "required": ["lo", "hi"]}},
        "ambient_factor": {"type": "number", "minimum": 1},
        "random_offsets": {"type": "integer", "minimum": 0}
      }
    },
    "quadrature": {
      "type": "object",
      "additionalProperties": false,
      "properties": {
        "step": {"type": ["number", "array"]},
        "refine": {"type": "boolean"},
        "closed_form": {"type": "boolean"},
        "rule": {"type": "string", "enum": ["midpoint", "linear_phase"]}
      }
    },
    "tolerance": {
      "type": "object",
      "additionalProperties": false,
      "properties": {
        "tol": {"type": "number", "minimum": 0},
        "limit_tol": {"type": "number"},
        "spread_tol": {"type": "number"},
        "continuous_tol": {"type": "number"},
        "slack": {"type": "number"},
        "tail": {"type": "integer", "minimum": 0}
      }
    },
    "t_sampling": {
      "type": "object",
      "additionalProperties": false,
      "properties": {
        "grid": {"type": "integer", "minimum": 0},
        "kronecker": {"type": "integer", "minimum": 0},
        "random": {"type": "integer", "minimum": 0},
        "seed": {"type": "integer", "minimum": 0},
        "q_max": {"type": "integer", "minimum": 0},
        "radius": {"type": "number", "minimum": 0}
      }
    }
  }
})json";

std::string type_of(const json& v) {
    if (v.is_object()) return "object";
    if (v.is_array()) return "array";
    if (v.is_string()) return "string";
    if (v.is_boolean()) return "boolean";
    if (v.is_number_integer() || v.is_number_unsigned()) return "integer";
    if (v.is_number()) return "number";
    return "null";
}

bool type_matches(const json& v, const std::string& t) {
    const std::string actual = type_of(v);
    return actual == t || (t == "number" && actual == "integer");
}

void validate_at(const json& doc, const json& s, const json& root, const std::string& path,
                 std::vector<std::string>& errors) {
    if (s.contains("$ref")) {
        const std::string ref = s["$ref"].get<std::string>();
        const std::string prefix = "#/definitions/";
        if (ref.rfind(prefix, 0) != 0 || !root["definitions"].contains(ref.substr(prefix.size()))) {
            errors.push_back(path + ": unresolvable $ref " + ref);
            return;
        }
        validate_at(doc, root["definitions"][ref.substr(prefix.size())], root, path, errors);
        return;
    }
    if (s.contains("type")) {
        bool ok = false;
        if (s["type"].is_array()) {
            for (const auto& t : s["type"]) ok = ok || type_matches(doc, t.get<std::string>());
        } else {
            ok = type_matches(doc, s["type"].get<std::string>());
        }
        if (!ok) {
            errors.push_back(path + ": expected " + s["type"].dump() + ", got " + type_of(doc));
            return;
        }
    }
    if (s.contains("enum")) {
        bool found = false;
        for (const auto& e : s["enum"]) found = found || e == doc;
        if (!found) errors.push_back(path + ": value " + doc.dump() + " not in " + s["enum"].dump());
    }
    if (doc.is_number()) {
        const double v = doc.get<double>();
        if (s.contains("minimum") && v < s["minimum"].get<double>())
            errors.push_back(path + ": below minimum " + s["minimum"].dump());
        if (s.contains("exclusiveMinimum") && v <= s["exclusiveMinimum"].get<double>())
            errors.push_back(path + ": must exceed " + s["exclusiveMinimum"].dump());
    }
    if (doc.is_object()) {
        if (s.contains("required"))
            for (const auto& r : s["required"])
                if (!doc.contains(r.get<std::string>())) errors.push_back(path + ": missing required field " + r.dump());
        const json props = s.value("properties", json::object());
        const bool closed = s.contains("additionalProperties") && s["additionalProperties"] == false;
        for (auto it = doc.begin(); it != doc.end(); ++it) {
            const std::string sub = path + "/" + it.key();
            if (props.contains(it.key()))
                validate_at(it.value(), props[it.key()], root, sub, errors);
            else if (closed)
                errors.push_back(sub + ": unknown field");
        }
    }
    if (doc.is_array()) {
        if (s.contains("minItems") && doc.size() < s["minItems"].get<std::size_t>())
            errors.push_back(path + ": needs at least " + s["minItems"].dump() + " items");
        if (s.contains("items"))
            for (std::size_t i = 0; i < doc.size(); ++i)
                validate_at(doc[i], s["items"], root, path + "/" + std::to_string(i), errors);
    }
}

[[noreturn]] void fail(const std::string& what) { throw ConfigError(what); }

json& require(json& o, const char* key) {
    if (!o.is_object() || !o.contains(key)) fail(std::string("missing field '") + key + "'");
    return o[key];
}

double as_number(const json& v, const char* key) {
    if (!v.is_number()) fail(std::string("field '") + key + "' must be a number");
    return v.get<double>();
}

Vec as_numbers(const json& v, const char* key) {
    if (v.is_number()) return {v.get<double>()};
    if (!v.is_array()) fail(std::string("field '") + key + "' must be a number array");
    Vec out;
    for (const auto& x : v) out.push_back(as_number(x, key));
    return out;
}

IVec integers(json& o, const char* key) {
    const json& v = require(o, key);
    if (!v.is_array()) fail(std::string("field '") + key + "' must be an integer array");
    IVec out;
    for (const auto& x : v) {
        if (!x.is_number_integer()) fail(std::string("field '") + key + "' must be an integer array");
        out.push_back(x.get<std::int64_t>());
    }
    return out;
}

std::size_t index(json& o, const char* key, std::int64_t def) {
    const auto v = integer(o, key, def);
    if (v < 0) fail(std::string("field '") + key + "' must be non-negative");
    return static_cast<std::size_t>(v);
}

H3 triple(json& o, const char* key, const Vec& def) {
    const Vec v = numbers(o, key, def);
    if (v.size() != 3) fail(std::string("field '") + key + "' needs three numbers");
    return {v[0], v[1], v[2]};
}

template <class F>
auto guarded(F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    } catch (const std::length_error& e) {
        throw ConfigError(e.what());
    }
}

}  // namespace

const json& schema() {
    static const json s = json::parse(kSchemaText);
    return s;
}

std::vector<std::string> validate(const json& doc, const json& s) {
    std::vector<std::string> errors;
    validate_at(doc, s, s, "", errors);
    return errors;
}

json& section(json& o, const char* key) {
    if (!o.contains(key)) o[key] = json::object();
    if (!o[key].is_object()) fail(std::string("field '") + key + "' must be an object");
    return o[key];
}

double number(json& o, const char* key, double def) {
    if (!o.contains(key)) o[key] = def;
    return as_number(o[key], key);
}

double number(json& o, const char* key) { return as_number(require(o, key), key); }

std::int64_t integer(json& o, const char* key, std::int64_t def) {
    if (!o.contains(key)) o[key] = def;
    if (!o[key].is_number_integer()) fail(std::string("field '") + key + "' must be an integer");
    return o[key].get<std::int64_t>();
}

bool flag(json& o, const char* key, bool def) {
    if (!o.contains(key)) o[key] = def;
    if (!o[key].is_boolean()) fail(std::string("field '") + key + "' must be a boolean");
    return o[key].get<bool>();
}

std::string text(json& o, const char* key, const std::string& def) {
    if (!o.contains(key)) o[key] = def;
    if (!o[key].is_string()) fail(std::string("field '") + key + "' must be a string");
    return o[key].get<std::string>();
}

std::string text(json& o, const char* key) {
    const json& v = require(o, key);
    if (!v.is_string()) fail(std::string("field '") + key + "' must be a string");
    return v.get<std::string>();
}

Vec numbers(json& o, const char* key, const Vec& def) {
    if (!o.contains(key)) o[key] = def;
    return as_numbers(o[key], key);
}

Vec numbers(json& o, const char* key) { return as_numbers(require(o, key), key); }

Poly poly_from(json& j) {
    return guarded([&] {
        if (j.is_array()) return Poly::univariate(as_numbers(j, "poly"));
        if (!j.is_object()) fail("polynomial must be a coefficient array or an object");
        if (j.contains("coeffs")) return Poly::univariate(numbers(j, "coeffs"));
        const auto d = index(j, "dim", 1);
        std::vector<Monomial> terms;
        for (auto& t : require(j, "terms")) {
            Monomial m;
            m.coeff = number(t, "coeff");
            for (const auto& e : require(t, "exponents")) {
                if (!e.is_number_integer()) fail("exponents must be integers");
                m.exponents.push_back(e.get<int>());
            }
            terms.push_back(std::move(m));
        }
        return Poly(d, std::move(terms));
    });
}

Gp gp_from(json& j) {
    if (!j.is_object()) fail("generalized polynomial node must be an object");
    const std::string op = text(j, "op");
    if (op == "const") return gp::constant(number(j, "value"));
    if (op == "var") return gp::var(index(j, "index", 0));
    if (op == "poly") return gp::poly(poly_from(require(j, "poly")));
    if (op == "floor") return gp::floor(gp_from(require(j, "arg")));
    if (op == "frac") return gp::frac(gp_from(require(j, "arg")));
    if (op == "add" || op == "mul") {
        auto& args = require(j, "args");
        if (!args.is_array() || args.size() < 2) fail("'" + op + "' needs at least two args");
        Gp acc = gp_from(args[0]);
        for (std::size_t i = 1; i < args.size(); ++i)
            acc = op == "add" ? gp::add(acc, gp_from(args[i])) : gp::mul(acc, gp_from(args[i]));
        return acc;
    }
    fail("unknown generalized polynomial op '" + op + "'");
}

DensitySet set_from(json& j) {
    return guarded([&] {
        const std::string kind = text(j, "kind");
        if (kind == "everything") return sets::everything(index(j, "dim", 1));
        if (kind == "box") return sets::bounded(Box::half_open(numbers(j, "lo"), numbers(j, "hi")));
        const auto axis = index(j, "axis", 0);
        const auto dim = index(j, "dim", 1);
        if (kind == "periodic")
            return sets::periodic_intervals(number(j, "period", 1.0), number(j, "lo"), number(j, "hi"), axis, dim);
        if (kind == "geometric")
            return sets::geometric_blocks(number(j, "base", 2.0), number(j, "lo"), number(j, "hi"), axis, dim);
        if (kind == "frac_window")
            return sets::frac_window(number(j, "scale", 1.0), number(j, "lo"), number(j, "hi"), axis, dim);
        if (kind == "residue")
            return sets::residue_class(integer(j, "modulus", 2), integer(j, "residue", 0), axis, dim);
        fail("unknown set kind '" + kind + "'");
    });
}

PhaseFlow flow_from(json& j) {
    return guarded([&] {
        const std::string kind = text(j, "kind", "torus");
        if (kind == "torus") {
            TorusFlow F;
            F.alpha = numbers(j, "alpha");
            F.omega = numbers(j, "omega", Vec(F.alpha.size(), 0.0));
            return as_flow(F);
        }
        if (kind == "heisenberg") {
            HeisenbergFlow F;
            F.generator = triple(j, "generator", {});
            F.base = triple(j, "base", {0.0, 0.0, 0.0});
            return as_flow(F);
        }
        fail("unknown flow kind '" + kind + "'");
    });
}

Observable observable_from(json& j) {
    return guarded([&] {
        const std::string kind = text(j, "kind");
        if (kind == "cos") return observables::cosine(integers(j, "k"));
        if (kind == "character") return observables::character(integers(j, "k"));
        if (kind == "constant") return observables::constant(index(j, "m", 1), number(j, "value", 1.0));
        if (kind == "indicator") return observables::indicator(set_from(require(j, "set")));
        fail("unknown observable kind '" + kind + "'");
    });
}

VectorValue value_from(json& j, const NormSpec& norm) {
    if (j.is_number()) return VectorValue({Complex{j.get<double>(), 0.0}}, norm);
    if (j.is_object()) return VectorValue({Complex{number(j, "re", 0.0), number(j, "im", 0.0)}}, norm);
    if (j.is_array()) {
        std::vector<Complex> c;
        for (double v : as_numbers(j, "value")) c.emplace_back(v, 0.0);
        return VectorValue(std::move(c), norm);
    }
    fail("value must be a number, {re, im} or a number array");
}

FnSampler sampler_from(json& j) {
    return guarded([&]() -> FnSampler {
        if (!j.is_object()) fail("sampler must be an object");
        const std::string kind = text(j, "kind");
        if (kind == "constant") return samplers::constant(value_from(require(j, "value")), index(j, "dim", 1));
        if (kind == "product") {
            auto& fs = require(j, "factors");
            if (!fs.is_array() || fs.empty()) fail("'factors' must be a non-empty array");
            std::vector<FnSampler> factors;
            for (auto& f : fs) factors.push_back(sampler_from(f));
            return samplers::product(factors);
        }
        if (kind == "torus_orbit" || kind == "heisenberg_orbit") return orbit_from(j).coords;
        if (kind == "multiple_average") {
            std::vector<PhaseFlow> flows;
            for (auto& f : require(j, "flows")) flows.push_back(flow_from(f));
            if (flows.empty()) fail("'flows' must not be empty");
            std::vector<Poly> polys;
            for (auto& p : require(j, "polys")) polys.push_back(poly_from(p));
            std::vector<Observable> obs;
            for (auto& o : require(j, "observables")) obs.push_back(observable_from(o));
            const std::int64_t def_grid = flows[0].m == 3 && !flows[0].rotation ? 64 : 1024;
            const auto grid = uniform_phase_grid(flows[0].m, index(j, "grid_per_axis", def_grid));
            return multiple_average_sampler(flows, polys, obs, grid);
        }
        if (kind == "intersection_measure") {
            PhaseFlow flow = flow_from(require(j, "flow"));
            std::vector<Poly> polys;
            for (auto& p : require(j, "polys")) polys.push_back(poly_from(p));
            const DensitySet A = set_from(require(j, "set"));
            const std::int64_t def_grid = flow.m == 3 && !flow.rotation ? 64 : 1024;
            const auto grid = uniform_phase_grid(flow.m, index(j, "grid_per_axis", def_grid));
            try {
                return intersection_measure_sampler(flow, polys, A, grid);
            } catch (const std::domain_error& e) {
                throw ConfigError(e.what());
            }
        }
        const auto axis = index(j, "axis", 0);
        const auto dim = index(j, "dim", 1);
        if (kind == "trig") {
            const std::string w = text(j, "wave", "cos");
            samplers::Wave wave = samplers::Wave::Cos;
            if (w == "sin")
                wave = samplers::Wave::Sin;
            else if (w == "exp")
                wave = samplers::Wave::Exp;
            else if (w != "cos")
                fail("unknown wave '" + w + "'");
            return samplers::trig(wave, number(j, "freq", 1.0), static_cast<int>(integer(j, "power", 1)), axis, dim);
        }
        if (kind == "sawtooth") return samplers::sawtooth(number(j, "scale", 1.0), axis, dim);
        if (kind == "indicator")
            return samplers::frac_indicator(number(j, "scale", 1.0), number(j, "lo", 0.0), number(j, "hi", 0.5), axis, dim);
        if (kind == "decay") return samplers::decay(axis, dim);
        if (kind == "log_square_wave") return samplers::log_square_wave(axis, dim);
        if (kind == "log2_parity") return samplers::log2_parity(axis, dim);
        fail("unknown sampler kind '" + kind + "'");
    });
}

Orbit orbit_from(json& j) {
    return guarded([&] {
        const std::string kind = text(j, "kind");
        if (kind == "torus_orbit") {
            TorusFlow F;
            F.alpha = numbers(j, "alpha");
            F.omega = numbers(j, "omega", Vec(F.alpha.size(), 0.0));
            std::vector<Poly> polys;
            for (auto& p : require(j, "polys")) polys.push_back(poly_from(p));
            if (polys.empty()) fail("'polys' must not be empty");
            return torus_orbit_sampler(F, polys);
        }
        if (kind == "heisenberg_orbit") {
            HeisenbergFlow F;
            F.generator = triple(j, "generator", {});
            F.base = triple(j, "base", {0.0, 0.0, 0.0});
            if (!j.contains("poly")) j["poly"] = json::array({0.0, 1.0});
            const Orbit o = heisenberg_orbit_sampler(F, poly_from(j["poly"]));
            const auto k = index(j, "project", 3);
            return k == 3 ? o : project(o, k);
        }
        fail("sampler kind '" + kind + "' is not an orbit");
    });
}

SeqSampler sequence_from(json& j) {
    return guarded([&]() -> SeqSampler {
        const std::string kind = text(j, "kind");
        if (kind == "running_average") {
            const FnSampler f = sampler_from(require(j, "of"));
            return running_average_sequence(f, number(j, "c", 1.0), QuadSpec::uniform(1, number(j, "step", 1e-3)));
        }
        if (kind == "log_sine") {
            const double a = number(j, "amplitude", 1.0);
            return samplers::scalar_seq(
                1,
                [a](std::span<const std::int64_t> n) {
                    if (n[0] < 1) return Complex{};
                    return Complex{a * std::sin(2.0 * std::numbers::pi * std::log(static_cast<double>(n[0]))), 0.0};
                },
                std::abs(a));
        }
        if (kind == "shift" || kind == "dilate") {
            const FnSampler f = sampler_from(require(j, "of"));
            const Vec t = numbers(j, "t");
            return kind == "shift" ? samplers::shift_sequence(f, t) : samplers::dilate_sequence(f, t);
        }
        fail("unknown sequence kind '" + kind + "'");
    });
}

ScaleSchedule schedule_from(json& j, std::size_t dim, std::uint64_t seed) {
    return guarded([&] {
        ScaleSchedule s;
        if (j.contains("lengths")) {
            s = ScaleSchedule::of_lengths(numbers(j, "lengths"), dim);
        } else if (j.contains("boxes")) {
            std::vector<Box> boxes;
            for (auto& b : j["boxes"]) boxes.push_back(Box::half_open(numbers(b, "lo"), numbers(b, "hi")));
            s = ScaleSchedule::of_boxes(std::move(boxes));
        } else if (j.contains("start")) {
            Vec start = numbers(j, "start");
            if (start.size() == 1 && dim > 1) start.assign(dim, start[0]);
            s = ScaleSchedule::geometric(start, number(j, "ratio", 2.0), index(j, "count", 8));
        } else {
            fail("schedule needs 'lengths', 'boxes' or 'start'");
        }
        for (const auto& b : s.scales)
            if (b.dim() != dim) fail("schedule dimension does not match the sampler");
        s.ambient_factor = number(j, "ambient_factor", 4.0);
        s.random_offsets = index(j, "random_offsets", 2);
        s.seed = seed;
        s.validate();
        return s;
    });
}

FolnerSequence folner_from(json& j, std::size_t dim) {
    return guarded([&] {
        const std::string kind = text(j, "kind", "growing");
        if (kind == "growing") return FolnerSequence::growing_boxes(dim);
        if (kind == "shifted")
            return FolnerSequence::shifted_boxes(dim, number(j, "offset_power", 2.0), number(j, "width_power", 1.0));
        fail("unknown Folner kind '" + kind + "'");
    });
}

Scheme scheme_from(json& j, std::size_t dim) {
    return guarded([&] {
        const SchemeKind k = scheme_kind_from_string(text(j, "kind", "standard"));
        if (k == SchemeKind::Folner) return Scheme::along(folner_from(section(j, "folner"), dim));
        return Scheme(k, dim);
    });
}

QuadSpec quad_from(json& j, std::size_t dim) {
    return guarded([&] {
        QuadSpec q;
        Vec step = numbers(j, "step", {0.01});
        if (step.size() == 1) step.assign(dim, step[0]);
        if (step.size() != dim) fail("quadrature step has the wrong dimension");
        for (double h : step)
            if (!(h > 0.0)) fail("quadrature step must be positive");
        q.step = step;
        q.refine = flag(j, "refine", false);
        q.closed_form = flag(j, "closed_form", true);
        const std::string rule = text(j, "rule", "midpoint");
        q.rule = rule == "linear_phase" ? QuadRule::LinearPhase : QuadRule::Midpoint;
        return q;
    });
}

TSampling tsampling_from(json& j, std::uint64_t seed) {
    TSampling t;
    t.grid_per_axis = index(j, "grid", 0);
    t.kronecker = index(j, "kronecker", 0);
    t.random = index(j, "random", 16);
    t.seed = static_cast<std::uint64_t>(integer(j, "seed", static_cast<std::int64_t>(seed)));
    t.exclusion_q_max = integer(j, "q_max", 0);
    t.exclusion_radius = number(j, "radius", 1e-6);
    return t;
}

}  // namespace etl::config
