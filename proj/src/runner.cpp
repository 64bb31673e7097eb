#include "etl/runner.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include "etl/config.hpp"
#include "etl/density.hpp"
#include "etl/dynamics.hpp"

namespace etl {

namespace {

using nlohmann::json;
using namespace etl::config;

constexpr const char* kVersion = "0.1.0";

struct Outcome {
    Verdict verdict = Verdict::Fail;
    std::string reason;
    json estimates = json::object();
    std::vector<std::string> warnings;
    std::vector<SeriesRow> series;
    bool zero_tolerance = false;
};

json value_json(const VectorValue& v) {
    json j;
    j["size"] = v.size();
    if (v.size() > 0) {
        j["re"] = v[0].real();
        j["im"] = v[0].imag();
    }
    j["norm"] = v.size() > 0 ? v.norm() : 0.0;
    return j;
}

json limit_json(const LimitEstimate& e) {
    return {{"value", value_json(e.value)},
            {"residual", e.residual},
            {"converged", e.converged},
            {"tolerance", e.tolerance}};
}

json inequality_json(const InequalityReport& r) {
    return {{"lhs", r.lhs},
            {"rhs", r.rhs},
            {"margin", r.margin},
            {"slack", r.slack},
            {"direction", r.direction == Direction::GE ? ">=" : "<="},
            {"pass", r.pass}};
}

SeriesRow row(const std::string& name, std::int64_t t_index, std::int64_t scale, const Box* w, const VectorValue& v,
              double residual) {
    SeriesRow r;
    r.series = name;
    r.t_index = t_index;
    r.scale_index = scale;
    if (w) {
        r.window_lo = w->lo;
        r.window_hi = w->hi;
    }
    r.estimate = v.size() > 0 ? v[0] : Complex{};
    r.estimate_norm = v.size() > 0 ? v.norm() : 0.0;
    r.residual = residual;
    return r;
}

void add_history(Outcome& out, const std::string& name, std::int64_t t_index, const LimitEstimate& e) {
    for (const auto& p : e.history)
        out.series.push_back(row(name, t_index, static_cast<std::int64_t>(p.scale_index), &p.window, p.value, e.residual));
}

void add_history(Outcome& out, const std::string& name, std::int64_t t_index, const Bounds& b) {
    for (const auto& p : b.history)
        out.series.push_back(row(name, t_index, static_cast<std::int64_t>(p.scale_index), &p.window, p.value, 0.0));
}

struct Tolerances {
    double tol;
    double limit_tol;
    double spread_tol;
    double continuous_tol;
    double slack;
    std::size_t tail;
};

Tolerances tolerances(json& cfg, double tol_def, std::size_t tail_def) {
    json& t = section(cfg, "tolerance");
    Tolerances out;
    out.tol = number(t, "tol", tol_def);
    out.limit_tol = number(t, "limit_tol", -1.0);
    out.spread_tol = number(t, "spread_tol", -1.0);
    out.continuous_tol = number(t, "continuous_tol", -1.0);
    out.slack = number(t, "slack", -1.0);
    const auto tail = integer(t, "tail", static_cast<std::int64_t>(tail_def));
    if (tail < 0) throw ConfigError("tail must be non-negative");
    out.tail = static_cast<std::size_t>(tail);
    return out;
}

bool any_zero(const Tolerances& t) {
    return t.tol == 0.0 || t.limit_tol == 0.0 || t.spread_tol == 0.0 || t.continuous_tol == 0.0;
}

json& need(json& o, const char* key) {
    if (!o.contains(key)) throw ConfigError(std::string("missing field '") + key + "'");
    return o[key];
}

// Optional agreement with a known value; downgrades a Pass to Fail on mismatch.
void expected_check(Outcome& out, json& params, double tol_def,
                    const std::vector<std::pair<std::string, VectorValue>>& sides) {
    if (!params.contains("expected")) return;
    const double etol = number(params, "expected_tol", tol_def);
    for (const auto& [name, v] : sides) {
        VectorValue e = value_from(params["expected"], v.norm_spec());
        if (e.size() == 1 && v.size() > 1) e = VectorValue(std::vector<Complex>(v.size(), e[0]), v.norm_spec());
        if (e.size() != v.size()) throw ConfigError("'expected' has the wrong number of components");
        const double dev = distance(v, e);
        out.estimates["expected_deviation"][name] = dev;
        if (dev > etol && out.verdict == Verdict::Pass) {
            out.verdict = Verdict::Fail;
            out.reason = name + " deviates from the expected value by " + std::to_string(dev);
        }
    }
}

std::optional<ScaleSchedule> optional_schedule(json& cfg, const char* key, std::size_t d, std::uint64_t seed) {
    if (!cfg.contains(key)) return std::nullopt;
    return schedule_from(cfg[key], d, seed);
}

Outcome run_additive(json& cfg, std::uint64_t seed) {
    const FnSampler f = sampler_from(need(cfg, "sampler"));
    const std::size_t d = f.dim;
    json& params = section(cfg, "params");
    AdditiveSpec spec;
    spec.scheme = scheme_from(section(cfg, "scheme"), d);
    spec.sched = schedule_from(need(cfg, "schedule"), d, seed);
    spec.continuous_sched = optional_schedule(cfg, "continuous_schedule", d, seed);
    spec.quad = quad_from(section(cfg, "quadrature"), d);
    spec.t_grid = static_cast<std::size_t>(integer(params, "t_grid", 64));
    const auto tol = tolerances(cfg, 0.02, 3);
    spec.tol = tol.tol;
    spec.limit_tol = tol.limit_tol;
    spec.tail = tol.tail;

    const auto rep = additive_transfer_check(f, spec);
    Outcome out;
    out.verdict = rep.verdict;
    out.reason = rep.reason;
    out.warnings = rep.warnings;
    out.zero_tolerance = any_zero(tol);
    std::size_t unconverged = 0;
    for (std::size_t i = 0; i < rep.per_t.size(); ++i) {
        if (!rep.per_t[i].estimate.converged) ++unconverged;
        add_history(out, "discrete_at_t", static_cast<std::int64_t>(i), rep.per_t[i].estimate);
    }
    add_history(out, "continuous", -1, rep.continuous_side);
    out.estimates["discrete_side"] = value_json(rep.discrete_side);
    out.estimates["continuous_side"] = limit_json(rep.continuous_side);
    out.estimates["deviation"] = rep.deviation;
    out.estimates["t_samples"] = rep.per_t.size();
    out.estimates["unconverged_t"] = unconverged;
    expected_check(out, params, spec.tol, {{"discrete_side", rep.discrete_side}, {"continuous_side", rep.continuous_side.value}});
    return out;
}

Outcome run_multiplicative(json& cfg, std::uint64_t seed) {
    const FnSampler f = sampler_from(need(cfg, "sampler"));
    const std::size_t d = f.dim;
    json& params = section(cfg, "params");
    MultiplicativeSpec spec;
    spec.scheme = scheme_from(section(cfg, "scheme"), d);
    spec.c = numbers(params, "c", Vec(d, 1.0));
    spec.t = tsampling_from(section(cfg, "t_sampling"), seed);
    spec.discrete_sched = schedule_from(need(cfg, "schedule"), d, seed);
    spec.continuous_sched = schedule_from(need(cfg, "continuous_schedule"), d, seed);
    spec.quad = quad_from(section(cfg, "quadrature"), d);
    spec.dilation_adapted = flag(params, "dilation_adapted", false);
    spec.beyond_c = flag(params, "beyond_c", false);
    const auto tol = tolerances(cfg, 0.02, 3);
    spec.tol = tol.tol;
    spec.spread_tol = tol.spread_tol;
    spec.limit_tol = tol.limit_tol;
    spec.tail = tol.tail;

    const auto rep = multiplicative_transfer_check(f, spec);
    Outcome out;
    out.verdict = rep.verdict;
    out.reason = rep.reason;
    out.warnings = rep.warnings;
    out.zero_tolerance = any_zero(tol);
    std::size_t converged = 0;
    json per_t = json::array();
    for (std::size_t i = 0; i < rep.per_t.size(); ++i) {
        if (rep.per_t[i].estimate.converged) ++converged;
        per_t.push_back({{"t", rep.per_t[i].t}, {"limit", limit_json(rep.per_t[i].estimate)}});
        add_history(out, "discrete_at_t", static_cast<std::int64_t>(i), rep.per_t[i].estimate);
    }
    add_history(out, "continuous", -1, rep.continuous_side);
    out.estimates["consensus"] = value_json(rep.discrete_side);
    out.estimates["continuous_side"] = limit_json(rep.continuous_side);
    out.estimates["deviation"] = rep.deviation;
    out.estimates["constancy_spread"] = rep.constancy_spread;
    out.estimates["t_samples"] = rep.per_t.size();
    out.estimates["converged_t"] = converged;
    out.estimates["per_t"] = per_t;
    expected_check(out, params, spec.tol, {{"continuous_side", rep.continuous_side.value}});
    return out;
}

Outcome run_liminf_limsup(json& cfg, std::uint64_t seed) {
    const FnSampler f = sampler_from(need(cfg, "sampler"));
    const std::size_t d = f.dim;
    json& params = section(cfg, "params");
    LiminfLimsupSpec spec;
    const std::string method = text(params, "method", "additive");
    if (method != "additive" && method != "multiplicative") throw ConfigError("method must be additive or multiplicative");
    spec.method = method == "additive" ? Method::Additive : Method::Multiplicative;
    spec.scheme = scheme_from(section(cfg, "scheme"), d);
    spec.discrete_sched = schedule_from(need(cfg, "schedule"), d, seed);
    auto cs = optional_schedule(cfg, "continuous_schedule", d, seed);
    spec.continuous_sched = cs ? *cs : spec.discrete_sched;
    spec.quad = quad_from(section(cfg, "quadrature"), d);
    spec.t_grid = static_cast<std::size_t>(integer(params, "t_grid", 16));
    spec.t = tsampling_from(section(cfg, "t_sampling"), seed);
    spec.c = numbers(params, "c", Vec(d, 1.0));
    spec.dilation_adapted = flag(params, "dilation_adapted", false);
    const auto tol = tolerances(cfg, 0.02, 0);
    spec.slack = tol.slack;
    spec.tail = tol.tail;

    const auto rep = liminf_limsup_transfer_check(f, spec);
    Outcome out;
    out.verdict = rep.verdict;
    if (!rep.liminf.pass) out.reason = "liminf inequality violated";
    if (!rep.limsup.pass) out.reason = "limsup inequality violated";
    out.estimates["liminf"] = inequality_json(rep.liminf);
    out.estimates["limsup"] = inequality_json(rep.limsup);
    out.estimates["continuous"] = {{"lo", rep.continuous.bounds.lo},
                                   {"hi", rep.continuous.bounds.hi},
                                   {"residual", rep.continuous.residual}};
    add_history(out, "continuous", -1, rep.continuous.bounds);
    for (std::size_t i = 0; i < rep.per_t.size(); ++i)
        add_history(out, "discrete_at_t", static_cast<std::int64_t>(i), rep.per_t[i].bounds.bounds);
    return out;
}

Outcome run_ess_limsup(json& cfg, std::uint64_t seed) {
    const FnSampler f = sampler_from(need(cfg, "sampler"));
    const std::size_t d = f.dim;
    json& params = section(cfg, "params");
    EssLimsupSpec spec;
    spec.scheme = scheme_from(section(cfg, "scheme"), d);
    if (!params.contains("L")) params["L"] = 0.0;
    spec.L = value_from(params["L"], f.norm);
    spec.deltas = numbers(params, "deltas", {1.0, 0.5, 0.25, 0.125});
    spec.lower_fraction = number(params, "lower_fraction", 1.0 / 64.0);
    spec.t = tsampling_from(section(cfg, "t_sampling"), seed);
    spec.discrete_sched = schedule_from(need(cfg, "schedule"), d, seed);
    spec.dilation_adapted = flag(params, "dilation_adapted", true);
    spec.continuous_sched = schedule_from(need(cfg, "continuous_schedule"), d, seed);
    spec.quad = quad_from(section(cfg, "quadrature"), d);
    const auto tol = tolerances(cfg, 0.02, 3);
    spec.tol = tol.tol;
    spec.continuous_tol = tol.continuous_tol;
    spec.tail = tol.tail;

    const auto rep = ess_limsup_transfer_check(f, spec);
    Outcome out;
    out.verdict = rep.verdict;
    out.reason = rep.reason;
    out.warnings = rep.warnings;
    out.zero_tolerance = any_zero(tol);
    out.estimates["deltas"] = rep.deltas;
    out.estimates["levels"] = rep.levels;
    out.estimates["monotone"] = rep.monotone;
    out.estimates["continuous_side"] = limit_json(rep.continuous_side);
    out.estimates["continuous_deviation"] = rep.continuous_deviation;
    for (std::size_t i = 0; i < rep.levels.size(); ++i)
        out.series.push_back(row("level", -1, static_cast<std::int64_t>(i), nullptr, VectorValue::scalar(rep.levels[i]), 0.0));
    add_history(out, "continuous", -1, rep.continuous_side);
    return out;
}

Outcome run_tauberian(json& cfg, std::uint64_t seed) {
    const SeqSampler v = sequence_from(need(cfg, "sequence"));
    json& params = section(cfg, "params");
    TauberianSpec spec;
    spec.alpha = number(params, "alpha", 1.0);
    spec.sched = schedule_from(need(cfg, "schedule"), v.dim, seed);
    const auto tol = tolerances(cfg, 1e-3, 3);
    spec.tol = tol.tol;
    spec.limit_tol = tol.limit_tol;
    spec.tail = tol.tail;
    spec.spot_checks = static_cast<std::size_t>(integer(params, "spot_checks", 64));
    spec.seed = seed;

    const auto rep = tauberian_verify(v, spec);
    Outcome out;
    out.verdict = rep.verdict;
    out.reason = rep.reason;
    out.zero_tolerance = any_zero(tol);
    out.estimates["worst_increment_ratio"] = rep.worst_increment_ratio;
    out.estimates["cesaro"] = limit_json(rep.cesaro);
    out.estimates["tail_limit"] = limit_json(rep.tail_limit);
    out.estimates["deviation"] = rep.deviation;
    add_history(out, "cesaro", -1, rep.cesaro);
    add_history(out, "tail", -1, rep.tail_limit);
    return out;
}

Outcome run_fatou(json& cfg, std::uint64_t) {
    json& params = section(cfg, "params");
    const std::string family = text(params, "family", "exp");
    if (family != "exp") throw ConfigError("fatou_dct family must be 'exp'");
    const auto grid = integer(params, "grid", 1000);
    const auto n_min = integer(params, "n_min", 1);
    const auto n_max = integer(params, "n_max", 999);
    if (grid < 1 || n_min > n_max) throw ConfigError("fatou_dct needs grid >= 1 and n_min <= n_max");
    const double bound = number(params, "bound", 1.0);
    const auto tol = tolerances(cfg, 0.01, 0);

    const auto xs = unit_midpoints(static_cast<std::size_t>(grid));
    std::vector<double> weights(xs.size(), 1.0 / static_cast<double>(grid));
    std::vector<std::vector<Complex>> seq;
    for (std::int64_t n = n_min; n <= n_max; ++n) {
        std::vector<Complex> row(xs.size());
        for (std::size_t i = 0; i < xs.size(); ++i) {
            // Exact phase reduction: n (i + 1/2) / grid mod 1.
            const std::int64_t num = (2 * n * static_cast<std::int64_t>(i) + n) % (2 * grid);
            row[i] = std::polar(1.0, std::numbers::pi * static_cast<double>(num) / static_cast<double>(grid));
        }
        seq.push_back(std::move(row));
    }
    const auto rep = fatou_dct_verify(seq, weights, bound, tol.tol, tol.tail);
    Outcome out;
    for (std::size_t k = 0; k < seq.size(); ++k) {
        Complex integral{};
        for (std::size_t i = 0; i < xs.size(); ++i) integral += weights[i] * seq[k][i];
        out.series.push_back(row("integral", -1, n_min + static_cast<std::int64_t>(k), nullptr, VectorValue({integral}), 0.0));
    }
    out.verdict = rep.verdict;
    out.reason = rep.reason;
    out.zero_tolerance = any_zero(tol);
    out.estimates["fatou"] = inequality_json(rep.fatou);
    out.estimates["dct_applicable"] = rep.dct_applicable;
    out.estimates["dct_deviation"] = rep.dct_deviation;
    return out;
}

Outcome run_folner(json& cfg, std::uint64_t seed) {
    const FnSampler f = sampler_from(need(cfg, "sampler"));
    const std::size_t d = f.dim;
    json& params = section(cfg, "params");
    FolnerSpec spec;
    spec.folner = folner_from(section(params, "folner"), d);
    spec.indices = numbers(params, "indices");
    spec.uniform_sched = schedule_from(need(cfg, "schedule"), d, seed);
    spec.quad = quad_from(section(cfg, "quadrature"), d);
    const auto tol = tolerances(cfg, 0.02, 3);
    spec.tol = tol.tol;
    spec.tail = tol.tail;
    spec.slack = tol.slack;
    if (params.contains("L")) spec.L = value_from(params["L"], f.norm);
    spec.real_mode = flag(params, "real_mode", false);

    const auto rep = folner_reduction_check(f, spec);
    Outcome out;
    out.verdict = rep.verdict;
    out.reason = rep.reason;
    out.zero_tolerance = any_zero(tol);
    if (spec.real_mode) {
        if (rep.liminf) out.estimates["liminf"] = inequality_json(*rep.liminf);
        if (rep.limsup) out.estimates["limsup"] = inequality_json(*rep.limsup);
    } else {
        out.estimates["uniform"] = limit_json(rep.uniform);
        out.estimates["folner"] = limit_json(rep.folner);
        out.estimates["deviation"] = rep.deviation;
        add_history(out, "uniform", -1, rep.uniform);
        add_history(out, "folner", -1, rep.folner);
    }
    return out;
}

Ambient ambient_from(const std::string& s) {
    if (s == "lattice") return Ambient::Lattice;
    if (s == "continuum") return Ambient::Continuum;
    throw ConfigError("ambient must be 'lattice' or 'continuum'");
}

SectionMode mode_from(const std::string& s) {
    if (s == "translate") return SectionMode::Translate;
    if (s == "dilate") return SectionMode::Dilate;
    throw ConfigError("mode must be 'translate' or 'dilate'");
}

Outcome run_density(json& cfg, std::uint64_t seed) {
    const DensitySet s = set_from(need(cfg, "set"));
    json& params = section(cfg, "params");
    DensitySpec spec;
    try {
        spec.kind = density_kind_from_string(text(params, "kind", "standard"));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    spec.ambient = ambient_from(text(params, "ambient", "continuum"));
    spec.sched = schedule_from(need(cfg, "schedule"), s.dim, seed);
    spec.step = number(params, "step", 0.01);
    const auto tol = tolerances(cfg, 0.01, 3);
    spec.tol = tol.tol;
    spec.tail = tol.tail;

    const auto res = density_estimate(s, spec);
    Outcome out;
    out.zero_tolerance = any_zero(tol);
    out.estimates["kind"] = to_string(res.kind);
    out.estimates["value"] = res.value();
    out.estimates["lo"] = res.lo;
    out.estimates["hi"] = res.hi;
    out.estimates["path"] = res.path;
    if (res.limit) {
        out.estimates["limit"] = limit_json(*res.limit);
        add_history(out, "density", -1, *res.limit);
        out.verdict = res.limit->converged ? Verdict::Pass : Verdict::Inconclusive;
        if (!res.limit->converged) out.reason = "density did not settle within tolerance";
    } else {
        out.verdict = Verdict::Pass;
    }
    expected_check(out, params, spec.tol, {{"density", VectorValue::scalar(res.value())}});
    return out;
}

Outcome run_sections(json& cfg, std::uint64_t seed) {
    const DensitySet s = set_from(need(cfg, "set"));
    const std::size_t d = s.dim;
    json& params = section(cfg, "params");
    SectionSpec spec;
    spec.mode = mode_from(text(params, "mode", "translate"));
    spec.uniform = flag(params, "uniform", false);
    spec.t_grid = static_cast<std::size_t>(integer(params, "t_grid", 64));
    spec.t = tsampling_from(section(cfg, "t_sampling"), seed);
    spec.c = numbers(params, "c", Vec(d, 1.0));
    spec.discrete_sched = schedule_from(need(cfg, "schedule"), d, seed);
    auto cs = optional_schedule(cfg, "continuous_schedule", d, seed);
    spec.continuous_sched = cs ? *cs : spec.discrete_sched;
    spec.dilation_adapted = flag(params, "dilation_adapted", false);
    spec.step = number(params, "step", 0.01);
    const auto tol = tolerances(cfg, 0.02, 3);
    spec.tol = tol.tol;
    spec.spread_tol = tol.spread_tol;
    spec.limit_tol = tol.limit_tol;
    spec.tail = tol.tail;

    const auto rep = section_density_check(s, spec);
    Outcome out;
    out.verdict = rep.verdict;
    out.reason = rep.reason;
    out.warnings = rep.warnings;
    out.zero_tolerance = any_zero(tol);
    for (std::size_t i = 0; i < rep.per_t.size(); ++i)
        add_history(out, "section_density", static_cast<std::int64_t>(i), rep.per_t[i].estimate);
    add_history(out, "density", -1, rep.continuous_side);
    out.estimates["sections"] = value_json(rep.discrete_side);
    out.estimates["density"] = limit_json(rep.continuous_side);
    out.estimates["deviation"] = rep.deviation;
    out.estimates["constancy_spread"] = rep.constancy_spread;
    expected_check(out, params, spec.tol, {{"sections", rep.discrete_side}, {"density", rep.continuous_side.value}});
    return out;
}

Outcome run_convergence(json& cfg, std::uint64_t seed) {
    const FnSampler f = sampler_from(need(cfg, "sampler"));
    const std::size_t d = f.dim;
    json& params = section(cfg, "params");
    ConvergenceSpec spec;
    spec.mode = mode_from(text(params, "mode", "translate"));
    spec.uniform = flag(params, "uniform", false);
    if (!params.contains("L")) params["L"] = 0.0;
    spec.L = value_from(params["L"], f.norm);
    spec.eps = numbers(params, "eps", {0.2, 0.1, 0.05});
    spec.t_grid = static_cast<std::size_t>(integer(params, "t_grid", 8));
    spec.t = tsampling_from(section(cfg, "t_sampling"), seed);
    spec.c = numbers(params, "c", Vec(d, 1.0));
    spec.discrete_sched = schedule_from(need(cfg, "schedule"), d, seed);
    auto cs = optional_schedule(cfg, "continuous_schedule", d, seed);
    spec.continuous_sched = cs ? *cs : spec.discrete_sched;
    spec.dilation_adapted = flag(params, "dilation_adapted", false);
    spec.step = number(params, "step", 0.01);
    const auto tol = tolerances(cfg, 0.01, 3);
    spec.tol = tol.tol;
    spec.tail = tol.tail;

    const auto rep = density_convergence_check(f, spec);
    Outcome out;
    out.verdict = rep.verdict;
    out.reason = rep.reason;
    out.zero_tolerance = any_zero(tol);
    out.estimates["eps"] = rep.eps;
    out.estimates["densities"] = rep.densities;
    out.estimates["worst_section_density"] = rep.worst_section_density;
    for (std::size_t i = 0; i < rep.eps.size(); ++i) {
        out.series.push_back(row("density", -1, static_cast<std::int64_t>(i), nullptr, VectorValue::scalar(rep.densities[i]), 0.0));
        out.series.push_back(row("worst_section_density", -1, static_cast<std::int64_t>(i), nullptr,
                                 VectorValue::scalar(rep.worst_section_density[i]), 0.0));
    }
    return out;
}

Outcome run_continuous_limit(json& cfg, std::uint64_t seed) {
    const FnSampler f = sampler_from(need(cfg, "sampler"));
    const std::size_t d = f.dim;
    json& params = section(cfg, "params");
    const Scheme scheme = scheme_from(section(cfg, "scheme"), d);
    const ScaleSchedule sched = schedule_from(need(cfg, "schedule"), d, seed);
    const QuadSpec q = quad_from(section(cfg, "quadrature"), d);
    const auto tol = tolerances(cfg, 0.02, 3);
    const auto est = continuous_scheme_limit(f, scheme, sched, q, tol.limit_tol < 0.0 ? tol.tol : tol.limit_tol, tol.tail);
    Outcome out;
    out.zero_tolerance = any_zero(tol);
    const auto sc = check_step(f, q);
    if (!sc.ok) out.warnings.push_back("step check: h |f'| = " + std::to_string(sc.product) + " exceeds 0.1");
    out.estimates["limit"] = limit_json(est);
    add_history(out, "continuous", -1, est);
    out.verdict = est.converged ? Verdict::Pass : Verdict::Inconclusive;
    if (!est.converged) out.reason = "averages did not settle within tolerance";
    expected_check(out, params, tol.tol, {{"limit", est.value}});
    return out;
}

Outcome run_bounds(json& cfg, std::uint64_t seed) {
    const FnSampler f = sampler_from(need(cfg, "sampler"));
    const std::size_t d = f.dim;
    json& params = section(cfg, "params");
    const Scheme scheme = scheme_from(section(cfg, "scheme"), d);
    const ScaleSchedule sched = schedule_from(need(cfg, "schedule"), d, seed);
    const QuadSpec q = quad_from(section(cfg, "quadrature"), d);
    const auto tol = tolerances(cfg, 0.02, 0);
    const auto b = continuous_scheme_bounds(f, scheme, sched, q, tol.tail);
    Outcome out;
    out.estimates["lo"] = b.bounds.lo;
    out.estimates["hi"] = b.bounds.hi;
    out.estimates["residual"] = b.residual;
    add_history(out, "continuous", -1, b.bounds);
    out.verdict = Verdict::Pass;
    if (params.contains("min_lo") && b.bounds.lo < number(params, "min_lo")) {
        out.verdict = Verdict::Fail;
        out.reason = "liminf proxy below min_lo";
    }
    if (params.contains("max_hi") && b.bounds.hi > number(params, "max_hi")) {
        out.verdict = Verdict::Fail;
        out.reason = "limsup proxy above max_hi";
    }
    return out;
}

std::vector<IVec> frequencies(json& params, std::size_t m) {
    if (params.contains("frequencies")) {
        std::vector<IVec> ks;
        for (auto& k : params["frequencies"]) {
            IVec v;
            for (auto& x : k) {
                if (!x.is_number_integer()) throw ConfigError("frequencies must be integer vectors");
                v.push_back(x.get<std::int64_t>());
            }
            if (v.size() != m) throw ConfigError("frequency has the wrong dimension");
            ks.push_back(std::move(v));
        }
        return ks;
    }
    const auto K = integer(params, "max_freq", 3);
    if (K < 1) throw ConfigError("max_freq must be >= 1");
    return frequencies_up_to(m, K);
}

std::vector<Box> windows_from(json& params, std::size_t d) {
    std::vector<Box> out;
    if (params.contains("windows")) {
        for (auto& w : params["windows"]) out.push_back(Box::half_open(numbers(w, "lo"), numbers(w, "hi")));
        for (const auto& b : out)
            if (b.dim() != d) throw ConfigError("window dimension does not match the orbit");
        return out;
    }
    if (d != 1) throw ConfigError("multi-parameter orbits need explicit windows");
    const double L = number(params, "window_length", 1000.0);
    const auto count = integer(params, "window_count", 5);
    const double start = number(params, "window_start", 0.0);
    if (!(L > 0.0) || count < 1) throw ConfigError("window_length must be positive and window_count >= 1");
    for (std::int64_t i = 0; i < count; ++i)
        out.push_back(Box::half_open({start + static_cast<double>(i) * L}, {start + static_cast<double>(i + 1) * L}));
    return out;
}

struct WeylScan {
    double worst = 0.0;
    std::vector<double> per_window;
    IVec worst_k;
};

WeylScan weyl_scan(const Orbit& orbit, const std::vector<IVec>& ks, const std::vector<Box>& windows, const QuadSpec& q) {
    const std::size_t nk = ks.size();
    auto vals = parallel_map<double>(windows.size() * nk, [&](std::size_t i) {
        return weyl_discrepancy(orbit, ks[i % nk], windows[i / nk], q);
    });
    WeylScan s;
    s.per_window.assign(windows.size(), 0.0);
    s.worst_k = ks.front();
    for (std::size_t i = 0; i < vals.size(); ++i) {
        auto& w = s.per_window[i / nk];
        w = std::max(w, vals[i]);
        if (vals[i] > s.worst) {
            s.worst = vals[i];
            s.worst_k = ks[i % nk];
        }
    }
    return s;
}

Outcome run_weyl(json& cfg, std::uint64_t) {
    const Orbit orbit = orbit_from(need(cfg, "sampler"));
    json& params = section(cfg, "params");
    const auto ks = frequencies(params, orbit.m);
    const auto windows = windows_from(params, orbit.coords.dim);
    const QuadSpec q = quad_from(section(cfg, "quadrature"), orbit.coords.dim);
    const auto tol = tolerances(cfg, 0.05, 0);
    const auto scan = weyl_scan(orbit, ks, windows, q);
    Outcome out;
    out.zero_tolerance = tol.tol == 0.0;
    out.estimates["max_discrepancy"] = scan.worst;
    out.estimates["worst_frequency"] = scan.worst_k;
    out.estimates["per_window"] = scan.per_window;
    out.estimates["frequencies"] = ks.size();
    for (std::size_t i = 0; i < windows.size(); ++i)
        out.series.push_back(row("max_discrepancy", -1, static_cast<std::int64_t>(i), &windows[i],
                                 VectorValue::scalar(scan.per_window[i]), 0.0));
    out.verdict = scan.worst <= tol.tol ? Verdict::Pass : Verdict::Fail;
    if (out.verdict == Verdict::Fail) out.reason = "discrepancy exceeds tolerance";
    return out;
}

double circle_distance(double a, double b) {
    const double d = std::abs(a - b);
    return std::min(d, 1.0 - d);
}

double h3_distance(const H3& a, const H3& b) {
    double m = 0.0;
    for (int i = 0; i < 3; ++i) m = std::max(m, circle_distance(a[i], b[i]));
    return m;
}

Outcome run_heisenberg(json& cfg, std::uint64_t seed) {
    json& params = section(cfg, "params");
    const auto samples = integer(params, "samples", 1000);
    const auto per_sample = integer(params, "lattice_per_sample", 4);
    const double coord_range = number(params, "coord_range", 50.0);
    const auto lattice_range = integer(params, "lattice_range", 20);
    const auto tol = tolerances(cfg, 1e-9, 0);
    if (samples < 1 || per_sample < 1 || lattice_range < 0) throw ConfigError("bad Heisenberg sampling parameters");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coord(-coord_range, coord_range);
    std::uniform_int_distribution<std::int64_t> lat(-lattice_range, lattice_range);
    double idem = 0.0;
    double invariance = 0.0;
    double range_violation = 0.0;
    Outcome out;
    for (std::int64_t s = 0; s < samples; ++s) {
        const H3 g{coord(rng), coord(rng), coord(rng)};
        const H3 r = heisenberg_reduce(g);
        for (double v : r) range_violation = std::max(range_violation, v < 0.0 ? -v : (v >= 1.0 ? v : 0.0));
        idem = std::max(idem, h3_distance(heisenberg_reduce(r), r));
        double worst = 0.0;
        for (std::int64_t k = 0; k < per_sample; ++k) {
            const H3 gamma{static_cast<double>(lat(rng)), static_cast<double>(lat(rng)), static_cast<double>(lat(rng))};
            worst = std::max(worst, h3_distance(heisenberg_reduce(heisenberg_mul(gamma, g)), r));
        }
        invariance = std::max(invariance, worst);
        out.series.push_back(row("invariance_error", -1, s, nullptr, VectorValue::scalar(worst), 0.0));
    }
    out.zero_tolerance = tol.tol == 0.0;
    out.estimates["idempotence_error"] = idem;
    out.estimates["invariance_error"] = invariance;
    out.estimates["range_violation"] = range_violation;
    out.verdict = idem <= tol.tol && invariance <= tol.tol && range_violation == 0.0 ? Verdict::Pass : Verdict::Fail;
    if (out.verdict == Verdict::Fail) out.reason = "reduction contract violated";

    if (params.contains("weyl")) {
        json& w = params["weyl"];
        HeisenbergFlow F;
        const Vec gen = numbers(w, "generator");
        const Vec base = numbers(w, "base", {0.0, 0.0, 0.0});
        if (gen.size() != 3 || base.size() != 3) throw ConfigError("generator and base need three numbers");
        F.generator = {gen[0], gen[1], gen[2]};
        F.base = {base[0], base[1], base[2]};
        const Orbit o = project(heisenberg_orbit_sampler(F, Poly::univariate({0.0, 1.0})), 2);
        const auto ks = frequencies(w, 2);
        const auto windows = windows_from(w, 1);
        const QuadSpec q = quad_from(section(w, "quadrature"), 1);
        const double wtol = number(w, "tol", 0.05);
        const auto scan = weyl_scan(o, ks, windows, q);
        out.estimates["base_weyl_max"] = scan.worst;
        out.estimates["base_weyl_worst_frequency"] = scan.worst_k;
        if (scan.worst > wtol && out.verdict == Verdict::Pass) {
            out.verdict = Verdict::Fail;
            out.reason = "base projection discrepancy exceeds tolerance";
        }
    }
    return out;
}

std::function<double(double)> target_cdf(const std::string& name) {
    if (name == "uniform") return [](double u) { return std::clamp(u, 0.0, 1.0); };
    if (name == "product_of_uniforms")
        return [](double u) {
            if (u <= 0.0) return 0.0;
            if (u >= 1.0) return 1.0;
            return u - u * std::log(u);
        };
    throw ConfigError("unknown target distribution '" + name + "'");
}

Outcome run_gp(json& cfg, std::uint64_t) {
    json& params = section(cfg, "params");
    const Gp g = gp_from(need(params, "expr"));
    json& dom = need(params, "domain");
    const Box domain = Box::half_open(numbers(dom, "lo"), numbers(dom, "hi"));
    const double step = number(params, "step", 0.1);
    const double eta = number(params, "eta", 1e-9);
    const auto cdf = target_cdf(text(params, "target", "product_of_uniforms"));
    const double ks_tol = number(params, "ks_tol", 0.02);
    const double flag_tol = number(params, "flag_tol", 1e-4);
    const auto bins = integer(params, "bins", 20);
    if (bins < 1) throw ConfigError("bins must be >= 1");

    GpSamples s;
    try {
        s = gp_sample(g, domain, step, eta);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    } catch (const std::length_error& e) {
        throw ConfigError(e.what());
    }
    if (s.values.empty()) throw ConfigError("domain holds no sample points");
    const auto h = histogram(s.values, 0.0, 1.0, static_cast<std::size_t>(bins), cdf);
    const double ks = ks_distance(std::move(s.values), cdf);
    Outcome out;
    out.zero_tolerance = ks_tol == 0.0;
    const double n = static_cast<double>(h.counts.empty() ? 0 : std::accumulate(h.counts.begin(), h.counts.end(), std::uint64_t{0}));
    out.estimates["ks_distance"] = ks;
    out.estimates["flagged"] = s.flagged;
    out.estimates["flagged_fraction"] = s.flagged_fraction();
    out.estimates["histogram_counts"] = h.counts;
    for (std::size_t j = 0; j < h.counts.size(); ++j) {
        const Box bin = Box::half_open({h.edges[j]}, {h.edges[j + 1]});
        out.series.push_back(row("histogram", -1, static_cast<std::int64_t>(j), &bin,
                                 VectorValue::scalar(n > 0 ? static_cast<double>(h.counts[j]) / n : 0.0),
                                 h.target_mass.empty() ? 0.0 : h.target_mass[j]));
    }
    out.verdict = ks <= ks_tol && s.flagged_fraction() <= flag_tol ? Verdict::Pass : Verdict::Fail;
    if (ks > ks_tol) out.reason = "KS distance exceeds tolerance";
    else if (s.flagged_fraction() > flag_tol) out.reason = "too many samples near a discontinuity";
    return out;
}

Outcome dispatch(const std::string& kind, json& cfg, std::uint64_t seed) {
    if (kind == "additive_transfer") return run_additive(cfg, seed);
    if (kind == "multiplicative_transfer") return run_multiplicative(cfg, seed);
    if (kind == "liminf_limsup") return run_liminf_limsup(cfg, seed);
    if (kind == "ess_limsup") return run_ess_limsup(cfg, seed);
    if (kind == "tauberian") return run_tauberian(cfg, seed);
    if (kind == "fatou_dct") return run_fatou(cfg, seed);
    if (kind == "folner_reduction") return run_folner(cfg, seed);
    if (kind == "density") return run_density(cfg, seed);
    if (kind == "density_sections") return run_sections(cfg, seed);
    if (kind == "density_convergence") return run_convergence(cfg, seed);
    if (kind == "continuous_limit") return run_continuous_limit(cfg, seed);
    if (kind == "bounds") return run_bounds(cfg, seed);
    if (kind == "weyl") return run_weyl(cfg, seed);
    if (kind == "heisenberg_contract") return run_heisenberg(cfg, seed);
    if (kind == "gp_distribution") return run_gp(cfg, seed);
    throw ConfigError("unknown experiment '" + kind + "'");
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

void write_text(const std::filesystem::path& p, const std::string& s) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + p.string());
    f << s;
}

}  // namespace

int exit_code_for(Verdict v) {
    switch (v) {
    case Verdict::Pass: return kExitPass;
    case Verdict::Inconclusive: return kExitInconclusive;
    case Verdict::Fail:
    case Verdict::InvalidInput: return kExitFail;
    }
    return kExitFail;
}

std::string series_csv(const std::vector<SeriesRow>& rows) {
    std::size_t d = 0;
    for (const auto& r : rows) d = std::max({d, r.window_lo.size(), r.window_hi.size()});
    std::string out = "series,t_index,scale_index";
    for (std::size_t i = 0; i < d; ++i) out += ",window_lo_" + std::to_string(i + 1);
    for (std::size_t i = 0; i < d; ++i) out += ",window_hi_" + std::to_string(i + 1);
    out += ",estimate_re,estimate_im,estimate_norm,residual\r\n";
    for (const auto& r : rows) {
        out += csv_field(r.series) + "," + std::to_string(r.t_index) + "," + std::to_string(r.scale_index);
        for (std::size_t i = 0; i < d; ++i) out += "," + (i < r.window_lo.size() ? fmt17(r.window_lo[i]) : "");
        for (std::size_t i = 0; i < d; ++i) out += "," + (i < r.window_hi.size() ? fmt17(r.window_hi[i]) : "");
        out += "," + fmt17(r.estimate.real()) + "," + fmt17(r.estimate.imag()) + "," + fmt17(r.estimate_norm) + "," +
               fmt17(r.residual) + "\r\n";
    }
    return out;
}

RunResult run_experiment(const json& config, const RunOptions& opts) {
    RunResult res;
    json cfg = config;
    res.report = {{"tool", "etl"}, {"version", kVersion}};

    auto finish = [&](int code) {
        res.exit_code = code;
        res.report["exit_code"] = code;
        res.report["verdict"] = to_string(res.verdict);
        res.report["pass"] = code == kExitPass;
        if (!res.error.empty()) res.report["error"] = res.error;
        if (opts.write_files && code != kExitSchema) {
            try {
                json& output = section(cfg, "output");
                const std::filesystem::path dir = opts.out_dir ? *opts.out_dir : text(output, "dir", ".");
                std::filesystem::create_directories(dir);
                write_text(dir / text(output, "report", "report.json"), res.report.dump(2) + "\n");
                write_text(dir / text(output, "series", "series.csv"), series_csv(res.series));
            } catch (const std::exception& e) {
                res.error = e.what();
                res.exit_code = kExitFail;
            }
        }
        return res;
    };

    const auto errors = config::validate(cfg, config::schema());
    if (!errors.empty()) {
        res.verdict = Verdict::InvalidInput;
        for (const auto& e : errors) res.error += (res.error.empty() ? "" : "; ") + e;
        return finish(kExitSchema);
    }
    if (opts.workers > 0) set_workers(opts.workers);

    try {
        if (opts.honor_env_seed)
            if (const char* env = std::getenv("ETL_SEED")) {
                char* end = nullptr;
                const unsigned long long v = std::strtoull(env, &end, 10);
                if (end == env || *end != '\0') throw ConfigError("ETL_SEED must be a non-negative integer");
                cfg["seed"] = v;
                res.report["seed_source"] = "ETL_SEED";
            }
        const auto seed = static_cast<std::uint64_t>(integer(cfg, "seed", 1));
        const std::string kind = text(cfg, "experiment");
        text(cfg, "name", kind);
        Outcome out = dispatch(kind, cfg, seed);
        if (out.zero_tolerance && out.verdict != Verdict::InvalidInput) {
            out.verdict = Verdict::Inconclusive;
            out.reason = "a tolerance of 0 cannot be certified by finite-scale residuals";
        }
        res.verdict = out.verdict;
        res.series = std::move(out.series);
        res.report["experiment"] = kind;
        res.report["name"] = cfg["name"];
        res.report["seed"] = seed;
        res.report["reason"] = out.reason;
        res.report["estimates"] = out.estimates;
        res.report["warnings"] = out.warnings;
        section(cfg, "output");
        text(cfg["output"], "dir", opts.out_dir ? *opts.out_dir : ".");
        text(cfg["output"], "report", "report.json");
        text(cfg["output"], "series", "series.csv");
        res.report["config"] = cfg;
        return finish(exit_code_for(out.verdict));
    } catch (const ConfigError& e) {
        res.verdict = Verdict::InvalidInput;
        res.error = e.what();
        return finish(kExitSchema);
    } catch (const std::exception& e) {
        res.verdict = Verdict::Fail;
        res.error = e.what();
        res.report["config"] = cfg;
        return finish(kExitFail);
    }
}

RunResult run_file(const std::string& path, const RunOptions& opts) {
    std::ifstream f(path);
    if (!f) {
        RunResult r;
        r.error = "cannot read " + path;
        r.exit_code = kExitFail;
        return r;
    }
    json cfg;
    try {
        cfg = json::parse(f);
    } catch (const json::parse_error& e) {
        RunResult r;
        r.error = e.what();
        r.exit_code = kExitSchema;
        r.verdict = Verdict::InvalidInput;
        return r;
    }
    return run_experiment(cfg, opts);
}

}  // namespace etl
