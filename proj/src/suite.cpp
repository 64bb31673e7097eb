#include "etl/suite.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>

#include "etl/parallel.hpp"
#include "etl/runner.hpp"

namespace etl {

namespace {

using nlohmann::json;

constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kSqrt3 = 1.7320508075688772;

json lengths(std::initializer_list<double> ls) { return {{"lengths", json(ls)}}; }

json poly_t(double c) { return json::array({0.0, c}); }

// Criterion configs keyed by a short name. Smoke variants shrink scales only.
json make_config(const std::string& key, bool smoke) {
    json c;
    if (key == "additive") {
        c = {{"experiment", "additive_transfer"},
             {"name", "additive transfer, d=1"},
             {"seed", 1},
             {"sampler", {{"kind", "indicator"}, {"scale", kSqrt2}, {"lo", 0.0}, {"hi", 0.5}}},
             {"scheme", {{"kind", "standard"}}},
             {"schedule", smoke ? lengths({1250, 2500, 5000}) : lengths({12500, 25000, 50000, 100000})},
             {"quadrature", {{"step", 0.01}}},
             {"tolerance", {{"tol", 0.02}, {"tail", 3}}},
             {"params", {{"t_grid", smoke ? 16 : 64}, {"expected", 0.5}, {"expected_tol", 0.02}}}};
    } else if (key == "additive_2d") {
        c = {{"experiment", "additive_transfer"},
             {"name", "additive transfer, d=2, uniform"},
             {"seed", 1},
             {"sampler",
              {{"kind", "product"},
               {"factors",
                {{{"kind", "sawtooth"}, {"scale", 1.0}, {"axis", 0}, {"dim", 2}},
                 {{"kind", "indicator"}, {"scale", kSqrt3}, {"lo", 0.0}, {"hi", 0.5}, {"axis", 1}, {"dim", 2}}}}}},
             {"scheme", {{"kind", "uniform"}}},
             {"schedule", smoke ? lengths({250, 500, 1000}) : lengths({1250, 2500, 5000, 10000})},
             {"quadrature", {{"step", 0.01}}},
             {"tolerance", {{"tol", 0.03}, {"tail", 3}}},
             {"params", {{"t_grid", smoke ? 4 : 8}, {"expected", 0.25}, {"expected_tol", 0.03}}}};
    } else if (key == "multiplicative") {
        c = {{"experiment", "multiplicative_transfer"},
             {"name", "multiplicative transfer, cos(2 pi x^2)"},
             {"seed", 7},
             {"sampler", {{"kind", "trig"}, {"wave", "cos"}, {"freq", 1.0}, {"power", 2}}},
             {"scheme", {{"kind", "standard"}}},
             {"schedule", smoke ? lengths({25000, 50000, 100000}) : lengths({125000, 250000, 500000, 1000000})},
             {"continuous_schedule", smoke ? lengths({125, 250, 500}) : lengths({125, 250, 500, 1000})},
             {"quadrature", {{"step", smoke ? 1e-3 : 1e-4}}},
             {"t_sampling", {{"random", smoke ? 4 : 16}, {"q_max", 100}, {"radius", 1e-6}}},
             {"tolerance", {{"tol", 0.02}, {"spread_tol", 0.03}, {"tail", 3}}},
             {"params", {{"c", {1.0}}, {"expected", 0.0}, {"expected_tol", 0.01}}}};
    } else if (key == "tauberian") {
        c = {{"experiment", "tauberian"},
             {"name", "Tauberian upgrade, running averages of cos(2 pi x)"},
             {"seed", 1},
             {"sequence",
              {{"kind", "running_average"},
               {"of", {{"kind", "trig"}, {"wave", "cos"}, {"freq", 1.0}}},
               {"c", 1.0},
               {"step", 1e-3}}},
             {"schedule", smoke ? lengths({2500, 5000, 10000}) : lengths({12500, 25000, 50000, 100000})},
             {"tolerance", {{"tol", 1e-3}, {"tail", 3}}},
             {"params", {{"alpha", 3.0}, {"spot_checks", 64}}}};
    } else if (key == "tauberian_negative") {
        c = {{"experiment", "tauberian"},
             {"name", "Tauberian negative control, sin(2 pi log n)"},
             {"seed", 1},
             {"sequence", {{"kind", "log_sine"}}},
             {"schedule", smoke ? lengths({2500, 5000, 10000}) : lengths({12500, 25000, 50000, 100000})},
             {"tolerance", {{"tol", 1e-3}, {"tail", 3}}},
             {"params", {{"alpha", 7.0}, {"spot_checks", 64}}}};
    } else if (key == "fatou") {
        c = {{"experiment", "fatou_dct"},
             {"name", "Fatou and dominated convergence, e^{2 pi i n x}"},
             {"params", {{"family", "exp"}, {"grid", 1000}, {"n_min", 1}, {"n_max", 999}, {"bound", 1.0}}},
             {"tolerance", {{"tol", 0.01}, {"tail", 0}}}};
    } else if (key == "ess_limsup") {
        c = {{"experiment", "ess_limsup"},
             {"name", "ess-lim transfer, cos(2 pi x)"},
             {"seed", 3},
             {"sampler", {{"kind", "trig"}, {"wave", "cos"}, {"freq", 1.0}}},
             {"scheme", {{"kind", "standard"}}},
             {"schedule", smoke ? lengths({50, 100, 200}) : lengths({125, 250, 500, 1000})},
             {"continuous_schedule", smoke ? lengths({2500, 5000, 10000}) : lengths({1250, 2500, 5000, 10000})},
             {"quadrature", {{"step", 0.01}}},
             {"t_sampling", {{"random", smoke ? 4 : 8}, {"q_max", 100}}},
             {"tolerance", {{"tol", 0.02}, {"continuous_tol", 0.01}, {"tail", 3}}},
             {"params", {{"L", 0.0}, {"deltas", {1.0, 0.5, 0.25, 0.125}}, {"dilation_adapted", true}}}};
    } else if (key == "sections_translate") {
        c = {{"experiment", "density_sections"},
             {"name", "density sections, translate mode"},
             {"set", {{"kind", "periodic"}, {"period", 1.0}, {"lo", 0.0}, {"hi", 0.5}}},
             {"schedule", smoke ? lengths({250, 500, 1000}) : lengths({1000, 2000, 4000, 8000})},
             {"tolerance", {{"tol", 0.005}, {"tail", 3}}},
             {"params", {{"mode", "translate"}, {"t_grid", 64}, {"expected", 0.5}, {"expected_tol", 0.005}}}};
    } else if (key == "sections_dilate") {
        c = {{"experiment", "density_sections"},
             {"name", "density sections, dilate mode"},
             {"seed", 5},
             {"set", {{"kind", "frac_window"}, {"scale", kSqrt2}, {"lo", 0.0}, {"hi", 1.0 / 3.0}}},
             {"schedule", smoke ? lengths({2500, 5000, 10000}) : lengths({12500, 25000, 50000, 100000})},
             {"continuous_schedule", smoke ? lengths({2500, 5000, 10000}) : lengths({12500, 25000, 50000, 100000})},
             {"t_sampling", {{"random", smoke ? 4 : 16}, {"q_max", 100}}},
             {"tolerance", {{"tol", 0.02}, {"spread_tol", 0.02}, {"tail", 3}}},
             {"params", {{"mode", "dilate"}, {"c", {1.0}}, {"expected", 1.0 / 3.0}, {"expected_tol", 0.02}}}};
    } else if (key == "weyl") {
        c = {{"experiment", "weyl"},
             {"name", "well-distribution of (t sqrt2, t^2 sqrt3)"},
             {"sampler",
              {{"kind", "torus_orbit"},
               {"alpha", {kSqrt2, kSqrt3}},
               {"omega", {0.0, 0.0}},
               {"polys", {poly_t(1.0), json::array({0.0, 0.0, 1.0})}}}},
             {"quadrature", {{"step", 0.01}, {"rule", "linear_phase"}}},
             {"tolerance", {{"tol", 0.05}}},
             {"params",
              {{"max_freq", 3}, {"window_length", 1000.0}, {"window_count", smoke ? 2 : 5}, {"window_start", 0.0}}}};
    } else if (key == "heisenberg") {
        c = {{"experiment", "heisenberg_contract"},
             {"name", "Heisenberg reduction contract and nilflow base projection"},
             {"seed", 11},
             {"tolerance", {{"tol", 1e-9}}},
             {"params",
              {{"samples", 1000},
               {"lattice_per_sample", 4},
               {"weyl",
                {{"generator", {kSqrt2, kSqrt3, 0.5}},
                 {"base", {0.1, 0.2, 0.3}},
                 {"max_freq", 3},
                 {"window_length", smoke ? 1000.0 : 10000.0},
                 {"window_count", 1},
                 {"quadrature", {{"step", 0.01}, {"rule", "linear_phase"}}},
                 {"tol", 0.05}}}}}};
    } else if (key == "multiple" || key == "multiple_cross") {
        const json sampler = {{"kind", "multiple_average"},
                              {"flows", {{{"kind", "torus"}, {"alpha", {kSqrt2}}}}},
                              {"polys", {poly_t(1.0), poly_t(2.0)}},
                              {"observables", {{{"kind", "cos"}, {"k", {1}}}, {{"kind", "cos"}, {"k", {1}}}}},
                              {"grid_per_axis", 1024}};
        const json cont = smoke ? lengths({250, 500, 1000}) : lengths({1250, 2500, 5000, 10000});
        if (key == "multiple") {
            c = {{"experiment", "continuous_limit"},
                 {"name", "multiple averages, r=2 torus"},
                 {"sampler", sampler},
                 {"scheme", {{"kind", "standard"}}},
                 {"schedule", cont},
                 {"quadrature", {{"step", 0.0037}}},
                 {"tolerance", {{"tol", 0.02}, {"tail", 3}}},
                 {"params", {{"expected", 0.0}, {"expected_tol", 0.02}}}};
        } else {
            c = {{"experiment", "multiplicative_transfer"},
                 {"name", "multiple averages, multiplicative cross-check"},
                 {"seed", 13},
                 {"sampler", sampler},
                 {"scheme", {{"kind", "standard"}}},
                 {"schedule", smoke ? lengths({2500, 5000, 10000}) : lengths({12500, 25000, 50000, 100000})},
                 {"continuous_schedule", cont},
                 {"quadrature", {{"step", 0.0037}}},
                 {"t_sampling", {{"random", 8}, {"q_max", 100}}},
                 {"tolerance", {{"tol", 0.03}, {"spread_tol", 0.03}, {"tail", 3}}},
                 {"params", {{"c", {1.0}}}}};
        }
    } else if (key == "szemeredi") {
        c = {{"experiment", "bounds"},
             {"name", "intersection measures, A = [0, 1/4), p = (t, 2t)"},
             {"sampler",
              {{"kind", "intersection_measure"},
               {"flow", {{"kind", "torus"}, {"alpha", {kSqrt2}}}},
               {"polys", {poly_t(1.0), poly_t(2.0)}},
               {"set", {{"kind", "periodic"}, {"period", 1.0}, {"lo", 0.0}, {"hi", 0.25}}},
               {"grid_per_axis", 1024}}},
             {"scheme", {{"kind", "standard"}}},
             {"schedule", smoke ? lengths({250, 500, 1000}) : lengths({1250, 2500, 5000, 10000})},
             {"quadrature", {{"step", 0.0236}}},
             {"tolerance", {{"tail", 0}}},
             {"params", {{"min_lo", 0.005}}}};
    } else if (key == "gp") {
        const json frac2 = {{"op", "frac"}, {"arg", {{"op", "poly"}, {"poly", poly_t(kSqrt2)}}}};
        const json frac3 = {{"op", "frac"}, {"arg", {{"op", "poly"}, {"poly", poly_t(kSqrt3)}}}};
        c = {{"experiment", "gp_distribution"},
             {"name", "generalized polynomial {sqrt2 t}{sqrt3 t}"},
             {"params",
              {{"expr", {{"op", "mul"}, {"args", {frac2, frac3}}}},
               {"domain", {{"lo", {0.0}}, {"hi", {smoke ? 1e4 : 1e6}}}},
               {"step", 0.1},
               {"eta", 1e-9},
               {"target", "product_of_uniforms"},
               {"ks_tol", 0.02},
               {"flag_tol", 1e-4},
               {"bins", 20}}}};
    } else {
        throw std::invalid_argument("unknown criterion config '" + key + "'");
    }
    return c;
}

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

RunResult run_in_memory(const json& cfg) {
    RunOptions o;
    o.write_files = false;
    o.honor_env_seed = false;
    return run_experiment(cfg, o);
}

std::string num(double v, const char* f = "%.3g") {
    char buf[48];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

const json& est(const RunResult& r) {
    static const json empty = json::object();
    return r.report.contains("estimates") ? r.report["estimates"] : empty;
}

double get(const json& j, std::initializer_list<const char*> path, double def = std::nan("")) {
    const json* p = &j;
    for (const char* k : path) {
        if (!p->is_object() || !p->contains(k)) return def;
        p = &(*p)[k];
    }
    return p->is_number() ? p->get<double>() : def;
}

std::string failure_note(const RunResult& r) {
    if (!r.error.empty()) return " [error: " + r.error + "]";
    const std::string reason = r.report.value("reason", "");
    return reason.empty() ? "" : " [" + reason + "]";
}

CriterionResult c1(bool smoke) {
    Timer t;
    const auto r = run_in_memory(make_config("additive", smoke));
    const auto& e = est(r);
    const double dev = get(e, {"deviation"});
    const double disc = get(e, {"discrete_side", "re"});
    const double cont = get(e, {"continuous_side", "value", "re"});
    const double s = t.seconds();
    CriterionResult c{1, "additive transfer, indicator({x sqrt2} < 1/2)", false, "", s};
    c.pass = r.exit_code == kExitPass && dev <= 0.02 && std::abs(disc - 0.5) <= 0.02 && std::abs(cont - 0.5) <= 0.02 &&
             s <= 60.0;
    c.detail = "deviation " + num(dev) + ", integrated discrete " + num(disc, "%.5f") + ", continuous " +
               num(cont, "%.5f") + failure_note(r);
    return c;
}

CriterionResult c2(bool smoke) {
    Timer t;
    const auto r = run_in_memory(make_config("additive_2d", smoke));
    const double dev = get(est(r), {"deviation"});
    CriterionResult c{2, "additive transfer, d=2 uniform scheme", false, "", t.seconds()};
    c.pass = r.exit_code == kExitPass && dev <= 0.03;
    c.detail = "deviation " + num(dev) + failure_note(r);
    return c;
}

CriterionResult c3(bool smoke) {
    Timer t;
    const auto r = run_in_memory(make_config("multiplicative", smoke));
    const auto& e = est(r);
    const double spread = get(e, {"constancy_spread"});
    const double dev = get(e, {"deviation"});
    const double cont = get(e, {"continuous_side", "value", "norm"});
    const double s = t.seconds();
    CriterionResult c{3, "multiplicative transfer, cos(2 pi x^2)", false, "", s};
    c.pass = r.exit_code == kExitPass && spread <= 0.03 && dev <= 0.02 && cont <= 0.01 && s <= 300.0;
    c.detail = "spread " + num(spread) + ", deviation " + num(dev) + ", |continuous| " + num(cont) + failure_note(r);
    return c;
}

CriterionResult c4(bool smoke) {
    Timer t;
    const auto r = run_in_memory(make_config("tauberian", smoke));
    const auto n = run_in_memory(make_config("tauberian_negative", smoke));
    const double dev = get(est(r), {"deviation"});
    const double ratio = get(est(r), {"worst_increment_ratio"});
    CriterionResult c{4, "Tauberian upgrade with negative control", false, "", t.seconds()};
    c.pass = r.exit_code == kExitPass && dev <= 1e-3 && ratio <= 3.0 && n.verdict == Verdict::Inconclusive;
    c.detail = "|tail - Cesaro| " + num(dev) + ", increment ratio " + num(ratio) + ", control " + to_string(n.verdict) +
               failure_note(r);
    return c;
}

CriterionResult c5(bool smoke) {
    Timer t;
    const auto r = run_in_memory(make_config("fatou", smoke));
    const auto& e = est(r);
    const double lhs = get(e, {"fatou", "lhs"});
    const double rhs = get(e, {"fatou", "rhs"});
    const double margin = get(e, {"fatou", "margin"});
    CriterionResult c{5, "Fatou inequality for e^{2 pi i n x}", false, "", t.seconds()};
    c.pass = r.exit_code == kExitPass && lhs <= 0.01 && std::abs(rhs - 1.0) <= 1e-9 && margin >= 0.98;
    c.detail = "tail max |int f_n| " + num(lhs) + ", int limsup |f_n| " + num(rhs, "%.12f") + ", margin " +
               num(margin, "%.4f") + failure_note(r);
    return c;
}

CriterionResult c6(bool smoke) {
    Timer t;
    const auto r = run_in_memory(make_config("ess_limsup", smoke));
    const auto& e = est(r);
    const auto levels = e.value("levels", std::vector<double>{});
    const double last = levels.empty() ? std::nan("") : levels.back();
    const double cont = get(e, {"continuous_side", "value", "norm"});
    CriterionResult c{6, "ess-lim transfer, cos(2 pi x)", false, "", t.seconds()};
    c.pass = r.exit_code == kExitPass && e.value("monotone", false) && last <= 0.02 && cont <= 0.01;
    c.detail = "final level " + num(last) + ", monotone " + (e.value("monotone", false) ? "yes" : "no") +
               ", |continuous| " + num(cont) + failure_note(r);
    return c;
}

CriterionResult c7(bool smoke) {
    Timer t;
    const auto a = run_in_memory(make_config("sections_translate", smoke));
    const auto b = run_in_memory(make_config("sections_dilate", smoke));
    const double sec = get(est(a), {"sections", "re"});
    const double dens = get(est(a), {"density", "value", "re"});
    const double spread = get(est(b), {"constancy_spread"});
    const double dd = get(est(b), {"density", "value", "re"});
    CriterionResult c{7, "density of sections", false, "", t.seconds()};
    c.pass = a.exit_code == kExitPass && b.exit_code == kExitPass && std::abs(sec - 0.5) <= 0.005 &&
             std::abs(dens - 0.5) <= 0.005 && spread <= 0.02 && std::abs(dd - 1.0 / 3.0) <= 0.02;
    c.detail = "translate " + num(sec, "%.4f") + " vs " + num(dens, "%.4f") + "; dilate spread " + num(spread) +
               ", D " + num(dd, "%.4f") + failure_note(a.exit_code ? a : b);
    return c;
}

CriterionResult c8(bool smoke) {
    Timer t;
    const auto r = run_in_memory(make_config("weyl", smoke));
    const double worst = get(est(r), {"max_discrepancy"});
    CriterionResult c{8, "Weyl discrepancy of (t sqrt2, t^2 sqrt3)", false, "", t.seconds()};
    c.pass = r.exit_code == kExitPass && worst <= 0.05;
    c.detail = "max over windows and 0 < |k| <= 3: " + num(worst) + failure_note(r);
    return c;
}

CriterionResult c9(bool smoke) {
    Timer t;
    const auto r = run_in_memory(make_config("heisenberg", smoke));
    const auto& e = est(r);
    const double idem = get(e, {"idempotence_error"});
    const double inv = get(e, {"invariance_error"});
    const double w = get(e, {"base_weyl_max"});
    CriterionResult c{9, "Heisenberg reduction and nilflow projection", false, "", t.seconds()};
    c.pass = r.exit_code == kExitPass && idem <= 1e-9 && inv <= 1e-9 && w <= 0.05;
    c.detail = "idempotence " + num(idem) + ", invariance " + num(inv) + ", base Weyl " + num(w) + failure_note(r);
    return c;
}

CriterionResult c10(bool smoke) {
    Timer t;
    const auto a = run_in_memory(make_config("multiple", smoke));
    const auto b = run_in_memory(make_config("multiple_cross", smoke));
    const double norm = get(est(a), {"limit", "value", "norm"});
    const double dev = get(est(b), {"deviation"});
    const double spread = get(est(b), {"constancy_spread"});
    CriterionResult c{10, "multiple averages, r=2 torus", false, "", t.seconds()};
    c.pass = a.exit_code == kExitPass && b.exit_code == kExitPass && norm <= 0.02 && dev <= 0.03 && spread <= 0.03;
    c.detail = "||limit||_1 " + num(norm) + ", cross-check deviation " + num(dev) + ", spread " + num(spread) +
               failure_note(a.exit_code ? a : b);
    return c;
}

// mu(A cap (A - u) cap (A - 2u)) averaged over u in [0,1), A = [0, 1/4),
// by a plain midpoint double sum.
double szemeredi_oracle(std::size_t n) {
    auto in = [](double x) {
        x -= std::floor(x);
        return x < 0.25;
    };
    const std::uint64_t total = static_cast<std::uint64_t>(n) * n;
    auto s = block_reduce(total, 1, [&](std::uint64_t b, std::uint64_t e, std::span<Complex> acc) {
        std::uint64_t hits = 0;
        for (std::uint64_t i = b; i < e; ++i) {
            const double u = (static_cast<double>(i / n) + 0.5) / static_cast<double>(n);
            const double w = (static_cast<double>(i % n) + 0.5) / static_cast<double>(n);
            if (in(w) && in(w + u) && in(w + 2 * u)) ++hits;
        }
        acc[0] += static_cast<double>(hits);
    });
    return s[0].real() / static_cast<double>(total);
}

CriterionResult c11(bool smoke) {
    Timer t;
    const auto r = run_in_memory(make_config("szemeredi", smoke));
    const double lo = get(est(r), {"lo"});
    const double oracle = szemeredi_oracle(smoke ? 1000 : 10000);
    CriterionResult c{11, "intersection-measure positivity, r=2", false, "", t.seconds()};
    c.pass = r.exit_code == kExitPass && lo >= 0.005 && oracle >= 0.01;
    c.detail = "liminf proxy " + num(lo, "%.5f") + ", quadrature oracle " + num(oracle, "%.5f") + failure_note(r);
    return c;
}

CriterionResult c12(bool smoke) {
    Timer t;
    const auto r = run_in_memory(make_config("gp", smoke));
    const double ks = get(est(r), {"ks_distance"});
    const double flagged = get(est(r), {"flagged_fraction"});
    CriterionResult c{12, "distribution of {sqrt2 t}{sqrt3 t}", false, "", t.seconds()};
    c.pass = r.exit_code == kExitPass && ks <= 0.02 && flagged <= 1e-4;
    c.detail = "KS " + num(ks) + ", flagged fraction " + num(flagged) + failure_note(r);
    return c;
}

CriterionResult c13(bool smoke) {
    Timer t;
    const json cfg = make_config("multiplicative", smoke);
    const std::size_t saved = workers();
    set_workers(1);
    const auto a = run_in_memory(cfg);
    set_workers(4);
    const auto b = run_in_memory(cfg);
    set_workers(saved);
    const bool same = a.report.contains("estimates") && a.report["estimates"].dump() == b.report["estimates"].dump();
    CriterionResult c{13, "determinism across worker counts", false, "", t.seconds()};
    c.pass = same && a.exit_code == b.exit_code;
    c.detail = std::string("estimates ") + (same ? "bit-identical" : "differ") + " for 1 vs 4 workers";
    return c;
}

}  // namespace

bool known_suite(const std::string& name) { return name == "acceptance" || name == "smoke"; }

json criterion_config(const std::string& suite, const std::string& key) {
    if (!known_suite(suite)) throw std::invalid_argument("unknown suite '" + suite + "'");
    return make_config(key, suite == "smoke");
}

std::vector<Criterion> suite_criteria(const std::string& name) {
    if (!known_suite(name)) throw std::invalid_argument("unknown suite '" + name + "'");
    const bool smoke = name == "smoke";
    using Fn = CriterionResult (*)(bool);
    const std::vector<std::pair<Fn, const char*>> all = {
        {c1, "additive transfer"},          {c2, "additive transfer, d=2"},
        {c3, "multiplicative transfer"},    {c4, "Tauberian"},
        {c5, "Fatou / DCT"},                {c6, "ess-lim transfer"},
        {c7, "density sections"},           {c8, "well-distribution"},
        {c9, "Heisenberg contract"},        {c10, "multiple averages"},
        {c11, "intersection positivity"},   {c12, "generalized polynomials"},
        {c13, "determinism"}};
    std::vector<Criterion> out;
    for (std::size_t i = 0; i < all.size(); ++i) {
        const Fn f = all[i].first;
        out.push_back({static_cast<int>(i + 1), all[i].second, [f, smoke] { return f(smoke); }});
    }
    return out;
}

std::string format_result(const CriterionResult& r) {
    char head[64];
    std::snprintf(head, sizeof head, "criterion %2d %s %8.1fs  ", r.id, r.pass ? "PASS" : "FAIL", r.seconds);
    return std::string(head) + r.title + ": " + r.detail;
}

int run_suite(const std::string& name, const std::string& out_dir, const std::function<void(const std::string&)>& log) {
    if (!known_suite(name)) {
        log("unknown suite '" + name + "' (expected acceptance or smoke)");
        return kExitSchema;
    }
    json report = {{"suite", name}, {"criteria", json::array()}};
    std::vector<int> failed;
    Timer total;
    for (const auto& c : suite_criteria(name)) {
        CriterionResult r;
        try {
            r = c.run();
        } catch (const std::exception& e) {
            r = {c.id, c.title, false, std::string("exception: ") + e.what(), 0.0};
        }
        log(format_result(r));
        report["criteria"].push_back(
            {{"id", r.id}, {"title", r.title}, {"pass", r.pass}, {"detail", r.detail}, {"seconds", r.seconds}});
        if (!r.pass) failed.push_back(r.id);
    }
    report["seconds"] = total.seconds();
    report["pass"] = failed.empty();
    report["failed"] = failed;
    std::filesystem::create_directories(out_dir);
    std::ofstream(std::filesystem::path(out_dir) / "suite_report.json") << report.dump(2) << "\n";
    if (failed.empty()) {
        log("suite " + name + ": all criteria passed");
        return kExitPass;
    }
    std::string ids;
    for (int id : failed) ids += (ids.empty() ? "" : ", ") + std::to_string(id);
    log("suite " + name + ": failed criteria " + ids);
    return kExitFail;
}

}  // namespace etl
