#include <doctest.h>

#include <cmath>

#include "etl/density.hpp"
#include "etl/samplers.hpp"
#include "oracles.hpp"

using namespace etl;

namespace {
DensitySpec spec_of(DensityKind kind, Ambient ambient, ScaleSchedule sched, double tol = 1e-3) {
    DensitySpec s;
    s.kind = kind;
    s.ambient = ambient;
    s.sched = std::move(sched);
    s.tol = tol;
    return s;
}
}  // namespace

TEST_CASE("density: alternating unit intervals") {
    const auto S = sets::periodic_intervals(2, 0, 1);
    const auto r = density_estimate(S, spec_of(DensityKind::Standard, Ambient::Continuum,
                                               ScaleSchedule::of_lengths({2500.5, 5000.25, 10000.75}, 1)));
    REQUIRE(r.limit.has_value());
    CHECK(r.limit->converged);
    CHECK(r.value() == doctest::Approx(0.5).epsilon(1e-3));
    CHECK(r.path == "exact");
    // Exact count at b = 10000.75: 5000 full intervals plus 0.75.
    CHECK(window_density(S, Box::closed({0}, {10000.75}), Ambient::Continuum, 0.01) ==
          doctest::Approx(5000.75 / 10000.75).epsilon(1e-14));
}

TEST_CASE("density: even integers") {
    const auto S = sets::residue_class(2, 0);
    const auto r = density_estimate(S, spec_of(DensityKind::Standard, Ambient::Lattice,
                                               ScaleSchedule::of_lengths({1001, 2001, 4001}, 1)));
    CHECK(r.value() == doctest::Approx(0.5).epsilon(1e-3));
    CHECK(r.path == "lattice");
}

TEST_CASE("density: geometric blocks have distinct upper and lower densities") {
    const auto S = sets::geometric_blocks(2, 1, 1.5);
    std::vector<Box> boxes;
    for (int k = 6; k < 30; ++k) {
        boxes.push_back(Box::origin({std::ldexp(1.0, k)}));
        boxes.push_back(Box::origin({1.5 * std::ldexp(1.0, k)}));
    }
    auto sched = ScaleSchedule::of_boxes(boxes);
    const auto up = density_estimate(S, spec_of(DensityKind::Upper, Ambient::Continuum, sched));
    const auto lo = density_estimate(S, spec_of(DensityKind::Lower, Ambient::Continuum, sched));
    // |S cap (0, 2^k]| = (2^k - 1) / 2 and |S cap (0, 1.5 2^k]| = 2^k - 1/2.
    CHECK(up.value() == doctest::Approx(2.0 / 3.0).epsilon(0.02));
    CHECK(lo.value() == doctest::Approx(1.0 / 2.0).epsilon(0.02));
    CHECK(lo.value() <= up.value());
}

TEST_CASE("density ordering for {0,1}-valued sets") {
    const std::vector<DensitySet> S{sets::geometric_blocks(2, 1, 1.5), sets::periodic_intervals(3, 0.5, 2),
                                    sets::frac_window(oracle::kSqrt2, 0.1, 0.4)};
    auto sched = ScaleSchedule::geometric({100}, 1.7, 10);
    for (const auto& s : S) {
        const double lower_uniform = density_estimate(s, spec_of(DensityKind::LowerUniform, Ambient::Continuum, sched)).value();
        const auto standard = density_estimate(s, spec_of(DensityKind::Standard, Ambient::Continuum, sched));
        const double upper_uniform = density_estimate(s, spec_of(DensityKind::UpperUniform, Ambient::Continuum, sched)).value();
        CHECK(0.0 <= lower_uniform);
        CHECK(lower_uniform <= standard.lo + 1e-12);
        CHECK(standard.lo <= standard.hi);
        CHECK(standard.hi <= upper_uniform + 1e-12);
        CHECK(upper_uniform <= 1.0);
    }
}

TEST_CASE("density: complement identity") {
    const auto S = sets::frac_window(oracle::kSqrt3, 0.2, 0.45);
    auto sched = ScaleSchedule::of_lengths({2000, 4000, 8000}, 1);
    auto spec = spec_of(DensityKind::Standard, Ambient::Continuum, sched, 0.01);
    spec.step = 0.005;
    const auto a = density_estimate(S, spec);
    const auto b = density_estimate(sets::complement(S), spec);
    REQUIRE(a.limit->converged);
    REQUIRE(b.limit->converged);
    CHECK(std::fabs(a.value() + b.value() - 1.0) <= a.limit->residual + b.limit->residual + 1e-9);
    CHECK(b.path == "quadrature");
}

TEST_CASE("exact form agrees with membership") {
    oracle::Rng rng(13);
    const std::vector<DensitySet> S{sets::periodic_intervals(1.7, 0.2, 0.9), sets::geometric_blocks(3, 1, 2),
                                    sets::frac_window(oracle::kSqrt2, 0.25, 0.5)};
    for (const auto& s : S) {
        for (int trial = 0; trial < 30; ++trial) {
            const double a = rng.uniform(0, 300), b = a + rng.uniform(1, 50);
            const Box w = Box::closed({a}, {b});
            const double exact = window_density(s, w, Ambient::Continuum, 1e-3);
            // Brute-force midpoint share with a step fine enough for the edges.
            const int n = 200000;
            int hits = 0;
            for (int i = 0; i < n; ++i) {
                const double x = a + (b - a) * (i + 0.5) / n;
                hits += s.contains(std::span<const double>(&x, 1)) ? 1 : 0;
            }
            CHECK(std::fabs(exact - static_cast<double>(hits) / n) < 1e-3);
            for (const auto& cell : s.exact_form(w))
                for (double f : {0.25, 0.5, 0.75}) {
                    const double x = cell.lo[0] + f * cell.edge(0);
                    CHECK(s.contains(std::span<const double>(&x, 1)));
                }
        }
    }
}

TEST_CASE("section density: translate mode on half-unit intervals") {
    SectionSpec s;
    s.mode = SectionMode::Translate;
    s.t_grid = 64;
    s.discrete_sched = ScaleSchedule::of_lengths({250, 500, 1000}, 1);
    s.continuous_sched = s.discrete_sched;
    s.tol = 0.005;
    const auto r = section_density_check(sets::periodic_intervals(1, 0, 0.5), s);
    for (const auto& p : r.per_t) CHECK(p.estimate.value.real() == (p.t[0] < 0.5 ? 1.0 : 0.0));
    CHECK(r.discrete_side.real() == doctest::Approx(0.5));
    CHECK(r.pass());
}

TEST_CASE("section density: the whole half-line") {
    SectionSpec s;
    s.mode = SectionMode::Translate;
    s.t_grid = 4;
    s.discrete_sched = ScaleSchedule::of_lengths({100, 200, 400}, 1);
    s.continuous_sched = s.discrete_sched;
    const auto r = section_density_check(sets::everything(1), s);
    CHECK(r.pass());
    for (const auto& p : r.per_t) CHECK(p.estimate.value.real() == 1.0);
}

TEST_CASE("section density: dilate mode on an equidistributed window") {
    SectionSpec s;
    s.mode = SectionMode::Dilate;
    s.c = {1.0};
    s.t.random = 6;
    s.t.seed = 5;
    s.t.exclusion_q_max = 100;
    s.discrete_sched = ScaleSchedule::of_lengths({5000, 10000, 20000}, 1);
    s.continuous_sched = s.discrete_sched;
    s.tol = 0.02;
    s.spread_tol = 0.02;
    const auto S = sets::frac_window(oracle::kSqrt2, 0, 1.0 / 3);
    const auto r = section_density_check(S, s);
    CHECK(r.pass());
    CHECK(r.constancy_spread <= 0.02);
    for (const auto& a : r.per_t) {
        const double ref = oracle::frac_count_share(static_cast<long double>(a.t[0]) * oracle::kSqrt2, 0, 1.0L / 3, 20000);
        CHECK(a.estimate.value.real() == doctest::Approx(ref).epsilon(1e-9));
        for (const auto& b : r.per_t) CHECK(distance(a.estimate.value, b.estimate.value) <= 2 * s.tol);
    }
    CHECK(std::fabs(r.continuous_side.value.real() - 1.0 / 3) < 0.02);
}

TEST_CASE("convergence in density: bounded exceptional sets") {
    ConvergenceSpec s;
    s.L = VectorValue::scalar(0.0);
    s.discrete_sched = ScaleSchedule::of_lengths({1000, 2000, 4000}, 1);
    s.continuous_sched = s.discrete_sched;
    s.tol = 0.01;
    const auto decay = density_convergence_check(samplers::decay(), s);
    CHECK(decay.verdict == Verdict::Pass);
    for (double d : decay.densities) CHECK(d <= 0.01);

    s.uniform = true;
    const auto bump = density_convergence_check(
        samplers::scalar(1, [](std::span<const double> x) { return Complex(x[0] < 3 ? 1.0 : 0.0); }, 1), s);
    CHECK(bump.verdict == Verdict::Pass);
}

TEST_CASE("convergence in density: negative control") {
    ConvergenceSpec s;
    s.L = VectorValue::scalar(0.0);
    s.discrete_sched = ScaleSchedule::of_lengths({1000, 2000, 4000}, 1);
    s.continuous_sched = s.discrete_sched;
    s.tol = 0.01;
    s.step = 0.002;
    const double delta = 0.1;
    const auto f = samplers::frac_indicator(oracle::kSqrt2, 0, delta);
    const auto r = density_convergence_check(f, s);
    CHECK(r.verdict != Verdict::Pass);
    for (double d : r.densities) CHECK(d == doctest::Approx(delta).epsilon(0.05));
}

TEST_CASE("density kind names round-trip") {
    for (auto k : {DensityKind::Standard, DensityKind::Upper, DensityKind::Lower, DensityKind::Uniform,
                   DensityKind::UpperUniform, DensityKind::LowerUniform})
        CHECK(density_kind_from_string(to_string(k)) == k);
}
