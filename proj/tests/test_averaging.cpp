#include <doctest.h>

#include <cmath>

#include "etl/averaging.hpp"
#include "etl/samplers.hpp"
#include "oracles.hpp"

using namespace etl;

namespace {
SeqSampler exp_seq(double t) {
    return samplers::scalar_seq(
        1, [t](std::span<const std::int64_t> n) { return std::polar(1.0, 2 * M_PI * t * static_cast<double>(n[0])); },
        1.0);
}
}  // namespace

TEST_CASE("discrete_average: constants, cancellation and geometric sums") {
    const auto one = samplers::scalar_seq(1, [](std::span<const std::int64_t>) { return Complex(2.5, -1); }, 3);
    CHECK(distance(discrete_average(one, Box::origin({17})), VectorValue::scalar({2.5, -1})) < 1e-15);

    const auto alt = samplers::scalar_seq(
        1, [](std::span<const std::int64_t> n) { return Complex(n[0] % 2 == 0 ? 1.0 : -1.0); }, 1);
    CHECK(discrete_average(alt, Box::origin({2000})).norm() == 0.0);

    const auto third = discrete_average(exp_seq(1.0 / 3), Box::origin({300}));
    const auto ref = oracle::exp_sum_average(1.0L / 3, 300);
    CHECK(std::abs(third[0] - Complex(static_cast<double>(ref.real()), static_cast<double>(ref.imag()))) < 1e-12);
    CHECK(third.norm() < 1e-12);

    for (double t : {0.1, oracle::kSqrt2, 0.377}) {
        const auto got = discrete_average(exp_seq(t), Box::origin({997}))[0];
        const auto want = oracle::exp_sum_average(t, 997);
        CHECK(std::abs(got - Complex(static_cast<double>(want.real()), static_cast<double>(want.imag()))) < 1e-11);
    }
}

TEST_CASE("discrete_average: w(b) normalizer") {
    const auto one = samplers::scalar_seq(2, [](std::span<const std::int64_t>) { return Complex(1); }, 1);
    CHECK(discrete_average(one, Box::origin({7, 5})).real() == doctest::Approx(1.0).epsilon(1e-15));
    // (0, 7.5] x (0, 5.5] holds 35 points but has volume 41.25.
    CHECK(discrete_average(one, Box::origin({7.5, 5.5})).real() == doctest::Approx(35.0 / 41.25).epsilon(1e-15));
    CHECK(discrete_average(one, Box::origin({0.5, 3})).norm() == 0.0);
}

TEST_CASE("continuous_average: worked values") {
    const auto c = samplers::constant(VectorValue::scalar(3.25));
    CHECK(continuous_average(c, Box::closed({0}, {10}), QuadSpec::uniform(1, 0.37)).real() == doctest::Approx(3.25));

    auto s = samplers::trig(samplers::Wave::Sin, 1.0);
    QuadSpec q = QuadSpec::uniform(1, 1e-3);
    q.closed_form = false;
    const double b = 1000;
    CHECK(std::fabs(continuous_average(s, Box::closed({0}, {b}), q).real() - (1 - std::cos(2 * M_PI * b)) / (2 * M_PI * b)) < 1e-6);

    const auto x = samplers::scalar(1, [](std::span<const double> p) { return Complex(p[0]); }, 1.0);
    CHECK(std::fabs(continuous_average(x, Box::closed({0}, {1}), QuadSpec::uniform(1, 1e-4)).real() - 0.5) < 1e-8);
}

TEST_CASE("continuous_average: closed-form and quadrature paths agree") {
    const auto f = samplers::trig(samplers::Wave::Cos, 0.731);
    QuadSpec exact = QuadSpec::uniform(1, 1e-3);
    QuadSpec quad = exact;
    quad.closed_form = false;
    for (double b : {3.3, 47.0, 512.9}) {
        const auto ref = oracle::exp_window_average(0.731, 1.0, b).real();
        CHECK(continuous_average(f, Box::closed({1}, {b}), exact).real() == doctest::Approx(ref).epsilon(1e-9));
        CHECK(std::fabs(continuous_average(f, Box::closed({1}, {b}), quad).real() - ref) < 1e-6);
    }
}

TEST_CASE("closed-form primitives agree with quadrature on random windows") {
    const std::vector<std::pair<const char*, FnSampler>> fs{
        {"sawtooth", samplers::sawtooth(oracle::kSqrt2)},
        {"indicator", samplers::frac_indicator(oracle::kSqrt3, 0.1, 0.6)},
        {"decay", samplers::decay()},
        {"log_square_wave", samplers::log_square_wave()},
        {"log2_parity", samplers::log2_parity()}};
    oracle::Rng rng(31);
    QuadSpec exact = QuadSpec::uniform(1, 1e-3);
    QuadSpec quad = exact;
    quad.closed_form = false;
    for (const auto& [name, f] : fs) {
        for (int trial = 0; trial < 20; ++trial) {
            const double a = rng.uniform(-60, 60), b = a + rng.uniform(1, 80);
            INFO(name << " on [" << a << ", " << b << "]");
            const double e = continuous_average(f, Box::closed({a}, {b}), exact).real();
            const double m = continuous_average(f, Box::closed({a}, {b}), quad).real();
            CHECK(std::fabs(e - m) < 1e-3);
        }
    }
}

TEST_CASE("continuous_average: refinement reports a half-step estimate") {
    const auto f = samplers::trig(samplers::Wave::Cos, 1.0, 2);
    QuadSpec q = QuadSpec::uniform(1, 0.01, true);
    q.closed_form = false;
    const auto r = continuous_average_detailed(f, Box::closed({0}, {10}), q);
    REQUIRE(r.half_step.has_value());
    CHECK(r.refine_distance == doctest::Approx(distance(r.value, *r.half_step)));
    CHECK(r.refine_distance < 1e-3);
}

TEST_CASE("continuous_average rejects non-finite samples") {
    const auto f = samplers::scalar(1, [](std::span<const double> x) { return Complex(x[0] > 0.5 ? NAN : 0.0); }, 1.0);
    CHECK_THROWS_AS(continuous_average(f, Box::closed({0}, {1}), QuadSpec::uniform(1, 0.1)), std::domain_error);
}

TEST_CASE("linearity of both averages") {
    oracle::Rng rng(9);
    const auto f = samplers::trig(samplers::Wave::Cos, 0.37, 2);
    const auto g = samplers::sawtooth(oracle::kSqrt3);
    const auto sf = samplers::shift_sequence(f, {0.25});
    const auto sg = samplers::shift_sequence(g, {0.25});
    QuadSpec q = QuadSpec::uniform(1, 0.01);
    q.closed_form = false;
    for (int trial = 0; trial < 20; ++trial) {
        const Complex a = rng.complex(2), c = rng.complex(2);
        const auto fg = samplers::scalar(1, [&](std::span<const double> x) { return a * f(Vec{x[0]})[0] + c * g(Vec{x[0]})[0]; }, 10);
        const auto sfg = samplers::shift_sequence(fg, {0.25});
        const Box b = Box::closed({rng.uniform(0, 5)}, {rng.uniform(10, 200)});
        const auto lhs = continuous_average(fg, b, q);
        const auto rhs = a * continuous_average(f, b, q) + c * continuous_average(g, b, q);
        CHECK(distance(lhs, rhs) < 1e-12 * (1 + lhs.norm()) * 10);
        const Box hb = Box::half_open(b.lo, b.hi);
        const auto dl = discrete_average(sfg, hb);
        const auto dr = a * discrete_average(sf, hb) + c * discrete_average(sg, hb);
        CHECK(distance(dl, dr) < 1e-12 * (1 + dl.norm()) * 10);
    }
}

TEST_CASE("box additivity over a grid-aligned partition") {
    const auto f = samplers::scalar(
        2, [](std::span<const double> x) { return Complex(std::cos(x[0] * x[1]), std::sin(x[0] - x[1])); }, 2.0);
    const QuadSpec q = QuadSpec::uniform(2, 0.05);
    const Box whole = Box::closed({0, 0}, {8, 4});
    const Box left = Box::closed({0, 0}, {3, 4});
    const Box right = Box::closed({3, 0}, {8, 4});
    const auto mix = (3.0 / 8.0) * continuous_average(f, left, q) + (5.0 / 8.0) * continuous_average(f, right, q);
    CHECK(distance(continuous_average(f, whole, q), mix) < 1e-12);
}

TEST_CASE("cesaro_limit: explicit sequences") {
    const auto sched = ScaleSchedule::geometric({10}, 10, 6);
    const auto inv = cesaro_limit([](const Box& b) { return VectorValue::scalar(1.0 / b.hi[0]); }, sched, false, 1e-3, 3);
    CHECK(inv.converged);
    CHECK(inv.value.real() == doctest::Approx(1e-6));
    CHECK(inv.residual <= 1e-3);

    const auto dense = ScaleSchedule::geometric({10}, 1.3, 40);
    const auto osc = cesaro_limit([](const Box& b) { return VectorValue::scalar(std::sin(std::log(b.hi[0]))); }, dense,
                                  false, 0.1, 3);
    CHECK_FALSE(osc.converged);

    const auto seq = exp_seq(oracle::kSqrt2);
    const auto weyl = cesaro_limit([&](const Box& b) { return discrete_average(seq, b); }, sched, false, 1e-2, 3);
    CHECK(weyl.converged);
    CHECK(weyl.value.norm() <= oracle::exp_sum_bound(oracle::kSqrt2, 1'000'000));
}

TEST_CASE("cesaro_bounds: range proxies") {
    const auto sched = ScaleSchedule::geometric({10}, 1.1, 200);
    const auto b = cesaro_bounds([](const Box& w) { return std::sin(std::log(w.hi[0])); }, sched, false);
    CHECK(b.lo == doctest::Approx(-1).epsilon(0.05));
    CHECK(b.hi == doctest::Approx(1).epsilon(0.05));

    const auto c = cesaro_bounds([](const Box&) { return 0.7; }, sched, false);
    CHECK(c.lo == 0.7);
    CHECK(c.hi == 0.7);

    const auto decades = ScaleSchedule::geometric({10}, 10, 6);
    const auto alt = cesaro_bounds(
        [](const Box& w) { return 0.5 + (static_cast<int>(std::floor(std::log10(w.hi[0]) + 1e-9)) % 2 ? -0.25 : 0.25); },
        decades, false);
    CHECK(alt.lo == 0.25);
    CHECK(alt.hi == 0.75);
}

TEST_CASE("uniform convergence at tol implies standard convergence at 2 tol") {
    const auto f = samplers::trig(samplers::Wave::Cos, oracle::kSqrt2);
    const QuadSpec q = QuadSpec::uniform(1, 0.01);
    oracle::Rng rng(31);
    for (int trial = 0; trial < 10; ++trial) {
        auto sched = ScaleSchedule::geometric({rng.uniform(50, 200)}, 2, 6);
        sched.seed = rng.next();
        const double tol = rng.uniform(1e-3, 2e-2);
        const auto avg = [&](const Box& b) { return continuous_average(f, b, q); };
        const auto uni = cesaro_limit(avg, sched, true, tol, 3);
        if (!uni.converged) continue;
        const auto std_ = cesaro_limit(avg, sched, false, 2 * tol, 3);
        CHECK(std_.converged);
        CHECK(distance(std_.value, uni.value) <= 2 * tol);
    }
}

TEST_CASE("schedule validation and window families") {
    CHECK_THROWS_AS(ScaleSchedule::of_lengths({10, 10, 20}, 1).validate(), std::invalid_argument);
    ScaleSchedule s = ScaleSchedule::of_lengths({100, 400}, 1);
    s.random_offsets = 3;
    const auto w = s.windows(true);
    REQUIRE(w.size() == 2);
    CHECK(w[0].size() == 4 + 3);
    for (const auto& family : w)
        for (const auto& b : family) CHECK(b.edge(0) == doctest::Approx(family.front().edge(0)));
    const auto plain = s.windows(false);
    CHECK(plain[1].size() == 1);
    CHECK(plain[1][0] == Box::origin({400}));
    const auto dil = s.dilated({4});
    CHECK(dil.scales[1].hi[0] == 100.0);
}

TEST_CASE("check_step enforces h |f'| <= 0.1 only when declared") {
    auto f = samplers::trig(samplers::Wave::Cos, 1.0);
    CHECK(check_step(f, QuadSpec::uniform(1, 0.01)).ok);
    CHECK_FALSE(check_step(f, QuadSpec::uniform(1, 0.1)).ok);
    f.derivative_bound = 0;
    const auto none = check_step(f, QuadSpec::uniform(1, 10));
    CHECK_FALSE(none.declared);
    CHECK(none.ok);
}

TEST_CASE("phase_average: linear phases are integrated exactly per cell") {
    const double alpha = 0.3183;
    PhaseSampler p{1, [=](std::span<const double> x) { return alpha * x[0]; },
                   [=](std::span<const double>, std::span<double> g) { g[0] = alpha; }};
    QuadSpec q = QuadSpec::uniform(1, 0.5);
    q.rule = QuadRule::LinearPhase;
    const auto got = phase_average(p, Box::closed({2}, {503}), q);
    CHECK(std::abs(got - oracle::exp_window_average(alpha, 2, 503)) < 1e-12);
}

TEST_CASE("running_average_sequence matches the closed form") {
    const double c = oracle::kSqrt2;
    QuadSpec q = QuadSpec::uniform(1, 1e-3);
    const auto v = running_average_sequence(samplers::trig(samplers::Wave::Cos, 1.0), c, q);
    for (std::int64_t n : {1, 2, 17, 1000}) {
        const double x = static_cast<double>(n) * c;
        CHECK(std::fabs(v(IVec{n}).real() - std::sin(2 * M_PI * x) / (2 * M_PI * x)) < 1e-6);
    }
}
