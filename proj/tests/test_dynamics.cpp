#include <doctest.h>

#include <cmath>

#include "etl/dynamics.hpp"
#include "oracles.hpp"

using namespace etl;

namespace {
double coord(const Orbit& o, double t, std::size_t j) { return o.coords(Vec{t})[j].real(); }
}  // namespace

TEST_CASE("poly evaluation") {
    CHECK(Poly::univariate({0, 0, 1})(3.0) == 9.0);
    const Poly p(2, {{1.0, {1, 1}}, {2.0, {1, 0}}});
    const double x[] = {1, 2};
    CHECK(p(x) == 4.0);
    CHECK(Poly::univariate({0, oracle::kSqrt2})(1.0) == oracle::kSqrt2);
    CHECK_THROWS_AS(p(std::span<const double>(x, 1)), std::invalid_argument);
    CHECK(p.degree() == 2);
    CHECK(Poly::univariate({5})(123.0) == 5.0);
    CHECK(Poly::univariate({0, 0, 0}).degree() <= 0);
}

TEST_CASE("poly: Horner matches term-by-term sums on random polynomials") {
    oracle::Rng rng(19);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t d = 1 + trial % 3;
        std::vector<Monomial> terms;
        for (int k = 0; k < 6; ++k) {
            Monomial m{rng.uniform(-3, 3), std::vector<int>(d)};
            for (auto& e : m.exponents) e = static_cast<int>(rng.integer(0, 4));
            terms.push_back(m);
        }
        const Poly p(d, terms);
        Vec x(d);
        for (auto& v : x) v = rng.uniform(-2, 2);
        long double ref = 0;
        for (const auto& m : terms) {
            long double t = m.coeff;
            for (std::size_t i = 0; i < d; ++i) t *= std::pow(static_cast<long double>(x[i]), m.exponents[i]);
            ref += t;
        }
        CHECK(p(x) == doctest::Approx(static_cast<double>(ref)).epsilon(1e-10).scale(1.0));

        const Poly dp = p.derivative(0);
        const double h = 1e-5;
        Vec xp = x, xm = x;
        xp[0] += h;
        xm[0] -= h;
        CHECK(dp(x) == doctest::Approx((p(xp) - p(xm)) / (2 * h)).epsilon(1e-5).scale(1.0));
    }
}

TEST_CASE("gp evaluation: worked values") {
    const Gp f = gp::floor(gp::poly(Poly::linear({oracle::kSqrt2})));
    double t = 1;
    auto v = gp_eval(f, std::span<const double>(&t, 1), 1e-9);
    CHECK(v.value == 1.0);
    CHECK_FALSE(v.near_discontinuity);

    const Gp prod = gp::mul(gp::frac(gp::var(0)), gp::frac(gp::poly(Poly::linear({oracle::kSqrt2}))));
    t = 0;
    v = gp_eval(prod, std::span<const double>(&t, 1), 1e-9);
    CHECK(v.value == 0.0);
    CHECK(v.near_discontinuity);

    const Gp g = gp::floor(gp::mul(gp::constant(3), gp::frac(gp::poly(Poly::linear({oracle::kSqrt2})))));
    t = 10;
    v = gp_eval(g, std::span<const double>(&t, 1), 1e-9);
    const long double ref = std::floor(3 * oracle::frac(10 * 1.41421356237309504880L));
    CHECK(v.value == static_cast<double>(ref));
    CHECK(v.value == 0.0);
    CHECK(gp_arity(prod) == 1);
    CHECK(gp_arity(gp::add(gp::var(2), gp::constant(1))) == 3);
}

TEST_CASE("gp: floor plus fractional part reconstructs the argument") {
    oracle::Rng rng(29);
    const Gp inner = gp::add(gp::mul(gp::floor(gp::poly(Poly::univariate({0.3, oracle::kSqrt3}))),
                                     gp::poly(Poly::univariate({0, 0, oracle::kSqrt2}))),
                             gp::var(0));
    for (int trial = 0; trial < 2000; ++trial) {
        double t = rng.uniform(-50, 50);
        if (trial % 10 == 0) t = std::round(t);
        const std::span<const double> x(&t, 1);
        const double g = gp_eval(inner, x, 1e-9).value;
        const auto fl = gp_eval(gp::floor(inner), x, 1e-9);
        const auto fr = gp_eval(gp::frac(inner), x, 1e-9);
        CHECK(fr.value >= 0.0);
        CHECK(fr.value < 1.0);
        CHECK(fl.value == std::floor(fl.value));
        CHECK(std::fabs(fl.value + fr.value - g) <= 1e-12 * std::max(1.0, std::fabs(g)));
    }
}

TEST_CASE("torus orbit sampler") {
    const auto lin = torus_orbit_sampler({{oracle::kSqrt2}, {0}}, {Poly::linear({1})});
    CHECK(coord(lin, 1, 0) == doctest::Approx(0.41421356237309515).epsilon(1e-14));
    const auto quad = torus_orbit_sampler({{oracle::kSqrt2}, {0}}, {Poly::univariate({0, 0, 1})});
    const double ref = static_cast<double>(oracle::frac(100 * 1.41421356237309504880L));
    CHECK(std::fabs(coord(quad, 10, 0) - ref) < 1e-12);
    const auto still = torus_orbit_sampler({{oracle::kSqrt2, 0.5}, {0.25, 0.75}}, {Poly::univariate({0})});
    CHECK(coord(still, 17.3, 0) == 0.25);
    CHECK(coord(still, 17.3, 1) == 0.75);
    const auto p = project(still, 1);
    CHECK(p.m == 1);
}

TEST_CASE("heisenberg reduce: worked values") {
    auto r = heisenberg_reduce({0.3, 0.7, 0.2});
    CHECK(r[0] == doctest::Approx(0.3));
    CHECK(r[1] == doctest::Approx(0.7));
    CHECK(r[2] == doctest::Approx(0.2));
    // One lattice step by hand: gamma = (-1, 0, 0) on the left gives (0.3, 0.7, 0.2 - 0.7).
    const auto hand = oracle::hmul({-1, 0, 0}, {1.3L, 0.7L, 0.2L});
    CHECK(static_cast<double>(hand.z) == doctest::Approx(-0.5));
    r = heisenberg_reduce({1.3, 0.7, 0.2});
    CHECK(r[0] == doctest::Approx(0.3));
    CHECK(r[1] == doctest::Approx(0.7));
    CHECK(r[2] == doctest::Approx(0.5));
    r = heisenberg_reduce({2, 3, 5});
    CHECK(r == H3{0, 0, 0});
}

TEST_CASE("heisenberg reduce: idempotent and lattice invariant") {
    oracle::Rng rng(37);
    for (int trial = 0; trial < 1000; ++trial) {
        const H3 g{rng.uniform(-20, 20), rng.uniform(-20, 20), rng.uniform(-20, 20)};
        const H3 r = heisenberg_reduce(g);
        for (double c : r) {
            CHECK(c >= 0.0);
            CHECK(c < 1.0);
        }
        const H3 rr = heisenberg_reduce(r);
        for (int i = 0; i < 3; ++i) CHECK(std::fabs(rr[i] - r[i]) < 1e-9);
        const H3 gamma{static_cast<double>(rng.integer(-9, 9)), static_cast<double>(rng.integer(-9, 9)),
                       static_cast<double>(rng.integer(-9, 9))};
        const H3 moved = heisenberg_reduce(heisenberg_mul(gamma, g));
        for (int i = 0; i < 3; ++i) {
            const double d = std::fabs(moved[i] - r[i]);
            CHECK(std::min(d, 1 - d) < 1e-9);
        }
    }
}

TEST_CASE("heisenberg flow: one-parameter subgroup") {
    const HeisenbergFlow F{{0.3, 0.7, 0.1}, {0, 0, 0}};
    const H3 a = F.power(1.5), b = F.power(2.25), ab = F.power(3.75);
    const H3 prod = heisenberg_mul(a, b);
    for (int i = 0; i < 3; ++i) CHECK(prod[i] == doctest::Approx(ab[i]).epsilon(1e-12));
    const auto orb = heisenberg_orbit_sampler(F, Poly::linear({1}));
    const auto red = heisenberg_reduce(ab);
    for (std::size_t j = 0; j < 3; ++j) CHECK(coord(orb, 3.75, j) == doctest::Approx(red[j]).epsilon(1e-12));
}

TEST_CASE("weyl discrepancy: linear orbit against the closed form") {
    const auto orb = torus_orbit_sampler({{oracle::kSqrt2}, {0}}, {Poly::linear({1})});
    const Box w = Box::closed({0}, {1e4});
    QuadSpec q = QuadSpec::uniform(1, 1e-3);
    const double mid = weyl_discrepancy(orb, {1}, w, q);
    const double ref = std::abs(oracle::exp_window_average(oracle::kSqrt2, 0, 1e4));
    CHECK(mid < 1e-3);
    CHECK(std::fabs(mid - ref) < 1e-6);
    q.rule = QuadRule::LinearPhase;
    q.step = {1.0};
    CHECK(std::fabs(weyl_discrepancy(orb, {1}, w, q) - ref) < 1e-12);
    CHECK(std::fabs(weyl_discrepancy(orb, {3}, w, q) - std::abs(oracle::exp_window_average(3 * oracle::kSqrt2, 0, 1e4))) < 1e-12);
}

TEST_CASE("weyl discrepancy: constant orbits and range") {
    const auto still = torus_orbit_sampler({{oracle::kSqrt2}, {0.3}}, {Poly::univariate({0})});
    CHECK(weyl_discrepancy(still, {1}, Box::closed({0}, {100}), QuadSpec::uniform(1, 0.1)) == doctest::Approx(1.0));
    oracle::Rng rng(41);
    const auto orb = torus_orbit_sampler({{oracle::kSqrt2, oracle::kSqrt3}, {0.1, 0.2}},
                                         {Poly::linear({1}), Poly::univariate({0, 0.5, 1})});
    for (int trial = 0; trial < 50; ++trial) {
        const double a = rng.uniform(0, 100);
        const IVec k{rng.integer(-3, 3), rng.integer(1, 3)};
        const double d = weyl_discrepancy(orb, k, Box::closed({a}, {a + rng.uniform(0.1, 5)}), QuadSpec::uniform(1, 0.01));
        CHECK(d >= 0.0);
        CHECK(d <= 1.0);
    }
}

TEST_CASE("weyl discrepancy: quadratic coordinate, refined quadrature agrees") {
    const auto orb = torus_orbit_sampler({{oracle::kSqrt2, oracle::kSqrt3}, {0, 0}},
                                         {Poly::linear({1}), Poly::univariate({0, 0, 1})});
    const Box w = Box::closed({1e3}, {2e3});
    const double h = weyl_discrepancy(orb, {0, 1}, w, QuadSpec::uniform(1, 1e-4));
    const double h2 = weyl_discrepancy(orb, {0, 1}, w, QuadSpec::uniform(1, 5e-5));
    CHECK(h < 0.05);
    CHECK(std::fabs(h - h2) < 1e-3);
    QuadSpec lp = QuadSpec::uniform(1, 0.01);
    lp.rule = QuadRule::LinearPhase;
    CHECK(std::fabs(weyl_discrepancy(orb, {0, 1}, w, lp) - h2) < 1e-3);
}

TEST_CASE("frequencies_up_to lists nonzero vectors") {
    const auto ks = frequencies_up_to(2, 3);
    CHECK(ks.size() == 48);
    for (const auto& k : ks) CHECK((k[0] != 0 || k[1] != 0));
}

TEST_CASE("multiple averages: constant observable") {
    const auto grid = uniform_phase_grid(1, 64);
    const auto f = multiple_average_sampler({as_flow(TorusFlow{{oracle::kSqrt2}, {0}})}, {Poly::linear({1})},
                                            {observables::constant(1, 1.0)}, grid);
    for (double x : {0.0, 1.7, 123.4}) {
        const auto v = f(Vec{x});
        CHECK(v.norm() == doctest::Approx(1.0));
        for (std::size_t i = 0; i < v.size(); ++i) CHECK(v[i] == Complex(1.0));
    }
}

TEST_CASE("multiple averages: lift path equals direct evaluation") {
    const auto grid = uniform_phase_grid(1, 128);
    const TorusFlow T{{oracle::kSqrt2}, {0}};
    const std::vector<Poly> polys{Poly::linear({1}), Poly::linear({2})};
    const auto fast = multiple_average_sampler({as_flow(T)}, polys, {observables::cosine({1}), observables::cosine({1})}, grid);
    REQUIRE(fast.lift.has_value());
    Observable c1 = observables::cosine({1});
    c1.fourier.clear();
    const auto slow = multiple_average_sampler({as_flow(T)}, polys, {c1, c1}, grid);
    CHECK_FALSE(slow.lift.has_value());
    oracle::Rng rng(43);
    for (int trial = 0; trial < 50; ++trial) {
        const double x = rng.uniform(0, 1000);
        const auto a = fast(Vec{x});
        const auto b = slow(Vec{x});
        CHECK(distance(a, b) < 1e-10);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double w = grid.point(i)[0];
            const double ref = std::cos(2 * M_PI * (w + x * oracle::kSqrt2)) * std::cos(2 * M_PI * (w + 2 * x * oracle::kSqrt2));
            CHECK(std::fabs(b[i].real() - ref) < 1e-9);
        }
        CHECK(a.norm() <= 1.0 + 1e-12);
    }
}

TEST_CASE("multiple averages: Cesaro limit of the r = 2 product vanishes") {
    const auto grid = uniform_phase_grid(1, 256);
    const TorusFlow T{{oracle::kSqrt2}, {0}};
    const auto f = multiple_average_sampler({as_flow(T)}, {Poly::linear({1}), Poly::linear({2})},
                                            {observables::cosine({1}), observables::cosine({1})}, grid);
    const auto avg = continuous_average(f, Box::closed({0}, {1e4}), QuadSpec::uniform(1, 0.01));
    CHECK(avg.norm() < 0.02);
}

TEST_CASE("multiple averages: commuting rotations with characters") {
    const auto grid = uniform_phase_grid(2, 32);
    const PhaseFlow A = as_flow(TorusFlow{{oracle::kSqrt2, 0}, {0, 0}});
    const PhaseFlow B = as_flow(TorusFlow{{0, oracle::kSqrt3}, {0, 0}});
    const auto f = multiple_average_sampler({A, B}, {Poly::linear({1}), Poly::linear({1})},
                                            {observables::character({1, 0}), observables::character({0, 1})}, grid);
    const auto avg = continuous_average(f, Box::closed({0}, {1e4}), QuadSpec::uniform(1, 0.01));
    CHECK(avg.norm() < 0.02);
}

TEST_CASE("multiple averages: nilflow observable stays bounded") {
    const auto grid = uniform_phase_grid(3, 6);
    const HeisenbergFlow H{{oracle::kSqrt2, oracle::kSqrt3, 0.5}, {0, 0, 0}};
    Observable zc{3, [](std::span<const double> w) { return std::polar(1.0, 2 * M_PI * w[2]); }, 1.0, {}};
    const auto f = multiple_average_sampler({as_flow(H)}, {Poly::linear({1})}, {zc}, grid);
    for (double x : {0.0, 0.5, 10.0}) CHECK(f(Vec{x}).norm() == doctest::Approx(1.0));
}

TEST_CASE("intersection measures") {
    const auto grid = uniform_phase_grid(1, 1024);
    const auto A = sets::periodic_intervals(1, 0, 0.5);
    const PhaseFlow T = as_flow(TorusFlow{{oracle::kSqrt2}, {0}});
    const auto one = intersection_measure_sampler(T, {Poly::linear({1})}, A, grid);
    CHECK(one(Vec{0.0}).real() == 0.5);
    oracle::Rng rng(47);
    for (int trial = 0; trial < 50; ++trial) {
        const double x = rng.uniform(0, 100);
        CHECK(std::fabs(one(Vec{x}).real() - oracle::half_arc_self_overlap(x * oracle::kSqrt2)) <= 2.0 / 1024);
    }
    const auto avg = continuous_average(one, Box::closed({0}, {1e4}), QuadSpec::uniform(1, 0.01));
    CHECK(avg.real() == doctest::Approx(0.25).epsilon(0.01));

    const auto A4 = sets::periodic_intervals(1, 0, 0.25);
    const auto two = intersection_measure_sampler(T, {Poly::linear({1}), Poly::linear({2})}, A4, grid);
    CHECK(two(Vec{0.0}).real() == 0.25);
    for (int trial = 0; trial < 30; ++trial) {
        const double x = rng.uniform(0, 100);
        CHECK(std::fabs(two(Vec{x}).real() - oracle::triple_overlap(0.25, x * oracle::kSqrt2)) <= 3.0 / 1024);
    }
    const double oracle_mean = oracle::triple_overlap_mean(0.25, 100000);
    CHECK(oracle_mean >= 0.01);
    const auto avg2 = continuous_average(two, Box::closed({0}, {1e4}), QuadSpec::uniform(1, 0.0236));
    CHECK(std::fabs(avg2.real() - oracle_mean) < 0.005);

    CHECK_THROWS_AS(intersection_measure_sampler(T, {Poly::univariate({1, 1})}, A, grid), std::invalid_argument);
    CHECK_THROWS_AS(intersection_measure_sampler(T, {Poly::linear({1})}, sets::periodic_intervals(1, 0.5001, 0.5002), grid),
                    std::domain_error);
}

TEST_CASE("gp sampling, KS distance and histograms") {
    const Gp u = gp::mul(gp::frac(gp::poly(Poly::linear({oracle::kSqrt2}))), gp::frac(gp::poly(Poly::linear({oracle::kSqrt3}))));
    const auto s = gp_sample(u, Box::closed({0}, {1e4}), 0.1, 1e-9);
    CHECK(s.values.size() == 100000);
    CHECK(s.flagged_fraction() <= 1e-4);
    const double ks = ks_distance(s.values, oracle::product_of_uniforms_cdf);
    CHECK(ks < 0.02);
    CHECK(ks_distance(s.values, [](double x) { return std::clamp(x, 0.0, 1.0); }) > 0.1);

    CHECK(ks_distance({0.5}, [](double x) { return std::clamp(x, 0.0, 1.0); }) == doctest::Approx(0.5));
    CHECK(ks_distance({0.25, 0.75}, [](double x) { return std::clamp(x, 0.0, 1.0); }) == doctest::Approx(0.25));

    const auto h = histogram({0.05, 0.15, 0.15, 0.95, 1.5}, 0, 1, 10, [](double x) { return std::clamp(x, 0.0, 1.0); });
    CHECK(h.edges.size() == 11);
    CHECK(h.counts[0] == 1);
    CHECK(h.counts[1] == 2);
    CHECK(h.counts[9] == 1);
    CHECK(h.target_mass[3] == doctest::Approx(0.1));
}
