#include <doctest.h>

#include <set>
#include <stdexcept>

#include "etl/geometry.hpp"
#include "oracles.hpp"

using namespace etl;

TEST_CASE("box_measures: product and minimum edge") {
    auto m = box_measures(Box::half_open({0, 0}, {2, 3}));
    CHECK(m.w == 6.0);
    CHECK(m.l == 2.0);

    m = box_measures(Box::half_open({1}, {1}));
    CHECK(m.w == 0.0);
    CHECK(m.l == 0.0);

    m = box_measures(Box::half_open({-1, -1}, {1, 2}));
    CHECK(m.w == 6.0);
    CHECK(m.l == 2.0);
}

TEST_CASE("box_measures: inverted edges count as empty") {
    const Box b = Box::half_open({0, 5}, {3, 4});
    CHECK(b.empty());
    CHECK(box_measures(b).w == 0.0);
    CHECK(box_measures(b).l == 0.0);
}

TEST_CASE("lattice_points: half-open convention") {
    auto pts = lattice_points(Box::half_open({0}, {3}));
    REQUIRE(pts.size() == 3);
    CHECK(pts[0] == IVec{1});
    CHECK(pts[2] == IVec{3});

    pts = lattice_points(Box::half_open({0, 0}, {2, 1}));
    REQUIRE(pts.size() == 2);
    CHECK(pts[0] == IVec{1, 1});
    CHECK(pts[1] == IVec{2, 1});

    CHECK(lattice_points(Box::half_open({2.5}, {2.9})).empty());
    CHECK(lattice_points(Box::half_open({3}, {3})).empty());
}

TEST_CASE("lattice_points: closed boxes include the lower face") {
    const auto pts = lattice_points(Box::closed({0}, {3}));
    CHECK(pts.size() == 4);
    CHECK(pts.front() == IVec{0});
}

TEST_CASE("lattice_count refuses counts beyond 64 bits") {
    CHECK_THROWS_AS(lattice_count(Box::cube(3, 0, 1e7)), std::length_error);
    CHECK_THROWS_AS(lattice_points(Box::cube(2, 0, 1e5), 1000), std::length_error);
}

TEST_CASE("lattice enumeration matches a scan on random boxes") {
    oracle::Rng rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t d = 1 + trial % 3;
        Vec lo(d), hi(d);
        std::uint64_t expected = 1;
        for (std::size_t i = 0; i < d; ++i) {
            lo[i] = rng.uniform(-6, 6);
            hi[i] = lo[i] + rng.uniform(-1, 5);
            expected *= oracle::integers_in(lo[i], hi[i]).size();
        }
        const Box b = Box::half_open(lo, hi);
        CHECK(lattice_count(b) == expected);
        std::uint64_t visited = 0;
        for_each_lattice_point(b, [&](const IVec& n) {
            ++visited;
            for (std::size_t i = 0; i < d; ++i) {
                CHECK(static_cast<double>(n[i]) > lo[i]);
                CHECK(static_cast<double>(n[i]) <= hi[i]);
            }
        });
        CHECK(visited == expected);
    }
}

TEST_CASE("lattice count of (0, b] equals w(b) for integer b") {
    oracle::Rng rng(3);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t d = 1 + trial % 4;
        Vec b(d);
        for (auto& x : b) x = static_cast<double>(rng.integer(0, 12));
        const Box box = Box::origin(b);
        CHECK(static_cast<double>(lattice_count(box)) == box_measures(box).w);
    }
}

TEST_CASE("w(a)/w(b) <= l(a)/l(b) for 0 < a <= b") {
    oracle::Rng rng(5);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t d = 1 + trial % 4;
        Vec a(d), b(d);
        for (std::size_t i = 0; i < d; ++i) {
            a[i] = rng.uniform(0.01, 10);
            b[i] = a[i] + rng.uniform(0, 10);
        }
        const auto ma = box_measures(Box::origin(a));
        const auto mb = box_measures(Box::origin(b));
        CHECK(ma.w / mb.w <= ma.l / mb.l * (1 + 1e-12));
    }
}

TEST_CASE("folner_defect: worked values") {
    const auto line = FolnerSequence::growing_boxes(1);
    CHECK(folner_defect(line, 100, {1}) == doctest::Approx(0.02).epsilon(1e-12));
    CHECK(folner_defect(line, 100, {0}) == 0.0);

    const auto square = FolnerSequence::growing_boxes(2);
    const double expected = oracle::cube_shift_defect(50, {1, 0});
    CHECK(expected == doctest::Approx(0.04));
    CHECK(folner_defect(square, 50, {1, 0}) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("folner_defect: shifted boxes and random displacements") {
    oracle::Rng rng(17);
    for (std::size_t d = 1; d <= 3; ++d) {
        const auto g = FolnerSequence::growing_boxes(d);
        const auto s = FolnerSequence::shifted_boxes(d, 2.0, 1.0);
        for (int trial = 0; trial < 50; ++trial) {
            const double N = rng.uniform(5, 100);
            Vec y(d), ny(d);
            for (std::size_t i = 0; i < d; ++i) {
                y[i] = rng.uniform(-2 * N, 2 * N) * (trial % 2 ? 0.1 : 1.0);
                ny[i] = -y[i];
            }
            const double ref = oracle::cube_shift_defect(N, y);
            CHECK(folner_defect(g, N, y) == doctest::Approx(ref).epsilon(1e-9));
            CHECK(folner_defect(s, N, y) == doctest::Approx(ref).epsilon(1e-9));
            CHECK(folner_defect(g, N, ny) == doctest::Approx(folner_defect(g, N, y)).epsilon(1e-12));
            CHECK(folner_defect(s, N, ny) == doctest::Approx(folner_defect(s, N, y)).epsilon(1e-12));
        }
    }
}

TEST_CASE("folner_defect tends to 0 along the built-in kinds") {
    for (const auto& F : {FolnerSequence::growing_boxes(2), FolnerSequence::shifted_boxes(2, 1.5, 0.5)}) {
        double prev = 1e300;
        for (double N : {10.0, 100.0, 1000.0, 10000.0}) {
            const double d = folner_defect(F, N, {1.0, -2.0});
            CHECK(d < prev);
            prev = d;
        }
        CHECK(prev < 0.1);
    }
}

TEST_CASE("folner_defect rejects null regions") {
    const auto F = FolnerSequence::custom(1, [](double) { return Region{Box::half_open({0}, {0})}; });
    CHECK_THROWS_AS(folner_defect(F, 1, {1}), std::invalid_argument);
}

namespace {
// Area of a union of integer-cornered rectangles by marking unit cells.
double cell_count(const Region& r) {
    std::set<std::pair<int, int>> cells;
    for (const auto& b : r)
        for (int x = static_cast<int>(b.lo[0]); x < static_cast<int>(b.hi[0]); ++x)
            for (int y = static_cast<int>(b.lo[1]); y < static_cast<int>(b.hi[1]); ++y) cells.insert({x, y});
    return static_cast<double>(cells.size());
}
}  // namespace

TEST_CASE("region measures agree with unit-cell counts") {
    oracle::Rng rng(23);
    for (int trial = 0; trial < 100; ++trial) {
        Region a, b;
        for (int k = 0; k < 4; ++k) {
            for (Region* r : {&a, &b}) {
                const double x = static_cast<double>(rng.integer(-5, 5));
                const double y = static_cast<double>(rng.integer(-5, 5));
                r->push_back(Box::closed({x, y}, {x + static_cast<double>(rng.integer(0, 6)),
                                                  y + static_cast<double>(rng.integer(0, 6))}));
            }
        }
        CHECK(region_measure(a) == cell_count(a));
        Region both = a;
        both.insert(both.end(), b.begin(), b.end());
        const double uni = cell_count(both);
        const double sym = 2 * uni - cell_count(a) - cell_count(b);
        CHECK(symmetric_difference_measure(a, b) == doctest::Approx(sym));

        const auto cells = disjoint_cells(a);
        double sum = 0;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            sum += volume(cells[i]);
            for (std::size_t j = i + 1; j < cells.size(); ++j) CHECK(volume(cells[i].intersect(cells[j])) == 0.0);
        }
        CHECK(sum == doctest::Approx(region_measure(a)));
    }
}

TEST_CASE("scheme names round-trip") {
    for (auto k : {SchemeKind::StandardCesaro, SchemeKind::UniformCesaro, SchemeKind::TwoSidedStandard,
                   SchemeKind::TwoSidedUniform, SchemeKind::Folner})
        CHECK(scheme_kind_from_string(to_string(k)) == k);
    CHECK(Scheme::two_sided_uniform(2).is_uniform());
    CHECK(Scheme::two_sided_uniform(2).is_two_sided());
    CHECK_FALSE(Scheme::standard().is_uniform());
}
