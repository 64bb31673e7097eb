#pragma once

// Reference values computed independently of the library: closed forms,
// brute-force counts and long double arithmetic. Nothing here calls etl.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

namespace oracle {

constexpr long double kPi = 3.141592653589793238462643383279502884L;
constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kSqrt3 = 1.7320508075688772;

// splitmix64; the property tests draw their cases from it.
struct Rng {
    std::uint64_t s;
    explicit Rng(std::uint64_t seed) : s(seed) {}
    std::uint64_t next() {
        std::uint64_t z = (s += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    std::int64_t integer(std::int64_t lo, std::int64_t hi) {
        return lo + static_cast<std::int64_t>(next() % static_cast<std::uint64_t>(hi - lo + 1));
    }
    std::complex<double> complex(double r) { return {uniform(-r, r), uniform(-r, r)}; }
};

inline long double frac(long double x) { return x - std::floor(x); }

// Integers n with lo < n <= hi, by scanning.
inline std::vector<std::int64_t> integers_in(double lo, double hi) {
    std::vector<std::int64_t> out;
    for (auto n = static_cast<std::int64_t>(std::floor(lo)) - 1; n <= static_cast<std::int64_t>(std::ceil(hi)) + 1; ++n)
        if (static_cast<double>(n) > lo && static_cast<double>(n) <= hi) out.push_back(n);
    return out;
}

// w(Q symmetric-difference (Q + y)) for the cube Q = [a, a + N]^d.
inline double cube_shift_defect(double N, const std::vector<double>& y) {
    double inter = 1.0, full = 1.0;
    for (double yi : y) {
        inter *= std::max(0.0, N - std::fabs(yi));
        full *= N;
    }
    return 2.0 * (full - inter) / full;
}

// (1/N) sum_{n=1}^N e^{2 pi i n t} by the geometric series.
inline std::complex<long double> exp_sum_average(long double t, std::int64_t N) {
    const std::complex<long double> q = std::polar(1.0L, 2 * kPi * t);
    const std::complex<long double> qN = std::polar(1.0L, 2 * kPi * t * static_cast<long double>(N));
    return q * (qN - 1.0L) / ((q - 1.0L) * static_cast<long double>(N));
}

// Upper bound 1 / (N |e^{2 pi i t} - 1|) * 2 for the same average.
inline double exp_sum_bound(double t, std::int64_t N) {
    return 2.0 / (static_cast<double>(N) * std::abs(std::polar(1.0, 2 * M_PI * t) - 1.0));
}

// (1/(b - a)) int_a^b e^{2 pi i alpha x} dx, exactly.
inline std::complex<double> exp_window_average(double alpha, double a, double b) {
    const std::complex<long double> I(0, 1);
    const auto val = (std::exp(2 * kPi * I * static_cast<long double>(alpha * b)) -
                      std::exp(2 * kPi * I * static_cast<long double>(alpha * a))) /
                     (2 * kPi * I * static_cast<long double>(alpha) * static_cast<long double>(b - a));
    return {static_cast<double>(val.real()), static_cast<double>(val.imag())};
}

// int_0^b cos(2 pi x^2) dx via its tail expansion: 1/4 - int_b^inf.
// int_b^inf cos(2 pi x^2) = -sin(2 pi b^2)/(4 pi b) + O(b^-3).
inline double fresnel_cos_integral(double b) {
    const long double bb = b;
    return static_cast<double>(0.25L + std::sin(2 * kPi * bb * bb) / (4 * kPi * bb));
}

// Empirical CDF of {sqrt2 t}{sqrt3 t} in the independent-uniform limit.
inline double product_of_uniforms_cdf(double u) {
    if (u <= 0) return 0.0;
    if (u >= 1) return 1.0;
    return u - u * std::log(u);
}

// Measure of the arc [a, a + len) mod 1 intersected with [c, c + m) mod 1.
inline double arc_overlap(double a, double len, double c, double m) {
    double total = 0.0;
    for (int shift = -2; shift <= 2; ++shift) {
        const double lo = std::max(a + shift, c);
        const double hi = std::min(a + shift + len, c + m);
        total += std::max(0.0, hi - lo);
    }
    return total;
}

// mu(A cap (A - u)) for A = [0, 1/2): max(0, 1/2 - d(u)), d the circle distance.
inline double half_arc_self_overlap(double u) {
    const double f = u - std::floor(u);
    const double d = std::min(f, 1.0 - f);
    return std::max(0.0, 0.5 - d);
}

// mu(A cap (A - u) cap (A - 2u)) for A = [0, a), by exact interval clipping on the circle.
inline double triple_overlap(double a, double u) {
    // x in A, x + u in A, x + 2u in A; each condition is a union of arcs.
    std::vector<std::pair<double, double>> cur{{0.0, a}};
    for (int j = 1; j <= 2; ++j) {
        const double s = u * j - std::floor(u * j);
        std::vector<std::pair<double, double>> next;
        for (auto [lo, hi] : cur)
            for (int k = -1; k <= 1; ++k) {
                const double l2 = std::max(lo, k - s);
                const double h2 = std::min(hi, k - s + a);
                if (h2 > l2) next.push_back({l2, h2});
            }
        cur = std::move(next);
    }
    double m = 0.0;
    for (auto [lo, hi] : cur) m += hi - lo;
    return m;
}

// int_0^1 triple_overlap(a, u) du by the midpoint rule with n nodes.
inline double triple_overlap_mean(double a, int n) {
    long double s = 0;
    for (int i = 0; i < n; ++i) s += triple_overlap(a, (i + 0.5) / n);
    return static_cast<double>(s / n);
}

// Share of n in [1, N] with {n alpha} in [lo, hi), counted directly.
inline double frac_count_share(long double alpha, long double lo, long double hi, std::int64_t N) {
    std::int64_t hits = 0;
    for (std::int64_t n = 1; n <= N; ++n) {
        const long double f = frac(alpha * static_cast<long double>(n));
        hits += (f >= lo && f < hi) ? 1 : 0;
    }
    return static_cast<double>(hits) / static_cast<double>(N);
}

// Heisenberg product (x, y, z)(x', y', z') = (x + x', y + y', z + z' + x y').
struct H {
    long double x, y, z;
};
inline H hmul(H a, H b) { return {a.x + b.x, a.y + b.y, a.z + b.z + a.x * b.y}; }

}  // namespace oracle
