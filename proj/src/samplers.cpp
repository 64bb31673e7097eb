#include "etl/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace etl::samplers {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_axis(std::size_t axis, std::size_t dim) {
    if (dim == 0) throw std::invalid_argument("sampler dimension must be >= 1");
    if (axis >= dim) throw std::invalid_argument("sampler axis out of range");
}

Separable1D one_factor() {
    return {[](double) { return Complex{1.0, 0.0}; }, [](double a, double b) { return Complex{b - a, 0.0}; }, true};
}

// Scalar sampler depending on a single coordinate.
FnSampler axis_sampler(std::size_t dim, std::size_t axis, std::function<Complex(double)> g,
                       std::function<Complex(double, double)> integral, double bound, double derivative_bound) {
    check_axis(axis, dim);
    FnSampler f;
    f.dim = dim;
    f.value_size = 1;
    f.norm = NormSpec::l2();
    f.bound = bound;
    f.derivative_bound = derivative_bound;
    f.eval = [g, axis](std::span<const double> x, std::span<Complex> out) { out[0] = g(x[axis]); };
    f.separable.assign(dim, one_factor());
    f.separable[axis] = {std::move(g), std::move(integral), false};
    return f;
}

// Fractional part of freq * x^power evaluated in extended precision.
double phase_frac(double freq, int power, double x) {
    long double v = static_cast<long double>(x);
    long double p = 1.0L;
    for (int i = 0; i < power; ++i) p *= v;
    p *= static_cast<long double>(freq);
    return static_cast<double>(p - std::floor(p));
}

double frac(double v) { return v - std::floor(v); }

// Antiderivative of {v} vanishing at 0.
double sawtooth_primitive(double v) {
    const double fl = std::floor(v);
    const double fr = v - fl;
    return 0.5 * fl + 0.5 * fr * fr;
}

// Antiderivative of 1{{v} in [lo,hi)} vanishing at 0.
double window_primitive(double v, double lo, double hi) {
    const double fl = std::floor(v);
    const double fr = v - fl;
    return fl * (hi - lo) + std::clamp(fr, lo, hi) - lo;
}

// int_0^u of 1{floor(log2 x) even} 1{x >= 1}.
double log2_parity_primitive(double u) {
    if (u <= 1.0) return 0.0;
    double total = 0.0;
    for (int k = 0; k < 1100; k += 2) {
        const double a = std::ldexp(1.0, k);
        if (a >= u) break;
        total += std::min(u, 2.0 * a) - a;
    }
    return total;
}

// int_0^u of sign(sin(2 pi log(1 + x))) for u >= 0.
double log_square_primitive(double u) {
    if (u <= 0.0) return 0.0;
    double total = 0.0;
    for (int k = 0;; ++k) {
        const double a = std::expm1(0.5 * k);
        if (a >= u) break;
        const double b = std::min(u, std::expm1(0.5 * (k + 1)));
        total += (k % 2 == 0 ? 1.0 : -1.0) * (b - a);
    }
    return total;
}

}  // namespace

FnSampler constant(const VectorValue& c, std::size_t dim) {
    if (dim == 0) throw std::invalid_argument("sampler dimension must be >= 1");
    FnSampler f;
    f.dim = dim;
    f.value_size = c.size();
    f.norm = c.norm_spec();
    f.bound = c.norm();
    const auto comps = c.components();
    f.eval = [comps](std::span<const double>, std::span<Complex> out) { std::copy(comps.begin(), comps.end(), out.begin()); };
    if (c.size() == 1) {
        const Complex z = comps[0];
        f.separable.assign(dim, one_factor());
        f.separable[0] = {[z](double) { return z; }, [z](double a, double b) { return z * (b - a); }, z == Complex{1.0, 0.0}};
    }
    return f;
}

FnSampler scalar(std::size_t dim, std::function<Complex(std::span<const double>)> fn, double bound) {
    if (dim == 0) throw std::invalid_argument("sampler dimension must be >= 1");
    FnSampler f;
    f.dim = dim;
    f.bound = bound;
    f.eval = [fn = std::move(fn)](std::span<const double> x, std::span<Complex> out) { out[0] = fn(x); };
    return f;
}

SeqSampler scalar_seq(std::size_t dim, std::function<Complex(std::span<const std::int64_t>)> fn, double bound) {
    if (dim == 0) throw std::invalid_argument("sampler dimension must be >= 1");
    SeqSampler s;
    s.dim = dim;
    s.bound = bound;
    s.eval = [fn = std::move(fn)](std::span<const std::int64_t> n, std::span<Complex> out) { out[0] = fn(n); };
    return s;
}

FnSampler trig(Wave w, double freq, int power, std::size_t axis, std::size_t dim) {
    if (power < 1) throw std::invalid_argument("trig: power must be >= 1");
    auto g = [w, freq, power](double x) -> Complex {
        const double th = kTwoPi * phase_frac(freq, power, x);
        switch (w) {
        case Wave::Cos: return {std::cos(th), 0.0};
        case Wave::Sin: return {std::sin(th), 0.0};
        case Wave::Exp: return std::polar(1.0, th);
        }
        return {};
    };
    std::function<Complex(double, double)> integral;
    if (power == 1) {
        integral = [w, freq, g](double a, double b) -> Complex {
            if (freq == 0.0) return g(0.0) * (b - a);
            const double k = kTwoPi * freq;
            const double ta = kTwoPi * phase_frac(freq, 1, a);
            const double tb = kTwoPi * phase_frac(freq, 1, b);
            switch (w) {
            case Wave::Cos: return {(std::sin(tb) - std::sin(ta)) / k, 0.0};
            case Wave::Sin: return {(std::cos(ta) - std::cos(tb)) / k, 0.0};
            case Wave::Exp: return (std::polar(1.0, tb) - std::polar(1.0, ta)) / Complex{0.0, k};
            }
            return {};
        };
    }
    const double deriv = power == 1 ? kTwoPi * std::abs(freq) : 0.0;
    return axis_sampler(dim, axis, std::move(g), std::move(integral), 1.0, deriv);
}

FnSampler sawtooth(double scale, std::size_t axis, std::size_t dim) {
    auto g = [scale](double x) { return Complex{frac(scale * x), 0.0}; };
    auto integral = [scale](double a, double b) -> Complex {
        if (scale == 0.0) return {};
        return {(sawtooth_primitive(scale * b) - sawtooth_primitive(scale * a)) / scale, 0.0};
    };
    return axis_sampler(dim, axis, g, integral, 1.0, 0.0);
}

FnSampler frac_indicator(double scale, double lo, double hi, std::size_t axis, std::size_t dim) {
    if (!(0.0 <= lo && lo <= hi && hi <= 1.0)) throw std::invalid_argument("frac_indicator: need 0 <= lo <= hi <= 1");
    auto g = [scale, lo, hi](double x) {
        const double u = frac(scale * x);
        return Complex{(u >= lo && u < hi) ? 1.0 : 0.0, 0.0};
    };
    auto integral = [scale, lo, hi, g](double a, double b) -> Complex {
        if (scale == 0.0) return g(0.0) * (b - a);
        return {(window_primitive(scale * b, lo, hi) - window_primitive(scale * a, lo, hi)) / scale, 0.0};
    };
    return axis_sampler(dim, axis, g, integral, 1.0, 0.0);
}

FnSampler product(const std::vector<FnSampler>& factors) {
    if (factors.empty()) throw std::invalid_argument("product: no factors");
    const std::size_t dim = factors.front().dim;
    bool separable = true;
    bool derivs = true;
    for (const auto& f : factors) {
        if (f.dim != dim) throw std::invalid_argument("product: factor dimensions differ");
        if (f.value_size != 1) throw std::invalid_argument("product: factors must be scalar");
        separable = separable && f.separable.size() == dim;
        derivs = derivs && f.derivative_bound > 0.0;
    }
    FnSampler out;
    out.dim = dim;
    out.bound = 1.0;
    for (const auto& f : factors) out.bound *= f.bound;
    if (derivs) {
        for (std::size_t i = 0; i < factors.size(); ++i) {
            double term = factors[i].derivative_bound;
            for (std::size_t j = 0; j < factors.size(); ++j)
                if (j != i) term *= factors[j].bound;
            out.derivative_bound += term;
        }
    }
    out.eval = [factors](std::span<const double> x, std::span<Complex> o) {
        Complex acc{1.0, 0.0};
        Complex v[1];
        for (const auto& f : factors) {
            f.eval(x, v);
            acc *= v[0];
        }
        o[0] = acc;
    };
    if (separable) {
        out.separable.assign(dim, one_factor());
        for (std::size_t i = 0; i < dim; ++i) {
            std::vector<Separable1D> live;
            for (const auto& f : factors)
                if (!f.separable[i].is_one) live.push_back(f.separable[i]);
            if (live.size() == 1) {
                out.separable[i] = live.front();
            } else if (live.size() > 1) {
                out.separable[i].is_one = false;
                out.separable[i].integral = nullptr;
                out.separable[i].value = [live](double x) {
                    Complex acc{1.0, 0.0};
                    for (const auto& g : live) acc *= g.value(x);
                    return acc;
                };
            }
        }
    }
    return out;
}

FnSampler decay(std::size_t axis, std::size_t dim) {
    auto g = [](double x) { return Complex{1.0 / (1.0 + std::abs(x)), 0.0}; };
    auto prim = [](double u) { return std::copysign(std::log1p(std::abs(u)), u); };
    auto integral = [prim](double a, double b) { return Complex{prim(b) - prim(a), 0.0}; };
    return axis_sampler(dim, axis, g, integral, 1.0, 1.0);
}

FnSampler log_square_wave(std::size_t axis, std::size_t dim) {
    auto g = [](double x) {
        const double s = std::sin(kTwoPi * std::log1p(std::abs(x)));
        return Complex{s >= 0.0 ? 1.0 : -1.0, 0.0};
    };
    auto prim = [](double u) { return u < 0.0 ? -log_square_primitive(-u) : log_square_primitive(u); };
    auto integral = [prim](double a, double b) { return Complex{prim(b) - prim(a), 0.0}; };
    return axis_sampler(dim, axis, g, integral, 1.0, 0.0);
}

FnSampler log2_parity(std::size_t axis, std::size_t dim) {
    auto g = [](double x) {
        if (x < 1.0) return Complex{};
        const int e = std::ilogb(x);
        return Complex{e % 2 == 0 ? 1.0 : 0.0, 0.0};
    };
    auto integral = [](double a, double b) { return Complex{log2_parity_primitive(b) - log2_parity_primitive(a), 0.0}; };
    return axis_sampler(dim, axis, g, integral, 1.0, 0.0);
}

namespace {

template <class Map>
SeqSampler sequence_from(const FnSampler& f, Map map) {
    SeqSampler s;
    s.dim = f.dim;
    s.value_size = f.value_size;
    s.norm = f.norm;
    s.bound = f.bound;
    const std::size_t d = f.dim;
    s.eval = [f, map, d](std::span<const std::int64_t> n, std::span<Complex> out) {
        double buf[8];
        std::vector<double> heap;
        double* x = buf;
        if (d > 8) {
            heap.resize(d);
            x = heap.data();
        }
        for (std::size_t i = 0; i < d; ++i) x[i] = map(i, n[i]);
        f.eval(std::span<const double>(x, d), out);
    };
    if (f.separable.size() == d) {
        for (std::size_t i = 0; i < d; ++i) {
            auto g = f.separable[i].value;
            s.separable.push_back([g, map, i](std::int64_t n) { return g(map(i, n)); });
        }
    }
    if (f.lift) {
        const auto lift = *f.lift;
        s.coeff_size = lift.coeff_size;
        s.apply = lift.apply;
        s.coeffs = [lift, map, d](std::span<const std::int64_t> n, std::span<Complex> out) {
            std::vector<double> x(d);
            for (std::size_t i = 0; i < d; ++i) x[i] = map(i, n[i]);
            lift.coeffs(x, out);
        };
    }
    return s;
}

void check_point(const FnSampler& f, const Vec& t) {
    if (t.size() != f.dim) throw std::invalid_argument("sequence parameter dimension mismatch");
}

}  // namespace

SeqSampler shift_sequence(const FnSampler& f, const Vec& t) {
    check_point(f, t);
    return sequence_from(f, [t](std::size_t i, std::int64_t n) { return t[i] + static_cast<double>(n); });
}

SeqSampler dilate_sequence(const FnSampler& f, const Vec& t) {
    check_point(f, t);
    return sequence_from(f, [t](std::size_t i, std::int64_t n) { return static_cast<double>(n) * t[i]; });
}

FnSampler reflect(const FnSampler& f, const std::vector<int>& signs) {
    if (signs.size() != f.dim) throw std::invalid_argument("reflect: sign pattern dimension mismatch");
    for (int s : signs)
        if (s != 1 && s != -1) throw std::invalid_argument("reflect: signs must be +1 or -1");
    FnSampler out = f;
    const std::size_t d = f.dim;
    out.eval = [f, signs, d](std::span<const double> x, std::span<Complex> o) {
        std::vector<double> y(d);
        for (std::size_t i = 0; i < d; ++i) y[i] = signs[i] * x[i];
        f.eval(y, o);
    };
    for (std::size_t i = 0; i < out.separable.size(); ++i) {
        if (signs[i] == 1) continue;
        auto& g = out.separable[i];
        auto value = g.value;
        g.value = [value](double x) { return value(-x); };
        if (g.integral) {
            auto integral = g.integral;
            g.integral = [integral](double a, double b) { return integral(-b, -a); };
        }
    }
    if (f.lift) {
        auto coeffs = f.lift->coeffs;
        out.lift->coeffs = [coeffs, signs, d](std::span<const double> x, std::span<Complex> o) {
            std::vector<double> y(d);
            for (std::size_t i = 0; i < d; ++i) y[i] = signs[i] * x[i];
            coeffs(y, o);
        };
    }
    return out;
}

SeqSampler reflect(const SeqSampler& v, const std::vector<int>& signs) {
    if (signs.size() != v.dim) throw std::invalid_argument("reflect: sign pattern dimension mismatch");
    for (int s : signs)
        if (s != 1 && s != -1) throw std::invalid_argument("reflect: signs must be +1 or -1");
    auto map = [signs](std::size_t i, std::int64_t n) { return signs[i] == 1 ? n : 1 - n; };
    SeqSampler out = v;
    const std::size_t d = v.dim;
    out.eval = [v, map, d](std::span<const std::int64_t> n, std::span<Complex> o) {
        std::vector<std::int64_t> m(d);
        for (std::size_t i = 0; i < d; ++i) m[i] = map(i, n[i]);
        v.eval(m, o);
    };
    for (std::size_t i = 0; i < out.separable.size(); ++i) {
        auto g = v.separable[i];
        out.separable[i] = [g, map, i](std::int64_t n) { return g(map(i, n)); };
    }
    if (v.coeffs) {
        auto coeffs = v.coeffs;
        out.coeffs = [coeffs, map, d](std::span<const std::int64_t> n, std::span<Complex> o) {
            std::vector<std::int64_t> m(d);
            for (std::size_t i = 0; i < d; ++i) m[i] = map(i, n[i]);
            coeffs(m, o);
        };
    }
    return out;
}

}  // namespace etl::samplers
