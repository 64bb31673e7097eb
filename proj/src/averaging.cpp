#include "etl/averaging.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace etl {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr std::uint64_t kMaxCells = std::uint64_t{1} << 50;

QuadSpec halved(const QuadSpec& q) {
    QuadSpec h = q;
    for (auto& s : h.step) s *= 0.5;
    return h;
}

std::vector<std::uint64_t> cell_counts(const Box& b, const QuadSpec& q) {
    if (q.step.size() != b.dim()) throw std::invalid_argument("QuadSpec: step dimension does not match box");
    std::vector<std::uint64_t> n(b.dim());
    double total = 1.0;
    for (std::size_t i = 0; i < b.dim(); ++i) {
        if (!(q.step[i] > 0.0)) throw std::invalid_argument("QuadSpec: step must be positive");
        const double c = std::max(1.0, std::ceil(b.edge(i) / q.step[i] - 1e-9));
        total *= c;
        if (total > static_cast<double>(kMaxCells)) throw std::length_error("quadrature grid too large");
        n[i] = static_cast<std::uint64_t>(c);
    }
    return n;
}

std::uint64_t product_of(const std::vector<std::uint64_t>& n) {
    std::uint64_t t = 1;
    for (auto v : n) t *= v;
    return t;
}

// Visits cell midpoints of linear indices [begin, end) of the grid with `n`
// cells per axis (last axis fastest).
template <class Visit>
void visit_cells(const Box& b, const std::vector<std::uint64_t>& n, std::uint64_t begin, std::uint64_t end,
                 Vec& x, const Vec& width, Visit&& visit) {
    const std::size_t d = n.size();
    std::vector<std::uint64_t> idx(d);
    std::uint64_t r = begin;
    for (std::size_t i = d; i > 0; --i) {
        idx[i - 1] = r % n[i - 1];
        r /= n[i - 1];
    }
    for (std::size_t i = 0; i < d; ++i) x[i] = b.lo[i] + (static_cast<double>(idx[i]) + 0.5) * width[i];
    for (std::uint64_t k = begin; k < end; ++k) {
        visit(x);
        std::size_t i = d;
        while (i > 0) {
            --i;
            if (++idx[i] < n[i]) {
                x[i] = b.lo[i] + (static_cast<double>(idx[i]) + 0.5) * width[i];
                break;
            }
            idx[i] = 0;
            x[i] = b.lo[i] + 0.5 * width[i];
        }
    }
}

void require_finite(std::span<const Complex> v) {
    for (const auto& z : v)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw std::domain_error("non-finite sample value");
}

// Mean of `eval` over the midpoints of the cell grid.
std::vector<Complex> midpoint_mean(const std::function<void(std::span<const double>, std::span<Complex>)>& eval,
                                   std::size_t width, const Box& b, const std::vector<std::uint64_t>& n) {
    const std::size_t d = b.dim();
    Vec cw(d);
    for (std::size_t i = 0; i < d; ++i) cw[i] = b.edge(i) / static_cast<double>(n[i]);
    const std::uint64_t total = product_of(n);
    auto sums = block_reduce(total, width, [&](std::uint64_t begin, std::uint64_t end, std::span<Complex> acc) {
        Vec x(d);
        std::vector<Complex> v(width);
        visit_cells(b, n, begin, end, x, cw, [&](const Vec& p) {
            eval(p, v);
            require_finite(v);
            for (std::size_t j = 0; j < width; ++j) acc[j] += v[j];
        });
    });
    for (auto& s : sums) s /= static_cast<double>(total);
    return sums;
}

Complex midpoint_mean_1d(const std::function<Complex(double)>& g, double lo, double hi, std::uint64_t n) {
    const double cw = (hi - lo) / static_cast<double>(n);
    auto sums = block_reduce(n, 1, [&](std::uint64_t begin, std::uint64_t end, std::span<Complex> acc) {
        for (std::uint64_t k = begin; k < end; ++k) {
            const Complex v = g(lo + (static_cast<double>(k) + 0.5) * cw);
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw std::domain_error("non-finite sample value");
            acc[0] += v;
        }
    });
    return sums[0] / static_cast<double>(n);
}

struct Pass {
    VectorValue value;
    bool closed_form = false;
    std::uint64_t cells = 0;
};

Pass average_once(const FnSampler& f, const Box& b, const QuadSpec& q) {
    const std::size_t d = f.dim;
    const auto n = cell_counts(b, q);
    const bool separable = f.value_size == 1 && f.separable.size() == d;

    if (separable && q.closed_form) {
        bool exact = true;
        for (const auto& g : f.separable) exact = exact && (g.is_one || g.integral);
        if (exact) {
            Complex v{1.0, 0.0};
            for (std::size_t i = 0; i < d; ++i)
                if (!f.separable[i].is_one) v *= f.separable[i].integral(b.lo[i], b.hi[i]) / b.edge(i);
            require_finite(std::span<const Complex>(&v, 1));
            return {VectorValue({v}, f.norm), true, 0};
        }
    }
    if (f.lift) {
        const auto& lift = *f.lift;
        const auto c = midpoint_mean(lift.coeffs, lift.coeff_size, b, n);
        std::vector<Complex> out(f.value_size);
        lift.apply(c, out);
        return {VectorValue(std::move(out), f.norm), false, product_of(n)};
    }
    if (separable) {
        Complex v{1.0, 0.0};
        bool exact = true;
        std::uint64_t cells = 0;
        for (std::size_t i = 0; i < d; ++i) {
            const auto& g = f.separable[i];
            if (g.is_one) continue;
            if (q.closed_form && g.integral) {
                v *= g.integral(b.lo[i], b.hi[i]) / b.edge(i);
            } else {
                v *= midpoint_mean_1d(g.value, b.lo[i], b.hi[i], n[i]);
                cells += n[i];
                exact = false;
            }
        }
        return {VectorValue({v}, f.norm), exact, cells};
    }
    auto mean = midpoint_mean(f.eval, f.value_size, b, n);
    return {VectorValue(std::move(mean), f.norm), false, product_of(n)};
}

}  // namespace

QuadSpec QuadSpec::uniform(std::size_t d, double h, bool refine) {
    QuadSpec q;
    q.step.assign(d, h);
    q.refine = refine;
    return q;
}

VectorValue discrete_average(const SeqSampler& s, const Box& b) {
    if (b.dim() != s.dim) throw std::invalid_argument("discrete_average: box dimension mismatch");
    const double w = volume(b);
    const std::uint64_t count = lattice_count(b);
    if (count == 0 || w == 0.0) return VectorValue::zeros(s.value_size, s.norm);
    const std::size_t d = s.dim;
    std::vector<AxisRange> ranges(d);
    for (std::size_t i = 0; i < d; ++i) ranges[i] = lattice_axis_range(b, i);

    if (s.coeffs && s.apply) {
        auto sums = block_reduce(count, s.coeff_size, [&](std::uint64_t begin, std::uint64_t end, std::span<Complex> acc) {
            IVec m(d);
            std::vector<Complex> v(s.coeff_size);
            std::uint64_t r = begin;
            for (std::size_t i = d; i > 0; --i) {
                m[i - 1] = ranges[i - 1].first + static_cast<std::int64_t>(r % ranges[i - 1].count());
                r /= ranges[i - 1].count();
            }
            for (std::uint64_t k = begin; k < end; ++k) {
                s.coeffs(m, v);
                for (std::size_t j = 0; j < v.size(); ++j) acc[j] += v[j];
                for (std::size_t i = d; i > 0; --i) {
                    if (++m[i - 1] <= ranges[i - 1].last) break;
                    m[i - 1] = ranges[i - 1].first;
                }
            }
        });
        for (auto& z : sums) z /= w;
        std::vector<Complex> out(s.value_size);
        s.apply(sums, out);
        return VectorValue(std::move(out), s.norm);
    }

    if (s.value_size == 1 && s.separable.size() == d) {
        Complex v{1.0, 0.0};
        for (std::size_t i = 0; i < d; ++i) {
            const auto& g = s.separable[i];
            const auto first = ranges[i].first;
            auto sum = block_reduce(ranges[i].count(), 1, [&](std::uint64_t begin, std::uint64_t end, std::span<Complex> acc) {
                for (std::uint64_t k = begin; k < end; ++k) acc[0] += g(first + static_cast<std::int64_t>(k));
            });
            v *= sum[0];
        }
        return VectorValue({v / w}, s.norm);
    }

    auto sums = block_reduce(count, s.value_size, [&](std::uint64_t begin, std::uint64_t end, std::span<Complex> acc) {
        IVec m(d);
        std::vector<Complex> v(s.value_size);
        std::uint64_t r = begin;
        for (std::size_t i = d; i > 0; --i) {
            m[i - 1] = ranges[i - 1].first + static_cast<std::int64_t>(r % ranges[i - 1].count());
            r /= ranges[i - 1].count();
        }
        for (std::uint64_t k = begin; k < end; ++k) {
            s.eval(m, v);
            for (std::size_t j = 0; j < v.size(); ++j) acc[j] += v[j];
            for (std::size_t i = d; i > 0; --i) {
                if (++m[i - 1] <= ranges[i - 1].last) break;
                m[i - 1] = ranges[i - 1].first;
            }
        }
    });
    for (auto& z : sums) z /= w;
    return VectorValue(std::move(sums), s.norm);
}

Quadrature continuous_average_detailed(const FnSampler& f, const Box& b, const QuadSpec& q) {
    if (b.dim() != f.dim) throw std::invalid_argument("continuous_average: box dimension mismatch");
    Quadrature out;
    if (volume(b) == 0.0) {
        out.value = VectorValue::zeros(f.value_size, f.norm);
        out.closed_form = true;
        if (q.refine) out.half_step = out.value;
        return out;
    }
    auto first = average_once(f, b, q);
    out.value = std::move(first.value);
    out.closed_form = first.closed_form;
    out.cells = first.cells;
    if (q.refine) {
        if (first.closed_form) {
            out.half_step = out.value;
        } else {
            auto second = average_once(f, b, halved(q));
            out.refine_distance = distance(second.value, out.value);
            out.half_step = std::move(second.value);
        }
    }
    return out;
}

VectorValue continuous_average(const FnSampler& f, const Box& b, const QuadSpec& q) {
    return continuous_average_detailed(f, b, q).value;
}

VectorValue continuous_region_average(const FnSampler& f, const Region& r, const QuadSpec& q) {
    const auto cells = disjoint_cells(r);
    VectorValue acc = VectorValue::zeros(f.value_size, f.norm);
    double total = 0.0;
    for (const auto& c : cells) {
        const double w = volume(c);
        if (w == 0.0) continue;
        acc += continuous_average(f, c, q) * Complex{w, 0.0};
        total += w;
    }
    if (total == 0.0) return acc;
    return acc * Complex{1.0 / total, 0.0};
}

VectorValue discrete_region_average(const SeqSampler& s, const Region& r) {
    const auto cells = disjoint_cells(r);
    VectorValue acc = VectorValue::zeros(s.value_size, s.norm);
    double total = 0.0;
    for (const auto& c : cells) {
        const Box h = Box::half_open(c.lo, c.hi);
        const double w = volume(h);
        if (w == 0.0) continue;
        acc += discrete_average(s, h) * Complex{w, 0.0};
        total += w;
    }
    if (total == 0.0) return acc;
    return acc * Complex{1.0 / total, 0.0};
}

StepCheck check_step(const FnSampler& f, const QuadSpec& q) {
    StepCheck c;
    const double deriv = f.lift && f.lift->coeff_derivative_bound > 0.0 ? f.lift->coeff_derivative_bound : f.derivative_bound;
    if (!(deriv > 0.0)) return c;
    c.declared = true;
    double h = 0.0;
    for (double s : q.step) h = std::max(h, s);
    c.product = h * deriv;
    c.ok = c.product <= 0.1;
    return c;
}

Complex phase_average(const PhaseSampler& p, const Box& b, const QuadSpec& q) {
    if (b.dim() != p.dim) throw std::invalid_argument("phase_average: box dimension mismatch");
    if (volume(b) == 0.0) return {};
    const bool linear = q.rule == QuadRule::LinearPhase;
    if (linear && !p.gradient) throw std::invalid_argument("phase_average: linear-phase rule needs a gradient");
    const auto n = cell_counts(b, q);
    const std::size_t d = b.dim();
    Vec cw(d);
    for (std::size_t i = 0; i < d; ++i) cw[i] = b.edge(i) / static_cast<double>(n[i]);
    const std::uint64_t total = product_of(n);
    auto sums = block_reduce(total, 1, [&](std::uint64_t begin, std::uint64_t end, std::span<Complex> acc) {
        Vec x(d);
        std::vector<double> grad(d);
        visit_cells(b, n, begin, end, x, cw, [&](const Vec& m) {
            const double phi = p.phase(m);
            if (!std::isfinite(phi)) throw std::domain_error("non-finite phase value");
            Complex v = std::polar(1.0, kTwoPi * (phi - std::floor(phi)));
            if (linear) {
                p.gradient(m, grad);
                double damp = 1.0;
                for (std::size_t i = 0; i < d; ++i) {
                    const double a = std::numbers::pi * grad[i] * cw[i];
                    if (a != 0.0) damp *= std::sin(a) / a;
                }
                v *= damp;
            }
            acc[0] += v;
        });
    });
    return sums[0] / static_cast<double>(total);
}

SeqSampler running_average_sequence(const FnSampler& f, double c, const QuadSpec& q) {
    if (f.dim != 1) throw std::invalid_argument("running_average_sequence: sampler must be one-dimensional");
    if (!(c > 0.0)) throw std::invalid_argument("running_average_sequence: c must be positive");
    SeqSampler s;
    s.dim = 1;
    s.value_size = f.value_size;
    s.norm = f.norm;
    s.bound = f.bound;
    s.eval = [f, c, q](std::span<const std::int64_t> n, std::span<Complex> out) {
        if (n[0] <= 0) {
            std::fill(out.begin(), out.end(), Complex{});
            return;
        }
        const auto v = continuous_average(f, Box::half_open({0.0}, {c * static_cast<double>(n[0])}), q);
        std::copy(v.components().begin(), v.components().end(), out.begin());
    };
    return s;
}

ScaleSchedule ScaleSchedule::geometric(const Vec& start, double ratio, std::size_t count) {
    if (!(ratio > 1.0)) throw std::invalid_argument("ScaleSchedule: ratio must exceed 1");
    ScaleSchedule s;
    Vec b = start;
    for (std::size_t k = 0; k < count; ++k) {
        s.scales.push_back(Box::origin(b));
        for (auto& v : b) v *= ratio;
    }
    s.validate();
    return s;
}

ScaleSchedule ScaleSchedule::of_boxes(std::vector<Box> boxes) {
    ScaleSchedule s;
    s.scales = std::move(boxes);
    s.validate();
    return s;
}

ScaleSchedule ScaleSchedule::of_lengths(const std::vector<double>& lengths, std::size_t d) {
    ScaleSchedule s;
    for (double L : lengths) s.scales.push_back(Box::origin(Vec(d, L)));
    s.validate();
    return s;
}

void ScaleSchedule::validate() const {
    if (scales.empty()) throw std::invalid_argument("ScaleSchedule: empty schedule");
    double prev = -1.0;
    for (const auto& b : scales) {
        if (b.dim() != scales.front().dim()) throw std::invalid_argument("ScaleSchedule: mixed dimensions");
        const double l = box_measures(b).l;
        if (!(l > prev)) throw std::invalid_argument("ScaleSchedule: l(b_k) must be strictly increasing");
        prev = l;
    }
    if (!(ambient_factor >= 1.0)) throw std::invalid_argument("ScaleSchedule: ambient factor must be >= 1");
}

std::vector<std::vector<Box>> ScaleSchedule::windows(bool uniform) const {
    std::vector<std::vector<Box>> out;
    out.reserve(scales.size());
    for (std::size_t k = 0; k < scales.size(); ++k) {
        const Box& b = scales[k];
        if (!uniform) {
            out.push_back({b});
            continue;
        }
        const std::size_t d = b.dim();
        std::vector<Box> family;
        auto add = [&](const Vec& offset) {
            Box w = b.translated(offset);
            if (std::find(family.begin(), family.end(), w) == family.end()) family.push_back(std::move(w));
        };
        Vec L(d), slack(d);
        for (std::size_t i = 0; i < d; ++i) {
            L[i] = b.edge(i);
            slack[i] = std::floor(ambient_factor * L[i] - L[i]);
        }
        for (int pick = 0; pick < 4; ++pick) {
            Vec off(d);
            for (std::size_t i = 0; i < d; ++i) {
                const double B = ambient_factor * L[i];
                switch (pick) {
                case 0: off[i] = 0.0; break;
                case 1: off[i] = std::floor(std::sqrt(B)); break;
                case 2: off[i] = std::floor(B / 2.0); break;
                case 3: off[i] = slack[i]; break;
                }
                off[i] = std::clamp(off[i], 0.0, std::max(0.0, slack[i]));
            }
            add(off);
        }
        std::mt19937_64 rng(seed ^ (0x9E3779B97F4A7C15ull * (k + 1)));
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        for (std::size_t r = 0; r < random_offsets; ++r) {
            Vec off(d);
            for (std::size_t i = 0; i < d; ++i) off[i] = std::floor(unit(rng) * std::max(0.0, slack[i]));
            add(off);
        }
        out.push_back(std::move(family));
    }
    return out;
}

ScaleSchedule ScaleSchedule::dilated(const Vec& t) const {
    ScaleSchedule s = *this;
    for (auto& b : s.scales) {
        if (t.size() != b.dim()) throw std::invalid_argument("ScaleSchedule::dilated: dimension mismatch");
        for (std::size_t i = 0; i < t.size(); ++i) {
            if (!(t[i] > 0.0)) throw std::invalid_argument("ScaleSchedule::dilated: factors must be positive");
            b.lo[i] /= t[i];
            b.hi[i] /= t[i];
        }
    }
    return s;
}

namespace {

struct Flat {
    std::size_t scale;
    const Box* box;
};

std::vector<Flat> flatten(const std::vector<std::vector<Box>>& windows) {
    std::vector<Flat> flat;
    for (std::size_t k = 0; k < windows.size(); ++k) {
        if (windows[k].empty()) throw std::invalid_argument("scale without windows");
        for (const auto& b : windows[k]) flat.push_back({k, &b});
    }
    return flat;
}

}  // namespace

LimitEstimate cesaro_limit(const AverageFn& avg, const std::vector<std::vector<Box>>& windows, double tol,
                           std::size_t tail) {
    if (tail < 2) throw std::invalid_argument("cesaro_limit: tail must be >= 2");
    if (windows.empty()) throw std::invalid_argument("cesaro_limit: empty schedule");
    if (windows.size() < tail) throw std::invalid_argument("cesaro_limit: schedule shorter than tail");
    const auto flat = flatten(windows);
    auto values = parallel_map<VectorValue>(flat.size(), [&](std::size_t i) { return avg(*flat[i].box); });

    LimitEstimate est;
    est.tolerance = tol;
    const std::size_t first_tail = windows.size() - tail;
    std::vector<const VectorValue*> tail_values;
    for (std::size_t i = 0; i < flat.size(); ++i) {
        est.history.push_back({flat[i].scale, *flat[i].box, values[i]});
        if (flat[i].scale >= first_tail) tail_values.push_back(&values[i]);
    }
    for (std::size_t k = 0; k < windows.size(); ++k) est.scales_used.push_back(k);
    for (std::size_t i = 0; i < flat.size(); ++i)
        if (flat[i].scale == windows.size() - 1) {
            est.value = values[i];
            break;
        }
    double residual = 0.0;
    for (std::size_t i = 0; i < tail_values.size(); ++i)
        for (std::size_t j = i + 1; j < tail_values.size(); ++j)
            residual = std::max(residual, distance(*tail_values[i], *tail_values[j]));
    if (!std::isfinite(residual)) residual = std::numeric_limits<double>::infinity();
    est.residual = residual;
    est.converged = residual <= tol;
    return est;
}

LimitEstimate cesaro_limit(const AverageFn& avg, const ScaleSchedule& sched, bool uniform, double tol,
                           std::size_t tail) {
    sched.validate();
    return cesaro_limit(avg, sched.windows(uniform), tol, tail);
}

Bounds cesaro_bounds(const RealAverageFn& avg, const std::vector<std::vector<Box>>& windows, std::size_t tail) {
    if (windows.empty()) throw std::invalid_argument("cesaro_bounds: empty schedule");
    if (tail == 0) tail = (windows.size() + 1) / 2;
    tail = std::min(tail, windows.size());
    const auto flat = flatten(windows);
    auto values = parallel_map<double>(flat.size(), [&](std::size_t i) { return avg(*flat[i].box); });
    Bounds out;
    out.lo = std::numeric_limits<double>::infinity();
    out.hi = -std::numeric_limits<double>::infinity();
    const std::size_t first_tail = windows.size() - tail;
    for (std::size_t i = 0; i < flat.size(); ++i) {
        out.history.push_back({flat[i].scale, *flat[i].box, VectorValue::scalar(values[i])});
        if (flat[i].scale < first_tail) continue;
        out.lo = std::min(out.lo, values[i]);
        out.hi = std::max(out.hi, values[i]);
    }
    return out;
}

Bounds cesaro_bounds(const RealAverageFn& avg, const ScaleSchedule& sched, bool uniform, std::size_t tail) {
    sched.validate();
    return cesaro_bounds(avg, sched.windows(uniform), tail);
}

}  // namespace etl
