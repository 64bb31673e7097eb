#include "etl/density.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "etl/samplers.hpp"

namespace etl {

namespace sets {

namespace {

void check_axis(std::size_t axis, std::size_t dim) {
    if (dim == 0) throw std::invalid_argument("set dimension must be >= 1");
    if (axis >= dim) throw std::invalid_argument("set axis out of range");
}

Box clip_axis(const Box& window, std::size_t axis, double lo, double hi) {
    Box b = Box::closed(window.lo, window.hi);
    b.lo[axis] = std::max(lo, window.lo[axis]);
    b.hi[axis] = std::min(hi, window.hi[axis]);
    return b;
}

}  // namespace

DensitySet periodic_intervals(double period, double lo, double hi, std::size_t axis, std::size_t dim) {
    check_axis(axis, dim);
    if (!(period > 0.0) || !(0.0 <= lo && lo < hi && hi <= period))
        throw std::invalid_argument("periodic_intervals: need 0 <= lo < hi <= period");
    DensitySet s;
    s.dim = dim;
    s.contains = [=](std::span<const double> x) {
        const double r = x[axis] - period * std::floor(x[axis] / period);
        return r >= lo && r < hi;
    };
    s.exact_form = [=](const Box& w) {
        Region out;
        if (w.empty()) return out;
        const double k0 = std::floor((w.lo[axis] - hi) / period);
        for (double k = k0; k * period + lo < w.hi[axis]; k += 1.0) {
            Box b = clip_axis(w, axis, k * period + lo, k * period + hi);
            if (!b.empty()) out.push_back(std::move(b));
        }
        return out;
    };
    return s;
}

DensitySet geometric_blocks(double base, double lo, double hi, std::size_t axis, std::size_t dim) {
    check_axis(axis, dim);
    if (!(base > 1.0) || !(0.0 < lo && lo < hi && hi <= base * lo))
        throw std::invalid_argument("geometric_blocks: need base > 1 and 0 < lo < hi <= base * lo");
    DensitySet s;
    s.dim = dim;
    s.contains = [=](std::span<const double> x) {
        double scale = 1.0;
        for (int k = 0; k < 2000 && scale * lo <= x[axis]; ++k, scale *= base)
            if (x[axis] < scale * hi) return true;
        return false;
    };
    s.exact_form = [=](const Box& w) {
        Region out;
        if (w.empty()) return out;
        double scale = 1.0;
        for (int k = 0; k < 2000 && scale * lo < w.hi[axis]; ++k, scale *= base) {
            Box b = clip_axis(w, axis, scale * lo, scale * hi);
            if (!b.empty()) out.push_back(std::move(b));
        }
        return out;
    };
    return s;
}

DensitySet frac_window(double scale, double lo, double hi, std::size_t axis, std::size_t dim) {
    if (!(scale > 0.0)) throw std::invalid_argument("frac_window: scale must be positive");
    return periodic_intervals(1.0 / scale, lo / scale, hi / scale, axis, dim);
}

DensitySet residue_class(std::int64_t modulus, std::int64_t residue, std::size_t axis, std::size_t dim) {
    check_axis(axis, dim);
    if (modulus < 1) throw std::invalid_argument("residue_class: modulus must be >= 1");
    DensitySet s;
    s.dim = dim;
    s.contains = [=](std::span<const double> x) {
        const double v = x[axis];
        if (v != std::floor(v)) return false;
        const auto n = static_cast<std::int64_t>(v);
        return ((n % modulus) + modulus) % modulus == ((residue % modulus) + modulus) % modulus;
    };
    s.exact_form = [](const Box&) { return Region{}; };
    return s;
}

DensitySet everything(std::size_t dim) {
    if (dim == 0) throw std::invalid_argument("set dimension must be >= 1");
    DensitySet s;
    s.dim = dim;
    s.contains = [](std::span<const double>) { return true; };
    s.exact_form = [](const Box& w) { return w.empty() ? Region{} : Region{w}; };
    return s;
}

DensitySet bounded(const Box& b) {
    DensitySet s;
    s.dim = b.dim();
    s.contains = [b](std::span<const double> x) { return b.contains(Vec(x.begin(), x.end())); };
    s.exact_form = [b](const Box& w) {
        Box c = b.intersect(w);
        return c.empty() ? Region{} : Region{c};
    };
    return s;
}

DensitySet level_set(const FnSampler& f, const VectorValue& L, double eps) {
    if (L.size() != f.value_size) throw std::invalid_argument("level_set: L has the wrong size");
    DensitySet s;
    s.dim = f.dim;
    s.contains = [f, L, eps](std::span<const double> x) {
        std::vector<Complex> v(f.value_size);
        f.eval(x, v);
        return distance(VectorValue(std::move(v), L.norm_spec()), L) > eps;
    };
    return s;
}

DensitySet complement(const DensitySet& s) {
    DensitySet c;
    c.dim = s.dim;
    auto in = s.contains;
    c.contains = [in](std::span<const double> x) { return !in(x); };
    return c;
}

}  // namespace sets

std::string to_string(DensityKind k) {
    switch (k) {
    case DensityKind::Standard: return "standard";
    case DensityKind::Upper: return "upper";
    case DensityKind::Lower: return "lower";
    case DensityKind::Uniform: return "uniform";
    case DensityKind::UpperUniform: return "upper_uniform";
    case DensityKind::LowerUniform: return "lower_uniform";
    }
    return "standard";
}

DensityKind density_kind_from_string(const std::string& s) {
    for (auto k : {DensityKind::Standard, DensityKind::Upper, DensityKind::Lower, DensityKind::Uniform,
                   DensityKind::UpperUniform, DensityKind::LowerUniform})
        if (to_string(k) == s) return k;
    throw std::invalid_argument("unknown density kind: " + s);
}

double window_density(const DensitySet& s, const Box& window, Ambient ambient, double step, std::string* path) {
    if (window.dim() != s.dim) throw std::invalid_argument("window_density: dimension mismatch");
    const double w = volume(window);
    if (w == 0.0) return 0.0;
    if (ambient == Ambient::Lattice) {
        if (path) *path = "lattice";
        auto seq = samplers::scalar_seq(
            s.dim,
            [in = s.contains](std::span<const std::int64_t> n) {
                double buf[8];
                std::vector<double> heap;
                double* x = buf;
                if (n.size() > 8) {
                    heap.resize(n.size());
                    x = heap.data();
                }
                for (std::size_t i = 0; i < n.size(); ++i) x[i] = static_cast<double>(n[i]);
                return Complex{in(std::span<const double>(x, n.size())) ? 1.0 : 0.0, 0.0};
            },
            1.0);
        return discrete_average(seq, window).real();
    }
    if (s.exact_form) {
        if (path) *path = "exact";
        double m = 0.0;
        for (const auto& b : s.exact_form(window)) m += volume(b.intersect(window));
        return m / w;
    }
    if (path) *path = "quadrature";
    auto f = samplers::scalar(s.dim, [in = s.contains](std::span<const double> x) { return Complex{in(x) ? 1.0 : 0.0, 0.0}; }, 1.0);
    return continuous_average(f, window, QuadSpec::uniform(s.dim, step)).real();
}

double DensityResult::value() const {
    switch (kind) {
    case DensityKind::Standard:
    case DensityKind::Uniform: return limit ? limit->value.real() : 0.5 * (lo + hi);
    case DensityKind::Upper:
    case DensityKind::UpperUniform: return hi;
    case DensityKind::Lower:
    case DensityKind::LowerUniform: return lo;
    }
    return hi;
}

namespace {

bool uniform_kind(DensityKind k) {
    return k == DensityKind::Uniform || k == DensityKind::UpperUniform || k == DensityKind::LowerUniform;
}

bool limit_kind(DensityKind k) { return k == DensityKind::Standard || k == DensityKind::Uniform; }

}  // namespace

DensityResult density_estimate(const DensitySet& s, const DensitySpec& spec) {
    spec.sched.validate();
    const auto windows = spec.sched.windows(uniform_kind(spec.kind));
    DensityResult out;
    out.kind = spec.kind;
    window_density(s, windows.front().front(), spec.ambient, spec.step, &out.path);
    RealAverageFn avg = [&](const Box& b) { return window_density(s, b, spec.ambient, spec.step); };
    if (limit_kind(spec.kind)) {
        out.limit = cesaro_limit([&](const Box& b) { return VectorValue::scalar(avg(b)); }, windows, spec.tol,
                                 std::min(spec.tail, windows.size()));
        out.lo = std::numeric_limits<double>::infinity();
        out.hi = -out.lo;
        for (const auto& h : out.limit->history) {
            if (h.scale_index + spec.tail < windows.size()) continue;
            out.lo = std::min(out.lo, h.value.real());
            out.hi = std::max(out.hi, h.value.real());
        }
    } else {
        const auto b = cesaro_bounds(avg, windows, 0);
        out.lo = b.lo;
        out.hi = b.hi;
    }
    return out;
}

namespace {

SeqSampler section_sequence(const DensitySet& s, const Vec& t, SectionMode mode) {
    const std::size_t d = s.dim;
    return samplers::scalar_seq(
        d,
        [in = s.contains, t, mode, d](std::span<const std::int64_t> n) {
            std::vector<double> x(d);
            for (std::size_t i = 0; i < d; ++i)
                x[i] = mode == SectionMode::Translate ? t[i] + static_cast<double>(n[i]) : static_cast<double>(n[i]) * t[i];
            return Complex{in(x) ? 1.0 : 0.0, 0.0};
        },
        1.0);
}

std::vector<Vec> section_points(std::size_t d, SectionMode mode, std::size_t t_grid, const TSampling& t, const Vec& c) {
    if (mode == SectionMode::Translate) return unit_grid(d, t_grid);
    if (c.size() != d) throw std::invalid_argument("dilate mode needs c of matching dimension");
    return sample_points(t, Box::half_open(Vec(d, 0.0), c));
}

}  // namespace

TransferReport section_density_check(const DensitySet& s, const SectionSpec& spec) {
    const std::size_t d = s.dim;
    const double limit_tol = spec.limit_tol < 0.0 ? spec.tol : spec.limit_tol;
    const double spread_tol = spec.spread_tol < 0.0 ? spec.tol : spec.spread_tol;
    const Scheme scheme = spec.uniform ? Scheme::uniform(d) : Scheme::standard(d);
    const auto ts = section_points(d, spec.mode, spec.t_grid, spec.t, spec.c);
    if (ts.empty()) throw std::invalid_argument("section_density_check: no t-samples");

    TransferReport rep;
    auto ests = parallel_map<LimitEstimate>(ts.size(), [&](std::size_t i) {
        const auto sched = spec.mode == SectionMode::Dilate && spec.dilation_adapted ? spec.discrete_sched.dilated(ts[i])
                                                                                      : spec.discrete_sched;
        return discrete_scheme_limit(section_sequence(s, ts[i], spec.mode), scheme, sched, limit_tol, spec.tail);
    });
    std::vector<const VectorValue*> good;
    std::size_t unconverged = 0;
    rep.per_t.reserve(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) {
        rep.per_t.push_back({ts[i], std::move(ests[i])});
        const auto& e = rep.per_t.back().estimate;
        if (e.converged)
            good.push_back(&e.value);
        else
            ++unconverged;
    }
    DensitySpec ds;
    ds.kind = spec.uniform ? DensityKind::Uniform : DensityKind::Standard;
    ds.ambient = Ambient::Continuum;
    ds.sched = spec.continuous_sched;
    ds.step = spec.step;
    ds.tol = limit_tol;
    ds.tail = spec.tail;
    const auto whole = density_estimate(s, ds);
    rep.continuous_side = *whole.limit;
    if (!whole.path.empty()) rep.warnings.push_back("continuous measure path: " + whole.path);

    if (spec.mode == SectionMode::Translate) {
        std::vector<const VectorValue*> all;
        for (const auto& p : rep.per_t) all.push_back(&p.estimate.value);
        VectorValue acc = *all.front();
        for (std::size_t i = 1; i < all.size(); ++i) acc += *all[i];
        rep.discrete_side = acc * Complex{1.0 / static_cast<double>(all.size()), 0.0};
        rep.deviation = distance(rep.discrete_side, rep.continuous_side.value);
        if (unconverged > 0) {
            rep.verdict = Verdict::Fail;
            rep.reason = std::to_string(unconverged) + " section densities did not converge";
        } else if (!rep.continuous_side.converged) {
            rep.verdict = Verdict::Fail;
            rep.reason = "density of S did not converge";
        } else {
            rep.verdict = rep.deviation <= spec.tol ? Verdict::Pass : Verdict::Fail;
            if (!rep.pass()) rep.reason = "deviation exceeds tolerance";
        }
        return rep;
    }

    if (good.size() < 2) {
        rep.verdict = Verdict::Inconclusive;
        rep.reason = "fewer than two converged section densities";
        return rep;
    }
    double spread = 0.0;
    VectorValue acc = *good.front();
    for (std::size_t i = 0; i < good.size(); ++i) {
        if (i) acc += *good[i];
        for (std::size_t j = i + 1; j < good.size(); ++j) spread = std::max(spread, distance(*good[i], *good[j]));
    }
    rep.constancy_spread = spread;
    rep.discrete_side = acc * Complex{1.0 / static_cast<double>(good.size()), 0.0};
    rep.deviation = distance(rep.discrete_side, rep.continuous_side.value);
    if (unconverged > 0) rep.warnings.push_back(std::to_string(unconverged) + " section densities did not converge");
    if (!rep.continuous_side.converged) {
        rep.verdict = Verdict::Fail;
        rep.reason = "density of S did not converge";
    } else if (spread > spread_tol) {
        rep.verdict = Verdict::Fail;
        rep.reason = "section densities are not constant within tolerance";
    } else if (rep.deviation > spec.tol) {
        rep.verdict = Verdict::Fail;
        rep.reason = "deviation exceeds tolerance";
    } else {
        rep.verdict = Verdict::Pass;
    }
    return rep;
}

ConvergenceReport density_convergence_check(const FnSampler& f, const ConvergenceSpec& spec) {
    const std::size_t d = f.dim;
    if (spec.eps.empty()) throw std::invalid_argument("density_convergence_check: empty eps list");
    const auto ts = section_points(d, spec.mode, spec.t_grid, spec.t, spec.c);
    if (ts.empty()) throw std::invalid_argument("density_convergence_check: no t-samples");
    const Scheme scheme = spec.uniform ? Scheme::uniform(d) : Scheme::standard(d);
    ConvergenceReport rep;
    rep.eps = spec.eps;
    bool hypothesis = true;
    bool conclusion = true;
    for (double eps : spec.eps) {
        const DensitySet S = sets::level_set(f, spec.L, eps);
        auto worst = parallel_map<double>(ts.size(), [&](std::size_t i) {
            const auto sched = spec.mode == SectionMode::Dilate && spec.dilation_adapted ? spec.discrete_sched.dilated(ts[i])
                                                                                          : spec.discrete_sched;
            return discrete_scheme_bounds(section_sequence(S, ts[i], spec.mode), scheme, sched, 0).bounds.hi;
        });
        const double w = *std::max_element(worst.begin(), worst.end());
        rep.worst_section_density.push_back(w);
        if (w > spec.tol) hypothesis = false;

        DensitySpec ds;
        ds.kind = spec.uniform ? DensityKind::UpperUniform : DensityKind::Upper;
        ds.ambient = Ambient::Continuum;
        ds.sched = spec.continuous_sched;
        ds.step = spec.step;
        ds.tol = spec.tol;
        ds.tail = spec.tail;
        const double D = density_estimate(S, ds).hi;
        rep.densities.push_back(D);
        if (D > spec.tol) conclusion = false;
    }
    if (!hypothesis) {
        rep.verdict = Verdict::Inconclusive;
        rep.reason = "sampled sections do not converge in density";
    } else if (!conclusion) {
        rep.verdict = Verdict::Fail;
        rep.reason = "a level set has density above tolerance";
    } else {
        rep.verdict = Verdict::Pass;
    }
    return rep;
}

}  // namespace etl
