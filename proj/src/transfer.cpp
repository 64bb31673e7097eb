#include "etl/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "etl/samplers.hpp"

namespace etl {

std::string to_string(Verdict v) {
    switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Inconclusive: return "inconclusive";
    case Verdict::InvalidInput: return "invalid_input";
    }
    return "fail";
}

bool near_low_rational(double x, std::int64_t q_max, double radius) {
    for (std::int64_t q = 1; q <= q_max; ++q) {
        const double p = std::round(x * static_cast<double>(q));
        if (std::abs(x - p / static_cast<double>(q)) < radius) return true;
    }
    return false;
}

namespace {

bool excluded(const TSampling& s, const Vec& t) {
    if (s.exclusion_q_max <= 0) return false;
    return std::any_of(t.begin(), t.end(), [&](double v) { return near_low_rational(v, s.exclusion_q_max, s.exclusion_radius); });
}

constexpr double kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};

std::string describe(const Vec& t) {
    std::ostringstream os;
    os.precision(6);
    os << '(';
    for (std::size_t i = 0; i < t.size(); ++i) os << (i ? ", " : "") << t[i];
    os << ')';
    return os.str();
}

double opt_or(double v, double fallback) { return v < 0.0 ? fallback : v; }

VectorValue mean_of(const std::vector<const VectorValue*>& vals) {
    VectorValue acc = *vals.front();
    for (std::size_t i = 1; i < vals.size(); ++i) acc += *vals[i];
    return acc * Complex{1.0 / static_cast<double>(vals.size()), 0.0};
}

double max_pairwise(const std::vector<const VectorValue*>& vals) {
    double m = 0.0;
    for (std::size_t i = 0; i < vals.size(); ++i)
        for (std::size_t j = i + 1; j < vals.size(); ++j) m = std::max(m, distance(*vals[i], *vals[j]));
    return m;
}

}  // namespace

std::vector<Vec> sample_points(const TSampling& s, const Box& region) {
    const std::size_t d = region.dim();
    std::vector<Vec> out;
    auto place = [&](const Vec& u) {
        Vec t(d);
        for (std::size_t i = 0; i < d; ++i) t[i] = region.lo[i] + u[i] * (region.hi[i] - region.lo[i]);
        return t;
    };
    if (s.grid_per_axis > 0) {
        for (const auto& u : unit_grid(d, s.grid_per_axis)) {
            Vec t = place(u);
            if (!excluded(s, t)) out.push_back(std::move(t));
        }
    }
    for (std::size_t k = 0; k < s.kronecker; ++k) {
        Vec u(d);
        for (std::size_t i = 0; i < d; ++i) {
            const double a = std::sqrt(kPrimes[i % 16]) + static_cast<double>(i / 16) * std::sqrt(0.5);
            const double v = static_cast<double>(k + 1) * a;
            u[i] = v - std::floor(v);
        }
        Vec t = place(u);
        if (!excluded(s, t)) out.push_back(std::move(t));
    }
    std::mt19937_64 rng(s.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t k = 0; k < s.random; ++k) {
        for (int attempt = 0; attempt < 1000; ++attempt) {
            Vec u(d);
            for (auto& v : u) v = 1.0 - unit(rng);  // (0, 1]
            Vec t = place(u);
            if (!excluded(s, t)) {
                out.push_back(std::move(t));
                break;
            }
        }
    }
    return out;
}

std::vector<Vec> unit_grid(std::size_t d, std::size_t per_axis) {
    std::vector<Vec> out;
    if (d == 0 || per_axis == 0) return out;
    const auto mids = unit_midpoints(per_axis);
    std::size_t total = 1;
    for (std::size_t i = 0; i < d; ++i) total *= per_axis;
    out.reserve(total);
    for (std::size_t j = 0; j < total; ++j) {
        Vec t(d);
        std::size_t r = j;
        for (std::size_t i = d; i > 0; --i) {
            t[i - 1] = mids[r % per_axis];
            r /= per_axis;
        }
        out.push_back(std::move(t));
    }
    return out;
}

std::vector<std::vector<int>> sign_patterns(std::size_t d) {
    std::vector<std::vector<int>> out;
    const std::size_t n = std::size_t{1} << d;
    for (std::size_t m = 0; m < n; ++m) {
        std::vector<int> s(d);
        for (std::size_t i = 0; i < d; ++i) s[i] = (m >> (d - 1 - i)) & 1 ? -1 : 1;
        out.push_back(std::move(s));
    }
    return out;
}

OrthantCombination orthant_combine(const std::map<std::vector<int>, LimitEstimate>& per_orthant, double tol) {
    if (per_orthant.empty()) throw std::invalid_argument("orthant_combine: no orthants");
    const std::size_t d = per_orthant.begin()->first.size();
    std::vector<const VectorValue*> vals;
    OrthantCombination out;
    double residual = 0.0;
    bool converged = true;
    for (const auto& s : sign_patterns(d)) {
        auto it = per_orthant.find(s);
        if (it == per_orthant.end()) throw std::invalid_argument("orthant_combine: missing orthant");
        vals.push_back(&it->second.value);
        residual = std::max(residual, it->second.residual);
        converged = converged && it->second.converged;
        for (const auto& h : it->second.history) out.estimate.history.push_back(h);
        if (out.estimate.scales_used.empty()) out.estimate.scales_used = it->second.scales_used;
    }
    out.spread = max_pairwise(vals);
    out.agree = out.spread <= tol;
    out.estimate.value = mean_of(vals);
    out.estimate.tolerance = tol;
    out.estimate.residual = std::max(residual, out.spread);
    out.estimate.converged = converged && out.agree;
    return out;
}

double orthant_combine(const std::map<std::vector<int>, double>& per_orthant, OrthantMode mode) {
    if (per_orthant.empty()) throw std::invalid_argument("orthant_combine: no orthants");
    const std::size_t d = per_orthant.begin()->first.size();
    double out = mode == OrthantMode::Liminf ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
    for (const auto& s : sign_patterns(d)) {
        auto it = per_orthant.find(s);
        if (it == per_orthant.end()) throw std::invalid_argument("orthant_combine: missing orthant");
        out = mode == OrthantMode::Liminf ? std::min(out, it->second) : std::max(out, it->second);
    }
    return out;
}

namespace {

std::vector<std::vector<Box>> scheme_windows(const Scheme& scheme, const ScaleSchedule& sched) {
    sched.validate();
    if (sched.scales.front().dim() != scheme.dim) throw std::invalid_argument("schedule dimension does not match scheme");
    const bool uniform = scheme.kind == SchemeKind::UniformCesaro || scheme.kind == SchemeKind::TwoSidedUniform;
    return sched.windows(uniform);
}

double folner_index(const Box& b) { return box_measures(b).l; }

// One-sided average for orthant-free schemes.
AverageFn discrete_averager(const SeqSampler& s, const Scheme& scheme) {
    if (scheme.kind == SchemeKind::Folner) {
        const FolnerSequence F = *scheme.folner;
        return [s, F](const Box& b) { return discrete_region_average(s, F.region(folner_index(b))); };
    }
    return [s](const Box& b) { return discrete_average(s, b); };
}

AverageFn continuous_averager(const FnSampler& f, const Scheme& scheme, const QuadSpec& q) {
    if (scheme.kind == SchemeKind::Folner) {
        const FolnerSequence F = *scheme.folner;
        return [f, F, q](const Box& b) { return continuous_region_average(f, F.region(folner_index(b)), q); };
    }
    return [f, q](const Box& b) { return continuous_average(f, b, q); };
}

template <class Sampler, class MakeAvg>
LimitEstimate scheme_limit(const Sampler& s, const Scheme& scheme, const ScaleSchedule& sched, double tol,
                           std::size_t tail, MakeAvg make) {
    const auto windows = scheme_windows(scheme, sched);
    if (!scheme.is_two_sided()) return cesaro_limit(make(s), windows, tol, tail);
    std::map<std::vector<int>, LimitEstimate> per;
    for (const auto& sign : sign_patterns(scheme.dim))
        per[sign] = cesaro_limit(make(samplers::reflect(s, sign)), windows, tol, tail);
    return orthant_combine(per, tol).estimate;
}

SchemeBounds bounds_with_residual(const RealAverageFn& avg, const std::vector<std::vector<Box>>& windows,
                                  std::size_t tail) {
    SchemeBounds out;
    out.bounds = cesaro_bounds(avg, windows, tail);
    const std::size_t K = windows.size();
    const std::size_t t = tail == 0 ? (K + 1) / 2 : std::min(tail, K);
    if (t >= 2) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (const auto& h : out.bounds.history) {
            if (h.scale_index < K - t + 1) continue;
            lo = std::min(lo, h.value[0].real());
            hi = std::max(hi, h.value[0].real());
        }
        out.residual = std::max(std::abs(lo - out.bounds.lo), std::abs(hi - out.bounds.hi));
    }
    return out;
}

template <class Sampler, class MakeAvg>
SchemeBounds scheme_bounds(const Sampler& s, const Scheme& scheme, const ScaleSchedule& sched, std::size_t tail,
                           MakeAvg make) {
    const auto windows = scheme_windows(scheme, sched);
    auto real_of = [](AverageFn a) -> RealAverageFn { return [a](const Box& b) { return a(b).real(); }; };
    if (!scheme.is_two_sided()) return bounds_with_residual(real_of(make(s)), windows, tail);
    SchemeBounds out;
    out.bounds.lo = std::numeric_limits<double>::infinity();
    out.bounds.hi = -out.bounds.lo;
    std::map<std::vector<int>, double> lows, highs;
    for (const auto& sign : sign_patterns(scheme.dim)) {
        auto b = bounds_with_residual(real_of(make(samplers::reflect(s, sign))), windows, tail);
        lows[sign] = b.bounds.lo;
        highs[sign] = b.bounds.hi;
        out.residual = std::max(out.residual, b.residual);
        for (auto& h : b.bounds.history) out.bounds.history.push_back(std::move(h));
    }
    out.bounds.lo = orthant_combine(lows, OrthantMode::Liminf);
    out.bounds.hi = orthant_combine(highs, OrthantMode::Limsup);
    return out;
}

}  // namespace

LimitEstimate discrete_scheme_limit(const SeqSampler& s, const Scheme& scheme, const ScaleSchedule& sched, double tol,
                                    std::size_t tail) {
    return scheme_limit(s, scheme, sched, tol, tail, [&](const SeqSampler& x) { return discrete_averager(x, scheme); });
}

LimitEstimate continuous_scheme_limit(const FnSampler& f, const Scheme& scheme, const ScaleSchedule& sched,
                                      const QuadSpec& q, double tol, std::size_t tail) {
    return scheme_limit(f, scheme, sched, tol, tail, [&](const FnSampler& x) { return continuous_averager(x, scheme, q); });
}

SchemeBounds discrete_scheme_bounds(const SeqSampler& s, const Scheme& scheme, const ScaleSchedule& sched,
                                    std::size_t tail) {
    return scheme_bounds(s, scheme, sched, tail, [&](const SeqSampler& x) { return discrete_averager(x, scheme); });
}

SchemeBounds continuous_scheme_bounds(const FnSampler& f, const Scheme& scheme, const ScaleSchedule& sched,
                                      const QuadSpec& q, std::size_t tail) {
    return scheme_bounds(f, scheme, sched, tail, [&](const FnSampler& x) { return continuous_averager(x, scheme, q); });
}

namespace {

void step_warning(const FnSampler& f, const QuadSpec& q, std::vector<std::string>& warnings) {
    const auto c = check_step(f, q);
    if (c.declared && !c.ok) {
        std::ostringstream os;
        os << "quadrature step exceeds declared oscillation scale: h*|f'| = " << c.product << " > 0.1";
        warnings.push_back(os.str());
    }
}

void check_dim(const FnSampler& f, const Scheme& scheme) {
    if (f.dim != scheme.dim) throw std::invalid_argument("sampler dimension does not match scheme");
}

}  // namespace

TransferReport additive_transfer_check(const FnSampler& f, const AdditiveSpec& spec) {
    check_dim(f, spec.scheme);
    const double limit_tol = opt_or(spec.limit_tol, spec.tol);
    TransferReport rep;
    step_warning(f, spec.quad, rep.warnings);
    const auto ts = unit_grid(f.dim, spec.t_grid);
    if (ts.empty()) throw std::invalid_argument("additive_transfer_check: empty t-grid");
    auto ests = parallel_map<LimitEstimate>(ts.size(), [&](std::size_t i) {
        return discrete_scheme_limit(samplers::shift_sequence(f, ts[i]), spec.scheme, spec.sched, limit_tol, spec.tail);
    });
    std::vector<const VectorValue*> vals;
    std::size_t unconverged = 0;
    std::string first_bad;
    rep.per_t.reserve(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) {
        rep.per_t.push_back({ts[i], std::move(ests[i])});
        vals.push_back(&rep.per_t.back().estimate.value);
        if (!rep.per_t.back().estimate.converged && unconverged++ == 0) first_bad = describe(ts[i]);
    }
    rep.discrete_side = mean_of(vals);
    rep.continuous_side = continuous_scheme_limit(f, spec.scheme, spec.continuous_sched.value_or(spec.sched), spec.quad,
                                                  limit_tol, spec.tail);
    rep.deviation = distance(rep.discrete_side, rep.continuous_side.value);

    if (unconverged > 0) {
        rep.verdict = Verdict::Fail;
        rep.reason = std::to_string(unconverged) + " discrete limits did not converge, first at t = " + first_bad;
    } else if (!rep.continuous_side.converged) {
        rep.verdict = Verdict::Fail;
        rep.reason = "continuous average did not converge";
    } else if (rep.deviation > spec.tol) {
        rep.verdict = Verdict::Fail;
        rep.reason = "deviation exceeds tolerance";
    } else {
        rep.verdict = Verdict::Pass;
    }
    return rep;
}

TransferReport multiplicative_transfer_check(const FnSampler& f, const MultiplicativeSpec& spec) {
    check_dim(f, spec.scheme);
    if (spec.c.size() != f.dim) throw std::invalid_argument("multiplicative_transfer_check: c dimension mismatch");
    for (double v : spec.c)
        if (!(v > 0.0)) throw std::invalid_argument("multiplicative_transfer_check: c must be positive");
    const double limit_tol = opt_or(spec.limit_tol, spec.tol);
    const double spread_tol = opt_or(spec.spread_tol, spec.tol);
    TransferReport rep;
    step_warning(f, spec.quad, rep.warnings);

    auto ts = sample_points(spec.t, Box::half_open(Vec(f.dim, 0.0), spec.c));
    if (spec.beyond_c) {
        Vec hi = spec.c;
        for (auto& v : hi) v *= 2.0;
        TSampling more = spec.t;
        more.seed = spec.t.seed + 1;
        for (auto& t : sample_points(more, Box::half_open(spec.c, hi))) ts.push_back(std::move(t));
    }
    if (ts.empty()) throw std::invalid_argument("multiplicative_transfer_check: no t-samples");
    auto ests = parallel_map<LimitEstimate>(ts.size(), [&](std::size_t i) {
        const auto sched = spec.dilation_adapted ? spec.discrete_sched.dilated(ts[i]) : spec.discrete_sched;
        return discrete_scheme_limit(samplers::dilate_sequence(f, ts[i]), spec.scheme, sched, limit_tol, spec.tail);
    });
    std::vector<const VectorValue*> good;
    rep.per_t.reserve(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) {
        rep.per_t.push_back({ts[i], std::move(ests[i])});
        const auto& e = rep.per_t.back().estimate;
        if (e.converged)
            good.push_back(&e.value);
        else
            rep.warnings.push_back("L_t did not converge at t = " + describe(ts[i]));
    }
    rep.continuous_side = continuous_scheme_limit(f, spec.scheme, spec.continuous_sched, spec.quad, limit_tol, spec.tail);
    if (good.size() < 2) {
        rep.verdict = Verdict::Inconclusive;
        rep.reason = "fewer than two converged L_t";
        return rep;
    }
    rep.constancy_spread = max_pairwise(good);
    rep.discrete_side = mean_of(good);
    rep.deviation = distance(rep.discrete_side, rep.continuous_side.value);
    if (!rep.continuous_side.converged) {
        rep.verdict = Verdict::Fail;
        rep.reason = "continuous average did not converge";
    } else if (rep.constancy_spread > spread_tol) {
        rep.verdict = Verdict::Fail;
        rep.reason = "L_t is not constant within tolerance";
    } else if (rep.deviation > spec.tol) {
        rep.verdict = Verdict::Fail;
        rep.reason = "deviation exceeds tolerance";
    } else {
        rep.verdict = Verdict::Pass;
    }
    return rep;
}

InequalityReport make_inequality(double lhs, double rhs, Direction dir, double slack) {
    InequalityReport r;
    r.lhs = lhs;
    r.rhs = rhs;
    r.direction = dir;
    r.slack = slack;
    r.margin = dir == Direction::GE ? lhs - rhs : rhs - lhs;
    r.pass = r.margin >= -slack;
    return r;
}

LiminfLimsupReport liminf_limsup_transfer_check(const FnSampler& f, const LiminfLimsupSpec& spec) {
    check_dim(f, spec.scheme);
    std::vector<Vec> ts;
    if (spec.method == Method::Additive) {
        ts = unit_grid(f.dim, spec.t_grid);
    } else {
        if (spec.c.size() != f.dim) throw std::invalid_argument("liminf_limsup_transfer_check: c dimension mismatch");
        ts = sample_points(spec.t, Box::half_open(Vec(f.dim, 0.0), spec.c));
    }
    if (ts.empty()) throw std::invalid_argument("liminf_limsup_transfer_check: no t-samples");
    auto per = parallel_map<SchemeBounds>(ts.size(), [&](std::size_t i) {
        if (spec.method == Method::Additive)
            return discrete_scheme_bounds(samplers::shift_sequence(f, ts[i]), spec.scheme, spec.discrete_sched, spec.tail);
        const auto sched = spec.dilation_adapted ? spec.discrete_sched.dilated(ts[i]) : spec.discrete_sched;
        return discrete_scheme_bounds(samplers::dilate_sequence(f, ts[i]), spec.scheme, sched, spec.tail);
    });
    LiminfLimsupReport rep;
    rep.continuous = continuous_scheme_bounds(f, spec.scheme, spec.continuous_sched, spec.quad, spec.tail);
    double lo = 0.0, hi = 0.0, residual = rep.continuous.residual;
    rep.per_t.reserve(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) {
        lo += per[i].bounds.lo;
        hi += per[i].bounds.hi;
        residual = std::max(residual, per[i].residual);
        rep.per_t.push_back({ts[i], std::move(per[i])});
    }
    lo /= static_cast<double>(ts.size());
    hi /= static_cast<double>(ts.size());
    const double slack = spec.slack >= 0.0 ? spec.slack : 2.0 * residual;
    rep.liminf = make_inequality(rep.continuous.bounds.lo, lo, Direction::GE, slack);
    rep.limsup = make_inequality(rep.continuous.bounds.hi, hi, Direction::LE, slack);
    rep.verdict = rep.liminf.pass && rep.limsup.pass ? Verdict::Pass : Verdict::Fail;
    return rep;
}

EssLimsupReport ess_limsup_transfer_check(const FnSampler& f, const EssLimsupSpec& spec) {
    check_dim(f, spec.scheme);
    if (spec.deltas.empty()) throw std::invalid_argument("ess_limsup_transfer_check: empty delta schedule");
    if (spec.L.size() != f.value_size) throw std::invalid_argument("ess_limsup_transfer_check: L has the wrong size");
    const double ctol = opt_or(spec.continuous_tol, spec.tol);
    EssLimsupReport rep;
    const std::size_t K = spec.discrete_sched.size();
    const std::size_t tail = std::min(std::max<std::size_t>(spec.tail, 2), K);
    for (std::size_t k = 0; k < spec.deltas.size(); ++k) {
        const double delta = spec.deltas[k];
        if (!(delta > 0.0)) throw std::invalid_argument("ess_limsup_transfer_check: deltas must be positive");
        TSampling ts = spec.t;
        ts.seed = spec.t.seed + k;
        const auto points = sample_points(ts, Box::closed(Vec(f.dim, delta * spec.lower_fraction), Vec(f.dim, delta)));
        if (points.empty()) throw std::invalid_argument("ess_limsup_transfer_check: no t-samples");
        auto lv = parallel_map<double>(points.size(), [&](std::size_t i) {
            const auto sched = spec.dilation_adapted ? spec.discrete_sched.dilated(points[i]) : spec.discrete_sched;
            const auto est = discrete_scheme_limit(samplers::dilate_sequence(f, points[i]), spec.scheme, sched,
                                                   std::numeric_limits<double>::infinity(), tail);
            double level = 0.0;
            for (const auto& h : est.history)
                if (h.scale_index + tail >= K) level = std::max(level, distance(h.value, spec.L));
            return level;
        });
        rep.deltas.push_back(delta);
        rep.levels.push_back(*std::max_element(lv.begin(), lv.end()));
    }
    const double noise = 0.5 * spec.tol;
    for (std::size_t k = 1; k < rep.levels.size(); ++k)
        if (rep.levels[k] > rep.levels[k - 1] + noise) rep.monotone = false;
    if (!rep.monotone) rep.warnings.push_back("levels do not decrease monotonically along the delta schedule");

    rep.continuous_side = continuous_scheme_limit(f, spec.scheme, spec.continuous_sched, spec.quad, ctol, spec.tail);
    rep.continuous_deviation = distance(rep.continuous_side.value, spec.L);
    if (rep.levels.back() > spec.tol) {
        rep.verdict = Verdict::Fail;
        rep.reason = "final level exceeds tolerance";
    } else if (!rep.continuous_side.converged) {
        rep.verdict = Verdict::Fail;
        rep.reason = "continuous average did not converge";
    } else if (rep.continuous_deviation > ctol) {
        rep.verdict = Verdict::Fail;
        rep.reason = "continuous average differs from L";
    } else {
        rep.verdict = Verdict::Pass;
    }
    return rep;
}

TauberianReport tauberian_verify(const SeqSampler& v, const TauberianSpec& spec) {
    spec.sched.validate();
    const std::size_t d = v.dim;
    if (spec.sched.scales.front().dim() != d) throw std::invalid_argument("tauberian_verify: schedule dimension mismatch");
    if (!(spec.alpha > 0.0)) throw std::invalid_argument("tauberian_verify: alpha must be positive");
    TauberianReport rep;

    // Spot check of ||v_{n+e_i} - v_n|| <= alpha / n_i.
    std::vector<IVec> probes;
    IVec nmax(d, 1);
    for (const auto& b : spec.sched.scales) {
        IVec n(d), m(d);
        for (std::size_t i = 0; i < d; ++i) {
            n[i] = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::floor(b.hi[i])));
            m[i] = std::max<std::int64_t>(1, n[i] - 1);
            nmax[i] = std::max(nmax[i], n[i]);
        }
        probes.push_back(n);
        probes.push_back(m);
    }
    std::mt19937_64 rng(spec.seed);
    for (std::size_t k = 0; k < spec.spot_checks; ++k) {
        IVec n(d);
        for (std::size_t i = 0; i < d; ++i) n[i] = std::uniform_int_distribution<std::int64_t>(1, nmax[i])(rng);
        probes.push_back(std::move(n));
    }
    for (const auto& n : probes) {
        const auto base = v(n);
        for (std::size_t i = 0; i < d; ++i) {
            IVec m = n;
            ++m[i];
            const double ratio = distance(v(m), base) * static_cast<double>(n[i]);
            rep.worst_increment_ratio = std::max(rep.worst_increment_ratio, ratio);
        }
    }
    if (rep.worst_increment_ratio > spec.alpha * (1.0 + 1e-9) + 1e-12) {
        rep.verdict = Verdict::InvalidInput;
        std::ostringstream os;
        os << "increment hypothesis violated: n*||v_{n+1}-v_n|| reaches " << rep.worst_increment_ratio << " > alpha = " << spec.alpha;
        rep.reason = os.str();
        return rep;
    }

    const double limit_tol = opt_or(spec.limit_tol, spec.tol);
    const auto windows = spec.sched.windows(false);
    rep.cesaro = cesaro_limit([&](const Box& b) { return discrete_average(v, b); }, windows, limit_tol, spec.tail);
    rep.tail_limit = cesaro_limit(
        [&](const Box& b) {
            IVec n(d);
            for (std::size_t i = 0; i < d; ++i) n[i] = static_cast<std::int64_t>(std::floor(b.hi[i]));
            return v(n);
        },
        windows, limit_tol, spec.tail);
    rep.deviation = distance(rep.tail_limit.value, rep.cesaro.value);
    if (!rep.cesaro.converged) {
        rep.verdict = Verdict::Inconclusive;
        rep.reason = "Cesaro averages do not converge; the lemma's hypothesis is unmet";
    } else if (!rep.tail_limit.converged) {
        rep.verdict = Verdict::Fail;
        rep.reason = "v_n does not converge although its Cesaro averages do";
    } else if (rep.deviation > spec.tol) {
        rep.verdict = Verdict::Fail;
        rep.reason = "limit of v_n differs from its Cesaro limit";
    } else {
        rep.verdict = Verdict::Pass;
    }
    return rep;
}

FatouReport fatou_dct_verify(const std::vector<std::vector<Complex>>& f_seq, const std::vector<double>& weights,
                             double bound, double tol, std::size_t tail) {
    FatouReport rep;
    if (f_seq.empty()) throw std::invalid_argument("fatou_dct_verify: empty sequence");
    for (double w : weights)
        if (!(w >= 0.0)) throw std::invalid_argument("fatou_dct_verify: negative weight");
    for (const auto& fn : f_seq) {
        if (fn.size() != weights.size()) throw std::invalid_argument("fatou_dct_verify: samples and weights differ in length");
        for (const auto& z : fn)
            if (!(std::abs(z) <= bound * (1.0 + 1e-12))) {
                rep.verdict = Verdict::InvalidInput;
                rep.reason = "sample exceeds the declared uniform bound";
                return rep;
            }
    }
    const std::size_t N = f_seq.size();
    if (tail == 0) tail = (N + 1) / 2;
    tail = std::min(tail, N);
    const std::size_t first = N - tail;
    auto integral = [&](const std::vector<Complex>& fn) {
        Complex s{};
        for (std::size_t i = 0; i < fn.size(); ++i) s += weights[i] * fn[i];
        return s;
    };
    double lhs = 0.0;
    for (std::size_t n = first; n < N; ++n) lhs = std::max(lhs, std::abs(integral(f_seq[n])));
    double rhs = 0.0;
    double pointwise_spread = 0.0;
    const auto& last = f_seq.back();
    for (std::size_t i = 0; i < weights.size(); ++i) {
        double m = 0.0;
        for (std::size_t n = first; n < N; ++n) {
            m = std::max(m, std::abs(f_seq[n][i]));
            pointwise_spread = std::max(pointwise_spread, std::abs(f_seq[n][i] - last[i]));
        }
        rhs += weights[i] * m;
    }
    rep.fatou = make_inequality(lhs, rhs, Direction::LE, tol);
    rep.dct_applicable = pointwise_spread <= tol;
    if (rep.dct_applicable) {
        const Complex limit = integral(last);
        for (std::size_t n = first; n < N; ++n) rep.dct_deviation = std::max(rep.dct_deviation, std::abs(integral(f_seq[n]) - limit));
    }
    if (!rep.fatou.pass) {
        rep.verdict = Verdict::Fail;
        rep.reason = "Fatou inequality violated";
    } else if (rep.dct_applicable && rep.dct_deviation > tol) {
        rep.verdict = Verdict::Fail;
        rep.reason = "integrals do not follow the pointwise limit";
    } else {
        rep.verdict = Verdict::Pass;
    }
    return rep;
}

FolnerReport folner_reduction_check(const FnSampler& f, const FolnerSpec& spec) {
    const std::size_t d = f.dim;
    if (spec.folner.dim() != d) throw std::invalid_argument("folner_reduction_check: dimension mismatch");
    if (spec.indices.size() < 2) throw std::invalid_argument("folner_reduction_check: need at least two indices");
    FolnerReport rep;
    std::vector<std::vector<Box>> windows;
    for (double N : spec.indices) windows.push_back({Box::cube(d, 0.0, N)});
    const FolnerSequence F = spec.folner;
    const QuadSpec q = spec.quad;
    auto along = [&] {
        return cesaro_limit([&](const Box& b) { return continuous_region_average(f, F.region(b.hi[0]), q); }, windows,
                            spec.tol, std::min(spec.tail, windows.size()));
    };

    if (spec.real_mode) {
        // Sandwich between the uniform liminf and limsup; no limit is assumed.
        rep.folner = along();
        const auto ub = continuous_scheme_bounds(f, Scheme::uniform(d), spec.uniform_sched, spec.quad);
        const std::size_t K = windows.size();
        const std::size_t t = (K + 1) / 2;
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (const auto& h : rep.folner.history) {
            if (h.scale_index + t < K) continue;
            lo = std::min(lo, h.value.real());
            hi = std::max(hi, h.value.real());
        }
        const double slack = spec.slack >= 0.0 ? spec.slack : 2.0 * ub.residual;
        rep.liminf = make_inequality(lo, ub.bounds.lo, Direction::GE, slack);
        rep.limsup = make_inequality(hi, ub.bounds.hi, Direction::LE, slack);
        rep.verdict = rep.liminf->pass && rep.limsup->pass ? Verdict::Pass : Verdict::Fail;
        if (rep.verdict == Verdict::Fail) rep.reason = "Folner bounds fall outside the uniform bounds";
        return rep;
    }

    VectorValue L;
    if (spec.L) {
        L = *spec.L;
    } else {
        rep.uniform = continuous_scheme_limit(f, Scheme::uniform(d), spec.uniform_sched, spec.quad, spec.tol, spec.tail);
        if (!rep.uniform.converged) {
            rep.verdict = Verdict::InvalidInput;
            rep.reason = "uniform Cesaro limit not established";
            return rep;
        }
        L = rep.uniform.value;
    }
    rep.folner = along();
    rep.deviation = distance(rep.folner.value, L);
    if (!rep.folner.converged) {
        rep.verdict = Verdict::Fail;
        rep.reason = "Folner averages did not converge";
    } else if (rep.deviation > spec.tol) {
        rep.verdict = Verdict::Fail;
        rep.reason = "Folner limit differs from the uniform limit";
    } else {
        rep.verdict = Verdict::Pass;
    }
    return rep;
}

}  // namespace etl
