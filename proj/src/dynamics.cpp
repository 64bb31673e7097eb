#include "etl/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

#include "etl/samplers.hpp"

namespace etl {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double frac(long double v) {
    const long double r = v - std::floor(v);
    const double d = static_cast<double>(r);
    return d >= 1.0 ? 0.0 : d;
}

}  // namespace

// Sparse nested Horner: each level groups terms by the power of one variable.
struct Poly::Node {
    double leaf = 0.0;
    std::vector<std::pair<int, std::shared_ptr<const Node>>> children;  // powers descending

    double eval(std::span<const double> x, std::size_t var) const {
        if (var == x.size()) return leaf;
        if (children.empty()) return 0.0;
        const double xv = x[var];
        auto pw = [xv](int k) {
            double r = 1.0;
            for (int i = 0; i < k; ++i) r *= xv;
            return r;
        };
        double r = children[0].second->eval(x, var + 1);
        for (std::size_t j = 1; j < children.size(); ++j)
            r = r * pw(children[j - 1].first - children[j].first) + children[j].second->eval(x, var + 1);
        return r * pw(children.back().first);
    }
};

namespace {

std::shared_ptr<const Poly::Node> build_horner(const std::vector<const Monomial*>& terms, std::size_t var,
                                               std::size_t dim) {
    auto node = std::make_shared<Poly::Node>();
    if (var == dim) {
        for (const auto* t : terms) node->leaf += t->coeff;
        return node;
    }
    std::map<int, std::vector<const Monomial*>, std::greater<int>> groups;
    for (const auto* t : terms) groups[t->exponents[var]].push_back(t);
    for (const auto& [k, g] : groups) node->children.emplace_back(k, build_horner(g, var + 1, dim));
    return node;
}

}  // namespace

Poly::Poly(std::size_t dim, std::vector<Monomial> terms) : dim_(dim) {
    if (dim == 0) throw std::invalid_argument("Poly: dimension must be >= 1");
    for (auto& t : terms) {
        if (t.exponents.size() != dim) throw std::invalid_argument("Poly: exponent vector has the wrong length");
        for (int e : t.exponents)
            if (e < 0) throw std::invalid_argument("Poly: negative exponent");
        if (!std::isfinite(t.coeff)) throw std::invalid_argument("Poly: non-finite coefficient");
        if (t.coeff != 0.0) terms_.push_back(std::move(t));
    }
    std::vector<const Monomial*> ptrs;
    for (const auto& t : terms_) ptrs.push_back(&t);
    horner_ = build_horner(ptrs, 0, dim_);
}

Poly Poly::univariate(const std::vector<double>& coeffs) {
    std::vector<Monomial> t;
    for (std::size_t k = 0; k < coeffs.size(); ++k) t.push_back({coeffs[k], {static_cast<int>(k)}});
    return Poly(1, std::move(t));
}

Poly Poly::monomial(double coeff, std::vector<int> exponents) {
    const std::size_t d = exponents.size();
    return Poly(d, {{coeff, std::move(exponents)}});
}

Poly Poly::linear(const Vec& a) {
    std::vector<Monomial> t;
    for (std::size_t i = 0; i < a.size(); ++i) {
        std::vector<int> e(a.size(), 0);
        e[i] = 1;
        t.push_back({a[i], std::move(e)});
    }
    return Poly(a.size(), std::move(t));
}

int Poly::degree() const {
    int deg = 0;
    for (const auto& t : terms_) {
        int s = 0;
        for (int e : t.exponents) s += e;
        deg = std::max(deg, s);
    }
    return deg;
}

double Poly::operator()(std::span<const double> x) const {
    if (x.size() != dim_) throw std::invalid_argument("Poly: evaluation point has the wrong dimension");
    return horner_->eval(x, 0);
}

double Poly::operator()(double t) const { return (*this)(std::span<const double>(&t, 1)); }

Poly Poly::derivative(std::size_t var) const {
    if (var >= dim_) throw std::invalid_argument("Poly::derivative: variable out of range");
    std::vector<Monomial> out;
    for (const auto& t : terms_) {
        if (t.exponents[var] == 0) continue;
        Monomial m = t;
        m.coeff *= t.exponents[var];
        m.exponents[var] -= 1;
        out.push_back(std::move(m));
    }
    return Poly(dim_, std::move(out));
}

double Poly::constant_term() const {
    double c = 0.0;
    for (const auto& t : terms_)
        if (std::all_of(t.exponents.begin(), t.exponents.end(), [](int e) { return e == 0; })) c += t.coeff;
    return c;
}

namespace gp {

namespace {
Gp make(GpNode n) { return std::make_shared<const GpNode>(std::move(n)); }
void need(const Gp& g) {
    if (!g) throw std::invalid_argument("gp: null operand");
}
}  // namespace

Gp constant(double c) {
    GpNode n;
    n.kind = GpNode::Kind::Const;
    n.value = c;
    return make(std::move(n));
}

Gp var(std::size_t i) {
    GpNode n;
    n.kind = GpNode::Kind::Var;
    n.var = i;
    return make(std::move(n));
}

Gp poly(Poly p) {
    GpNode n;
    n.kind = GpNode::Kind::PolyLeaf;
    n.poly = std::move(p);
    return make(std::move(n));
}

Gp add(Gp a, Gp b) {
    need(a);
    need(b);
    GpNode n;
    n.kind = GpNode::Kind::Add;
    n.a = std::move(a);
    n.b = std::move(b);
    return make(std::move(n));
}

Gp mul(Gp a, Gp b) {
    need(a);
    need(b);
    GpNode n;
    n.kind = GpNode::Kind::Mul;
    n.a = std::move(a);
    n.b = std::move(b);
    return make(std::move(n));
}

Gp floor(Gp a) {
    need(a);
    GpNode n;
    n.kind = GpNode::Kind::Floor;
    n.a = std::move(a);
    return make(std::move(n));
}

Gp frac(Gp a) {
    need(a);
    GpNode n;
    n.kind = GpNode::Kind::FracPart;
    n.a = std::move(a);
    return make(std::move(n));
}

}  // namespace gp

namespace {

double gp_eval_rec(const GpNode& g, std::span<const double> x, double eta, bool& flag) {
    switch (g.kind) {
    case GpNode::Kind::Const: return g.value;
    case GpNode::Kind::Var:
        if (g.var >= x.size()) throw std::invalid_argument("gp_eval: variable index out of range");
        return x[g.var];
    case GpNode::Kind::PolyLeaf: return g.poly(x);
    case GpNode::Kind::Add: return gp_eval_rec(*g.a, x, eta, flag) + gp_eval_rec(*g.b, x, eta, flag);
    case GpNode::Kind::Mul: return gp_eval_rec(*g.a, x, eta, flag) * gp_eval_rec(*g.b, x, eta, flag);
    case GpNode::Kind::Floor:
    case GpNode::Kind::FracPart: {
        const double v = gp_eval_rec(*g.a, x, eta, flag);
        if (std::abs(v - std::nearbyint(v)) < eta) flag = true;
        const double fl = std::floor(v);
        return g.kind == GpNode::Kind::Floor ? fl : v - fl;
    }
    }
    return 0.0;
}

}  // namespace

GpValue gp_eval(const Gp& g, std::span<const double> x, double eta) {
    if (!g) throw std::invalid_argument("gp_eval: null expression");
    GpValue out;
    out.value = gp_eval_rec(*g, x, eta, out.near_discontinuity);
    return out;
}

std::size_t gp_arity(const Gp& g) {
    if (!g) return 0;
    switch (g->kind) {
    case GpNode::Kind::Const: return 0;
    case GpNode::Kind::Var: return g->var + 1;
    case GpNode::Kind::PolyLeaf: return g->poly.dim();
    default: return std::max(gp_arity(g->a), gp_arity(g->b));
    }
}

H3 heisenberg_mul(const H3& g, const H3& h) { return {g[0] + h[0], g[1] + h[1], g[2] + h[2] + g[0] * h[1]}; }

namespace {

// Long-double version of base * a^s followed by reduction.
H3 heisenberg_step(const H3& w, const H3& gen, long double s) {
    const long double x = static_cast<long double>(w[0]) + s * gen[0];
    const long double y = static_cast<long double>(w[1]) + s * gen[1];
    const long double z = static_cast<long double>(w[2]) + s * gen[2] + 0.5L * s * s * gen[0] * gen[1] +
                          static_cast<long double>(w[0]) * s * gen[1];
    const long double fx = std::floor(x);
    return {frac(x), frac(y), frac(z - fx * y)};
}

}  // namespace

H3 heisenberg_reduce(const H3& g) { return heisenberg_step(g, {0.0, 0.0, 0.0}, 0.0L); }

H3 HeisenbergFlow::power(double s) const {
    const auto& a = generator;
    return {s * a[0], s * a[1], s * a[2] + 0.5 * s * s * a[0] * a[1]};
}

Orbit torus_orbit_sampler(const TorusFlow& F, const std::vector<Poly>& polys) {
    const std::size_t m = F.dim();
    if (m == 0) throw std::invalid_argument("torus_orbit_sampler: empty rotation vector");
    if (!F.omega.empty() && F.omega.size() != m) throw std::invalid_argument("torus_orbit_sampler: base point dimension");
    if (polys.size() != 1 && polys.size() != m) throw std::invalid_argument("torus_orbit_sampler: need 1 or m polynomials");
    const std::size_t d = polys[0].dim();
    for (const auto& p : polys)
        if (p.dim() != d) throw std::invalid_argument("torus_orbit_sampler: polynomials differ in dimension");

    std::vector<Poly> ps(m);
    for (std::size_t j = 0; j < m; ++j) ps[j] = polys.size() == 1 ? polys[0] : polys[j];
    std::vector<std::vector<Poly>> grads(m);
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t i = 0; i < d; ++i) grads[j].push_back(ps[j].derivative(i));
    Vec omega = F.omega.empty() ? Vec(m, 0.0) : F.omega;
    for (auto& w : omega) w = frac(w);
    const Vec alpha = F.alpha;

    Orbit o;
    o.m = m;
    o.coords.dim = d;
    o.coords.value_size = m;
    o.coords.norm = NormSpec::sup();
    o.coords.bound = 1.0;
    o.coords.eval = [ps, omega, alpha](std::span<const double> t, std::span<Complex> out) {
        for (std::size_t j = 0; j < ps.size(); ++j)
            out[j] = frac(static_cast<long double>(omega[j]) + static_cast<long double>(ps[j](t)) * alpha[j]);
    };
    o.jacobian = [grads, alpha, d](std::span<const double> t, std::span<double> jac) {
        for (std::size_t j = 0; j < grads.size(); ++j)
            for (std::size_t i = 0; i < d; ++i) jac[j * d + i] = alpha[j] * grads[j][i](t);
    };
    return o;
}

Orbit heisenberg_orbit_sampler(const HeisenbergFlow& F, const Poly& p) {
    const std::size_t d = p.dim();
    std::vector<Poly> grad;
    for (std::size_t i = 0; i < d; ++i) grad.push_back(p.derivative(i));
    const H3 base = heisenberg_reduce(F.base);
    const H3 gen = F.generator;

    Orbit o;
    o.m = 3;
    o.coords.dim = d;
    o.coords.value_size = 3;
    o.coords.norm = NormSpec::sup();
    o.coords.bound = 1.0;
    o.coords.eval = [p, base, gen](std::span<const double> t, std::span<Complex> out) {
        const H3 g = heisenberg_step(base, gen, p(t));
        for (int j = 0; j < 3; ++j) out[j] = g[j];
    };
    // d/ds of the reduced coordinates: (a_x, a_y, a_z + a_y {x}).
    o.jacobian = [p, grad, base, gen, d](std::span<const double> t, std::span<double> jac) {
        const H3 g = heisenberg_step(base, gen, p(t));
        const double ds[3] = {gen[0], gen[1], gen[2] + gen[1] * g[0]};
        for (std::size_t i = 0; i < d; ++i) {
            const double dp = grad[i](t);
            for (int j = 0; j < 3; ++j) jac[j * d + i] = ds[j] * dp;
        }
    };
    return o;
}

Orbit project(const Orbit& o, std::size_t k) {
    if (k == 0 || k > o.m) throw std::invalid_argument("project: bad coordinate count");
    Orbit out;
    out.m = k;
    out.coords = o.coords;
    out.coords.value_size = k;
    out.coords.separable.clear();
    out.coords.lift.reset();
    const auto full = o.coords.eval;
    const std::size_t m = o.m;
    out.coords.eval = [full, m, k](std::span<const double> t, std::span<Complex> v) {
        std::vector<Complex> buf(m);
        full(t, buf);
        std::copy_n(buf.begin(), k, v.begin());
    };
    if (o.jacobian) {
        const auto jac = o.jacobian;
        const std::size_t d = o.coords.dim;
        out.jacobian = [jac, m, k, d](std::span<const double> t, std::span<double> J) {
            std::vector<double> buf(m * d);
            jac(t, buf);
            std::copy_n(buf.begin(), k * d, J.begin());
        };
    }
    return out;
}

namespace {

PhaseSampler orbit_phase(const FnSampler& coords, std::size_t m, const IVec& k) {
    if (k.size() != m) throw std::invalid_argument("weyl_discrepancy: frequency has the wrong dimension");
    if (std::all_of(k.begin(), k.end(), [](std::int64_t v) { return v == 0; }))
        throw std::invalid_argument("weyl_discrepancy: frequency must be nonzero");
    PhaseSampler p;
    p.dim = coords.dim;
    p.phase = [coords, k](std::span<const double> t) {
        std::vector<Complex> g(k.size());
        coords.eval(t, g);
        long double phi = 0.0L;
        for (std::size_t j = 0; j < k.size(); ++j) phi += static_cast<long double>(k[j]) * g[j].real();
        return frac(phi);
    };
    return p;
}

}  // namespace

double weyl_discrepancy(const Orbit& orbit, const IVec& k, const Box& window, const QuadSpec& q) {
    PhaseSampler p = orbit_phase(orbit.coords, orbit.m, k);
    QuadSpec qq = q;
    if (q.rule == QuadRule::LinearPhase) {
        if (orbit.jacobian) {
            const auto jac = orbit.jacobian;
            const std::size_t d = orbit.coords.dim;
            const std::size_t m = orbit.m;
            p.gradient = [jac, k, d, m](std::span<const double> t, std::span<double> grad) {
                std::vector<double> J(m * d);
                jac(t, J);
                for (std::size_t i = 0; i < d; ++i) {
                    double s = 0.0;
                    for (std::size_t j = 0; j < m; ++j) s += static_cast<double>(k[j]) * J[j * d + i];
                    grad[i] = s;
                }
            };
        } else {
            qq.rule = QuadRule::Midpoint;
        }
    }
    return std::min(1.0, std::abs(phase_average(p, window, qq)));
}

double weyl_discrepancy(const FnSampler& orbit, const IVec& k, const Box& window, const QuadSpec& q) {
    QuadSpec qq = q;
    qq.rule = QuadRule::Midpoint;
    return std::min(1.0, std::abs(phase_average(orbit_phase(orbit, orbit.value_size, k), window, qq)));
}

std::vector<IVec> frequencies_up_to(std::size_t m, std::int64_t K) {
    if (m == 0 || K < 1) throw std::invalid_argument("frequencies_up_to: need m >= 1 and K >= 1");
    std::vector<IVec> out;
    IVec k(m, -K);
    while (true) {
        if (std::any_of(k.begin(), k.end(), [](std::int64_t v) { return v != 0; })) out.push_back(k);
        std::size_t i = m;
        while (i > 0 && k[i - 1] == K) k[--i] = -K;
        if (i == 0) break;
        ++k[i - 1];
    }
    return out;
}

PhaseFlow as_flow(const TorusFlow& F) {
    PhaseFlow f;
    f.m = F.dim();
    if (f.m == 0) throw std::invalid_argument("as_flow: empty rotation vector");
    const Vec alpha = F.alpha;
    f.act = [alpha](std::span<const double> w, double s, std::span<double> out) {
        for (std::size_t j = 0; j < alpha.size(); ++j)
            out[j] = frac(static_cast<long double>(w[j]) + static_cast<long double>(s) * alpha[j]);
    };
    f.rotation = alpha;
    return f;
}

PhaseFlow as_flow(const HeisenbergFlow& F) {
    PhaseFlow f;
    f.m = 3;
    const H3 gen = F.generator;
    f.act = [gen](std::span<const double> w, double s, std::span<double> out) {
        const H3 g = heisenberg_step({w[0], w[1], w[2]}, gen, s);
        std::copy(g.begin(), g.end(), out.begin());
    };
    return f;
}

namespace observables {

Observable constant(std::size_t m, Complex c) {
    Observable o;
    o.m = m;
    o.fn = [c](std::span<const double>) { return c; };
    o.sup = std::abs(c);
    o.fourier = {{IVec(m, 0), c}};
    return o;
}

Observable character(const IVec& k) {
    Observable o;
    o.m = k.size();
    o.fn = [k](std::span<const double> w) {
        long double phi = 0.0L;
        for (std::size_t j = 0; j < k.size(); ++j) phi += static_cast<long double>(k[j]) * w[j];
        return std::polar(1.0, kTwoPi * frac(phi));
    };
    o.sup = 1.0;
    o.fourier = {{k, 1.0}};
    return o;
}

Observable cosine(const IVec& k) {
    Observable o;
    o.m = k.size();
    o.fn = [k](std::span<const double> w) {
        long double phi = 0.0L;
        for (std::size_t j = 0; j < k.size(); ++j) phi += static_cast<long double>(k[j]) * w[j];
        return Complex{std::cos(kTwoPi * frac(phi)), 0.0};
    };
    o.sup = 1.0;
    IVec neg(k.size());
    for (std::size_t j = 0; j < k.size(); ++j) neg[j] = -k[j];
    o.fourier = {{k, 0.5}, {neg, 0.5}};
    return o;
}

Observable indicator(const DensitySet& s) {
    Observable o;
    o.m = s.dim;
    auto in = s.contains;
    o.fn = [in](std::span<const double> w) { return Complex{in(w) ? 1.0 : 0.0, 0.0}; };
    o.sup = 1.0;
    return o;
}

}  // namespace observables

namespace {

void check_bounded(std::span<const Complex> v, const NormSpec& norm, double bound) {
    double s = 0.0;
    const auto& w = *norm.weights;
    for (std::size_t j = 0; j < v.size(); ++j) s += w[j] * std::abs(v[j]);
    if (s > bound * (1.0 + 1e-9) + 1e-12) throw std::domain_error("multiple average sample exceeds its bound");
}

struct Tuple {
    Complex coeff;
    Vec rates;  // k_i . alpha_i per observable
    IVec K;
};

}  // namespace

FnSampler multiple_average_sampler(const std::vector<PhaseFlow>& flows, const std::vector<Poly>& polys,
                                   const std::vector<Observable>& obs, const PhaseGrid& grid) {
    const std::size_t r = obs.size();
    if (r == 0) throw std::invalid_argument("multiple_average_sampler: no observables");
    if (polys.size() != r) throw std::invalid_argument("multiple_average_sampler: need one polynomial per observable");
    if (flows.size() != 1 && flows.size() != r) throw std::invalid_argument("multiple_average_sampler: need 1 or r flows");
    const std::size_t m = grid.dim;
    if (grid.size() == 0) throw std::invalid_argument("multiple_average_sampler: empty phase grid");
    for (const auto& f : flows)
        if (f.m != m) throw std::invalid_argument("multiple_average_sampler: flow and grid dimensions differ");
    for (const auto& o : obs)
        if (o.m != m) throw std::invalid_argument("multiple_average_sampler: observable and grid dimensions differ");
    const std::size_t d = polys[0].dim();
    for (const auto& p : polys)
        if (p.dim() != d) throw std::invalid_argument("multiple_average_sampler: polynomials differ in dimension");

    std::vector<PhaseFlow> fl(r);
    for (std::size_t i = 0; i < r; ++i) fl[i] = flows.size() == 1 ? flows[0] : flows[i];
    double bound = 1.0;
    for (const auto& o : obs) bound *= o.sup;
    const std::size_t n = grid.size();

    FnSampler f;
    f.dim = d;
    f.value_size = n;
    f.norm = grid.norm;
    f.bound = bound;

    const bool lift = std::all_of(fl.begin(), fl.end(), [](const PhaseFlow& p) { return p.rotation.has_value(); }) &&
                      std::all_of(obs.begin(), obs.end(), [](const Observable& o) { return !o.fourier.empty(); });
    if (lift) {
        std::vector<Tuple> tuples;
        std::vector<std::size_t> idx(r, 0);
        while (true) {
            Tuple t{1.0, Vec(r), IVec(m, 0)};
            for (std::size_t i = 0; i < r; ++i) {
                const auto& term = obs[i].fourier[idx[i]];
                t.coeff *= term.coeff;
                double rate = 0.0;
                for (std::size_t j = 0; j < m; ++j) {
                    rate += static_cast<double>(term.k[j]) * (*fl[i].rotation)[j];
                    t.K[j] += term.k[j];
                }
                t.rates[i] = rate;
            }
            tuples.push_back(std::move(t));
            std::size_t i = r;
            while (i > 0 && idx[i - 1] + 1 == obs[i - 1].fourier.size()) idx[--i] = 0;
            if (i == 0) break;
            ++idx[i - 1];
        }
        const std::size_t T = tuples.size();
        auto table = std::make_shared<std::vector<Complex>>(T * n);
        for (std::size_t t = 0; t < T; ++t)
            for (std::size_t j = 0; j < n; ++j) {
                long double phi = 0.0L;
                const auto w = grid.point(j);
                for (std::size_t a = 0; a < m; ++a) phi += static_cast<long double>(tuples[t].K[a]) * w[a];
                (*table)[t * n + j] = std::polar(1.0, kTwoPi * frac(phi));
            }

        LinearLift L;
        L.coeff_size = T;
        L.coeffs = [tuples, polys](std::span<const double> x, std::span<Complex> c) {
            Vec p(polys.size());
            for (std::size_t i = 0; i < polys.size(); ++i) p[i] = polys[i](x);
            for (std::size_t t = 0; t < tuples.size(); ++t) {
                long double phi = 0.0L;
                for (std::size_t i = 0; i < p.size(); ++i)
                    phi += static_cast<long double>(p[i]) * tuples[t].rates[i];
                c[t] = tuples[t].coeff * std::polar(1.0, kTwoPi * frac(phi));
            }
        };
        L.apply = [table, T, n](std::span<const Complex> c, std::span<Complex> out) {
            for (std::size_t j = 0; j < n; ++j) {
                Complex s{};
                for (std::size_t t = 0; t < T; ++t) s += c[t] * (*table)[t * n + j];
                out[j] = s;
            }
        };
        if (std::all_of(polys.begin(), polys.end(), [](const Poly& p) { return p.degree() <= 1; })) {
            double db = 0.0;
            for (const auto& t : tuples) {
                double s = 0.0;
                for (std::size_t i = 0; i < r; ++i) {
                    double g = 0.0;
                    for (std::size_t a = 0; a < d; ++a) g = std::max(g, std::abs(polys[i].derivative(a).constant_term()));
                    s += std::abs(t.rates[i]) * g;
                }
                db += std::abs(t.coeff) * kTwoPi * s;
            }
            L.coeff_derivative_bound = db;
            f.derivative_bound = db;
        }
        f.lift = L;
        const auto coeffs = L.coeffs;
        const auto apply = L.apply;
        const NormSpec norm = f.norm;
        f.eval = [coeffs, apply, T, norm, bound](std::span<const double> x, std::span<Complex> out) {
            std::vector<Complex> c(T);
            coeffs(x, c);
            apply(c, out);
            check_bounded(out, norm, bound);
        };
        return f;
    }

    const NormSpec norm = f.norm;
    f.eval = [fl, polys, obs, grid, m, n, norm, bound](std::span<const double> x, std::span<Complex> out) {
        const std::size_t r = obs.size();
        Vec s(r);
        for (std::size_t i = 0; i < r; ++i) s[i] = polys[i](x);
        std::vector<double> moved(m);
        for (std::size_t j = 0; j < n; ++j) {
            Complex v = 1.0;
            for (std::size_t i = 0; i < r; ++i) {
                fl[i].act(grid.point(j), s[i], moved);
                v *= obs[i].fn(moved);
            }
            out[j] = v;
        }
        check_bounded(out, norm, bound);
    };
    return f;
}

FnSampler intersection_measure_sampler(const PhaseFlow& flow, const std::vector<Poly>& polys, const DensitySet& A,
                                       const PhaseGrid& grid) {
    if (polys.empty()) throw std::invalid_argument("intersection_measure_sampler: no polynomials");
    if (A.dim != grid.dim || flow.m != grid.dim)
        throw std::invalid_argument("intersection_measure_sampler: phase-space dimensions differ");
    const std::size_t d = polys[0].dim();
    for (const auto& p : polys) {
        if (p.dim() != d) throw std::invalid_argument("intersection_measure_sampler: polynomials differ in dimension");
        if (p.constant_term() != 0.0) throw std::invalid_argument("intersection_measure_sampler: need p_i(0) = 0");
    }
    const std::size_t n = grid.size();
    const std::size_t m = grid.dim;
    std::vector<std::size_t> inA;
    for (std::size_t j = 0; j < n; ++j)
        if (A.contains(grid.point(j))) inA.push_back(j);
    if (inA.empty()) throw std::domain_error("intersection_measure_sampler: A has no grid points");

    FnSampler f;
    f.dim = d;
    f.value_size = 1;
    f.norm = NormSpec::sup();
    f.bound = 1.0;
    const auto contains = A.contains;
    const auto act = flow.act;
    const auto rot = flow.rotation;
    f.eval = [polys, grid, inA, contains, act, rot, m, n](std::span<const double> x, std::span<Complex> out) {
        const std::size_t r = polys.size();
        Vec s(r);
        for (std::size_t i = 0; i < r; ++i) s[i] = polys[i](x);
        // w in T^s A iff T^{-s} w in A.
        std::vector<double> y(m);
        std::uint64_t count = 0;
        for (std::size_t j : inA) {
            const auto w = grid.point(j);
            bool all = true;
            for (std::size_t i = 0; i < r && all; ++i) {
                if (rot) {
                    for (std::size_t a = 0; a < m; ++a)
                        y[a] = frac(static_cast<long double>(w[a]) - static_cast<long double>(s[i]) * (*rot)[a]);
                } else {
                    act(w, -s[i], y);
                }
                all = contains(y);
            }
            if (all) ++count;
        }
        out[0] = static_cast<double>(count) / static_cast<double>(n);
    };
    return f;
}

GpSamples gp_sample(const Gp& g, const Box& domain, double step, double eta) {
    if (!(step > 0.0)) throw std::invalid_argument("gp_sample: step must be positive");
    const std::size_t d = domain.dim();
    if (gp_arity(g) > d) throw std::invalid_argument("gp_sample: expression uses more variables than the domain has");
    std::vector<std::uint64_t> counts(d);
    std::uint64_t total = 1;
    for (std::size_t a = 0; a < d; ++a) {
        counts[a] = static_cast<std::uint64_t>(std::floor(domain.edge(a) / step + 1e-9));
        total *= counts[a];
    }
    if (total > (std::uint64_t{1} << 31)) throw std::length_error("gp_sample: too many samples");
    GpSamples out;
    out.values.resize(total);
    auto flagged = block_reduce(total, 1, [&](std::uint64_t begin, std::uint64_t end, std::span<Complex> acc) {
        Vec t(d);
        for (std::uint64_t idx = begin; idx < end; ++idx) {
            std::uint64_t rest = idx;
            for (std::size_t a = d; a-- > 0;) {
                t[a] = domain.lo[a] + static_cast<double>(rest % counts[a] + 1) * step;
                rest /= counts[a];
            }
            const auto v = gp_eval(g, t, eta);
            out.values[idx] = v.value;
            if (v.near_discontinuity) acc[0] += 1.0;
        }
    });
    out.flagged = static_cast<std::uint64_t>(flagged[0].real());
    return out;
}

double ks_distance(std::vector<double> values, const std::function<double(double)>& cdf) {
    if (values.empty()) throw std::invalid_argument("ks_distance: no samples");
    std::sort(values.begin(), values.end());
    const double n = static_cast<double>(values.size());
    double D = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double F = cdf(values[i]);
        D = std::max({D, F - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - F});
    }
    return D;
}

Histogram histogram(const std::vector<double>& values, double lo, double hi, std::size_t bins,
                    const std::function<double(double)>& cdf) {
    if (bins == 0 || !(hi > lo)) throw std::invalid_argument("histogram: need bins >= 1 and hi > lo");
    Histogram h;
    h.counts.assign(bins, 0);
    for (std::size_t j = 0; j <= bins; ++j) h.edges.push_back(lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(bins));
    for (double v : values) {
        if (v < lo || v > hi) continue;
        auto j = static_cast<std::size_t>((v - lo) / (hi - lo) * static_cast<double>(bins));
        h.counts[std::min(j, bins - 1)]++;
    }
    if (cdf)
        for (std::size_t j = 0; j < bins; ++j) h.target_mass.push_back(cdf(h.edges[j + 1]) - cdf(h.edges[j]));
    return h;
}

}  // namespace etl
