#pragma once

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "etl/averaging.hpp"
#include "etl/density.hpp"
#include "etl/values.hpp"

namespace etl {

struct Monomial {
    double coeff = 0.0;
    std::vector<int> exponents;  // one per variable, all >= 0
};

/// Real polynomial in d variables. Evaluation is nested Horner, one variable
/// at a time.
class Poly {
public:
    Poly() : Poly(1, {}) {}
    Poly(std::size_t dim, std::vector<Monomial> terms);

    /// c_0 + c_1 t + ... + c_k t^k in one variable.
    static Poly univariate(const std::vector<double>& coeffs);
    /// coeff * x^exponents.
    static Poly monomial(double coeff, std::vector<int> exponents);
    /// sum_i a_i x_i.
    static Poly linear(const Vec& a);

    std::size_t dim() const { return dim_; }
    const std::vector<Monomial>& terms() const { return terms_; }
    int degree() const;

    /// Throws std::invalid_argument on a dimension mismatch.
    double operator()(std::span<const double> x) const;
    double operator()(double t) const;
    Poly derivative(std::size_t var) const;
    /// Value at 0.
    double constant_term() const;

    struct Node;

private:
    std::size_t dim_ = 1;
    std::vector<Monomial> terms_;
    std::shared_ptr<const Node> horner_;
};

/// Generalized polynomial expression tree.
struct GpNode {
    enum class Kind { Const, Var, PolyLeaf, Add, Mul, Floor, FracPart };
    Kind kind = Kind::Const;
    double value = 0.0;
    std::size_t var = 0;
    Poly poly;
    std::shared_ptr<const GpNode> a;
    std::shared_ptr<const GpNode> b;
};
using Gp = std::shared_ptr<const GpNode>;

namespace gp {
Gp constant(double c);
Gp var(std::size_t i);
Gp poly(Poly p);
Gp add(Gp a, Gp b);
Gp mul(Gp a, Gp b);
Gp floor(Gp a);
Gp frac(Gp a);
}  // namespace gp

struct GpValue {
    double value = 0.0;
    bool near_discontinuity = false;  // some floor argument within eta of an integer
};

GpValue gp_eval(const Gp& g, std::span<const double> x, double eta);
/// Largest variable index used plus one.
std::size_t gp_arity(const Gp& g);

/// Rotation flow T^s w = w + s alpha on [0,1)^m.
struct TorusFlow {
    Vec alpha;
    Vec omega;  // base point, reduced on use
    std::size_t dim() const { return alpha.size(); }
};

/// Heisenberg group element [[1,x,z],[0,1,y],[0,0,1]] stored as (x, y, z).
using H3 = std::array<double, 3>;

H3 heisenberg_mul(const H3& g, const H3& h);
/// Integer lattice elements act on the left:
/// (x, y, z) -> ({x}, {y}, {z - floor(x) y}).
H3 heisenberg_reduce(const H3& g);

/// Flow Gamma g -> Gamma g a^s with a^s = (s x, s y, s z + s^2 x y / 2).
struct HeisenbergFlow {
    H3 generator{};
    H3 base{};
    H3 power(double s) const;
};

/// Point-valued sampler into [0,1)^m plus the Jacobian of the unreduced
/// coordinates (m x d, row-major), used for exact per-cell phase integration.
struct Orbit {
    std::size_t m = 1;
    FnSampler coords;
    std::function<void(std::span<const double>, std::span<double>)> jacobian;
};

/// t -> (omega_j + p_j(t) alpha_j mod 1)_j. `polys` has one entry per torus
/// coordinate, or a single entry shared by all.
Orbit torus_orbit_sampler(const TorusFlow& F, const std::vector<Poly>& polys);
/// t -> reduce(base * a^{p(t)}).
Orbit heisenberg_orbit_sampler(const HeisenbergFlow& F, const Poly& p);
/// First `k` coordinates of an orbit.
Orbit project(const Orbit& o, std::size_t k);

/// |average over the window of e^{2 pi i k . g(t)}|, always in [0, 1].
/// LinearPhase uses the orbit Jacobian; the plain-sampler overload is
/// midpoint only.
double weyl_discrepancy(const Orbit& orbit, const IVec& k, const Box& window, const QuadSpec& q);
double weyl_discrepancy(const FnSampler& orbit, const IVec& k, const Box& window, const QuadSpec& q);

/// Every k in {-K..K}^m except 0.
std::vector<IVec> frequencies_up_to(std::size_t m, std::int64_t K);

/// Measure-preserving flow on a compact phase space of dimension m.
struct PhaseFlow {
    std::size_t m = 1;
    std::function<void(std::span<const double>, double, std::span<double>)> act;  // w, s -> T^s w
    std::optional<Vec> rotation;  // set for torus rotations
};
PhaseFlow as_flow(const TorusFlow& F);
PhaseFlow as_flow(const HeisenbergFlow& F);

struct FourierTerm {
    IVec k;
    Complex coeff;
};

/// Bounded observable on the phase space, optionally a finite Fourier sum
/// (sum_k coeff e^{2 pi i k . w}).
struct Observable {
    std::size_t m = 1;
    std::function<Complex(std::span<const double>)> fn;
    double sup = 1.0;
    std::vector<FourierTerm> fourier;
};

namespace observables {
Observable constant(std::size_t m, Complex c);
Observable character(const IVec& k);
/// cos(2 pi k . w).
Observable cosine(const IVec& k);
/// Indicator of a set.
Observable indicator(const DensitySet& s);
}  // namespace observables

/**
 * x -> grid embedding of w -> prod_i f_i(T_i^{p_i(x)} w). `flows` has one
 * entry (shared) or one per observable. When every flow is a rotation and
 * every observable a Fourier sum, the sampler carries a LinearLift with one
 * coefficient per frequency tuple. Throws std::domain_error when a sample
 * exceeds prod sup |f_i|.
 */
FnSampler multiple_average_sampler(const std::vector<PhaseFlow>& flows, const std::vector<Poly>& polys,
                                   const std::vector<Observable>& obs, const PhaseGrid& grid);

/// x -> mu(A cap T^{p_1(x)} A cap ... cap T^{p_r(x)} A) by grid counting.
/// Throws std::invalid_argument unless every p_i(0) = 0, and
/// std::domain_error when A has no grid points.
FnSampler intersection_measure_sampler(const PhaseFlow& flow, const std::vector<Poly>& polys, const DensitySet& A,
                                       const PhaseGrid& grid);

struct GpSamples {
    std::vector<double> values;
    std::uint64_t flagged = 0;
    double flagged_fraction() const {
        return values.empty() ? 0.0 : static_cast<double>(flagged) / static_cast<double>(values.size());
    }
};

/// Values of g at t = lo + k step, k = 1..floor(len / step) per axis (row-major).
GpSamples gp_sample(const Gp& g, const Box& domain, double step, double eta);

/// sup_u |F_n(u) - F(u)| for the empirical distribution of `values`.
double ks_distance(std::vector<double> values, const std::function<double(double)>& cdf);

struct Histogram {
    Vec edges;
    std::vector<std::uint64_t> counts;
    Vec target_mass;  // F(e_{j+1}) - F(e_j) when a target CDF is given
};
Histogram histogram(const std::vector<double>& values, double lo, double hi, std::size_t bins,
                    const std::function<double(double)>& cdf = {});

}  // namespace etl
