#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "etl/geometry.hpp"
#include "etl/parallel.hpp"

namespace etl {

enum class NormKind { Sup, L1Weighted, L2 };

struct NormSpec {
    NormKind kind = NormKind::L2;
    std::shared_ptr<const std::vector<double>> weights;  // L1Weighted only

    static NormSpec sup() { return {NormKind::Sup, nullptr}; }
    static NormSpec l2() { return {NormKind::L2, nullptr}; }
    static NormSpec l1_weighted(std::vector<double> w);
};

std::string to_string(NormKind k);

/// Element of C^m carrying the norm it is measured in.
class VectorValue {
public:
    VectorValue() = default;
    explicit VectorValue(std::vector<Complex> components, NormSpec norm = NormSpec::l2());

    static VectorValue scalar(Complex z) { return VectorValue({z}); }
    static VectorValue zeros(std::size_t m, NormSpec norm = NormSpec::l2());

    std::size_t size() const { return c_.size(); }
    const std::vector<Complex>& components() const { return c_; }
    std::vector<Complex>& components() { return c_; }
    Complex operator[](std::size_t i) const { return c_[i]; }
    const NormSpec& norm_spec() const { return norm_; }

    /// Throws std::invalid_argument when an L1Weighted weight vector does not
    /// match the component count.
    double norm() const;

    /// Real part of a one-component value. Throws std::domain_error when the
    /// imaginary part exceeds `tol`.
    double real(double tol = 1e-9) const;

    VectorValue& operator+=(const VectorValue& o);
    VectorValue& operator-=(const VectorValue& o);
    VectorValue& operator*=(Complex s);

    friend VectorValue operator+(VectorValue a, const VectorValue& b) { return a += b; }
    friend VectorValue operator-(VectorValue a, const VectorValue& b) { return a -= b; }
    friend VectorValue operator*(Complex s, VectorValue a) { return a *= s; }
    friend VectorValue operator*(VectorValue a, Complex s) { return a *= s; }

private:
    std::vector<Complex> c_;
    NormSpec norm_;
};

/// Norm of a - b, measured in a's norm.
double distance(const VectorValue& a, const VectorValue& b);

/// Sum_i weights_i |samples_i| realized as an L1Weighted value.
/// Throws std::invalid_argument on length mismatch or a negative weight.
VectorValue grid_embed(std::span<const Complex> samples, std::span<const double> weights);
/// Same, reusing an already validated L1Weighted norm.
VectorValue grid_embed(std::vector<Complex> samples, const NormSpec& l1);

/// Midpoints (j + 1/2)/n of the uniform n-cell partition of [0, 1).
std::vector<double> unit_midpoints(std::size_t n);
/// Tensor midpoint grid of [0,1)^m with n points per axis: points (row-major) and equal weights.
struct PhaseGrid {
    std::size_t dim = 1;
    std::size_t per_axis = 0;
    std::vector<double> points;  // size() * dim coordinates
    NormSpec norm;               // L1Weighted with weights 1/size()
    std::size_t size() const { return dim == 0 ? 0 : points.size() / dim; }
    std::span<const double> point(std::size_t j) const { return {points.data() + j * dim, dim}; }
};
PhaseGrid uniform_phase_grid(std::size_t dim, std::size_t per_axis);

/// One factor g_i of a separable scalar function f(x) = prod_i g_i(x_i).
struct Separable1D {
    std::function<Complex(double)> value;
    std::function<Complex(double, double)> integral;  // int_a^b g, optional
    bool is_one = false;
};

/**
 * Factorization f(x) = apply(c(x)) with a small coefficient map c and a fixed
 * linear `apply`. Averages commute with `apply`, so quadrature can run on c.
 */
struct LinearLift {
    std::size_t coeff_size = 0;
    std::function<void(std::span<const double>, std::span<Complex>)> coeffs;
    std::function<void(std::span<const Complex>, std::span<Complex>)> apply;
    double coeff_derivative_bound = 0.0;
};

/// Bounded function R^d -> V given by an evaluation callback.
struct FnSampler {
    using EvalFn = std::function<void(std::span<const double>, std::span<Complex>)>;

    std::size_t dim = 1;
    std::size_t value_size = 1;
    NormSpec norm;
    EvalFn eval;
    double bound = 0.0;
    double derivative_bound = 0.0;     // declared sup of |grad f|; 0 means undeclared
    std::vector<Separable1D> separable;  // empty, or one factor per axis
    std::optional<LinearLift> lift;

    VectorValue operator()(const Vec& x) const;
};

/// Bounded sequence Z^d -> V.
struct SeqSampler {
    using EvalFn = std::function<void(std::span<const std::int64_t>, std::span<Complex>)>;
    using Lift = std::function<void(std::span<const std::int64_t>, std::span<Complex>)>;

    std::size_t dim = 1;
    std::size_t value_size = 1;
    NormSpec norm;
    EvalFn eval;
    double bound = 0.0;
    std::vector<std::function<Complex(std::int64_t)>> separable;  // empty, or one per axis
    // Coefficient path mirroring LinearLift on the function side.
    std::size_t coeff_size = 0;
    Lift coeffs;
    std::function<void(std::span<const Complex>, std::span<Complex>)> apply;

    VectorValue operator()(const IVec& n) const;
};

/// Largest sampled norm over `count` seeded points of `b`; throws
/// std::domain_error when it exceeds the declared bound by more than `slack`.
double check_bound(const FnSampler& f, const Box& b, std::size_t count, std::uint64_t seed, double slack = 1e-12);

}  // namespace etl
