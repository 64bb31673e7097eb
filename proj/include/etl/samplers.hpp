#pragma once

#include <functional>
#include <vector>

#include "etl/values.hpp"

// Ready-made bounded functions on R^d. Each acts on one coordinate `axis` of
// its argument unless stated otherwise; separable closed forms are attached
// where they exist.
namespace etl::samplers {

enum class Wave { Cos, Sin, Exp };

FnSampler constant(const VectorValue& c, std::size_t dim = 1);

/// Scalar sampler from a plain callback.
FnSampler scalar(std::size_t dim, std::function<Complex(std::span<const double>)> fn, double bound);
SeqSampler scalar_seq(std::size_t dim, std::function<Complex(std::span<const std::int64_t>)> fn, double bound);

/// cos / sin / exp of 2 pi freq x^power.
FnSampler trig(Wave w, double freq, int power = 1, std::size_t axis = 0, std::size_t dim = 1);

/// {scale * x}.
FnSampler sawtooth(double scale = 1.0, std::size_t axis = 0, std::size_t dim = 1);

/// Indicator of {scale * x} in [lo, hi).
FnSampler frac_indicator(double scale, double lo, double hi, std::size_t axis = 0, std::size_t dim = 1);

/// Pointwise product of scalar samplers of equal dimension.
FnSampler product(const std::vector<FnSampler>& factors);

/// 1 / (1 + |x|).
FnSampler decay(std::size_t axis = 0, std::size_t dim = 1);

/// sign(sin(2 pi log(1 + x))) for x >= 0.
FnSampler log_square_wave(std::size_t axis = 0, std::size_t dim = 1);

/// Indicator of floor(log2 x) even, taken as 0 for x < 1.
FnSampler log2_parity(std::size_t axis = 0, std::size_t dim = 1);

/// n -> f(t + n).
SeqSampler shift_sequence(const FnSampler& f, const Vec& t);
/// n -> f(n_1 t_1, ..., n_d t_d).
SeqSampler dilate_sequence(const FnSampler& f, const Vec& t);

/// x -> f(s_1 x_1, ..., s_d x_d) with signs s_i = +-1.
FnSampler reflect(const FnSampler& f, const std::vector<int>& signs);
/// n -> v(m) with m_i = n_i for s_i = +1 and m_i = 1 - n_i for s_i = -1, so
/// that (0, b] in the image covers (-b, 0] of the original.
SeqSampler reflect(const SeqSampler& v, const std::vector<int>& signs);

}  // namespace etl::samplers
