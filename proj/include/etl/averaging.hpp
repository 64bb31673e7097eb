#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "etl/geometry.hpp"
#include "etl/values.hpp"

namespace etl {

enum class QuadRule {
    Midpoint,
    // Per cell, integrates e^{2 pi i phi} exactly for the phase linearized at
    // the cell midpoint. Only used by phase_average.
    LinearPhase,
};

struct QuadSpec {
    Vec step;
    bool refine = false;
    bool closed_form = true;  // use exact separable integrals when the sampler has them
    QuadRule rule = QuadRule::Midpoint;

    static QuadSpec uniform(std::size_t d, double h, bool refine = false);
};

struct Quadrature {
    VectorValue value;
    std::optional<VectorValue> half_step;
    double refine_distance = 0.0;
    bool closed_form = false;
    std::uint64_t cells = 0;
};

/// (1/w(b)) sum over Z^d cap b of s(n). Empty or degenerate boxes give 0.
VectorValue discrete_average(const SeqSampler& s, const Box& b);

/// Midpoint approximation of (1/w(b)) int_b f. Cells tile b exactly, with
/// at most the requested step per axis. Throws std::domain_error on a
/// non-finite sample.
Quadrature continuous_average_detailed(const FnSampler& f, const Box& b, const QuadSpec& q);
VectorValue continuous_average(const FnSampler& f, const Box& b, const QuadSpec& q);

/// Averages over a union of boxes, normalized by the measure of the union.
VectorValue continuous_region_average(const FnSampler& f, const Region& r, const QuadSpec& q);
VectorValue discrete_region_average(const SeqSampler& s, const Region& r);

struct StepCheck {
    bool declared = false;  // sampler declared a derivative bound
    double product = 0.0;   // max_i h_i * |f'|
    bool ok = true;         // product <= 0.1, or nothing declared
};
StepCheck check_step(const FnSampler& f, const QuadSpec& q);

/// Scalar phase function phi with its gradient, for averages of e^{2 pi i phi}.
struct PhaseSampler {
    std::size_t dim = 1;
    std::function<double(std::span<const double>)> phase;
    std::function<void(std::span<const double>, std::span<double>)> gradient;
};

/// (1/w(b)) int_b e^{2 pi i phi}.
Complex phase_average(const PhaseSampler& p, const Box& b, const QuadSpec& q);

/// v_n = (1/(n c)) int_0^{n c} f for d = 1.
SeqSampler running_average_sequence(const FnSampler& f, double c, const QuadSpec& q);

/**
 * Scale schedule b_1, b_2, ... with l(b_k) strictly increasing.
 *
 * For uniform schemes every scale expands to a family of windows of the same
 * edge lengths L, placed at offsets 0, sqrt(B), B/2 and B - L inside an
 * ambient box of edge B = ambient_factor * L, plus `random_offsets` seeded
 * random placements. The family is a finite inner approximation of the sup
 * over all windows.
 */
struct ScaleSchedule {
    std::vector<Box> scales;
    double ambient_factor = 4.0;
    std::size_t random_offsets = 2;
    std::uint64_t seed = 1;

    /// Boxes (0, start * ratio^k], k = 0..count-1.
    static ScaleSchedule geometric(const Vec& start, double ratio, std::size_t count);
    static ScaleSchedule of_boxes(std::vector<Box> boxes);
    /// Cubes (0, L_k]^d.
    static ScaleSchedule of_lengths(const std::vector<double>& lengths, std::size_t d);

    std::size_t size() const { return scales.size(); }
    /// Throws std::invalid_argument unless l(b_k) is strictly increasing.
    void validate() const;
    /// Windows per scale: one per scale, or the uniform family.
    std::vector<std::vector<Box>> windows(bool uniform) const;
    /// Every box divided componentwise by `t`.
    ScaleSchedule dilated(const Vec& t) const;
};

struct ScalePoint {
    std::size_t scale_index = 0;
    Box window;
    VectorValue value;
};

struct LimitEstimate {
    VectorValue value;
    double residual = std::numeric_limits<double>::infinity();
    bool converged = false;
    double tolerance = 0.0;
    std::vector<std::size_t> scales_used;
    std::vector<ScalePoint> history;
};

using AverageFn = std::function<VectorValue(const Box&)>;
using RealAverageFn = std::function<double(const Box&)>;

/**
 * Evaluates `avg` on every window. value = first window of the last scale;
 * residual = max pairwise distance among all window values of the last
 * `tail` scales; converged iff residual <= tol.
 */
LimitEstimate cesaro_limit(const AverageFn& avg, const std::vector<std::vector<Box>>& windows, double tol,
                           std::size_t tail);
LimitEstimate cesaro_limit(const AverageFn& avg, const ScaleSchedule& sched, bool uniform, double tol,
                           std::size_t tail);

struct Bounds {
    double lo = 0.0;
    double hi = 0.0;
    std::vector<ScalePoint> history;
};

/// Min and max of `avg` over the windows of the last `tail` scales
/// (0 selects the last half). Inner estimates of liminf and limsup.
Bounds cesaro_bounds(const RealAverageFn& avg, const std::vector<std::vector<Box>>& windows, std::size_t tail = 0);
Bounds cesaro_bounds(const RealAverageFn& avg, const ScaleSchedule& sched, bool uniform, std::size_t tail = 0);

}  // namespace etl
