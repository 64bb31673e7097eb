#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "etl/averaging.hpp"
#include "etl/transfer.hpp"

namespace etl {

/**
 * Subset of R^d (or Z^d, by restricting queries to integer points) given by
 * a membership predicate. `exact_form`, when present, returns pairwise
 * disjoint boxes whose union is S intersected with the query window.
 */
struct DensitySet {
    std::size_t dim = 1;
    std::function<bool(std::span<const double>)> contains;
    std::function<Region(const Box&)> exact_form;
};

namespace sets {

/// Union over k of [k p + lo, k p + hi) on one axis (0 <= lo < hi <= p).
DensitySet periodic_intervals(double period, double lo, double hi, std::size_t axis = 0, std::size_t dim = 1);
/// Union over k >= 0 of [base^k lo, base^k hi) on one axis.
DensitySet geometric_blocks(double base, double lo, double hi, std::size_t axis = 0, std::size_t dim = 1);
/// {x : {scale x_axis} in [lo, hi)}.
DensitySet frac_window(double scale, double lo, double hi, std::size_t axis = 0, std::size_t dim = 1);
/// Integers n with n = residue mod modulus on one axis.
DensitySet residue_class(std::int64_t modulus, std::int64_t residue, std::size_t axis = 0, std::size_t dim = 1);
DensitySet everything(std::size_t dim = 1);
/// A single box.
DensitySet bounded(const Box& b);
/// {x : ||f(x) - L|| > eps}.
DensitySet level_set(const FnSampler& f, const VectorValue& L, double eps);
/// Complement of S (exact form is dropped).
DensitySet complement(const DensitySet& s);

}  // namespace sets

enum class DensityKind { Standard, Upper, Lower, Uniform, UpperUniform, LowerUniform };
enum class Ambient { Lattice, Continuum };

std::string to_string(DensityKind k);
DensityKind density_kind_from_string(const std::string& s);

/// Share of the window occupied by S: lattice count over w(window), or
/// measure over w(window). `path` receives "lattice", "exact" or "quadrature".
double window_density(const DensitySet& s, const Box& window, Ambient ambient, double step, std::string* path = nullptr);

struct DensitySpec {
    DensityKind kind = DensityKind::Standard;
    Ambient ambient = Ambient::Continuum;
    ScaleSchedule sched;
    double step = 0.01;  // membership quadrature step when no exact form exists
    double tol = 0.01;
    std::size_t tail = 3;
};

struct DensityResult {
    DensityKind kind = DensityKind::Standard;
    std::optional<LimitEstimate> limit;  // Standard and Uniform kinds
    double lo = 0.0;                     // liminf proxy over the tail
    double hi = 0.0;                     // limsup proxy over the tail
    std::string path;

    /// The requested quantity: the limit, or the lower / upper proxy.
    double value() const;
};

DensityResult density_estimate(const DensitySet& s, const DensitySpec& spec);

enum class SectionMode { Translate, Dilate };

struct SectionSpec {
    SectionMode mode = SectionMode::Translate;
    bool uniform = false;
    std::size_t t_grid = 64;  // Translate, per axis
    TSampling t;              // Dilate
    Vec c;                    // Dilate
    ScaleSchedule discrete_sched;
    ScaleSchedule continuous_sched;
    bool dilation_adapted = false;
    double step = 0.01;
    double tol = 0.02;
    double spread_tol = -1.0;
    double limit_tol = -1.0;
    std::size_t tail = 3;
};

/// Translate: integral over t of D(S_t) against D(S). Dilate: constancy of
/// D(S(t)) over sampled t and agreement with D(S).
TransferReport section_density_check(const DensitySet& s, const SectionSpec& spec);

struct ConvergenceSpec {
    SectionMode mode = SectionMode::Translate;
    bool uniform = false;
    VectorValue L;
    std::vector<double> eps = {0.2, 0.1, 0.05};
    std::size_t t_grid = 8;  // Translate, per axis
    TSampling t;             // Dilate
    Vec c;                   // Dilate
    ScaleSchedule discrete_sched;
    ScaleSchedule continuous_sched;
    bool dilation_adapted = false;
    double step = 0.01;
    double tol = 0.01;
    std::size_t tail = 3;
};

struct ConvergenceReport {
    std::vector<double> eps;
    std::vector<double> densities;           // density proxy of S_eps
    std::vector<double> worst_section_density;  // max over sampled t of the section proxy
    Verdict verdict = Verdict::Fail;
    std::string reason;
};

ConvergenceReport density_convergence_check(const FnSampler& f, const ConvergenceSpec& spec);

}  // namespace etl
