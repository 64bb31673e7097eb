#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "etl/averaging.hpp"
#include "etl/geometry.hpp"
#include "etl/values.hpp"

namespace etl {

enum class Verdict { Pass, Fail, Inconclusive, InvalidInput };
std::string to_string(Verdict v);

/**
 * Parameter samples standing in for "almost every t": a midpoint grid, a
 * Kronecker sequence and seeded uniform draws inside a box. Points within
 * `exclusion_radius` of a rational p/q with q <= exclusion_q_max (on any
 * axis) are dropped; random draws are redrawn instead.
 */
struct TSampling {
    std::size_t grid_per_axis = 0;
    std::size_t kronecker = 0;
    std::size_t random = 0;
    std::uint64_t seed = 1;
    std::int64_t exclusion_q_max = 0;
    double exclusion_radius = 1e-6;
};

bool near_low_rational(double x, std::int64_t q_max, double radius);
std::vector<Vec> sample_points(const TSampling& s, const Box& region);
/// Midpoints of the uniform grid with `per_axis` cells on each edge of [0,1]^d.
std::vector<Vec> unit_grid(std::size_t d, std::size_t per_axis);

/// All 2^d sign patterns in lexicographic order, (+1,...,+1) first.
std::vector<std::vector<int>> sign_patterns(std::size_t d);

struct OrthantCombination {
    LimitEstimate estimate;  // mean of the orthant limits when they agree
    double spread = 0.0;     // max pairwise distance between orthant limits
    bool agree = false;
};

/// Two-sided limit from the 2^d one-sided ones. Throws std::invalid_argument
/// when an orthant is missing.
OrthantCombination orthant_combine(const std::map<std::vector<int>, LimitEstimate>& per_orthant, double tol);

enum class OrthantMode { Liminf, Limsup };
/// Two-sided liminf (min over orthants) or limsup (max over orthants).
double orthant_combine(const std::map<std::vector<int>, double>& per_orthant, OrthantMode mode);

/// Limit of the scheme averages of a sequence. Folner schemes read the index
/// N = l(b_k) from each scale.
LimitEstimate discrete_scheme_limit(const SeqSampler& s, const Scheme& scheme, const ScaleSchedule& sched, double tol,
                                    std::size_t tail);
LimitEstimate continuous_scheme_limit(const FnSampler& f, const Scheme& scheme, const ScaleSchedule& sched,
                                      const QuadSpec& q, double tol, std::size_t tail);

/// Bounds with a stability residual: the largest change of lo or hi when the
/// first tail scale is dropped.
struct SchemeBounds {
    Bounds bounds;
    double residual = 0.0;
};
SchemeBounds discrete_scheme_bounds(const SeqSampler& s, const Scheme& scheme, const ScaleSchedule& sched,
                                    std::size_t tail = 0);
SchemeBounds continuous_scheme_bounds(const FnSampler& f, const Scheme& scheme, const ScaleSchedule& sched,
                                      const QuadSpec& q, std::size_t tail = 0);

struct PerT {
    Vec t;
    LimitEstimate estimate;
};

struct TransferReport {
    std::vector<PerT> per_t;
    VectorValue discrete_side;
    LimitEstimate continuous_side;
    double deviation = std::numeric_limits<double>::infinity();
    double constancy_spread = 0.0;
    Verdict verdict = Verdict::Fail;
    std::string reason;
    std::vector<std::string> warnings;

    bool pass() const { return verdict == Verdict::Pass; }
};

struct AdditiveSpec {
    Scheme scheme;
    ScaleSchedule sched;                         // discrete side
    std::optional<ScaleSchedule> continuous_sched;  // defaults to `sched`
    QuadSpec quad;
    std::size_t t_grid = 64;  // per axis
    double tol = 0.02;
    double limit_tol = -1.0;  // convergence tolerance of each limit; < 0 selects tol
    std::size_t tail = 3;
};

TransferReport additive_transfer_check(const FnSampler& f, const AdditiveSpec& spec);

struct MultiplicativeSpec {
    Scheme scheme;
    Vec c;
    TSampling t;
    ScaleSchedule discrete_sched;
    ScaleSchedule continuous_sched;
    QuadSpec quad;
    double tol = 0.02;
    double spread_tol = -1.0;  // < 0 selects tol
    double limit_tol = -1.0;   // < 0 selects tol
    std::size_t tail = 3;
    bool dilation_adapted = false;  // discrete scales b_k / t
    bool beyond_c = false;          // also sample t in (c, 2c]
};

TransferReport multiplicative_transfer_check(const FnSampler& f, const MultiplicativeSpec& spec);

enum class Direction { GE, LE };

struct InequalityReport {
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;  // signed amount by which the inequality holds
    double slack = 0.0;
    Direction direction = Direction::GE;
    bool pass = false;
};

InequalityReport make_inequality(double lhs, double rhs, Direction dir, double slack);

enum class Method { Additive, Multiplicative };

struct PerTBounds {
    Vec t;
    SchemeBounds bounds;
};

struct LiminfLimsupSpec {
    Method method = Method::Additive;
    Scheme scheme;
    ScaleSchedule discrete_sched;
    ScaleSchedule continuous_sched;
    QuadSpec quad;
    std::size_t t_grid = 16;  // additive, per axis
    TSampling t;              // multiplicative
    Vec c;                    // multiplicative
    bool dilation_adapted = false;
    double slack = -1.0;  // < 0 selects twice the largest residual
    std::size_t tail = 0;
};

struct LiminfLimsupReport {
    InequalityReport liminf;  // continuous liminf >= integrated discrete liminf
    InequalityReport limsup;  // continuous limsup <= integrated discrete limsup
    SchemeBounds continuous;
    std::vector<PerTBounds> per_t;
    Verdict verdict = Verdict::Fail;
};

LiminfLimsupReport liminf_limsup_transfer_check(const FnSampler& f, const LiminfLimsupSpec& spec);

struct EssLimsupSpec {
    Scheme scheme;
    VectorValue L;
    std::vector<double> deltas;
    TSampling t;  // drawn in [delta * lower_fraction, delta]^d
    double lower_fraction = 1.0 / 64.0;
    ScaleSchedule discrete_sched;
    bool dilation_adapted = true;
    ScaleSchedule continuous_sched;
    QuadSpec quad;
    double tol = 0.02;
    double continuous_tol = -1.0;  // < 0 selects tol
    std::size_t tail = 3;
};

struct EssLimsupReport {
    std::vector<double> deltas;
    std::vector<double> levels;
    bool monotone = true;
    LimitEstimate continuous_side;
    double continuous_deviation = 0.0;
    Verdict verdict = Verdict::Fail;
    std::string reason;
    std::vector<std::string> warnings;
};

EssLimsupReport ess_limsup_transfer_check(const FnSampler& f, const EssLimsupSpec& spec);

struct TauberianSpec {
    double alpha = 1.0;
    ScaleSchedule sched;  // scales (0, N_k]
    double tol = 1e-3;
    double limit_tol = -1.0;  // < 0 selects tol
    std::size_t tail = 3;
    std::size_t spot_checks = 64;
    std::uint64_t seed = 1;
};

struct TauberianReport {
    Verdict verdict = Verdict::Fail;
    double worst_increment_ratio = 0.0;  // max n_i * ||v_{n+e_i} - v_n|| seen
    LimitEstimate cesaro;
    LimitEstimate tail_limit;
    double deviation = std::numeric_limits<double>::infinity();
    std::string reason;
};

TauberianReport tauberian_verify(const SeqSampler& v, const TauberianSpec& spec);

struct FatouReport {
    Verdict verdict = Verdict::Fail;
    InequalityReport fatou;      // lhs = tail max ||int f_n||, rhs = int tail max ||f_n||
    bool dct_applicable = false;  // pointwise tail limits exist on the grid
    double dct_deviation = 0.0;   // tail max ||int f_n - int f||
    std::string reason;
};

/// f_seq[n][i] = f_n(x_i). Weights sum to the measure of X.
FatouReport fatou_dct_verify(const std::vector<std::vector<Complex>>& f_seq, const std::vector<double>& weights,
                             double bound, double tol, std::size_t tail = 0);

struct FolnerSpec {
    FolnerSequence folner;
    std::vector<double> indices;  // N values, increasing
    ScaleSchedule uniform_sched;  // establishes the uniform limit
    QuadSpec quad;
    double tol = 0.02;
    std::size_t tail = 3;
    std::optional<VectorValue> L;  // skip establishing when given
    bool real_mode = false;
    double slack = -1.0;
};

struct FolnerReport {
    Verdict verdict = Verdict::Fail;
    LimitEstimate uniform;
    LimitEstimate folner;
    double deviation = std::numeric_limits<double>::infinity();
    std::optional<InequalityReport> liminf;
    std::optional<InequalityReport> limsup;
    std::string reason;
};

FolnerReport folner_reduction_check(const FnSampler& f, const FolnerSpec& spec);

}  // namespace etl
