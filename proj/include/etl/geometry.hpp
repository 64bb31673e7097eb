#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace etl {

using Vec = std::vector<double>;
using IVec = std::vector<std::int64_t>;

/// Lattice convention of a box. Continuous integrals ignore it.
enum class Closure {
    HalfOpenLoExclusive,  // (lo, hi]
    Closed,               // [lo, hi]
};

/**
 * Axis-aligned box in R^d. A box with hi_i <= lo_i on some axis is empty and
 * has zero measure; it is still a valid value.
 */
struct Box {
    Vec lo;
    Vec hi;
    Closure closure = Closure::HalfOpenLoExclusive;

    Box() = default;
    Box(Vec lo_, Vec hi_, Closure c = Closure::HalfOpenLoExclusive);

    static Box half_open(Vec lo, Vec hi) { return {std::move(lo), std::move(hi), Closure::HalfOpenLoExclusive}; }
    static Box closed(Vec lo, Vec hi) { return {std::move(lo), std::move(hi), Closure::Closed}; }
    /// (0, b] in every coordinate.
    static Box origin(const Vec& b);
    static Box cube(std::size_t d, double lo, double hi, Closure c = Closure::HalfOpenLoExclusive);

    std::size_t dim() const { return lo.size(); }
    double edge(std::size_t i) const;
    bool empty() const;
    Box translated(const Vec& y) const;
    Box intersect(const Box& other) const;
    bool contains(const Vec& x) const;

    friend bool operator==(const Box&, const Box&) = default;
};

struct BoxMeasures {
    double w = 0.0;  // product of edge lengths
    double l = 0.0;  // minimal edge length
};

BoxMeasures box_measures(const Box& b);
inline double volume(const Box& b) { return box_measures(b).w; }

/// Inclusive integer range covered by `b` on one axis; empty when first > last.
struct AxisRange {
    std::int64_t first = 0;
    std::int64_t last = -1;
    std::uint64_t count() const { return last < first ? 0 : static_cast<std::uint64_t>(last - first) + 1; }
};

AxisRange lattice_axis_range(const Box& b, std::size_t axis);

/// Number of points of Z^d in the box. Throws std::length_error when the count
/// does not fit in 64 bits.
std::uint64_t lattice_count(const Box& b);

/// Calls `visit` for each point of Z^d in the box in lexicographic order.
void for_each_lattice_point(const Box& b, const std::function<void(const IVec&)>& visit);

/// Materialized enumeration; refuses boxes with more than `limit` points.
std::vector<IVec> lattice_points(const Box& b, std::uint64_t limit = 1u << 24);

/// Finite union of axis-aligned boxes. Overlaps are allowed.
using Region = std::vector<Box>;

Region translated(const Region& r, const Vec& y);
/// Lebesgue measure of the union, computed by coordinate compression.
double region_measure(const Region& r);
/// Lebesgue measure of the symmetric difference of two unions.
double symmetric_difference_measure(const Region& a, const Region& b);
/// Disjoint boxes whose union equals the union of `r`.
std::vector<Box> disjoint_cells(const Region& r);

enum class FolnerKind { GrowingBoxes, ShiftedBoxes, Custom };

/**
 * Sequence of regions Phi_N in R^d with w(Phi_N ^ (Phi_N + y)) / w(Phi_N) -> 0.
 *
 * GrowingBoxes: Phi_N = [0, N]^d.
 * ShiftedBoxes: Phi_N = [N^p, N^p + N^q]^d for offset power p and width power q.
 */
class FolnerSequence {
public:
    using Generator = std::function<Region(double)>;

    static FolnerSequence growing_boxes(std::size_t d);
    static FolnerSequence shifted_boxes(std::size_t d, double offset_power = 2.0, double width_power = 1.0);
    static FolnerSequence custom(std::size_t d, Generator g);

    FolnerKind kind() const { return kind_; }
    std::size_t dim() const { return dim_; }
    double offset_power() const { return offset_power_; }
    double width_power() const { return width_power_; }

    Region region(double n) const;
    double measure(double n) const;

private:
    FolnerKind kind_ = FolnerKind::GrowingBoxes;
    std::size_t dim_ = 1;
    double offset_power_ = 0.0;
    double width_power_ = 1.0;
    Generator generator_;
};

/// w(Phi_N ^ (Phi_N + y)) / w(Phi_N). Throws std::invalid_argument when w(Phi_N) = 0.
double folner_defect(const FolnerSequence& f, double n, const Vec& y);

enum class SchemeKind { StandardCesaro, UniformCesaro, TwoSidedStandard, TwoSidedUniform, Folner };

struct Scheme {
    SchemeKind kind = SchemeKind::StandardCesaro;
    std::size_t dim = 1;
    std::optional<FolnerSequence> folner;

    Scheme() = default;
    Scheme(SchemeKind k, std::size_t d, std::optional<FolnerSequence> f = std::nullopt);

    static Scheme standard(std::size_t d = 1) { return {SchemeKind::StandardCesaro, d}; }
    static Scheme uniform(std::size_t d = 1) { return {SchemeKind::UniformCesaro, d}; }
    static Scheme two_sided_standard(std::size_t d = 1) { return {SchemeKind::TwoSidedStandard, d}; }
    static Scheme two_sided_uniform(std::size_t d = 1) { return {SchemeKind::TwoSidedUniform, d}; }
    static Scheme along(FolnerSequence f);

    bool is_uniform() const;
    bool is_two_sided() const;
};

std::string to_string(SchemeKind k);
SchemeKind scheme_kind_from_string(const std::string& s);

}  // namespace etl
