#include "etl/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace etl {

Box::Box(Vec lo_, Vec hi_, Closure c) : lo(std::move(lo_)), hi(std::move(hi_)), closure(c) {
    if (lo.size() != hi.size()) throw std::invalid_argument("Box: lo and hi differ in dimension");
}

Box Box::origin(const Vec& b) { return half_open(Vec(b.size(), 0.0), b); }

Box Box::cube(std::size_t d, double lo, double hi, Closure c) { return {Vec(d, lo), Vec(d, hi), c}; }

double Box::edge(std::size_t i) const { return std::max(0.0, hi[i] - lo[i]); }

bool Box::empty() const {
    for (std::size_t i = 0; i < dim(); ++i)
        if (!(hi[i] > lo[i])) return true;
    return dim() == 0;
}

Box Box::translated(const Vec& y) const {
    if (y.size() != dim()) throw std::invalid_argument("Box::translated: dimension mismatch");
    Box out = *this;
    for (std::size_t i = 0; i < dim(); ++i) {
        out.lo[i] += y[i];
        out.hi[i] += y[i];
    }
    return out;
}

Box Box::intersect(const Box& other) const {
    if (other.dim() != dim()) throw std::invalid_argument("Box::intersect: dimension mismatch");
    Box out = *this;
    for (std::size_t i = 0; i < dim(); ++i) {
        out.lo[i] = std::max(lo[i], other.lo[i]);
        out.hi[i] = std::min(hi[i], other.hi[i]);
    }
    return out;
}

bool Box::contains(const Vec& x) const {
    if (x.size() != dim()) return false;
    for (std::size_t i = 0; i < dim(); ++i) {
        const bool above = closure == Closure::Closed ? x[i] >= lo[i] : x[i] > lo[i];
        if (!above || x[i] > hi[i]) return false;
    }
    return true;
}

BoxMeasures box_measures(const Box& b) {
    if (b.dim() == 0) return {};
    BoxMeasures m{1.0, std::numeric_limits<double>::infinity()};
    for (std::size_t i = 0; i < b.dim(); ++i) {
        const double e = b.edge(i);
        m.w *= e;
        m.l = std::min(m.l, e);
    }
    if (m.w == 0.0) m.l = 0.0;
    return m;
}

namespace {

std::int64_t to_lattice(double v) {
    constexpr double lim = 9.0e18;
    if (!std::isfinite(v) || v > lim || v < -lim) throw std::length_error("box too large for lattice enumeration");
    return static_cast<std::int64_t>(v);
}

}  // namespace

AxisRange lattice_axis_range(const Box& b, std::size_t axis) {
    const double lo = b.lo.at(axis);
    const double hi = b.hi.at(axis);
    if (b.closure == Closure::HalfOpenLoExclusive) {
        if (!(hi > lo)) return {};
        return {to_lattice(std::floor(lo)) + 1, to_lattice(std::floor(hi))};
    }
    if (hi < lo) return {};
    return {to_lattice(std::ceil(lo)), to_lattice(std::floor(hi))};
}

std::uint64_t lattice_count(const Box& b) {
    if (b.dim() == 0) return 0;
    std::uint64_t total = 1;
    for (std::size_t i = 0; i < b.dim(); ++i) {
        const std::uint64_t c = lattice_axis_range(b, i).count();
        if (c == 0) return 0;
        if (total > std::numeric_limits<std::uint64_t>::max() / c) throw std::length_error("box too large for lattice enumeration");
        total *= c;
    }
    return total;
}

void for_each_lattice_point(const Box& b, const std::function<void(const IVec&)>& visit) {
    if (lattice_count(b) == 0) return;
    const std::size_t d = b.dim();
    std::vector<AxisRange> ranges(d);
    for (std::size_t i = 0; i < d; ++i) ranges[i] = lattice_axis_range(b, i);
    IVec n(d);
    for (std::size_t i = 0; i < d; ++i) n[i] = ranges[i].first;
    for (;;) {
        visit(n);
        std::size_t i = d;
        while (i > 0) {
            --i;
            if (n[i] < ranges[i].last) {
                ++n[i];
                for (std::size_t j = i + 1; j < d; ++j) n[j] = ranges[j].first;
                break;
            }
            if (i == 0) return;
        }
    }
}

std::vector<IVec> lattice_points(const Box& b, std::uint64_t limit) {
    const std::uint64_t count = lattice_count(b);
    if (count > limit) throw std::length_error("box too large for lattice enumeration");
    std::vector<IVec> out;
    out.reserve(count);
    for_each_lattice_point(b, [&](const IVec& n) { out.push_back(n); });
    return out;
}

Region translated(const Region& r, const Vec& y) {
    Region out;
    out.reserve(r.size());
    for (const auto& b : r) out.push_back(b.translated(y));
    return out;
}

namespace {

constexpr std::uint64_t kMaxSweepCells = 20'000'000;

// Walks the cells of the coordinate-compression grid spanned by the
// breakpoints of `boxes`; `visit(cell_box, midpoint)` sees every cell.
void sweep_cells(const std::vector<const Box*>& boxes, std::size_t d,
                 const std::function<void(const Vec&, const Vec&, const Vec&)>& visit) {
    if (boxes.empty()) return;
    std::vector<Vec> cuts(d);
    for (const Box* b : boxes)
        for (std::size_t i = 0; i < d; ++i) {
            cuts[i].push_back(b->lo[i]);
            cuts[i].push_back(b->hi[i]);
        }
    std::uint64_t cells = 1;
    for (auto& c : cuts) {
        std::sort(c.begin(), c.end());
        c.erase(std::unique(c.begin(), c.end()), c.end());
        if (c.size() < 2) return;
        cells *= c.size() - 1;
        if (cells > kMaxSweepCells) throw std::length_error("region too fragmented for exact sweep");
    }
    std::vector<std::size_t> idx(d, 0);
    Vec lo(d), hi(d), mid(d);
    for (;;) {
        for (std::size_t i = 0; i < d; ++i) {
            lo[i] = cuts[i][idx[i]];
            hi[i] = cuts[i][idx[i] + 1];
            mid[i] = 0.5 * (lo[i] + hi[i]);
        }
        visit(lo, hi, mid);
        std::size_t i = d;
        bool done = true;
        while (i > 0) {
            --i;
            if (idx[i] + 2 < cuts[i].size()) {
                ++idx[i];
                for (std::size_t j = i + 1; j < d; ++j) idx[j] = 0;
                done = false;
                break;
            }
        }
        if (done) return;
    }
}

bool interior_hit(const Box& b, const Vec& x) {
    for (std::size_t i = 0; i < b.dim(); ++i)
        if (!(x[i] > b.lo[i] && x[i] < b.hi[i])) return false;
    return true;
}

bool covered(const Region& r, const Vec& x) {
    return std::any_of(r.begin(), r.end(), [&](const Box& b) { return interior_hit(b, x); });
}

std::size_t region_dim(const Region& a, const Region& b) {
    for (const auto* r : {&a, &b})
        for (const auto& box : *r)
            if (box.dim() > 0) return box.dim();
    return 0;
}

double cell_volume(const Vec& lo, const Vec& hi) {
    double v = 1.0;
    for (std::size_t i = 0; i < lo.size(); ++i) v *= hi[i] - lo[i];
    return v;
}

std::vector<const Box*> nonempty(const Region& a, const Region* b = nullptr) {
    std::vector<const Box*> out;
    for (const auto& x : a)
        if (!x.empty()) out.push_back(&x);
    if (b)
        for (const auto& x : *b)
            if (!x.empty()) out.push_back(&x);
    return out;
}

}  // namespace

double region_measure(const Region& r) {
    const std::size_t d = region_dim(r, r);
    if (d == 0) return 0.0;
    if (r.size() == 1) return volume(r.front());
    double total = 0.0;
    sweep_cells(nonempty(r), d, [&](const Vec& lo, const Vec& hi, const Vec& mid) {
        if (covered(r, mid)) total += cell_volume(lo, hi);
    });
    return total;
}

double symmetric_difference_measure(const Region& a, const Region& b) {
    const std::size_t d = region_dim(a, b);
    if (d == 0) return 0.0;
    double total = 0.0;
    sweep_cells(nonempty(a, &b), d, [&](const Vec& lo, const Vec& hi, const Vec& mid) {
        if (covered(a, mid) != covered(b, mid)) total += cell_volume(lo, hi);
    });
    return total;
}

std::vector<Box> disjoint_cells(const Region& r) {
    const std::size_t d = region_dim(r, r);
    std::vector<Box> out;
    if (d == 0) return out;
    const auto live = nonempty(r);
    if (live.size() == 1) {
        out.push_back(*live.front());
        return out;
    }
    sweep_cells(live, d, [&](const Vec& lo, const Vec& hi, const Vec& mid) {
        if (covered(r, mid)) out.push_back(Box::closed(lo, hi));
    });
    return out;
}

FolnerSequence FolnerSequence::growing_boxes(std::size_t d) {
    if (d == 0) throw std::invalid_argument("FolnerSequence: dimension must be >= 1");
    FolnerSequence f;
    f.kind_ = FolnerKind::GrowingBoxes;
    f.dim_ = d;
    return f;
}

FolnerSequence FolnerSequence::shifted_boxes(std::size_t d, double offset_power, double width_power) {
    if (d == 0) throw std::invalid_argument("FolnerSequence: dimension must be >= 1");
    if (!(width_power > 0.0)) throw std::invalid_argument("FolnerSequence: width power must be positive");
    FolnerSequence f;
    f.kind_ = FolnerKind::ShiftedBoxes;
    f.dim_ = d;
    f.offset_power_ = offset_power;
    f.width_power_ = width_power;
    return f;
}

FolnerSequence FolnerSequence::custom(std::size_t d, Generator g) {
    if (d == 0) throw std::invalid_argument("FolnerSequence: dimension must be >= 1");
    if (!g) throw std::invalid_argument("FolnerSequence: empty generator");
    FolnerSequence f;
    f.kind_ = FolnerKind::Custom;
    f.dim_ = d;
    f.generator_ = std::move(g);
    return f;
}

Region FolnerSequence::region(double n) const {
    switch (kind_) {
    case FolnerKind::GrowingBoxes:
        return {Box::cube(dim_, 0.0, n, Closure::Closed)};
    case FolnerKind::ShiftedBoxes: {
        const double start = std::pow(n, offset_power_);
        return {Box::cube(dim_, start, start + std::pow(n, width_power_), Closure::Closed)};
    }
    case FolnerKind::Custom:
        return generator_(n);
    }
    return {};
}

double FolnerSequence::measure(double n) const { return region_measure(region(n)); }

double folner_defect(const FolnerSequence& f, double n, const Vec& y) {
    if (y.size() != f.dim()) throw std::invalid_argument("folner_defect: displacement dimension mismatch");
    const Region r = f.region(n);
    const double w = region_measure(r);
    if (!(w > 0.0)) throw std::invalid_argument("folner_defect: region has zero measure");
    return symmetric_difference_measure(r, translated(r, y)) / w;
}

Scheme::Scheme(SchemeKind k, std::size_t d, std::optional<FolnerSequence> f) : kind(k), dim(d), folner(std::move(f)) {
    if (dim == 0) throw std::invalid_argument("Scheme: dimension must be >= 1");
    if (kind == SchemeKind::Folner) {
        if (!folner) throw std::invalid_argument("Scheme: Folner scheme needs a sequence");
        if (folner->dim() != dim) throw std::invalid_argument("Scheme: Folner sequence dimension mismatch");
    }
}

Scheme Scheme::along(FolnerSequence f) {
    const std::size_t d = f.dim();
    return {SchemeKind::Folner, d, std::move(f)};
}

bool Scheme::is_uniform() const {
    return kind == SchemeKind::UniformCesaro || kind == SchemeKind::TwoSidedUniform || kind == SchemeKind::Folner;
}

bool Scheme::is_two_sided() const {
    return kind == SchemeKind::TwoSidedStandard || kind == SchemeKind::TwoSidedUniform;
}

std::string to_string(SchemeKind k) {
    switch (k) {
    case SchemeKind::StandardCesaro: return "standard";
    case SchemeKind::UniformCesaro: return "uniform";
    case SchemeKind::TwoSidedStandard: return "two_sided_standard";
    case SchemeKind::TwoSidedUniform: return "two_sided_uniform";
    case SchemeKind::Folner: return "folner";
    }
    return "standard";
}

SchemeKind scheme_kind_from_string(const std::string& s) {
    if (s == "standard") return SchemeKind::StandardCesaro;
    if (s == "uniform") return SchemeKind::UniformCesaro;
    if (s == "two_sided_standard") return SchemeKind::TwoSidedStandard;
    if (s == "two_sided_uniform") return SchemeKind::TwoSidedUniform;
    if (s == "folner") return SchemeKind::Folner;
    throw std::invalid_argument("unknown scheme kind: " + s);
}

}  // namespace etl
