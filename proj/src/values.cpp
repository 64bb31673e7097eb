#include "etl/values.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace etl {

NormSpec NormSpec::l1_weighted(std::vector<double> w) {
    for (double x : w)
        if (!(x >= 0.0)) throw std::invalid_argument("L1Weighted: negative or non-finite weight");
    return {NormKind::L1Weighted, std::make_shared<const std::vector<double>>(std::move(w))};
}

std::string to_string(NormKind k) {
    switch (k) {
    case NormKind::Sup: return "sup";
    case NormKind::L1Weighted: return "l1_weighted";
    case NormKind::L2: return "l2";
    }
    return "l2";
}

VectorValue::VectorValue(std::vector<Complex> components, NormSpec norm) : c_(std::move(components)), norm_(std::move(norm)) {}

VectorValue VectorValue::zeros(std::size_t m, NormSpec norm) { return VectorValue(std::vector<Complex>(m), std::move(norm)); }

double VectorValue::norm() const {
    switch (norm_.kind) {
    case NormKind::Sup: {
        double m = 0.0;
        for (const auto& z : c_) m = std::max(m, std::abs(z));
        return m;
    }
    case NormKind::L2: {
        // Scaled accumulation avoids overflow for large components.
        double scale = 0.0;
        for (const auto& z : c_) scale = std::max(scale, std::abs(z));
        if (scale == 0.0 || !std::isfinite(scale)) return scale;
        double s = 0.0;
        for (const auto& z : c_) s += std::norm(z / scale);
        return scale * std::sqrt(s);
    }
    case NormKind::L1Weighted: {
        if (!norm_.weights || norm_.weights->size() != c_.size())
            throw std::invalid_argument("L1Weighted norm: weight length does not match component count");
        double s = 0.0;
        for (std::size_t i = 0; i < c_.size(); ++i) s += (*norm_.weights)[i] * std::abs(c_[i]);
        return s;
    }
    }
    return 0.0;
}

double VectorValue::real(double tol) const {
    if (c_.size() != 1) throw std::domain_error("VectorValue::real: value is not scalar");
    if (std::abs(c_[0].imag()) > tol) throw std::domain_error("VectorValue::real: imaginary part above tolerance");
    return c_[0].real();
}

VectorValue& VectorValue::operator+=(const VectorValue& o) {
    if (o.c_.size() != c_.size()) throw std::invalid_argument("VectorValue: size mismatch");
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
}

VectorValue& VectorValue::operator-=(const VectorValue& o) {
    if (o.c_.size() != c_.size()) throw std::invalid_argument("VectorValue: size mismatch");
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
}

VectorValue& VectorValue::operator*=(Complex s) {
    for (auto& z : c_) z *= s;
    return *this;
}

double distance(const VectorValue& a, const VectorValue& b) { return (a - b).norm(); }

VectorValue grid_embed(std::span<const Complex> samples, std::span<const double> weights) {
    if (samples.size() != weights.size()) throw std::invalid_argument("grid_embed: samples and weights differ in length");
    return VectorValue(std::vector<Complex>(samples.begin(), samples.end()),
                       NormSpec::l1_weighted(std::vector<double>(weights.begin(), weights.end())));
}

VectorValue grid_embed(std::vector<Complex> samples, const NormSpec& l1) {
    if (l1.kind != NormKind::L1Weighted || !l1.weights) throw std::invalid_argument("grid_embed: norm is not L1Weighted");
    if (l1.weights->size() != samples.size()) throw std::invalid_argument("grid_embed: samples and weights differ in length");
    return VectorValue(std::move(samples), l1);
}

std::vector<double> unit_midpoints(std::size_t n) {
    std::vector<double> out(n);
    for (std::size_t j = 0; j < n; ++j) out[j] = (static_cast<double>(j) + 0.5) / static_cast<double>(n);
    return out;
}

PhaseGrid uniform_phase_grid(std::size_t dim, std::size_t per_axis) {
    if (dim == 0 || per_axis == 0) throw std::invalid_argument("uniform_phase_grid: empty grid");
    std::size_t total = 1;
    for (std::size_t i = 0; i < dim; ++i) {
        if (total > (std::size_t{1} << 26) / per_axis) throw std::length_error("uniform_phase_grid: grid too large");
        total *= per_axis;
    }
    const auto mids = unit_midpoints(per_axis);
    PhaseGrid g;
    g.dim = dim;
    g.per_axis = per_axis;
    g.points.resize(total * dim);
    for (std::size_t j = 0; j < total; ++j) {
        std::size_t r = j;
        for (std::size_t i = dim; i > 0; --i) {
            g.points[j * dim + i - 1] = mids[r % per_axis];
            r /= per_axis;
        }
    }
    g.norm = NormSpec::l1_weighted(std::vector<double>(total, 1.0 / static_cast<double>(total)));
    return g;
}

VectorValue FnSampler::operator()(const Vec& x) const {
    if (x.size() != dim) throw std::invalid_argument("FnSampler: point dimension mismatch");
    std::vector<Complex> out(value_size);
    eval(x, out);
    return VectorValue(std::move(out), norm);
}

VectorValue SeqSampler::operator()(const IVec& n) const {
    if (n.size() != dim) throw std::invalid_argument("SeqSampler: index dimension mismatch");
    std::vector<Complex> out(value_size);
    eval(n, out);
    return VectorValue(std::move(out), norm);
}

double check_bound(const FnSampler& f, const Box& b, std::size_t count, std::uint64_t seed, double slack) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Vec x(f.dim);
    double worst = 0.0;
    for (std::size_t k = 0; k < count; ++k) {
        for (std::size_t i = 0; i < f.dim; ++i) x[i] = b.lo[i] + unit(rng) * (b.hi[i] - b.lo[i]);
        worst = std::max(worst, f(x).norm());
    }
    if (worst > f.bound + slack) throw std::domain_error("sampler exceeds its declared bound");
    return worst;
}

}  // namespace etl
