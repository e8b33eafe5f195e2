#include "natform/domain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace natform {

Domain::Domain(Vec lower, Vec upper, std::vector<Excision> excluded)
    : lower_(lower), upper_(upper), excluded_(std::move(excluded)) {
    if (lower_.dim() != upper_.dim() || lower_.dim() < 1)
        throw std::invalid_argument("Domain: corner dimensions mismatch");
    for (int i = 0; i < dim(); ++i)
        if (!(lower_[i] < upper_[i])) throw std::invalid_argument("Domain: empty interior");
    for (const auto& e : excluded_) {
        if (e.point.dim() != dim()) throw std::invalid_argument("Domain: excluded point dimension mismatch");
        if (!(e.radius > 0.0)) throw std::invalid_argument("Domain: excision radius must be positive");
        if (!interior_contains(e.point))
            throw std::invalid_argument("Domain: excluded point must lie inside the box");
    }
}

double Domain::diameter() const { return (upper_ - lower_).norm(); }

double Domain::volume() const {
    double v = 1.0;
    for (int i = 0; i < dim(); ++i) v *= upper_[i] - lower_[i];
    return v;
}

Vec Domain::center() const {
    Vec c(dim());
    for (int i = 0; i < dim(); ++i) c[i] = 0.5 * (lower_[i] + upper_[i]);
    return c;
}

bool Domain::contains(const Vec& x) const {
    if (x.dim() != dim()) return false;
    for (int i = 0; i < dim(); ++i)
        if (x[i] < lower_[i] || x[i] > upper_[i]) return false;
    return true;
}

bool Domain::interior_contains(const Vec& x) const {
    if (x.dim() != dim()) return false;
    for (int i = 0; i < dim(); ++i)
        if (!(x[i] > lower_[i] && x[i] < upper_[i])) return false;
    return true;
}

double Domain::boundary_distance(const Vec& x) const {
    double d = std::numeric_limits<double>::infinity();
    for (int i = 0; i < dim(); ++i) {
        d = std::min(d, x[i] - lower_[i]);
        d = std::min(d, upper_[i] - x[i]);
    }
    return d;
}

Domain Domain::shrunk(double margin) const {
    Vec lo = lower_, hi = upper_;
    for (int i = 0; i < dim(); ++i) {
        lo[i] += margin;
        hi[i] -= margin;
    }
    return Domain(lo, hi, excluded_);
}

Domain Domain::with_excisions(std::vector<Excision> excluded) const {
    return Domain(lower_, upper_, std::move(excluded));
}

}  // namespace natform
