#include "natform/exterior.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace natform {

std::int64_t binomial(int m, int k) {
    if (k < 0 || k > m) return 0;
    k = std::min(k, m - k);
    std::int64_t r = 1;
    for (int i = 1; i <= k; ++i) r = r * (m - k + i) / i;
    return r;
}

MultiIndex::MultiIndex(std::vector<int> entries, int ambient_dim)
    : entries_(std::move(entries)), m_(ambient_dim) {
    if (m_ < 0 || m_ > kMaxDim) throw std::invalid_argument("MultiIndex: ambient dimension out of range");
    if (static_cast<int>(entries_.size()) > m_)
        throw std::invalid_argument("MultiIndex: degree exceeds ambient dimension");
    for (size_t t = 0; t < entries_.size(); ++t) {
        if (entries_[t] < 0 || entries_[t] >= m_)
            throw std::invalid_argument("MultiIndex: axis out of range");
        if (t > 0 && entries_[t - 1] >= entries_[t])
            throw std::invalid_argument("MultiIndex: entries must be strictly increasing");
    }
}

std::int64_t MultiIndex::rank() const {
    const int k = degree();
    std::int64_t r = 0;
    int prev = -1;
    for (int t = 0; t < k; ++t) {
        for (int j = prev + 1; j < entries_[static_cast<size_t>(t)]; ++j)
            r += binomial(m_ - 1 - j, k - 1 - t);
        prev = entries_[static_cast<size_t>(t)];
    }
    return r;
}

MultiIndex MultiIndex::unrank(std::int64_t r, int m, int k) {
    if (k < 0 || k > m) throw std::invalid_argument("MultiIndex::unrank: degree out of range");
    if (r < 0 || r >= binomial(m, k)) throw std::out_of_range("MultiIndex::unrank: rank out of range");
    std::vector<int> e;
    e.reserve(static_cast<size_t>(k));
    int prev = -1;
    for (int t = 0; t < k; ++t) {
        for (int j = prev + 1; j < m; ++j) {
            const std::int64_t block = binomial(m - 1 - j, k - 1 - t);
            if (r < block) {
                e.push_back(j);
                prev = j;
                break;
            }
            r -= block;
        }
    }
    return MultiIndex(std::move(e), m);
}

std::string MultiIndex::to_string() const {
    std::string s = "{";
    for (size_t t = 0; t < entries_.size(); ++t) {
        if (t) s += ",";
        s += std::to_string(entries_[t] + 1);
    }
    s += "}";
    return s;
}

Covector::Covector(int degree, int ambient_dim) : k_(degree), m_(ambient_dim) {
    if (m_ < 0 || m_ > kMaxDim) throw std::invalid_argument("Covector: ambient dimension out of range");
    if (k_ < 0) throw std::invalid_argument("Covector: negative degree");
    c_.assign(static_cast<size_t>(binomial(m_, k_)), 0.0);
}

Covector::Covector(int degree, int ambient_dim, std::vector<double> coeffs)
    : k_(degree), m_(ambient_dim), c_(std::move(coeffs)) {
    if (m_ < 0 || m_ > kMaxDim) throw std::invalid_argument("Covector: ambient dimension out of range");
    if (k_ < 0) throw std::invalid_argument("Covector: negative degree");
    if (static_cast<std::int64_t>(c_.size()) != binomial(m_, k_))
        throw std::invalid_argument("Covector: coefficient array length must be C(m,k)");
}

Covector Covector::basis(const MultiIndex& I, double c) {
    Covector v(I.degree(), I.ambient_dim());
    v.c_[static_cast<size_t>(I.rank())] = c;
    return v;
}

Covector Covector::scalar(int ambient_dim, double value) {
    Covector v(0, ambient_dim);
    v.c_[0] = value;
    return v;
}

double Covector::coeff(const MultiIndex& I) const {
    if (I.ambient_dim() != m_ || I.degree() != k_)
        throw std::invalid_argument("Covector::coeff: index shape mismatch");
    return c_[static_cast<size_t>(I.rank())];
}

bool Covector::is_zero(double tol) const {
    for (double x : c_)
        if (std::abs(x) > tol) return false;
    return true;
}

double Covector::as_scalar() const {
    if (k_ != 0) throw std::logic_error("Covector::as_scalar: degree is not 0");
    return c_[0];
}

Covector& Covector::operator+=(const Covector& o) {
    if (m_ != o.m_ || k_ != o.k_) throw std::invalid_argument("Covector: shape mismatch in +");
    for (size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
}

Covector& Covector::operator-=(const Covector& o) {
    if (m_ != o.m_ || k_ != o.k_) throw std::invalid_argument("Covector: shape mismatch in -");
    for (size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
}

Covector& Covector::operator*=(double s) {
    for (double& x : c_) x *= s;
    return *this;
}

bool Covector::operator==(const Covector& o) const {
    if (m_ != o.m_) return false;
    if (k_ == o.k_) return c_ == o.c_;
    // Formal degrees above m carry no coefficients; identify all zeros.
    return c_.empty() && o.c_.empty();
}

int merge_sign(const std::vector<int>& I, const std::vector<int>& J) {
    int inv = 0;
    for (int i : I)
        for (int j : J) {
            if (i == j) return 0;
            if (i > j) ++inv;
        }
    return (inv % 2 == 0) ? 1 : -1;
}

Covector wedge(const Covector& a, const Covector& b) {
    if (a.ambient_dim() != b.ambient_dim())
        throw std::invalid_argument("wedge: ambient dimension mismatch");
    const int m = a.ambient_dim();
    const int k = a.degree(), l = b.degree();
    Covector out(k + l, m);
    if (k + l > m) return out;  // formal zero, empty coefficients
    const std::int64_t na = binomial(m, k), nb = binomial(m, l);
    for (std::int64_t ra = 0; ra < na; ++ra) {
        const double ca = a.coeff(ra);
        if (ca == 0.0) continue;
        const MultiIndex I = MultiIndex::unrank(ra, m, k);
        for (std::int64_t rb = 0; rb < nb; ++rb) {
            const double cb = b.coeff(rb);
            if (cb == 0.0) continue;
            const MultiIndex J = MultiIndex::unrank(rb, m, l);
            const int s = merge_sign(I.entries(), J.entries());
            if (s == 0) continue;  // repeated axis
            std::vector<int> merged;
            merged.reserve(static_cast<size_t>(k + l));
            std::merge(I.entries().begin(), I.entries().end(), J.entries().begin(),
                       J.entries().end(), std::back_inserter(merged));
            out.coeff(MultiIndex(std::move(merged), m).rank()) += s * ca * cb;
        }
    }
    return out;
}

double max_norm(const Covector& a) {
    double mx = 0.0;
    for (double x : a.coeffs()) mx = std::max(mx, std::abs(x));
    return mx;
}

}  // namespace natform
