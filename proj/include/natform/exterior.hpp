#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "natform/vec.hpp"

namespace natform {

/// binomial(m, k) with the convention C(m,k)=0 for k<0 or k>m. Exact for m <= kMaxDim.
std::int64_t binomial(int m, int k);

/// Strictly increasing tuple of axis indices in [0, m): indexes the
/// lexicographic basis dx_{i1} ^ ... ^ dx_{ik} of Lambda^k(R^m).
/// Axes are 0-based in code; reports and file formats print them 1-based.
class MultiIndex {
public:
    MultiIndex(std::vector<int> entries, int ambient_dim);

    int degree() const { return static_cast<int>(entries_.size()); }
    int ambient_dim() const { return m_; }
    const std::vector<int>& entries() const { return entries_; }
    int operator[](int t) const { return entries_[static_cast<size_t>(t)]; }

    bool operator==(const MultiIndex& o) const { return m_ == o.m_ && entries_ == o.entries_; }

    /// Position of this index in lexicographic order over all C(m,k) indices.
    std::int64_t rank() const;

    /// Inverse of rank(): the r-th strictly increasing k-tuple over [0,m).
    static MultiIndex unrank(std::int64_t r, int m, int k);

    /// "{i1,i2,...}" with 1-based axes, e.g. {1,3} for internal {0,2}.
    std::string to_string() const;

private:
    std::vector<int> entries_;
    int m_;
};

/// Degree-k alternating tensor over R^m as a dense coefficient array in
/// lexicographic basis order. length(coeffs) = C(m,k), which is 0 for k > m,
/// so out-of-range degrees are carried as formally-zero covectors.
class Covector {
public:
    Covector(int degree, int ambient_dim);
    Covector(int degree, int ambient_dim, std::vector<double> coeffs);

    static Covector zero(int degree, int ambient_dim) { return Covector(degree, ambient_dim); }
    /// Basis covector e_I with coefficient c (default 1).
    static Covector basis(const MultiIndex& I, double c = 1.0);
    /// Degree-0 covector holding a scalar.
    static Covector scalar(int ambient_dim, double value);

    int degree() const { return k_; }
    int ambient_dim() const { return m_; }
    const std::vector<double>& coeffs() const { return c_; }
    double coeff(std::int64_t r) const { return c_[static_cast<size_t>(r)]; }
    double& coeff(std::int64_t r) { return c_[static_cast<size_t>(r)]; }
    double coeff(const MultiIndex& I) const;

    bool is_zero(double tol = 0.0) const;

    /// Scalar value of a degree-0 covector.
    double as_scalar() const;

    Covector& operator+=(const Covector& o);
    Covector& operator-=(const Covector& o);
    Covector& operator*=(double s);
    friend Covector operator+(Covector a, const Covector& b) { return a += b; }
    friend Covector operator-(Covector a, const Covector& b) { return a -= b; }
    friend Covector operator*(double s, Covector a) { return a *= s; }

    /// Equality as elements of the exterior algebra: degrees beyond m compare
    /// equal whenever both are (formally) zero.
    bool operator==(const Covector& o) const;

private:
    int k_;
    int m_;
    std::vector<double> c_;
};

/// Wedge product. Degrees add; if k+l > m the result is the formal zero
/// covector of degree k+l (empty coefficient array). Throws on ambient
/// dimension mismatch.
Covector wedge(const Covector& a, const Covector& b);

/// Sign of merging two disjoint strictly increasing index sets: parity of the
/// interleaving permutation. +1/-1; 0 if the sets intersect.
int merge_sign(const std::vector<int>& I, const std::vector<int>& J);

/// max over basis coefficients of |.|; 0 iff the covector is zero.
double max_norm(const Covector& a);

}  // namespace natform
