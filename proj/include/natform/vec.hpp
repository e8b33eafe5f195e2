#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>

namespace natform {

/// Hard cap on ambient dimension; dense Lambda^k storage is only sane at desk scale.
inline constexpr int kMaxDim = 12;

/// Fixed-capacity point/vector in R^m, m <= kMaxDim. Value type, no heap.
struct Vec {
    std::array<double, kMaxDim> a{};
    int n = 0;

    Vec() = default;
    explicit Vec(int dim) : n(dim) {
        if (dim < 0 || dim > kMaxDim) throw std::invalid_argument("Vec: dimension out of range");
    }
    Vec(std::initializer_list<double> xs) : n(static_cast<int>(xs.size())) {
        if (n > kMaxDim) throw std::invalid_argument("Vec: dimension out of range");
        int i = 0;
        for (double x : xs) a[static_cast<size_t>(i++)] = x;
    }

    int dim() const { return n; }
    double& operator[](int i) { return a[static_cast<size_t>(i)]; }
    double operator[](int i) const { return a[static_cast<size_t>(i)]; }

    Vec& operator+=(const Vec& o) {
        for (int i = 0; i < n; ++i) a[static_cast<size_t>(i)] += o[i];
        return *this;
    }
    Vec& operator-=(const Vec& o) {
        for (int i = 0; i < n; ++i) a[static_cast<size_t>(i)] -= o[i];
        return *this;
    }
    Vec& operator*=(double s) {
        for (int i = 0; i < n; ++i) a[static_cast<size_t>(i)] *= s;
        return *this;
    }

    friend Vec operator+(Vec x, const Vec& y) { return x += y; }
    friend Vec operator-(Vec x, const Vec& y) { return x -= y; }
    friend Vec operator*(double s, Vec x) { return x *= s; }

    double norm2() const {
        double s = 0;
        for (int i = 0; i < n; ++i) s += a[static_cast<size_t>(i)] * a[static_cast<size_t>(i)];
        return s;
    }
    double norm() const { return std::sqrt(norm2()); }
};

inline double dist(const Vec& x, const Vec& y) { return (x - y).norm(); }

}  // namespace natform
