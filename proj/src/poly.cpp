#include "natform/poly.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace natform {

void Poly::add_term(double c, std::vector<int> exps) {
    if (static_cast<int>(exps.size()) != nvars_)
        throw std::invalid_argument("Poly::add_term: exponent vector length mismatch");
    for (int e : exps)
        if (e < 0) throw std::invalid_argument("Poly::add_term: negative exponent");
    if (c == 0.0) return;
    for (auto& t : terms_) {
        if (t.exps == exps) {
            t.c += c;
            return;
        }
    }
    terms_.push_back(Term{c, std::move(exps)});
}

double Poly::eval(const Vec& x) const {
    double s = 0.0;
    for (const auto& t : terms_) {
        double v = t.c;
        for (int i = 0; i < nvars_; ++i)
            for (int e = 0; e < t.exps[static_cast<size_t>(i)]; ++e) v *= x[i];
        s += v;
    }
    return s;
}

Poly Poly::derivative(int axis) const {
    Poly d(nvars_);
    for (const auto& t : terms_) {
        const int e = t.exps[static_cast<size_t>(axis)];
        if (e == 0) continue;
        auto exps = t.exps;
        exps[static_cast<size_t>(axis)] = e - 1;
        d.add_term(t.c * e, std::move(exps));
    }
    return d;
}

int Poly::total_degree() const {
    int deg = 0;
    for (const auto& t : terms_) {
        int d = 0;
        for (int e : t.exps) d += e;
        deg = std::max(deg, d);
    }
    return deg;
}

Poly Poly::constant(int nvars, double c) {
    Poly p(nvars);
    p.add_term(c, std::vector<int>(static_cast<size_t>(nvars), 0));
    return p;
}

Poly Poly::variable(int nvars, int axis) {
    Poly p(nvars);
    std::vector<int> exps(static_cast<size_t>(nvars), 0);
    exps[static_cast<size_t>(axis)] = 1;
    p.add_term(1.0, std::move(exps));
    return p;
}

Poly Poly::operator*(const Poly& o) const {
    if (nvars_ != o.nvars_) throw std::invalid_argument("Poly::*: variable count mismatch");
    Poly out(nvars_);
    for (const auto& a : terms_)
        for (const auto& b : o.terms_) {
            std::vector<int> exps(static_cast<size_t>(nvars_));
            for (int i = 0; i < nvars_; ++i)
                exps[static_cast<size_t>(i)] =
                    a.exps[static_cast<size_t>(i)] + b.exps[static_cast<size_t>(i)];
            out.add_term(a.c * b.c, std::move(exps));
        }
    return out;
}

Poly Poly::operator+(const Poly& o) const {
    if (nvars_ != o.nvars_) throw std::invalid_argument("Poly::+: variable count mismatch");
    Poly out = *this;
    for (const auto& b : o.terms_) out.add_term(b.c, b.exps);
    return out;
}

}  // namespace natform
