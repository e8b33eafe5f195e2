#pragma once

#include <vector>

#include "natform/vec.hpp"

namespace natform {

/// Sparse multivariate polynomial: sum of c * x1^e1 * ... * xm^em terms.
/// Closed under differentiation, so Jacobians of polynomial maps are exact.
class Poly {
public:
    struct Term {
        double c = 0.0;
        std::vector<int> exps;  // length = nvars
    };

    Poly() = default;
    explicit Poly(int nvars) : nvars_(nvars) {}

    int nvars() const { return nvars_; }
    const std::vector<Term>& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }

    /// Adds c * prod x_i^exps[i]; merges with an existing identical monomial.
    void add_term(double c, std::vector<int> exps);

    double eval(const Vec& x) const;
    Poly derivative(int axis) const;
    int total_degree() const;

    static Poly constant(int nvars, double c);
    static Poly variable(int nvars, int axis);

    Poly operator*(const Poly& o) const;
    Poly operator+(const Poly& o) const;

private:
    int nvars_ = 0;
    std::vector<Term> terms_;
};

}  // namespace natform
