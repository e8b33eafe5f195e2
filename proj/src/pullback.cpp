#include "natform/pullback.hpp"

#include <cmath>
#include <stdexcept>

namespace natform {

Covector pullback_point(const MapModel& f, const Covector& alpha, const Vec& x) {
    if (alpha.ambient_dim() != f.target_dim)
        throw std::invalid_argument("pullback_point: form lives on the wrong space");
    const int k = alpha.degree();
    const int m = f.source_dim;
    Covector out(k, m);
    if (k == 0) {
        out.coeff(0) = alpha.as_scalar();
        return out;
    }
    if (k > std::min(m, f.target_dim)) return out;  // zero form
    const Matrix minors = minor_matrix(f, x, k);
    const std::int64_t R = binomial(f.target_dim, k), C = binomial(m, k);
    for (std::int64_t c = 0; c < C; ++c) {
        double s = 0.0;
        for (std::int64_t r = 0; r < R; ++r)
            s += alpha.coeff(r) * minors(static_cast<int>(r), static_cast<int>(c));
        out.coeff(c) = s;
    }
    return out;
}

FormField pullback_field(const MapModel& f, const FormField& alpha) {
    if (alpha.ambient_dim != f.target_dim)
        throw std::invalid_argument("pullback_field: form lives on the wrong space");
    FormField out;
    out.degree = alpha.degree;
    out.ambient_dim = f.source_dim;
    out.coeff = [f, ac = alpha.coeff](const Vec& x) { return pullback_point(f, ac(f.eval(x)), x); };
    out.tag = Smoothness::sampled_measurable;
    return out;
}

NormInequalityCheck norm_inequality_check(const MapModel& f, const Covector& alpha, const Vec& x) {
    const int k = alpha.degree();
    NormInequalityCheck chk;
    chk.lhs = max_norm(pullback_point(f, alpha, x));
    const double lam =
        (k >= 1 && k <= std::min(f.source_dim, f.target_dim)) ? lambda_norm(f, x, k) : 0.0;
    chk.rhs = lam * max_norm(alpha);
    chk.factor = chk.rhs > 0.0 ? chk.lhs / chk.rhs : 0.0;
    const double bound = static_cast<double>(binomial(f.target_dim, k));
    chk.within_bound = chk.lhs <= bound * chk.rhs * (1.0 + 1e-12) || chk.lhs == 0.0;
    return chk;
}

}  // namespace natform
