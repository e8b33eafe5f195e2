#pragma once

#include "natform/forms.hpp"
#include "natform/maps.hpp"

namespace natform {

/// Pullback of a degree-k covector over R^n through f at x, via the k-th
/// compound of Df: coefficient on dx_J is sum_I alpha_I * minor(I,J).
/// Degree 0 passes the scalar through; degree > min(m,n) gives the zero form.
Covector pullback_point(const MapModel& f, const Covector& alpha, const Vec& x);

/// Field-level pullback: (f*alpha)(x) = pullback of alpha(f(x)) at x. The
/// result is tagged sampled-measurable and carries no analytic derivative —
/// its weak derivative is exactly what the residual functionals probe.
FormField pullback_field(const MapModel& f, const FormField& alpha);

struct NormInequalityCheck {
    double lhs = 0.0;       // |f* alpha| at x
    double rhs = 0.0;       // |Lambda^k f|(x) * |alpha|
    double factor = 0.0;    // smallest c with lhs <= c * rhs (0 when rhs = 0)
    bool within_bound = false;  // lhs <= C(n,k) * rhs
};

/// Checks |Lambda^k f (alpha)| <= C(n,k) |Lambda^k f| |alpha| at x with
/// max-norms on both sides; the combinatorial factor C(n,k) accounts for the
/// sum over target multi-indices.
NormInequalityCheck norm_inequality_check(const MapModel& f, const Covector& alpha, const Vec& x);

}  // namespace natform
