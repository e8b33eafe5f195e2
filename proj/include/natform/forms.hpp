#pragma once

#include <functional>
#include <optional>
#include <string>

#include "natform/domain.hpp"
#include "natform/exterior.hpp"
#include "natform/numerics.hpp"
#include "natform/quadrature.hpp"

namespace natform {

enum class Smoothness { analytic_c1, sampled_measurable };

/// A k-form on a domain: a coefficient evaluator x -> Covector, plus an
/// optional analytic exterior derivative. Evaluators must be pure functions
/// of x; evaluation is reentrant and data-parallel across grid nodes.
struct FormField {
    int degree = 0;
    int ambient_dim = 0;
    std::function<Covector(const Vec&)> coeff;
    std::function<Covector(const Vec&)> d_coeff;  // empty if no analytic derivative
    Smoothness tag = Smoothness::analytic_c1;

    Covector operator()(const Vec& x) const { return coeff(x); }
    bool has_analytic_d() const { return static_cast<bool>(d_coeff); }
};

/// Compactly supported bump form: amplitude * exp(1 - 1/(1 - |x-c|^2/r^2))
/// on one basis pattern, identically zero outside the support ball.
struct TestForm {
    FormField form;
    Vec center;
    double radius = 0.0;
    double amplitude = 0.0;
    std::vector<int> pattern;  // basis multi-index axes
};

/// Standard bump profile as a function of u = |x-c|^2/r^2 in [0,1).
double bump_profile(double u);
/// d/du of bump_profile.
double bump_profile_du(double u);

/// Builds a TestForm supported in ball(center, radius); throws if the ball is
/// not compactly contained in the domain interior. Analytic d attached.
TestForm bump_test_form(const Domain& domain, const Vec& center, double radius, double amplitude,
                        const MultiIndex& pattern);

/// Exterior derivative. Uses the analytic derivative when present; otherwise
/// central finite differences on the coefficients with step fd_step.
/// For degree m input the zero (m+1)-degree sentinel field comes back.
FormField d_smooth(const FormField& theta, double fd_step);
/// fd_step = 1e-5 * domain diameter.
FormField d_smooth(const FormField& theta, const Domain& domain);

/// Default finite-difference step for a domain.
double default_fd_step(const Domain& domain);

/// max over grid nodes of max_norm(d(d theta)); ~0 for C^2 fields.
double d_of_d_residual(const FormField& theta, const QuadratureGrid& grid, double fd_step);

/// (integral of max_norm(theta(x))^p)^(1/p); p = infinity takes the grid max.
double lp_norm(const FormField& theta, double p, const QuadratureGrid& grid);

struct LpNormReport {
    double value = 0.0;          // norm at the finest level
    Growth growth = Growth::finite;
    std::vector<double> per_level;  // raw integrals (or maxima for p=inf)
};

/// Lp norm with the excision-refinement divergence classification.
LpNormReport lp_norm_report(const FormField& theta, double p, const Domain& domain,
                            const GridSchedule& sched);

// Field algebra -------------------------------------------------------------

/// Constant-coefficient field; analytic derivative is zero.
FormField constant_field(const Covector& c);
/// Zero field of a given degree.
FormField zero_field(int degree, int ambient_dim);
/// Degree-0 field from a scalar function; gradient optional.
FormField scalar_field(int ambient_dim, std::function<double(const Vec&)> f,
                       std::function<Vec(const Vec&)> grad = {});
/// a * beta for degree-0 a; derivative da ^ beta + a * d(beta) when both analytic.
FormField scaled_field(const FormField& a, const FormField& beta);
/// alpha ^ beta; derivative d(alpha) ^ beta + (-1)^k alpha ^ d(beta) when both analytic.
FormField wedge_fields(const FormField& alpha, const FormField& beta);
/// c1*theta1 + c2*theta2 (degrees must match).
FormField linear_comb(double c1, const FormField& t1, double c2, const FormField& t2);

}  // namespace natform
