#include "natform/forms.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace natform {

double bump_profile(double u) {
    if (u >= 1.0) return 0.0;
    const double t = 1.0 - u;
    if (1.0 / t > 700.0) return 0.0;  // below double underflow anyway
    return std::exp(1.0 - 1.0 / t);
}

double bump_profile_du(double u) {
    if (u >= 1.0) return 0.0;
    const double t = 1.0 - u;
    if (1.0 / t > 700.0) return 0.0;
    return -std::exp(1.0 - 1.0 / t) / (t * t);
}

TestForm bump_test_form(const Domain& domain, const Vec& center, double radius, double amplitude,
                        const MultiIndex& pattern) {
    if (pattern.ambient_dim() != domain.dim())
        throw std::invalid_argument("bump_test_form: pattern dimension mismatch");
    if (!(radius > 0.0)) throw std::invalid_argument("bump_test_form: radius must be positive");
    if (!(domain.boundary_distance(center) > radius))
        throw std::invalid_argument("bump_test_form: support ball not compactly contained in domain");

    const int m = domain.dim();
    const int l = pattern.degree();
    const std::int64_t prank = pattern.rank();
    const double r2 = radius * radius;

    auto coeff = [m, l, prank, center, r2, amplitude](const Vec& x) {
        Covector v(l, m);
        const double u = (x - center).norm2() / r2;
        const double b = amplitude * bump_profile(u);
        if (b != 0.0) v.coeff(prank) = b;
        return v;
    };
    auto d_coeff = [m, l, prank, center, r2, amplitude, pat = pattern.entries()](const Vec& x) {
        Covector out(l + 1, m);
        const double u = (x - center).norm2() / r2;
        const double dbdu = amplitude * bump_profile_du(u);
        if (dbdu == 0.0) return out;
        // db = (db/du) * 2(x-c)/r^2; d(b dx_P) = db ^ dx_P
        Covector db(1, m);
        for (int i = 0; i < m; ++i) db.coeff(i) = dbdu * 2.0 * (x[i] - center[i]) / r2;
        Covector base(l, m);
        base.coeff(prank) = 1.0;
        return wedge(db, base);
    };

    TestForm tf;
    tf.form = FormField{l, m, coeff, d_coeff, Smoothness::analytic_c1};
    tf.center = center;
    tf.radius = radius;
    tf.amplitude = amplitude;
    tf.pattern = pattern.entries();
    return tf;
}

double default_fd_step(const Domain& domain) { return 1e-5 * domain.diameter(); }

FormField d_smooth(const FormField& theta, double fd_step) {
    const int m = theta.ambient_dim;
    const int k = theta.degree;
    if (theta.d_coeff) {
        return FormField{k + 1, m, theta.d_coeff, {}, Smoothness::analytic_c1};
    }
    if (!(fd_step > 0.0)) throw std::invalid_argument("d_smooth: fd step must be positive");
    auto eval = theta.coeff;
    auto d = [m, k, eval, fd_step](const Vec& x) {
        Covector out(k + 1, m);
        if (k >= m) return out;  // zero sentinel of degree m+1
        for (int i = 0; i < m; ++i) {
            Vec xp = x, xm = x;
            xp[i] += fd_step;
            xm[i] -= fd_step;
            Covector di = eval(xp);
            di -= eval(xm);
            di *= 1.0 / (2.0 * fd_step);
            Covector ei(1, m);
            ei.coeff(i) = 1.0;
            out += wedge(ei, di);
        }
        return out;
    };
    return FormField{k + 1, m, d, {}, Smoothness::sampled_measurable};
}

FormField d_smooth(const FormField& theta, const Domain& domain) {
    return d_smooth(theta, default_fd_step(domain));
}

double d_of_d_residual(const FormField& theta, const QuadratureGrid& grid, double fd_step) {
    const FormField dd = d_smooth(d_smooth(theta, fd_step), fd_step);
    return grid.node_max([&](const Vec& x) { return max_norm(dd(x)); });
}

double lp_norm(const FormField& theta, double p, const QuadratureGrid& grid) {
    if (std::isinf(p)) return grid.node_max([&](const Vec& x) { return max_norm(theta(x)); });
    if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: p must be >= 1 or infinity");
    const double integral =
        grid.integrate_value([&](const Vec& x) { return std::pow(max_norm(theta(x)), p); });
    return std::pow(integral, 1.0 / p);
}

LpNormReport lp_norm_report(const FormField& theta, double p, const Domain& domain,
                            const GridSchedule& sched) {
    LpNormReport rep;
    for (const auto& grid : make_level_grids(domain, sched)) {
        if (std::isinf(p)) {
            rep.per_level.push_back(grid.node_max([&](const Vec& x) { return max_norm(theta(x)); }));
        } else {
            if (!(p >= 1.0)) throw std::invalid_argument("lp_norm_report: p must be >= 1 or infinity");
            rep.per_level.push_back(
                grid.integrate_value([&](const Vec& x) { return std::pow(max_norm(theta(x)), p); }));
        }
    }
    rep.growth = classify_growth(rep.per_level);
    const double finest = rep.per_level.back();
    rep.value = std::isinf(p) ? finest : std::pow(finest, 1.0 / p);
    return rep;
}

FormField constant_field(const Covector& c) {
    const int m = c.ambient_dim();
    const int k = c.degree();
    return FormField{k, m, [c](const Vec&) { return c; },
                     [k, m](const Vec&) { return Covector(k + 1, m); }, Smoothness::analytic_c1};
}

FormField zero_field(int degree, int ambient_dim) {
    return constant_field(Covector(degree, ambient_dim));
}

FormField scalar_field(int ambient_dim, std::function<double(const Vec&)> f,
                       std::function<Vec(const Vec&)> grad) {
    FormField out;
    out.degree = 0;
    out.ambient_dim = ambient_dim;
    out.coeff = [ambient_dim, f = std::move(f)](const Vec& x) {
        return Covector::scalar(ambient_dim, f(x));
    };
    if (grad) {
        out.d_coeff = [ambient_dim, grad = std::move(grad)](const Vec& x) {
            const Vec g = grad(x);
            Covector v(1, ambient_dim);
            for (int i = 0; i < ambient_dim; ++i) v.coeff(i) = g[i];
            return v;
        };
    }
    return out;
}

FormField scaled_field(const FormField& a, const FormField& beta) {
    if (a.degree != 0) throw std::invalid_argument("scaled_field: scalar factor must have degree 0");
    if (a.ambient_dim != beta.ambient_dim)
        throw std::invalid_argument("scaled_field: ambient dimension mismatch");
    FormField out;
    out.degree = beta.degree;
    out.ambient_dim = beta.ambient_dim;
    out.coeff = [ac = a.coeff, bc = beta.coeff](const Vec& x) {
        Covector v = bc(x);
        v *= ac(x).as_scalar();
        return v;
    };
    if (a.d_coeff && beta.d_coeff) {
        out.d_coeff = [ac = a.coeff, ad = a.d_coeff, bc = beta.coeff, bd = beta.d_coeff](const Vec& x) {
            Covector term = wedge(ad(x), bc(x));
            Covector hdb = bd(x);
            hdb *= ac(x).as_scalar();
            term += hdb;
            return term;
        };
    }
    out.tag = (a.tag == Smoothness::analytic_c1 && beta.tag == Smoothness::analytic_c1)
                  ? Smoothness::analytic_c1
                  : Smoothness::sampled_measurable;
    return out;
}

FormField wedge_fields(const FormField& alpha, const FormField& beta) {
    if (alpha.ambient_dim != beta.ambient_dim)
        throw std::invalid_argument("wedge_fields: ambient dimension mismatch");
    FormField out;
    out.degree = alpha.degree + beta.degree;
    out.ambient_dim = alpha.ambient_dim;
    out.coeff = [ac = alpha.coeff, bc = beta.coeff](const Vec& x) { return wedge(ac(x), bc(x)); };
    if (alpha.d_coeff && beta.d_coeff) {
        const double sgn = (alpha.degree % 2 == 0) ? 1.0 : -1.0;
        out.d_coeff = [ac = alpha.coeff, ad = alpha.d_coeff, bc = beta.coeff, bd = beta.d_coeff,
                       sgn](const Vec& x) {
            Covector term = wedge(ad(x), bc(x));
            Covector second = wedge(ac(x), bd(x));
            second *= sgn;
            term += second;
            return term;
        };
    }
    out.tag = (alpha.tag == Smoothness::analytic_c1 && beta.tag == Smoothness::analytic_c1)
                  ? Smoothness::analytic_c1
                  : Smoothness::sampled_measurable;
    return out;
}

FormField linear_comb(double c1, const FormField& t1, double c2, const FormField& t2) {
    if (t1.degree != t2.degree || t1.ambient_dim != t2.ambient_dim)
        throw std::invalid_argument("linear_comb: field shape mismatch");
    FormField out;
    out.degree = t1.degree;
    out.ambient_dim = t1.ambient_dim;
    out.coeff = [c1, c2, a = t1.coeff, b = t2.coeff](const Vec& x) {
        Covector v = a(x);
        v *= c1;
        Covector w = b(x);
        w *= c2;
        v += w;
        return v;
    };
    if (t1.d_coeff && t2.d_coeff) {
        out.d_coeff = [c1, c2, a = t1.d_coeff, b = t2.d_coeff](const Vec& x) {
            Covector v = a(x);
            v *= c1;
            Covector w = b(x);
            w *= c2;
            v += w;
            return v;
        };
    }
    out.tag = (t1.tag == Smoothness::analytic_c1 && t2.tag == Smoothness::analytic_c1)
                  ? Smoothness::analytic_c1
                  : Smoothness::sampled_measurable;
    return out;
}

}  // namespace natform
