#include <doctest.h>

#include <cmath>
#include <random>

#include "natform/forms.hpp"
#include "natform/scenario.hpp"

using namespace natform;

namespace {

FormField strip_analytic_d(const FormField& f) {
    FormField g = f;
    g.d_coeff = {};
    return g;
}

/// x1 dx2 on R^2, with analytic derivative.
FormField x1_dx2() {
    FormSpec fs;
    fs.degree = 1;
    FormTermSpec t;
    t.coeff = Poly::variable(2, 0);
    t.pattern = {1};
    fs.terms.push_back(t);
    return build_form(fs, 2);
}

FormField cross_term_1form_r3() {
    FormSpec fs;
    fs.degree = 1;
    for (int axis = 0; axis < 3; ++axis) {
        FormTermSpec t;
        Poly p(3);
        std::vector<int> e(3, 0);
        e[(axis + 1) % 3] = 2;
        e[(axis + 2) % 3] = 1;
        p.add_term(1.0 + axis, e);
        t.coeff = p;
        t.pattern = {axis};
        fs.terms.push_back(t);
    }
    return build_form(fs, 3);
}

}  // namespace

TEST_CASE("d of x1 dx2 is dx1^dx2") {
    const Domain box({-1.0, -1.0}, {1.0, 1.0});
    const FormField theta = x1_dx2();
    const FormField dtheta = d_smooth(theta, box);
    const Covector expected = Covector::basis(MultiIndex({0, 1}, 2));
    for (const Vec& x : {Vec{0.3, -0.4}, Vec{0.0, 0.0}, Vec{-0.9, 0.7}}) {
        Covector d = dtheta(x);
        d -= expected;
        CHECK(max_norm(d) <= 1e-12);
    }
}

TEST_CASE("d of a constant field vanishes") {
    const Domain box({-1.0, -1.0, -1.0}, {1.0, 1.0, 1.0});
    Covector c(2, 3);
    c.coeff(0) = 2.0;
    c.coeff(2) = -1.5;
    const FormField theta = constant_field(c);
    const FormField dtheta = d_smooth(theta, box);
    CHECK(max_norm(dtheta(Vec{0.2, 0.4, -0.1})) == 0.0);
    // the FD fallback agrees
    const FormField fd = d_smooth(strip_analytic_d(theta), box);
    CHECK(max_norm(fd(Vec{0.2, 0.4, -0.1})) <= 1e-10);
}

TEST_CASE("analytic derivative matches central differences to 1e-8") {
    const Domain box({-1.0, -1.0, -1.0}, {1.0, 1.0, 1.0});
    const FormField theta = cross_term_1form_r3();
    const FormField d_analytic = d_smooth(theta, box);
    const FormField d_fd = d_smooth(strip_analytic_d(theta), box);
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> u(-0.9, 0.9);
    for (int t = 0; t < 50; ++t) {
        const Vec x{u(rng), u(rng), u(rng)};
        Covector diff = d_analytic(x);
        diff -= d_fd(x);
        CHECK(max_norm(diff) <= 1e-8);
    }
}

TEST_CASE("d of d residuals") {
    const Domain box3({-1.0, -1.0, -1.0}, {1.0, 1.0, 1.0});
    const QuadratureGrid g3(box3, 6);
    CHECK(d_of_d_residual(cross_term_1form_r3(), g3, default_fd_step(box3)) <= 1e-10);

    Covector c(1, 3);
    c.coeff(1) = 4.0;
    CHECK(d_of_d_residual(constant_field(c), g3, default_fd_step(box3)) == 0.0);

    const Domain box2({-1.0, -1.0}, {1.0, 1.0});
    const QuadratureGrid g2(box2, 16);
    const TestForm tf = bump_test_form(box2, Vec{0.1, -0.2}, 0.5, 1.0, MultiIndex({0}, 2));
    CHECK(d_of_d_residual(tf.form, g2, 1e-5) <= 1e-6);
}

TEST_CASE("bump test form profile") {
    const Domain box({-1.0, -1.0}, {1.0, 1.0});
    const Vec c{0.2, -0.1};
    const double radius = 0.4, amplitude = 2.5;
    const TestForm tf = bump_test_form(box, c, radius, amplitude, MultiIndex({1}, 2));

    CHECK(tf.form(c).coeff(1) == doctest::Approx(amplitude));
    CHECK(max_norm(tf.form(Vec{0.2 + 0.41, -0.1})) == 0.0);
    CHECK(max_norm(tf.form(Vec{0.9, 0.9})) == 0.0);

    // shell just outside the support: exact zeros for values and derivatives
    for (int i = 0; i < 32; ++i) {
        const double a = 2.0 * M_PI * i / 32.0;
        const Vec x{c[0] + 1.0001 * radius * std::cos(a), c[1] + 1.0001 * radius * std::sin(a)};
        CHECK(max_norm(tf.form(x)) == 0.0);
        CHECK(max_norm(tf.form.d_coeff(x)) == 0.0);
    }

    // analytic d against finite differences at radius/2 from the center
    const FormField fd = d_smooth(strip_analytic_d(tf.form), box);
    for (int i = 0; i < 8; ++i) {
        const double a = 2.0 * M_PI * i / 8.0;
        const Vec x{c[0] + 0.5 * radius * std::cos(a), c[1] + 0.5 * radius * std::sin(a)};
        Covector diff = tf.form.d_coeff(x);
        diff -= fd(x);
        CHECK(max_norm(diff) <= 1e-7);
    }
}

TEST_CASE("bump support must fit inside the domain") {
    const Domain box({-1.0, -1.0}, {1.0, 1.0});
    CHECK_THROWS_AS(bump_test_form(box, Vec{0.9, 0.0}, 0.2, 1.0, MultiIndex({0}, 2)),
                    std::invalid_argument);
    CHECK_THROWS_AS(bump_test_form(box, Vec{0.0, 0.0}, 1.0, 1.0, MultiIndex({0}, 2)),
                    std::invalid_argument);
}

TEST_CASE("lp norm of a constant field is |c| on a unit box") {
    const Domain box({0.0, 0.0}, {1.0, 1.0});
    const QuadratureGrid grid(box, 32);
    const FormField theta = constant_field(Covector::basis(MultiIndex({0}, 2), -3.0));
    CHECK(lp_norm(theta, 2.0, grid) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(lp_norm(theta, std::numeric_limits<double>::infinity(), grid) == doctest::Approx(3.0));
}

TEST_CASE("lp norm of |x|^(-1/2) against the polar oracle, and p=4 divergence") {
    const Domain box(Vec{-1.0, -1.0}, Vec{1.0, 1.0}, {Excision{Vec{0.0, 0.0}, 0.05}});
    FormField theta;
    theta.degree = 0;
    theta.ambient_dim = 2;
    theta.coeff = [](const Vec& x) {
        return Covector::scalar(2, std::pow(x.norm2(), -0.25));
    };
    theta.tag = Smoothness::sampled_measurable;

    // polar closed form in r: integral over the box of |x|^(-1/2)
    //   = (2/3) * integral over theta of R(theta)^(3/2),  R = 1/max(|cos|,|sin|)
    double oracle = 0.0;
    const int N = 4096;
    for (int i = 0; i <= N; ++i) {
        const double th = 2.0 * M_PI * i / N;
        const double R = 1.0 / std::max(std::abs(std::cos(th)), std::abs(std::sin(th)));
        const double f = (2.0 / 3.0) * std::pow(R, 1.5);
        const double w = (i == 0 || i == N) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        oracle += w * f;
    }
    oracle *= (2.0 * M_PI / N) / 3.0;

    const auto rep1 = lp_norm_report(theta, 1.0, box, GridSchedule{512, 3, 1.0});
    CHECK(rep1.growth == Growth::finite);
    CHECK(std::abs(rep1.value - oracle) <= 0.02 * oracle);

    // p = 4: integrand |x|^(-2), the log-divergent boundary case
    const auto rep4 = lp_norm_report(theta, 4.0, box, GridSchedule{512, 3, 1.0});
    CHECK(rep4.growth == Growth::divergent);
}

TEST_CASE("lp norm is monotone in the integrand") {
    const Domain box({-1.0, -1.0}, {1.0, 1.0});
    const QuadratureGrid grid(box, 64);
    const FormField small = constant_field(Covector::basis(MultiIndex({0}, 2), 1.0));
    FormField big;
    big.degree = 1;
    big.ambient_dim = 2;
    big.coeff = [](const Vec& x) {
        return Covector::basis(MultiIndex({0}, 2), 1.0 + x.norm2());
    };
    for (double p : {1.0, 2.0, 3.5}) CHECK(lp_norm(small, p, grid) <= lp_norm(big, p, grid));
}

TEST_CASE("d_smooth is linear over random combinations") {
    const Domain box({-1.0, -1.0, -1.0}, {1.0, 1.0, 1.0});
    const FormField t1 = cross_term_1form_r3();
    FormSpec fs;
    fs.degree = 1;
    FormTermSpec t;
    Poly p(3);
    p.add_term(0.5, {1, 1, 0});
    p.add_term(-2.0, {0, 0, 2});
    t.coeff = p;
    t.pattern = {2};
    fs.terms.push_back(t);
    const FormField t2 = build_form(fs, 3);

    std::mt19937 rng(23);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int i = 0; i < 20; ++i) {
        const double a = u(rng), b = u(rng);
        const FormField comb = linear_comb(a, strip_analytic_d(t1), b, strip_analytic_d(t2));
        const FormField d_comb = d_smooth(comb, box);
        const FormField d1 = d_smooth(strip_analytic_d(t1), box);
        const FormField d2 = d_smooth(strip_analytic_d(t2), box);
        const Vec x{u(rng) / 3.0, u(rng) / 3.0, u(rng) / 3.0};
        Covector want = d1(x);
        want *= a;
        Covector w2 = d2(x);
        w2 *= b;
        want += w2;
        Covector got = d_comb(x);
        got -= want;
        const double scale = std::max(1.0, max_norm(want));
        CHECK(max_norm(got) / scale <= 1e-10);
    }
}

TEST_CASE("d of a top-degree form is the zero sentinel") {
    const Domain box({-1.0, -1.0}, {1.0, 1.0});
    FormSpec fs;
    fs.degree = 2;
    FormTermSpec t;
    t.coeff = Poly::variable(2, 0);
    t.pattern = {0, 1};
    fs.terms.push_back(t);
    const FormField top = build_form(fs, 2);
    const FormField dtop = d_smooth(strip_analytic_d(top), box);
    CHECK(dtop.degree == 3);
    const Covector v = dtop(Vec{0.1, 0.2});
    CHECK(v.degree() == 3);
    CHECK(v.is_zero());
}

TEST_CASE("field algebra wedge/scale derivative identities") {
    const Domain box({-1.0, -1.0, -1.0}, {1.0, 1.0, 1.0});
    const FormField beta = cross_term_1form_r3();
    const FormField h = scalar_field(3, [](const Vec& x) { return x[0] * x[0] + 0.3 * x[1]; },
                                     [](const Vec& x) {
                                         return Vec{2.0 * x[0], 0.3, 0.0};
                                     });
    const FormField prod = scaled_field(h, beta);
    REQUIRE(prod.has_analytic_d());
    // d(h beta) = dh ^ beta + h d(beta), checked against finite differences
    const FormField fd = d_smooth(strip_analytic_d(prod), box);
    for (const Vec& x : {Vec{0.3, -0.2, 0.5}, Vec{-0.6, 0.1, -0.4}}) {
        Covector diff = prod.d_coeff(x);
        diff -= fd(x);
        CHECK(max_norm(diff) <= 1e-8);
    }
}
