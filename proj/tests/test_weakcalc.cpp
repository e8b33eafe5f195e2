#include <doctest.h>

#include <cmath>
#include <random>

#include "natform/scenario.hpp"
#include "natform/weakcalc.hpp"

using namespace natform;

namespace {

FormField half_angle_form() {
    FormSpec fs;
    fs.degree = 1;
    fs.named = "half_angle";
    return build_form(fs, 2);
}

MapModel gentle_poly_3d() {
    std::vector<Poly> comps;
    auto var = [](int i) { return Poly::variable(3, i); };
    auto c = [](double v) { return Poly::constant(3, v); };
    comps.push_back(var(0) + c(0.15) * var(1) * var(1));
    comps.push_back(var(1) + c(-0.1) * var(0) * var(2));
    comps.push_back(var(2) + c(0.1) * var(0) * var(1));
    return polynomial_map(comps, 3);
}

FormField mixed_1form_r3(double scale) {
    FormSpec fs;
    fs.degree = 1;
    FormTermSpec t1;
    t1.coeff = Poly::constant(3, scale) * Poly::variable(3, 1);
    t1.pattern = {0};
    fs.terms.push_back(t1);
    FormTermSpec t2;
    t2.coeff = Poly::constant(3, scale) * Poly::variable(3, 0) * Poly::variable(3, 2);
    t2.pattern = {2};
    fs.terms.push_back(t2);
    return build_form(fs, 3);
}

}  // namespace

TEST_CASE("pairing of coordinate forms on the unit square") {
    const Domain box({0.0, 0.0}, {1.0, 1.0});
    const QuadratureGrid grid(box, 32);
    const FormField dx1 = constant_field(Covector::basis(MultiIndex({0}, 2)));
    const FormField dx2 = constant_field(Covector::basis(MultiIndex({1}, 2)));
    CHECK(pairing(dx1, dx2, grid) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(pairing(dx2, dx1, grid) == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("pairing degree mismatch throws") {
    const Domain box({0.0, 0.0, 0.0}, {1.0, 1.0, 1.0});
    const QuadratureGrid grid(box, 4);
    const FormField dx1 = constant_field(Covector::basis(MultiIndex({0}, 3)));
    CHECK_THROWS_AS(pairing(dx1, dx1, grid), std::invalid_argument);
}

TEST_CASE("pairing is stable under refinement for smooth vs bump") {
    const Domain box({-1.0, -1.0}, {1.0, 1.0});
    FormSpec fs;
    fs.degree = 1;
    FormTermSpec t;
    Poly p(2);
    p.add_term(1.0, {1, 0});
    p.add_term(0.4, {0, 2});
    t.coeff = p;
    t.pattern = {0};
    fs.terms.push_back(t);
    const FormField theta = build_form(fs, 2);
    const TestForm omega = bump_test_form(box, Vec{0.2, -0.1}, 0.5, 1.0, MultiIndex({1}, 2));
    const QuadratureGrid coarse(box, 64), fine(box, 256);
    CHECK(std::abs(pairing(theta, omega.form, coarse) - pairing(theta, omega.form, fine)) <= 1e-6);
}

TEST_CASE("classify_residuals verdict rules") {
    // decaying to tiny: holds
    auto r1 = classify_residuals({1e-3, 2.5e-4, 6e-5}, 1e-6);
    CHECK(r1.verdict == Verdict::holds);
    // stable nonzero across 3 levels: fails
    auto r2 = classify_residuals({0.95, 1.0, 1.001, 1.0005}, 1e-6);
    CHECK(r2.verdict == Verdict::fails);
    CHECK(r2.error_estimate == doctest::Approx(0.0005));
    // all below base tolerance: holds even with flat slope
    auto r3 = classify_residuals({3e-7, 2e-7, 2.5e-7}, 1e-6);
    CHECK(r3.verdict == Verdict::holds);
    CHECK(r3.converged);
    // growing without stabilizing: inconclusive
    auto r4 = classify_residuals({0.1, 0.4, 1.6}, 1e-6);
    CHECK(r4.verdict == Verdict::inconclusive);
    // exact zeros: holds
    auto r5 = classify_residuals({0.0, 0.0, 0.0}, 1e-6);
    CHECK(r5.verdict == Verdict::holds);
    CHECK_THROWS_AS(classify_residuals({}, 1e-6), std::invalid_argument);
}

TEST_CASE("weak derivative residual: smooth Stokes identity holds") {
    const Domain box({-1.0, -1.0, -1.0}, {1.0, 1.0, 1.0});
    const GridSchedule sched{32, 3, 1.0};
    const FormField theta = mixed_1form_r3(0.5);
    const FormField psi = d_smooth(theta, box);  // analytic
    const TestForm phi = bump_test_form(box, Vec{0.1, -0.15, 0.2}, 0.6, 1.0, MultiIndex({2}, 3));
    const auto rep = weak_derivative_residual(theta, psi, phi, box, sched, 1e-6);
    CHECK(rep.verdict == Verdict::holds);
    CHECK(std::abs(rep.residual) <= 1e-4);
}

TEST_CASE("weak derivative residual: closed constant form against psi = 0") {
    const Domain box({-1.0, -1.0}, {1.0, 1.0});
    const GridSchedule sched{64, 3, 1.0};
    const FormField theta = constant_field(Covector::basis(MultiIndex({0}, 2), 2.0));
    const TestForm phi = bump_test_form(box, Vec{0.1, 0.2}, 0.5, 1.0, MultiIndex({}, 2));
    const auto rep = weak_closedness_residual(theta, phi, box, sched, 1e-6);
    CHECK(rep.verdict == Verdict::holds);
}

TEST_CASE("weak derivative residual: perturbed psi fails with the explicit pairing value") {
    const Domain box({-1.0, -1.0}, {1.0, 1.0});
    const GridSchedule sched{128, 3, 1.0};
    // theta = x1 dx2 (k=1), true d theta = dx1^dx2; psi = d theta + c dx1^dx2
    FormSpec fs;
    fs.degree = 1;
    FormTermSpec t;
    t.coeff = Poly::variable(2, 0);
    t.pattern = {1};
    fs.terms.push_back(t);
    const FormField theta = build_form(fs, 2);
    const double c = 0.7;
    const FormField psi = linear_comb(1.0, d_smooth(theta, box), 1.0,
                                      constant_field(Covector::basis(MultiIndex({0, 1}, 2), c)));
    const TestForm phi = bump_test_form(box, Vec{-0.2, 0.3}, 0.45, 1.0, MultiIndex({}, 2));

    const auto rep = weak_derivative_residual(theta, psi, phi, box, sched, 1e-6);
    CHECK(rep.verdict == Verdict::fails);
    // residual = -(-1)^(k+1) * pairing(c dx1^dx2, phi) = -c * integral(phi)
    const QuadratureGrid fine(box, 128);
    const double expected =
        -c * fine.integrate_value([&](const Vec& x) { return phi.form(x).as_scalar(); });
    CHECK(rep.residual == doctest::Approx(expected).epsilon(1e-4));
}

TEST_CASE("dd-consistency: weak derivative of theta against d theta holds for smooth fixtures") {
    const Domain box({-1.0, -1.0, -1.0}, {1.0, 1.0, 1.0});
    const GridSchedule sched{32, 3, 1.0};
    const FormField theta = mixed_1form_r3(0.4);
    for (std::int64_t r = 0; r < 3; ++r) {
        const TestForm phi =
            bump_test_form(box, Vec{0.05, -0.1, 0.15}, 0.6, 0.8, MultiIndex::unrank(r, 3, 1));
        const auto rep = weak_derivative_residual(theta, d_smooth(theta, box), phi, box, sched, 1e-6);
        CHECK(rep.verdict == Verdict::holds);
    }
}

TEST_CASE("weak closedness of pullbacks of closed forms under smooth maps") {
    const Domain box({-1.0, -1.0, -1.0}, {1.0, 1.0, 1.0});
    const GridSchedule sched{32, 3, 1.0};
    const MapModel f = gentle_poly_3d();
    // gamma = dy2 is exact, so f* gamma must be weakly closed
    const FormField gamma = constant_field(Covector::basis(MultiIndex({1}, 3)));
    const FormField theta = pullback_field(f, gamma);
    const TestForm phi = bump_test_form(box, Vec{0.1, 0.05, -0.1}, 0.6, 1.0, MultiIndex({0}, 3));
    const auto rep = weak_closedness_residual(theta, phi, box, sched, 1e-6);
    CHECK(rep.verdict == Verdict::holds);
}

TEST_CASE("weak closedness: exact coordinate form") {
    const Domain box({-1.0, -1.0}, {1.0, 1.0});
    const GridSchedule sched{64, 3, 1.0};
    const FormField dx1 = constant_field(Covector::basis(MultiIndex({0}, 2)));
    const TestForm phi = bump_test_form(box, Vec{0.25, -0.3}, 0.4, 1.0, MultiIndex({}, 2));
    const auto rep = weak_closedness_residual(dx1, phi, box, sched, 1e-6);
    CHECK(rep.verdict == Verdict::holds);
    CHECK(std::abs(rep.residual) <= rep.tol);
}

TEST_CASE("weak closedness of the pulled-back half angle form fails at the origin") {
    const Domain box(Vec{-1.0, -1.0}, Vec{1.0, 1.0}, {Excision{Vec{0.0, 0.0}, 0.1}});
    const GridSchedule sched{256, 4, 1.0};
    const MapModel w = winding_map();
    const FormField theta = pullback_field(w, half_angle_form());  // = (1/2) d(angle)
    const TestForm phi = bump_test_form(box, Vec{0.0, 0.0}, 0.4, 1.0, MultiIndex({}, 2));
    const auto rep = weak_closedness_residual(theta, phi, box, sched, 1e-6);
    CHECK(rep.verdict == Verdict::fails);
    // annulus-Stokes oracle: (1/2) * circle integral of phi at the finest excision
    const double eps = rep.epsilons.back();
    double oracle = 0.0;
    const int N = 2048;
    for (int i = 0; i < N; ++i) {
        const double th = 2.0 * M_PI * i / N;
        oracle += phi.form(Vec{eps * std::cos(th), eps * std::sin(th)}).as_scalar();
    }
    oracle *= 0.5 * (2.0 * M_PI / N);
    CHECK(rep.residual == doctest::Approx(oracle).epsilon(0.02));
}

TEST_CASE("naturality holds for a smooth 3d polynomial map") {
    const Domain box({-1.0, -1.0, -1.0}, {1.0, 1.0, 1.0});
    const GridSchedule sched{64, 3, 1.0};
    const MapModel f = gentle_poly_3d();
    const FormField alpha = mixed_1form_r3(0.5);
    const TestForm phi = bump_test_form(box, Vec{-0.1, 0.05, 0.15}, 0.65, 0.55, MultiIndex({1}, 3));
    const auto rep = naturality_residual(f, alpha, phi, box, sched, 1e-6);
    CHECK(rep.verdict == Verdict::holds);
    CHECK(std::abs(rep.residual) <= 1e-6);
}

TEST_CASE("naturality fails on the winding map with the origin bump, matching the annulus oracle") {
    const Domain box(Vec{-1.0, -1.0}, Vec{1.0, 1.0}, {Excision{Vec{0.0, 0.0}, 0.1}});
    const GridSchedule sched{256, 4, 1.0};
    const MapModel w = winding_map();
    const FormField alpha = half_angle_form();
    const double amp = 1.3;
    const TestForm phi = bump_test_form(box, Vec{0.0, 0.0}, 0.4, amp, MultiIndex({}, 2));
    const auto rep = naturality_residual(w, alpha, phi, box, sched, 1e-6);
    CHECK(rep.verdict == Verdict::fails);
    // plateau proportional to phi(0): ~ pi * amp at small excision
    CHECK(rep.residual == doctest::Approx(M_PI * amp).epsilon(0.03));
    const double eps = rep.epsilons.back();
    double oracle = 0.0;
    const int N = 2048;
    for (int i = 0; i < N; ++i) {
        const double th = 2.0 * M_PI * i / N;
        oracle += phi.form(Vec{eps * std::cos(th), eps * std::sin(th)}).as_scalar();
    }
    oracle *= 0.5 * (2.0 * M_PI / N);
    CHECK(rep.residual == doctest::Approx(oracle).epsilon(0.02));

    // a bump supported away from the origin holds
    const TestForm off = bump_test_form(box, Vec{0.45, 0.45}, 0.25, 1.0, MultiIndex({}, 2));
    const auto rep2 = naturality_residual(w, alpha, off, box, sched, 1e-6);
    CHECK(rep2.verdict == Verdict::holds);
}

TEST_CASE("naturality residual vanishes identically for constant maps") {
    const Domain box({-1.0, -1.0}, {1.0, 1.0});
    const GridSchedule sched{32, 3, 1.0};
    const MapModel c = constant_map(2, Vec{0.3, 0.7});
    const FormField alpha = half_angle_form();
    const TestForm phi = bump_test_form(box, Vec{0.0, 0.0}, 0.4, 1.0, MultiIndex({}, 2));
    const auto rep = naturality_residual(c, alpha, phi, box, sched, 1e-6);
    CHECK(rep.verdict == Verdict::holds);
    for (double v : rep.per_level) CHECK(v == 0.0);
}

TEST_CASE("naturality residual is linear in alpha") {
    const Domain box({-1.0, -1.0, -1.0}, {1.0, 1.0, 1.0});
    const GridSchedule sched{16, 3, 1.0};
    const MapModel f = gentle_poly_3d();
    const FormField a1 = mixed_1form_r3(0.5);
    FormSpec fs;
    fs.degree = 1;
    FormTermSpec t;
    t.coeff = Poly::constant(3, 0.3) * Poly::variable(3, 2) * Poly::variable(3, 2);
    t.pattern = {1};
    fs.terms.push_back(t);
    const FormField a2 = build_form(fs, 3);
    const TestForm phi = bump_test_form(box, Vec{0.2, -0.1, 0.0}, 0.5, 1.0, MultiIndex({0}, 3));

    const auto r1 = naturality_residual(f, a1, phi, box, sched, 1e-6);
    const auto r2 = naturality_residual(f, a2, phi, box, sched, 1e-6);
    const auto r12 = naturality_residual(f, linear_comb(1.0, a1, 1.0, a2), phi, box, sched, 1e-6);
    for (size_t l = 0; l < r12.per_level.size(); ++l) {
        const double want = r1.per_level[l] + r2.per_level[l];
        CHECK(std::abs(r12.per_level[l] - want) <=
              1e-10 * std::max(1.0, std::abs(want)));
    }
}

TEST_CASE("decomposed route agrees with the direct route (smooth and winding)") {
    const GridSchedule sched{64, 3, 1.0};
    {
        const Domain box({-1.0, -1.0}, {1.0, 1.0});
        std::vector<Poly> comps;
        Poly f1(2);
        f1.add_term(1.0, {1, 0});
        f1.add_term(0.3, {0, 2});
        Poly f2(2);
        f2.add_term(1.0, {0, 1});
        f2.add_term(-0.2, {2, 0});
        comps.push_back(f1);
        comps.push_back(f2);
        const MapModel f = polynomial_map(comps, 2);
        const FormField a = scalar_field(2, [](const Vec& y) { return y[0]; },
                                         [](const Vec&) { return Vec{1.0, 0.0}; });
        const FormField gamma = constant_field(Covector::basis(MultiIndex({1}, 2)));
        const TestForm phi = bump_test_form(box, Vec{0.1, 0.2}, 0.4, 1.0, MultiIndex({}, 2));
        const auto rep = naturality_decomposed_residual(f, a, gamma, phi, box, sched, 1e-6);
        CHECK(rep.route_gap <= 1e-8);
        CHECK(rep.route_a.verdict == Verdict::holds);
        CHECK(rep.route_b.verdict == Verdict::holds);
    }
    {
        const Domain box(Vec{-1.0, -1.0}, Vec{1.0, 1.0}, {Excision{Vec{0.0, 0.0}, 0.1}});
        const MapModel w = winding_map();
        const FormField a = scalar_field(2, [](const Vec& y) { return y[0]; },
                                         [](const Vec&) { return Vec{1.0, 0.0}; });
        const FormField gamma = constant_field(Covector::basis(MultiIndex({1}, 2)));
        const TestForm phi = bump_test_form(box, Vec{0.0, 0.0}, 0.4, 1.0, MultiIndex({}, 2));
        const GridSchedule s4{256, 4, 1.0};
        const auto rep = naturality_decomposed_residual(w, a, gamma, phi, box, s4, 1e-6);
        CHECK(rep.route_gap <= 1e-8);
        // both routes stabilize on the same nonzero limit
        CHECK(rep.route_a.verdict == rep.route_b.verdict);
        CHECK(std::abs(rep.route_b.residual) > 0.1);
    }
}

TEST_CASE("decomposed with a = 1 reduces to weak closedness of f* gamma") {
    const Domain box({-1.0, -1.0}, {1.0, 1.0});
    const GridSchedule sched{64, 3, 1.0};
    std::vector<Poly> comps;
    Poly f1(2);
    f1.add_term(1.0, {1, 0});
    f1.add_term(0.25, {0, 2});
    Poly f2(2);
    f2.add_term(1.0, {0, 1});
    comps.push_back(f1);
    comps.push_back(f2);
    const MapModel f = polynomial_map(comps, 2);
    const FormField one = scalar_field(2, [](const Vec&) { return 1.0; },
                                       [](const Vec&) { return Vec{0.0, 0.0}; });
    const FormField gamma = constant_field(Covector::basis(MultiIndex({0}, 2)));
    const TestForm phi = bump_test_form(box, Vec{-0.2, 0.1}, 0.45, 1.0, MultiIndex({}, 2));
    const auto rep = naturality_decomposed_residual(f, one, gamma, phi, box, sched, 1e-6);
    const auto closed = weak_closedness_residual(pullback_field(f, gamma), phi, box, sched, 1e-6);
    for (size_t l = 0; l < closed.per_level.size(); ++l)
        CHECK(rep.route_b.per_level[l] == doctest::Approx(closed.per_level[l]).epsilon(1e-10));
    CHECK(rep.route_b.verdict == Verdict::holds);
}

TEST_CASE("decomposed rejects a non-closed gamma") {
    const Domain box({-1.0, -1.0}, {1.0, 1.0});
    const GridSchedule sched{16, 3, 1.0};
    const MapModel f = linear_map(Matrix::identity(2));
    const FormField a = scalar_field(2, [](const Vec&) { return 1.0; },
                                     [](const Vec&) { return Vec{0.0, 0.0}; });
    FormSpec gs;
    gs.degree = 1;
    FormTermSpec t;
    t.coeff = Poly::variable(2, 1);  // y2 dy1 is not closed
    t.pattern = {0};
    gs.terms.push_back(t);
    const FormField gamma = build_form(gs, 2);
    const TestForm phi = bump_test_form(box, Vec{0.0, 0.0}, 0.4, 1.0, MultiIndex({}, 2));
    CHECK_THROWS_AS(naturality_decomposed_residual(f, a, gamma, phi, box, sched, 1e-6),
                    std::invalid_argument);
}

TEST_CASE("leibniz residuals") {
    const Domain box3({-1.0, -1.0, -1.0}, {1.0, 1.0, 1.0});
    const GridSchedule sched{32, 3, 1.0};
    // h constant
    {
        const FormField h = scalar_field(3, [](const Vec&) { return 2.5; },
                                         [](const Vec&) { return Vec{0.0, 0.0, 0.0}; });
        const FormField beta = mixed_1form_r3(0.5);
        const TestForm phi = bump_test_form(box3, Vec{0.0, 0.1, -0.1}, 0.6, 1.0, MultiIndex({2}, 3));
        const auto rep = leibniz_residual(h, beta, phi, box3, sched, 1e-6);
        CHECK(rep.verdict == Verdict::holds);
    }
    // h = x1^2, beta = x2 dx3
    {
        const FormField h = scalar_field(3, [](const Vec& x) { return x[0] * x[0]; },
                                         [](const Vec& x) {
                                             return Vec{2.0 * x[0], 0.0, 0.0};
                                         });
        FormSpec bs;
        bs.degree = 1;
        FormTermSpec t;
        t.coeff = Poly::variable(3, 1);
        t.pattern = {2};
        bs.terms.push_back(t);
        const FormField beta = build_form(bs, 3);
        const TestForm phi = bump_test_form(box3, Vec{0.15, -0.05, 0.1}, 0.6, 0.7, MultiIndex({1}, 3));
        const auto rep = leibniz_residual(h, beta, phi, box3, GridSchedule{64, 3, 1.0}, 1e-6);
        CHECK(rep.verdict == Verdict::holds);
        CHECK(std::abs(rep.residual) <= 1e-6);
    }
    // h a bump scalar, beta smooth
    {
        const Domain box2({-1.0, -1.0}, {1.0, 1.0});
        const TestForm hb = bump_test_form(box2, Vec{0.1, 0.0}, 0.55, 1.0, MultiIndex({}, 2));
        FormSpec bs;
        bs.degree = 0;
        FormTermSpec t;
        Poly p(2);
        p.add_term(1.0, {0, 1});
        p.add_term(0.5, {0, 0});
        t.coeff = p;
        t.pattern = {};
        bs.terms.push_back(t);
        const FormField beta = build_form(bs, 2);
        const TestForm phi = bump_test_form(box2, Vec{-0.2, 0.25}, 0.4, 1.0, MultiIndex({0}, 2));
        const auto rep = leibniz_residual(hb.form, beta, phi, box2, GridSchedule{256, 3, 1.0}, 1e-6);
        CHECK(rep.verdict == Verdict::holds);
        CHECK(std::abs(rep.residual) <= 1e-6);
    }
}

TEST_CASE("tau convergence: identical sequence and O(1/j) perturbations") {
    const Domain box({-1.0, -1.0}, {1.0, 1.0});
    const QuadratureGrid grid(box, 64);
    std::vector<Poly> comps;
    Poly f1(2);
    f1.add_term(1.0, {1, 0});
    f1.add_term(0.2, {0, 2});
    Poly f2(2);
    f2.add_term(1.0, {0, 1});
    comps.push_back(f1);
    comps.push_back(f2);
    const MapModel f = polynomial_map(comps, 2);
    // perturbation g with analytic jacobian
    std::vector<Poly> gc;
    Poly g1(2);
    g1.add_term(1.0, {2, 0});
    Poly g2(2);
    g2.add_term(1.0, {0, 1});
    gc.push_back(g1);
    gc.push_back(g2);
    const MapModel g = polynomial_map(gc, 2);

    const FormField alpha = constant_field(Covector::basis(MultiIndex({0}, 2)));
    const TestForm omega = bump_test_form(box, Vec{0.1, -0.2}, 0.5, 1.0, MultiIndex({1}, 2));

    // f_j = f for all j: every deviation is zero
    {
        const std::vector<MapModel> seq(4, f);
        const auto rep = tau_convergence_report(seq, f, {alpha}, {omega.form}, grid);
        REQUIRE(rep.entries.size() == 1);
        for (double d : rep.entries[0].deviations) CHECK(d == 0.0);
        for (double d : rep.w11_distance) CHECK(d == 0.0);
    }
    // f_j = f + (1/j) g: deviations decay like 1/j for a constant 1-form
    {
        std::vector<MapModel> seq;
        for (int j = 1; j <= 8; j *= 2) {
            MapModel fj;
            fj.source_dim = 2;
            fj.target_dim = 2;
            const double c = 1.0 / j;
            fj.eval = [c, fe = f.eval, ge = g.eval](const Vec& x) {
                Vec v = fe(x);
                Vec w = ge(x);
                w *= c;
                v += w;
                return v;
            };
            fj.jac = [c, fj_ = f.jac, gj = g.jac](const Vec& x) {
                Matrix J = gj(x);
                J *= c;
                J += fj_(x);
                return J;
            };
            seq.push_back(std::move(fj));
        }
        const auto rep = tau_convergence_report(seq, f, {alpha}, {omega.form}, grid);
        const auto& dev = rep.entries[0].deviations;
        REQUIRE(dev.size() == 4);
        CHECK(dev[0] / dev[1] == doctest::Approx(2.0).epsilon(1e-9));
        CHECK(dev[0] / dev[3] == doctest::Approx(8.0).epsilon(1e-9));
        CHECK(rep.w11_distance[0] > rep.w11_distance[3]);
    }
    CHECK_THROWS_AS(tau_convergence_report({f}, f, {}, {omega.form}, grid), std::invalid_argument);
}

TEST_CASE("pairing antisymmetry under the graded swap") {
    const Domain box({-1.0, -1.0, -1.0}, {1.0, 1.0, 1.0});
    const QuadratureGrid grid(box, 12);
    std::mt19937 rng(71);
    std::uniform_real_distribution<double> u(0.4, 1.5);
    for (int t = 0; t < 5; ++t) {
        FormSpec f1, f2;
        f1.degree = 1;
        f2.degree = 2;
        FormTermSpec t1;
        Poly p(3);
        p.add_term(u(rng), {2, 0, 0});
        p.add_term(u(rng), {0, 0, 0});
        t1.coeff = p;
        t1.pattern = {1};
        f1.terms.push_back(t1);
        FormTermSpec t2;
        Poly q(3);
        q.add_term(u(rng), {0, 0, 2});
        q.add_term(u(rng), {0, 0, 0});
        t2.coeff = q;
        t2.pattern = {0, 2};
        f2.terms.push_back(t2);
        const FormField theta = build_form(f1, 3);
        const FormField omega = build_form(f2, 3);
        const double p1 = pairing(theta, omega, grid);
        const double p2 = pairing(omega, theta, grid);
        // k=1, m-k=2: (-1)^{k(m-k)} = +1
        CHECK(p1 == doctest::Approx(p2).epsilon(1e-10));
        CHECK(std::abs(p1) > 1e-3);
    }
}

TEST_CASE("default battery layout") {
    const Domain box(Vec{-1.0, -1.0}, Vec{1.0, 1.0}, {Excision{Vec{0.0, 0.0}, 0.1}});
    // center coincides with the singular point: the singular label wins
    const auto battery = default_battery(box, 0, 0.2, 1.0);
    REQUIRE(battery.size() == 2);
    CHECK(battery[0].id == "sing0.p0");
    CHECK(battery[1].id == "off.p0");
    // explicit off sites, all degree-1 patterns: 3 sites x 2 patterns
    const auto b2 = default_battery(box, 1, 0.2, 1.0, {Vec{0.5, 0.0}, Vec{-0.5, 0.2}});
    REQUIRE(b2.size() == 6);
    CHECK(b2[2].id == "off.p0");
    CHECK(b2[4].id == "off1.p0");
}
