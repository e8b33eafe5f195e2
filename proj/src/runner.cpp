#include "natform/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <random>
#include <set>
#include <sstream>

#include "natform/mollify.hpp"
#include "natform/numerics.hpp"

namespace natform {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10e", v);
    return buf;
}

std::string fmt_short(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

struct Emitter {
    std::string csv;
    std::string summary;
    std::vector<std::pair<std::string, std::string>> row_verdicts;  // check id -> verdict

    void row(const std::string& scenario, const std::string& check, int k, int resolution,
             double epsilon, const std::string& param, double residual, double error_estimate,
             double slope, const std::string& verdict) {
        csv += scenario;
        csv += ',';
        csv += check;
        csv += ',';
        csv += std::to_string(k);
        csv += ',';
        csv += std::to_string(resolution);
        csv += ',';
        csv += fmt_short(epsilon);
        csv += ',';
        csv += param;
        csv += ',';
        csv += fmt(residual);
        csv += ',';
        csv += fmt(error_estimate);
        csv += ',';
        csv += fmt_short(slope);
        csv += ',';
        csv += verdict;
        csv += '\n';
        row_verdicts.emplace_back(check, verdict);
    }

    void note(const std::string& line) {
        summary += line;
        summary += '\n';
    }
};

std::string growth_str(Growth g) { return g == Growth::finite ? "finite" : "divergent"; }
std::string bounded_str(Growth g) { return g == Growth::finite ? "bounded" : "blowup"; }

void emit_report(Emitter& em, const std::string& scenario, const std::string& check, int k,
                 const std::string& param, const ResidualReport& rep) {
    for (size_t l = 0; l < rep.per_level.size(); ++l) {
        const double err = l == 0 ? 0.0 : std::abs(rep.per_level[l] - rep.per_level[l - 1]);
        em.row(scenario, check, k, rep.resolutions[l], rep.epsilons[l], param, rep.per_level[l], err,
               rep.slope, to_string(rep.verdict));
    }
    em.note(check + ": " + to_string(rep.verdict) + " (residual=" + fmt_short(rep.residual) +
            ", tol=" + fmt_short(rep.tol) + ", slope=" + fmt_short(rep.slope) + ")");
}

void emit_membership(Emitter& em, const std::string& scenario, const std::string& check,
                     const std::string& param, const MembershipReport& rep,
                     const std::vector<QuadratureGrid>& grids) {
    const std::string verdict = growth_str(rep.classification);
    const double slope = log2_slope(rep.per_level).value_or(0.0);
    for (size_t l = 0; l < rep.per_level.size(); ++l) {
        const double err = l == 0 ? 0.0 : std::abs(rep.per_level[l] - rep.per_level[l - 1]);
        em.row(scenario, check, rep.k, grids[l].resolution(), grids[l].excision_radius(), param,
               rep.per_level[l], err, slope, verdict);
    }
    em.note(check + ": " + verdict + " (exponent=" + fmt_short(rep.exponent) +
            ", estimate=" + fmt_short(rep.estimate) + ")");
}

std::set<std::string> enabled_checks(const ScenarioSpec& spec) {
    std::set<std::string> enabled;
    for (const auto& [key, expected] : spec.expectations) {
        std::string base = key.substr(0, key.find('@'));
        if (base.rfind("kdagger", 0) == 0) base = "kdagger";
        enabled.insert(base);
    }
    if (enabled.empty()) enabled.insert("naturality");
    // routegap rows come out of the decomposed computation
    if (enabled.count("routegap")) enabled.insert("decomposed");
    return enabled;
}

/// Degree-consistency validation for the enabled checks; runs before any
/// quadrature so config problems surface immediately.
void validate_point(const BuiltScenario& built, const std::set<std::string>& enabled) {
    const int m = built.domain.dim();
    if (enabled.count("naturality") || enabled.count("closedness")) {
        if (m - built.k - 1 < 0)
            throw ConfigError(0, "naturality/closedness need k <= m-1 (battery degree m-k-1)");
        (void)make_battery(built, m - built.k - 1);
    }
    if (enabled.count("decomposed")) {
        if (!built.decomposed_a || !built.decomposed_gamma)
            throw ConfigError(0, "decomposed check needs 'a' and 'gamma' in [form]");
        if (m - built.decomposed_gamma->degree - 1 < 0)
            throw ConfigError(0, "decomposed check needs gamma degree <= m-1");
    }
    if (enabled.count("leibniz")) {
        if (!built.leibniz_h || !built.leibniz_beta)
            throw ConfigError(0, "leibniz check needs 'h' and 'beta' in [form]");
        if (m - built.leibniz_beta->degree - 1 < 0)
            throw ConfigError(0, "leibniz check needs beta degree <= m-1");
    }
    if (enabled.count("sobolev") && !(built.sobolev_p >= 1.0))
        throw ConfigError(0, "sobolev probe needs p >= 1");
    if (enabled.count("lambda") && !(built.lambda_q >= 1.0))
        throw ConfigError(0, "lambda probe needs lambda_q >= 1 (defaulted only for k >= 2)");
    if ((enabled.count("stability") || enabled.count("kdagger") || enabled.count("tau")) &&
        built.k < 1)
        throw ConfigError(0, "stability diagnostics need form degree k >= 1");
}

std::vector<double> mollify_schedule(const BuiltScenario& built) {
    std::vector<double> eps;
    for (int l = 0; l < built.mollify_levels; ++l)
        eps.push_back(built.mollify_eps0 * std::pow(0.5, l));
    return eps;
}

void run_point(const ScenarioSpec& spec, const BuiltScenario& built, const std::string& param,
               Emitter& em) {
    const auto enabled = enabled_checks(spec);
    validate_point(built, enabled);
    const std::string& id = spec.id;
    const int m = built.domain.dim();

    if (enabled.count("naturality")) {
        const auto battery = make_battery(built, m - built.k - 1);
        const auto reports =
            naturality_battery(built.map, built.alpha, battery, built.domain, built.sched, built.tol);
        for (const auto& r : reports)
            emit_report(em, id, "naturality@" + r.id, built.k, param, r.report);
    }
    if (enabled.count("closedness")) {
        const auto battery = make_battery(built, m - built.k - 1);
        const FormField theta = pullback_field(built.map, built.alpha);
        for (const auto& b : battery) {
            const auto rep =
                weak_closedness_residual(theta, b.form, built.domain, built.sched, built.tol);
            emit_report(em, id, "closedness@" + b.id, built.k, param, rep);
        }
    }
    if (enabled.count("decomposed")) {
        const int kg = built.decomposed_gamma->degree;
        const auto battery = make_battery(built, m - kg - 1);
        for (const auto& b : battery) {
            const auto rep = naturality_decomposed_residual(built.map, *built.decomposed_a,
                                                            *built.decomposed_gamma, b.form,
                                                            built.domain, built.sched, built.tol);
            emit_report(em, id, "decomposed@" + b.id, kg, param, rep.route_b);
            const std::string verdict = rep.route_gap <= 1e-8 ? "holds" : "fails";
            em.row(id, "routegap@" + b.id, kg, rep.route_b.resolutions.back(),
                   rep.route_b.epsilons.back(), param, rep.route_gap, 0.0, 0.0, verdict);
            em.note("routegap@" + b.id + ": " + verdict + " (gap=" + fmt_short(rep.route_gap) + ")");
        }
    }
    if (enabled.count("leibniz")) {
        const int kb = built.leibniz_beta->degree;
        const auto battery = make_battery(built, m - kb - 1);
        for (const auto& b : battery) {
            const auto rep = leibniz_residual(*built.leibniz_h, *built.leibniz_beta, b.form,
                                              built.domain, built.sched, built.tol);
            emit_report(em, id, "leibniz@" + b.id, kb, param, rep);
        }
    }
    if (enabled.count("sobolev")) {
        const auto grids = make_level_grids(built.domain, built.sched);
        const auto rep = sobolev_report(built.map, built.sobolev_p, built.domain, built.sched);
        emit_membership(em, id, "sobolev", param, rep, grids);
    }
    if (enabled.count("lambda")) {
        const auto grids = make_level_grids(built.domain, built.sched);
        const auto rep =
            membership_report(built.map, built.k, built.lambda_q, built.domain, built.sched);
        emit_membership(em, id, "lambda", param, rep, grids);
    }
    if (enabled.count("stability") || enabled.count("kdagger")) {
        const Domain sdom = built.domain.with_excisions({}).shrunk(built.mollify_eps0);
        const QuadratureGrid grid(sdom, built.sched.resolution);
        const auto eps = mollify_schedule(built);
        if (enabled.count("stability")) {
            const auto rep = stability_diagnostic(built.map, built.k, eps, grid, built.domain);
            const std::string verdict = bounded_str(rep.envelope_growth);
            for (size_t l = 0; l < eps.size(); ++l) {
                em.row(id, "stability@eps", built.k, grid.resolution(), eps[l], param, rep.per_eps[l],
                       0.0, 0.0, verdict);
                em.row(id, "stability@envelope", built.k, grid.resolution(), eps[l], param,
                       rep.envelope[l], 0.0, 0.0, verdict);
            }
            em.note("stability: " + verdict + " (envelope " + fmt_short(rep.envelope.back()) + ")");
        }
        if (enabled.count("kdagger")) {
            const auto rep = kdagger_diagnostic(built.map, built.k, eps, grid, built.domain);
            const std::string vk = bounded_str(rep.deg_k.envelope_growth);
            const std::string vk1 = bounded_str(rep.deg_k1.envelope_growth);
            for (size_t l = 0; l < eps.size(); ++l) {
                em.row(id, "kdagger_k", built.k, grid.resolution(), eps[l], param,
                       l < rep.deg_k.per_eps.size() ? rep.deg_k.per_eps[l] : 0.0, 0.0, 0.0, vk);
                em.row(id, "kdagger_k1", built.k + 1, grid.resolution(), eps[l], param,
                       l < rep.deg_k1.per_eps.size() ? rep.deg_k1.per_eps[l] : 0.0, 0.0, 0.0, vk1);
            }
            const std::string verdict = rep.k_dagger_evidence ? "evidence" : "no-evidence";
            em.row(id, "kdagger", built.k, grid.resolution(), eps.back(), param,
                   rep.deg_k.envelope.back() +
                       (rep.deg_k1.envelope.empty() ? 0.0 : rep.deg_k1.envelope.back()),
                   0.0, 0.0, verdict);
            em.note("kdagger: " + verdict + " (deg k " + vk + ", deg k+1 " + vk1 + ")");
        }
    }
    if (enabled.count("tau")) {
        const Domain sdom = built.domain.with_excisions({}).shrunk(built.mollify_eps0);
        const QuadratureGrid grid(sdom, built.sched.resolution);
        const auto eps = mollify_schedule(built);
        std::vector<MapModel> f_seq;
        for (double e : eps) f_seq.push_back(mollify(built.map, e, built.domain));
        const auto omegas = make_battery(built, m - built.k, &sdom);
        std::vector<FormField> omega_fields;
        for (const auto& o : omegas) omega_fields.push_back(o.form.form);
        const auto rep = tau_convergence_report(f_seq, built.map, {built.alpha}, omega_fields, grid);
        for (const auto& entry : rep.entries) {
            const auto cls = classify_residuals(entry.deviations, built.tol);
            std::string verdict = to_string(cls.verdict);
            if (cls.verdict == Verdict::holds) verdict = "converged";
            const std::string check = "tau@" + omegas[entry.omega_index].id;
            for (size_t j = 0; j < entry.lambda_seq.size(); ++j) {
                em.row(id, check, built.k, grid.resolution(), eps[j], param, entry.lambda_seq[j],
                       entry.deviations[j], cls.slope, verdict);
            }
            em.note(check + ": " + verdict + " (limit " + fmt_short(entry.lambda_limit) + ")");
        }
    }
}

void evaluate_expectations(const ScenarioSpec& spec, Emitter& em, RunResult& out) {
    if (spec.expectations.empty()) return;
    // Longer keys are more specific and claim their rows first.
    std::vector<std::pair<std::string, std::string>> keys = spec.expectations;
    std::stable_sort(keys.begin(), keys.end(), [](const auto& a, const auto& b) {
        return a.first.size() > b.first.size();
    });
    std::vector<bool> claimed(em.row_verdicts.size(), false);
    for (const auto& [key, expected] : keys) {
        bool matched_any = false;
        std::set<std::string> complained;
        for (size_t i = 0; i < em.row_verdicts.size(); ++i) {
            if (claimed[i]) continue;
            const std::string& check = em.row_verdicts[i].first;
            const bool match = check == key || check.rfind(key + "@", 0) == 0;
            if (!match) continue;
            claimed[i] = true;
            matched_any = true;
            if (expected == "any") continue;
            if (em.row_verdicts[i].second != expected && !complained.count(check)) {
                complained.insert(check);
                out.mismatches.push_back("expected " + key + " = " + expected + " but " + check +
                                         " = " + em.row_verdicts[i].second);
            }
        }
        if (!matched_any)
            out.mismatches.push_back("expectation '" + key + "' matched no result rows");
    }
}

RunResult finish(const ScenarioSpec& spec, Emitter& em) {
    RunResult out;
    evaluate_expectations(spec, em, out);
    for (const auto& mm : out.mismatches) em.note("MISMATCH: " + mm);
    em.note(out.mismatches.empty() ? "expectations: ok" : "expectations: FAILED");
    out.csv = csv_header() + em.csv;
    out.summary = em.summary;
    out.exit_code = out.mismatches.empty() ? 0 : 1;
    return out;
}

}  // namespace

std::string csv_header() {
    return "scenario,check,k,resolution,epsilon,param,residual,error_estimate,slope,verdict\n";
}

RunResult run_scenario(const ScenarioSpec& spec) {
    Emitter em;
    const BuiltScenario built = build_scenario(spec);
    run_point(spec, built, "", em);
    return finish(spec, em);
}

RunResult sweep_scenario(const ScenarioSpec& spec) {
    if (!spec.sweep) throw ConfigError(0, "sweep: scenario has no [sweep] section");
    Emitter em;
    for (double v : spec.sweep->values) {
        SweepOverride over{spec.sweep->param, v};
        const BuiltScenario built = build_scenario(spec, over);
        em.note("--- " + spec.sweep->param + " = " + fmt_short(v) + " ---");
        run_point(spec, built, fmt_short(v), em);
    }
    return finish(spec, em);
}

// ---------------------------------------------------------------------------
// selftest
// ---------------------------------------------------------------------------

namespace {

struct PropertyResult {
    std::string name;
    int trials = 0;
    double max_violation = 0.0;  // scaled so that 1.0 is the failure threshold
    bool pass() const { return max_violation < 1.0; }
};

Covector random_covector(std::mt19937& rng, int degree, int m) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Covector v(degree, m);
    for (std::int64_t r = 0; r < binomial(m, degree); ++r) v.coeff(r) = u(rng);
    return v;
}

Matrix random_matrix(std::mt19937& rng, int rows, int cols) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Matrix A(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) A(i, j) = u(rng);
    return A;
}

double rel_diff(const Covector& a, const Covector& b, double scale) {
    Covector d = a;
    d -= b;
    return max_norm(d) / std::max(1e-30, scale);
}

PropertyResult prop_anticommutativity(std::mt19937& rng) {
    PropertyResult res{"wedge-anticommutativity", 10000, 0.0};
    std::uniform_int_distribution<int> dim(2, 6);
    for (int t = 0; t < res.trials; ++t) {
        const int m = dim(rng);
        std::uniform_int_distribution<int> deg(0, m);
        const int k = deg(rng), l = deg(rng);
        const Covector a = random_covector(rng, k, m), b = random_covector(rng, l, m);
        Covector ab = wedge(a, b);
        Covector ba = wedge(b, a);
        ba *= ((k * l) % 2 == 0) ? 1.0 : -1.0;
        const double scale = max_norm(a) * max_norm(b);
        res.max_violation = std::max(res.max_violation, rel_diff(ab, ba, scale) / 1e-12);
    }
    return res;
}

PropertyResult prop_associativity(std::mt19937& rng) {
    PropertyResult res{"wedge-associativity", 10000, 0.0};
    std::uniform_int_distribution<int> dim(2, 6);
    for (int t = 0; t < res.trials; ++t) {
        const int m = dim(rng);
        std::uniform_int_distribution<int> deg(0, 2);
        const Covector a = random_covector(rng, deg(rng), m);
        const Covector b = random_covector(rng, deg(rng), m);
        const Covector c = random_covector(rng, deg(rng), m);
        const Covector left = wedge(wedge(a, b), c);
        const Covector right = wedge(a, wedge(b, c));
        const double scale = max_norm(a) * max_norm(b) * max_norm(c);
        res.max_violation = std::max(res.max_violation, rel_diff(left, right, scale) / 1e-12);
    }
    return res;
}

PropertyResult prop_bilinearity(std::mt19937& rng) {
    PropertyResult res{"wedge-bilinearity", 10000, 0.0};
    std::uniform_int_distribution<int> dim(2, 6);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int t = 0; t < res.trials; ++t) {
        const int m = dim(rng);
        std::uniform_int_distribution<int> deg(0, m - 1);
        const int k = deg(rng), l = deg(rng);
        const Covector a = random_covector(rng, k, m), a2 = random_covector(rng, k, m);
        const Covector b = random_covector(rng, l, m);
        const double ca = u(rng), cb = u(rng);
        Covector lhs = wedge(ca * a + cb * a2, b);
        Covector rhs = ca * wedge(a, b) + cb * wedge(a2, b);
        const double scale = (std::abs(ca) + std::abs(cb)) * std::max(max_norm(a), max_norm(a2)) *
                             max_norm(b);
        res.max_violation = std::max(res.max_violation, rel_diff(lhs, rhs, scale) / 1e-12);
    }
    return res;
}

PropertyResult prop_rank_unrank() {
    PropertyResult res{"rank-unrank-bijection", 0, 0.0};
    for (int m = 0; m <= 8; ++m) {
        for (int k = 0; k <= m; ++k) {
            for (std::int64_t r = 0; r < binomial(m, k); ++r) {
                ++res.trials;
                const MultiIndex I = MultiIndex::unrank(r, m, k);
                if (I.rank() != r) res.max_violation = 2.0;
            }
        }
    }
    return res;
}

PropertyResult prop_cauchy_binet(std::mt19937& rng) {
    PropertyResult res{"cauchy-binet", 1000, 0.0};
    std::uniform_int_distribution<int> dim(1, 6);
    for (int t = 0; t < res.trials; ++t) {
        const int m = dim(rng), r = dim(rng), n = dim(rng);
        const Matrix A = random_matrix(rng, n, r), B = random_matrix(rng, r, m);
        const Matrix AB = A * B;
        const int kmax = std::min({m, r, n});
        for (int k = 1; k <= kmax; ++k) {
            Matrix left = compound_matrix(AB, k);
            const Matrix right = compound_matrix(A, k) * compound_matrix(B, k);
            left -= right;
            const double scale = std::max(1.0, compound_matrix(AB, k).max_abs());
            res.max_violation = std::max(res.max_violation, left.max_abs() / scale / 1e-9);
        }
    }
    return res;
}

PropertyResult prop_dd_zero() {
    PropertyResult res{"dd-zero", 2, 0.0};
    // polynomial 1-form in R^3 with cross terms, so d(d theta) = 0 needs the
    // mixed partials to actually cancel; analytic first derivative, FD second
    const Domain box3({-1.0, -1.0, -1.0}, {1.0, 1.0, 1.0});
    FormSpec fs;
    fs.degree = 1;
    {
        FormTermSpec t1;
        Poly p(3);
        p.add_term(1.0, {0, 2, 1});
        t1.coeff = p;
        t1.pattern = {0};
        fs.terms.push_back(t1);
        FormTermSpec t2;
        Poly q(3);
        q.add_term(1.0, {1, 0, 1});
        t2.coeff = q;
        t2.pattern = {1};
        fs.terms.push_back(t2);
        FormTermSpec t3;
        Poly r(3);
        r.add_term(1.0, {2, 1, 0});
        t3.coeff = r;
        t3.pattern = {2};
        fs.terms.push_back(t3);
    }
    const FormField theta = build_form(fs, 3);
    const QuadratureGrid g3(box3, 6);
    const double r1 = d_of_d_residual(theta, g3, default_fd_step(box3));
    res.max_violation = std::max(res.max_violation, r1 / 1e-10);

    // bump test form in R^2, FD fallback on the analytic first derivative
    const Domain box2({-1.0, -1.0}, {1.0, 1.0});
    const TestForm tf = bump_test_form(box2, Vec{0.2, -0.1}, 0.5, 1.0, MultiIndex({0}, 2));
    const QuadratureGrid g2(box2, 16);
    const double r2 = d_of_d_residual(tf.form, g2, 1e-5 * box2.diameter());
    res.max_violation = std::max(res.max_violation, r2 / 1e-6);
    return res;
}

PropertyResult prop_inequality(std::mt19937& rng, std::string& factor_note) {
    PropertyResult res{"pullback-inequality", 5000, 0.0};
    std::uniform_int_distribution<int> dim(1, 4);
    double max_factor = 0.0;
    for (int t = 0; t < res.trials; ++t) {
        const int m = dim(rng), n = dim(rng);
        const int kmax = std::min(m, n);
        std::uniform_int_distribution<int> deg(1, kmax);
        const int k = deg(rng);
        const MapModel f = linear_map(random_matrix(rng, n, m));
        const Covector alpha = random_covector(rng, k, n);
        const auto chk = norm_inequality_check(f, alpha, Vec(m));
        if (!chk.within_bound) res.max_violation = 2.0;
        max_factor = std::max(max_factor, chk.factor);
    }
    char buf[128];
    std::snprintf(buf, sizeof(buf), "smallest sufficient factor observed: %.6g", max_factor);
    factor_note = buf;
    return res;
}

PropertyResult prop_route_equivalence() {
    PropertyResult res{"route-equivalence", 2, 0.0};
    const GridSchedule sched{32, 3, 1.0};

    {  // smooth polynomial map in the plane
        const Domain box({-1.0, -1.0}, {1.0, 1.0});
        std::vector<Poly> comps;
        Poly f1(2);
        f1.add_term(1.0, {2, 0});
        f1.add_term(-1.0, {0, 1});
        Poly f2(2);
        f2.add_term(1.0, {1, 1});
        f2.add_term(0.5, {0, 0});
        comps.push_back(f1);
        comps.push_back(f2);
        const MapModel f = polynomial_map(comps, 2);
        const FormField a = scalar_field(2, [](const Vec& y) { return y[0]; },
                                         [](const Vec&) { return Vec{1.0, 0.0}; });
        const FormField gamma = constant_field(Covector::basis(MultiIndex({1}, 2)));
        const TestForm phi = bump_test_form(box, Vec{0.1, 0.2}, 0.4, 1.0, MultiIndex({}, 2));
        const auto rep = naturality_decomposed_residual(f, a, gamma, phi, box, sched, 1e-6);
        res.max_violation = std::max(res.max_violation, rep.route_gap / 1e-8);
    }
    {  // winding-map failure case: both routes must still agree with each other
        const Domain box(Vec{-1.0, -1.0}, Vec{1.0, 1.0}, {Excision{Vec{0.0, 0.0}, 0.1}});
        const MapModel f = winding_map();
        const FormField a = scalar_field(2, [](const Vec& y) { return y[0]; },
                                         [](const Vec&) { return Vec{1.0, 0.0}; });
        const FormField gamma = constant_field(Covector::basis(MultiIndex({1}, 2)));
        const TestForm phi = bump_test_form(box, Vec{0.0, 0.0}, 0.4, 1.0, MultiIndex({}, 2));
        const auto rep = naturality_decomposed_residual(f, a, gamma, phi, box, sched, 1e-6);
        res.max_violation = std::max(res.max_violation, rep.route_gap / 1e-8);
    }
    return res;
}

PropertyResult prop_pairing_antisymmetry(std::mt19937& rng) {
    PropertyResult res{"pairing-antisymmetry", 0, 0.0};
    // Even-monomial coefficients keep the pairings far from zero on the
    // symmetric box, so the identity is checked against a real magnitude.
    std::uniform_real_distribution<double> u(0.5, 2.0);
    const Domain box3({-1.0, -1.0, -1.0}, {1.0, 1.0, 1.0});
    const QuadratureGrid g3(box3, 12);
    const Domain box2({-1.0, -1.0}, {1.0, 1.0});
    const QuadratureGrid g2(box2, 24);
    for (int t = 0; t < 10; ++t) {
        // degree (1,2) in R^3 — sensitive to one-sided sign faults
        {
            FormSpec f1, f2;
            f1.degree = 1;
            f2.degree = 2;
            for (int axis = 0; axis < 3; ++axis) {
                FormTermSpec term;
                Poly p(3);
                p.add_term(u(rng), {2, 0, 0});
                p.add_term(u(rng), {0, 0, 0});
                term.coeff = p;
                term.pattern = {axis};
                f1.terms.push_back(term);
            }
            for (std::int64_t r = 0; r < 3; ++r) {
                FormTermSpec term;
                Poly p(3);
                p.add_term(u(rng), {0, 2, 0});
                p.add_term(u(rng), {0, 0, 0});
                term.coeff = p;
                term.pattern = MultiIndex::unrank(r, 3, 2).entries();
                f2.terms.push_back(term);
            }
            const FormField theta = build_form(f1, 3);
            const FormField omega = build_form(f2, 3);
            const double p1 = pairing(theta, omega, g3);
            const double p2 = pairing(omega, theta, g3);
            const double scale =
                g3.integrate_value([&](const Vec& x) { return std::abs(wedge(theta(x), omega(x)).coeff(0)); });
            // (-1)^{k(m-k)} with k=1, m=3: even permutation, p1 == p2
            res.max_violation =
                std::max(res.max_violation, std::abs(p1 - p2) / std::max(scale, 1e-30) / 1e-10);
            ++res.trials;
        }
        // degree (1,1) in R^2: p1 == -p2
        {
            FormSpec f1, f2;
            f1.degree = 1;
            f2.degree = 1;
            for (int axis = 0; axis < 2; ++axis) {
                FormTermSpec t1;
                Poly p(2);
                p.add_term(u(rng), {2, 0});
                p.add_term(u(rng), {0, 0});
                t1.coeff = p;
                t1.pattern = {axis};
                f1.terms.push_back(t1);
                FormTermSpec t2;
                Poly q(2);
                q.add_term(u(rng), {0, 2});
                q.add_term(-u(rng), {0, 0});
                t2.coeff = q;
                t2.pattern = {axis};
                f2.terms.push_back(t2);
            }
            const FormField theta = build_form(f1, 2);
            const FormField omega = build_form(f2, 2);
            const double p1 = pairing(theta, omega, g2);
            const double p2 = pairing(omega, theta, g2);
            const double scale =
                g2.integrate_value([&](const Vec& x) { return std::abs(wedge(theta(x), omega(x)).coeff(0)); });
            res.max_violation =
                std::max(res.max_violation, std::abs(p1 + p2) / std::max(scale, 1e-30) / 1e-10);
            ++res.trials;
        }
    }
    return res;
}

}  // namespace

RunResult run_selftest(bool inject_sign_fault) {
    debug_flip_pairing_sign(inject_sign_fault);
    std::mt19937 rng(0x5eed1234u);

    std::vector<PropertyResult> props;
    std::string factor_note;
    props.push_back(prop_anticommutativity(rng));
    props.push_back(prop_associativity(rng));
    props.push_back(prop_bilinearity(rng));
    props.push_back(prop_rank_unrank());
    props.push_back(prop_cauchy_binet(rng));
    props.push_back(prop_dd_zero());
    props.push_back(prop_inequality(rng, factor_note));
    props.push_back(prop_route_equivalence());
    props.push_back(prop_pairing_antisymmetry(rng));

    debug_flip_pairing_sign(false);

    RunResult out;
    Emitter em;
    int failures = 0;
    for (const auto& p : props) {
        const std::string verdict = p.pass() ? "pass" : "fail";
        if (!p.pass()) ++failures;
        em.row("selftest", p.name, 0, p.trials, 0.0, "", p.max_violation, 0.0, 0.0, verdict);
        char buf[160];
        std::snprintf(buf, sizeof(buf), "%-26s trials=%-6d max_violation=%.3e  %s", p.name.c_str(),
                      p.trials, p.max_violation, verdict.c_str());
        em.note(buf);
    }
    em.note(factor_note);
    em.note(failures == 0 ? "selftest: all properties pass"
                          : "selftest: " + std::to_string(failures) + " properties FAILED");
    out.csv = csv_header() + em.csv;
    out.summary = em.summary;
    out.exit_code = failures == 0 ? 0 : 1;
    return out;
}

}  // namespace natform
