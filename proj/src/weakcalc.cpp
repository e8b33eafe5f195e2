#include "natform/weakcalc.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>

#include "natform/parallel.hpp"

namespace natform {

namespace {

std::atomic<bool> g_flip_pairing{false};

double residual_sign(int k) {
    // (-1)^(k+1): +1 for odd k, -1 for even k.
    return (k % 2 == 1) ? 1.0 : -1.0;
}

constexpr std::size_t kBlock = 4096;

}  // namespace

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::holds: return "holds";
        case Verdict::fails: return "fails";
        default: return "inconclusive";
    }
}

void debug_flip_pairing_sign(bool flipped) { g_flip_pairing.store(flipped); }
bool pairing_sign_flipped() { return g_flip_pairing.load(); }

ResidualReport classify_residuals(std::vector<double> per_level, double tol_base) {
    ResidualReport rep;
    rep.per_level = std::move(per_level);
    if (rep.per_level.empty()) throw std::invalid_argument("classify_residuals: empty sequence");
    const std::size_t L = rep.per_level.size() - 1;
    rep.residual = rep.per_level[L];
    rep.error_estimate = L >= 1 ? std::abs(rep.per_level[L] - rep.per_level[L - 1]) : 0.0;
    rep.tol = std::max(tol_base, 10.0 * rep.error_estimate);

    rep.converged = true;
    for (double v : rep.per_level)
        if (std::abs(v) > tol_base) rep.converged = false;

    const auto slope = log2_slope(rep.per_level);
    rep.slope = slope.value_or(0.0);

    const bool small_enough = std::abs(rep.residual) <= rep.tol;
    const bool decaying = rep.converged || (slope && *slope <= -0.2);

    bool stable_nonzero = false;
    if (rep.per_level.size() >= 3) {
        double lo = rep.per_level[L], hi = rep.per_level[L];
        for (std::size_t i = L - 2; i <= L; ++i) {
            lo = std::min(lo, rep.per_level[i]);
            hi = std::max(hi, rep.per_level[i]);
        }
        stable_nonzero = std::abs(rep.residual) > rep.tol && (hi - lo) <= 0.05 * std::abs(rep.residual);
    }

    if (small_enough && decaying)
        rep.verdict = Verdict::holds;
    else if (stable_nonzero)
        rep.verdict = Verdict::fails;
    else
        rep.verdict = Verdict::inconclusive;
    return rep;
}

double pairing(const FormField& theta, const FormField& omega, const QuadratureGrid& grid) {
    const int m = grid.domain().dim();
    if (theta.ambient_dim != m || omega.ambient_dim != m)
        throw std::invalid_argument("pairing: field dimension does not match the domain");
    if (theta.degree + omega.degree != m)
        throw std::invalid_argument("pairing: degrees must sum to the ambient dimension");
    // The injected fault is degree-asymmetric on purpose: a global flip would
    // cancel out of the antisymmetry identity and the selftest could not see it.
    const double sgn = (g_flip_pairing.load() && theta.degree < omega.degree) ? -1.0 : 1.0;
    return sgn * grid.integrate_value([&](const Vec& x) {
        return wedge(theta(x), omega(x)).coeff(0);
    });
}

namespace {

/// Shared core: per level, pair a list of (theta_b, psi_b) providers against
/// the battery in one node sweep with a fixed blockwise summation tree.
/// integrand_pair(x) must fill thetas[b], psis[b] contributions.
struct LevelAccumulator {
    std::vector<double> block_first;   // [form][block]
    std::vector<double> block_second;  // [form][block]
    std::size_t nblocks = 0;
    std::size_t nforms = 0;

    void resize(std::size_t forms, std::size_t blocks) {
        nforms = forms;
        nblocks = blocks;
        block_first.assign(forms * blocks, 0.0);
        block_second.assign(forms * blocks, 0.0);
    }
    double sum_first(std::size_t b) const {
        return par::pairwise_sum({block_first.data() + b * nblocks, nblocks});
    }
    double sum_second(std::size_t b) const {
        return par::pairwise_sum({block_second.data() + b * nblocks, nblocks});
    }
};

}  // namespace

ResidualReport weak_derivative_residual(const FormField& theta, const FormField& psi,
                                        const TestForm& phi, const Domain& domain,
                                        const GridSchedule& sched, double tol_base) {
    const int m = domain.dim();
    const int k = theta.degree;
    if (psi.degree != k + 1)
        throw std::invalid_argument("weak_derivative_residual: psi must have degree k+1");
    if (phi.form.degree != m - k - 1)
        throw std::invalid_argument("weak_derivative_residual: test form must have degree m-k-1");
    const FormField dphi = d_smooth(phi.form, domain);
    const double sgn = residual_sign(k);
    std::vector<double> levels;
    ResidualReport rep;
    for (const auto& grid : make_level_grids(domain, sched)) {
        const double v = pairing(theta, dphi, grid) - sgn * pairing(psi, phi.form, grid);
        levels.push_back(v);
        rep.resolutions.push_back(grid.resolution());
        rep.epsilons.push_back(grid.excision_radius());
    }
    auto classified = classify_residuals(std::move(levels), tol_base);
    classified.resolutions = std::move(rep.resolutions);
    classified.epsilons = std::move(rep.epsilons);
    return classified;
}

ResidualReport weak_closedness_residual(const FormField& theta, const TestForm& phi,
                                        const Domain& domain, const GridSchedule& sched,
                                        double tol_base) {
    return weak_derivative_residual(theta, zero_field(theta.degree + 1, theta.ambient_dim), phi,
                                    domain, sched, tol_base);
}

std::vector<BatteryEntry> default_battery(const Domain& domain, int degree, double radius,
                                          double amplitude, const std::vector<Vec>& extra_sites) {
    const int m = domain.dim();
    if (degree < 0 || degree > m) throw std::invalid_argument("default_battery: bad degree");

    struct Site {
        std::string name;
        Vec at;
    };
    std::vector<Site> sites;
    auto push_site = [&](const std::string& name, const Vec& at, bool replaces) {
        for (auto& s : sites)
            if (dist(s.at, at) < 1e-12) {
                if (replaces) s.name = name;  // singular label wins over plain center
                return;
            }
        sites.push_back({name, at});
    };
    push_site("center", domain.center(), false);
    int si = 0;
    for (const auto& e : domain.excluded()) push_site("sing" + std::to_string(si++), e.point, true);
    if (extra_sites.empty()) {
        // Generic off-center point: 70% of the way to the upper corner.
        Vec off(m);
        for (int i = 0; i < m; ++i)
            off[i] = domain.lower()[i] + 0.7 * (domain.upper()[i] - domain.lower()[i]);
        push_site("off", off, false);
    } else {
        int oi = 0;
        for (const auto& site : extra_sites)
            push_site(oi++ == 0 ? "off" : "off" + std::to_string(oi - 1), site, false);
    }

    std::vector<BatteryEntry> battery;
    const std::int64_t npat = binomial(m, degree);
    for (const auto& s : sites) {
        for (std::int64_t r = 0; r < npat; ++r) {
            const MultiIndex pat = MultiIndex::unrank(r, m, degree);
            BatteryEntry e;
            e.id = s.name + ".p" + std::to_string(r);
            e.form = bump_test_form(domain, s.at, radius, amplitude, pat);
            battery.push_back(std::move(e));
        }
    }
    return battery;
}

std::vector<BatteryResidual> naturality_battery(const MapModel& f, const FormField& alpha,
                                                const std::vector<BatteryEntry>& battery,
                                                const Domain& domain, const GridSchedule& sched,
                                                double tol_base) {
    const int m = domain.dim();
    const int k = alpha.degree;
    if (f.source_dim != m) throw std::invalid_argument("naturality: map source dimension mismatch");
    if (alpha.ambient_dim != f.target_dim)
        throw std::invalid_argument("naturality: form lives on the wrong space");
    for (const auto& b : battery)
        if (b.form.form.degree != m - k - 1)
            throw std::invalid_argument("naturality: battery degree must be m-k-1");

    const FormField dalpha = d_smooth(alpha, domain);
    const double sgn = residual_sign(k);

    std::vector<FormField> dphis;
    dphis.reserve(battery.size());
    for (const auto& b : battery) dphis.push_back(d_smooth(b.form.form, domain));

    const std::size_t B = battery.size();
    std::vector<std::vector<double>> levels(B);
    std::vector<int> resolutions;
    std::vector<double> epsilons;

    for (const auto& grid : make_level_grids(domain, sched)) {
        const std::size_t n = grid.node_count();
        const std::size_t nblocks = (n + kBlock - 1) / kBlock;
        LevelAccumulator acc;
        acc.resize(B, std::max<std::size_t>(nblocks, 1));
        par::parallel_for(nblocks, [&](std::size_t blk) {
            const std::size_t begin = blk * kBlock;
            const std::size_t end = std::min(n, begin + kBlock);
            std::vector<double> s1(B, 0.0), s2(B, 0.0);
            for (std::size_t i = begin; i < end; ++i) {
                const Vec x = grid.node(i);
                const Vec y = f.eval(x);
                const Covector pa = pullback_point(f, alpha.coeff(y), x);
                const Covector pda = pullback_point(f, dalpha.coeff(y), x);
                for (std::size_t b = 0; b < B; ++b) {
                    s1[b] += wedge(pa, dphis[b](x)).coeff(0);
                    s2[b] += wedge(pda, battery[b].form.form(x)).coeff(0);
                }
            }
            for (std::size_t b = 0; b < B; ++b) {
                acc.block_first[b * acc.nblocks + blk] = s1[b];
                acc.block_second[b * acc.nblocks + blk] = s2[b];
            }
        });
        for (std::size_t b = 0; b < B; ++b) {
            const double p1 = acc.sum_first(b) * grid.cell_volume();
            const double p2 = acc.sum_second(b) * grid.cell_volume();
            levels[b].push_back(p1 - sgn * p2);
        }
        resolutions.push_back(grid.resolution());
        epsilons.push_back(grid.excision_radius());
    }

    std::vector<BatteryResidual> out;
    out.reserve(B);
    for (std::size_t b = 0; b < B; ++b) {
        BatteryResidual br;
        br.id = battery[b].id;
        br.report = classify_residuals(levels[b], tol_base);
        br.report.resolutions = resolutions;
        br.report.epsilons = epsilons;
        out.push_back(std::move(br));
    }
    return out;
}

ResidualReport naturality_residual(const MapModel& f, const FormField& alpha, const TestForm& phi,
                                   const Domain& domain, const GridSchedule& sched, double tol_base) {
    std::vector<BatteryEntry> one;
    one.push_back(BatteryEntry{"phi", phi});
    return naturality_battery(f, alpha, one, domain, sched, tol_base).front().report;
}

DecomposedReport naturality_decomposed_residual(const MapModel& f, const FormField& a,
                                                const FormField& gamma, const TestForm& phi,
                                                const Domain& domain, const GridSchedule& sched,
                                                double tol_base) {
    if (a.degree != 0) throw std::invalid_argument("decomposed: a must be a scalar field");
    if (a.ambient_dim != f.target_dim || gamma.ambient_dim != f.target_dim)
        throw std::invalid_argument("decomposed: fields live on the wrong space");

    // gamma must be closed before the decomposition applies; probe along the
    // image of a coarse domain grid.
    const FormField dgamma = d_smooth(gamma, domain);
    const QuadratureGrid coarse(domain, 8);
    double worst = 0.0;
    for (std::size_t i = 0; i < coarse.node_count(); ++i) {
        const Vec y = f.eval(coarse.node(i));
        worst = std::max(worst, max_norm(dgamma.coeff(y)));
    }
    if (worst > 1e-8)
        throw std::invalid_argument("decomposed: gamma is not closed (max |d gamma| = " +
                                    std::to_string(worst) + ")");

    const int k = gamma.degree;
    const double sgn = residual_sign(k);
    const FormField da = d_smooth(a, domain);
    const FormField f_a = pullback_field(f, a);
    const FormField f_gamma = pullback_field(f, gamma);
    const FormField f_da = pullback_field(f, da);
    const FormField theta_b = scaled_field(f_a, f_gamma);          // (f*a)(f*gamma)
    const FormField psi_b = wedge_fields(f_da, f_gamma);           // (f*da) ^ (f*gamma)
    const FormField dphi = d_smooth(phi.form, domain);

    DecomposedReport rep;
    std::vector<double> lv_b;
    std::vector<int> resolutions;
    std::vector<double> epsilons;
    for (const auto& grid : make_level_grids(domain, sched)) {
        lv_b.push_back(pairing(theta_b, dphi, grid) - sgn * pairing(psi_b, phi.form, grid));
        resolutions.push_back(grid.resolution());
        epsilons.push_back(grid.excision_radius());
    }
    rep.route_b = classify_residuals(lv_b, tol_base);
    rep.route_b.resolutions = resolutions;
    rep.route_b.epsilons = epsilons;

    rep.route_a = naturality_residual(f, scaled_field(a, gamma), phi, domain, sched, tol_base);

    double gap = 0.0;
    for (std::size_t l = 0; l < rep.route_a.per_level.size(); ++l)
        gap = std::max(gap, std::abs(rep.route_a.per_level[l] - rep.route_b.per_level[l]));
    rep.route_gap = gap;
    return rep;
}

ResidualReport leibniz_residual(const FormField& h, const FormField& beta, const TestForm& phi,
                                const Domain& domain, const GridSchedule& sched, double tol_base) {
    if (h.degree != 0) throw std::invalid_argument("leibniz: h must be a scalar field");
    const FormField dh = d_smooth(h, domain);
    const FormField dbeta = d_smooth(beta, domain);
    const FormField theta = scaled_field(h, beta);
    const FormField psi = linear_comb(1.0, wedge_fields(dh, beta), 1.0, scaled_field(h, dbeta));
    return weak_derivative_residual(theta, psi, phi, domain, sched, tol_base);
}

TauReport tau_convergence_report(const std::vector<MapModel>& f_seq, const MapModel& f,
                                 const std::vector<FormField>& alphas,
                                 const std::vector<FormField>& omegas, const QuadratureGrid& grid) {
    if (alphas.empty() || omegas.empty())
        throw std::invalid_argument("tau_convergence_report: batteries must be nonempty");
    TauReport rep;
    for (std::size_t ia = 0; ia < alphas.size(); ++ia) {
        for (std::size_t io = 0; io < omegas.size(); ++io) {
            TauReport::Entry e;
            e.alpha_index = ia;
            e.omega_index = io;
            e.lambda_limit = pairing(pullback_field(f, alphas[ia]), omegas[io], grid);
            for (const auto& fj : f_seq) {
                const double lj = pairing(pullback_field(fj, alphas[ia]), omegas[io], grid);
                e.lambda_seq.push_back(lj);
                e.deviations.push_back(std::abs(lj - e.lambda_limit));
            }
            rep.entries.push_back(std::move(e));
        }
    }
    for (const auto& fj : f_seq) {
        rep.w11_distance.push_back(grid.integrate_value([&](const Vec& x) {
            const Vec d = fj.eval(x) - f.eval(x);
            double v = 0.0;
            for (int i = 0; i < d.dim(); ++i) v = std::max(v, std::abs(d[i]));
            Matrix dj = jacobian(fj, x);
            dj -= jacobian(f, x);
            return v + dj.max_abs();
        }));
    }
    return rep;
}

}  // namespace natform
