#include "natform/mollify.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>

#include "natform/forms.hpp"
#include "natform/parallel.hpp"

namespace natform {

namespace {

constexpr int kKernelRes = 16;  // midpoint points per axis over the kernel ball

/// Precomputed unit-scale kernel: nodes v in (-1,1)^m with bump weights.
/// Nodes are stored in +/- pairs so odd moments cancel exactly.
struct Kernel {
    int dim = 0;
    std::vector<Vec> nodes;
    std::vector<double> mass;                // normalized: sum = 1
    std::vector<std::vector<double>> grad;   // [axis][node], first moment = -delta exactly up to rounding
};

Kernel build_kernel(int m) {
    Kernel K;
    K.dim = m;
    const double h = 2.0 / kKernelRes;
    const double cell = std::pow(h, m);

    std::vector<Vec> raw;
    std::uint64_t total = 1;
    for (int i = 0; i < m; ++i) total *= kKernelRes;
    for (std::uint64_t flat = 0; flat < total; ++flat) {
        std::uint64_t rem = flat;
        Vec v(m);
        for (int d = m - 1; d >= 0; --d) {
            const int c = static_cast<int>(rem % kKernelRes);
            rem /= kKernelRes;
            v[d] = -1.0 + (c + 0.5) * h;
        }
        if (v.norm2() >= 1.0) continue;
        // keep only the lexicographically-positive representative; its mirror
        // is appended right after it so +/- cancellation is exact
        bool positive = false;
        for (int d = 0; d < m; ++d) {
            if (v[d] > 0) {
                positive = true;
                break;
            }
            if (v[d] < 0) break;
        }
        if (!positive) continue;
        raw.push_back(v);
    }
    for (const Vec& v : raw) {
        Vec neg = v;
        neg *= -1.0;
        K.nodes.push_back(v);
        K.nodes.push_back(neg);
    }

    const std::size_t N = K.nodes.size();
    K.mass.resize(N);
    for (std::size_t i = 0; i < N; ++i) K.mass[i] = bump_profile(K.nodes[i].norm2()) * cell;
    const double Z = par::pairwise_sum(K.mass);
    for (double& w : K.mass) w /= Z;

    K.grad.assign(static_cast<size_t>(m), std::vector<double>(N));
    for (int axis = 0; axis < m; ++axis) {
        auto& g = K.grad[static_cast<size_t>(axis)];
        for (std::size_t i = 0; i < N; ++i) {
            const Vec& v = K.nodes[i];
            g[i] = bump_profile_du(v.norm2()) * 2.0 * v[axis] * cell;
        }
        double s = 0.0;
        for (std::size_t i = 0; i < N; ++i) s -= g[i] * K.nodes[i][axis];
        for (double& x : g) x /= s;
    }
    return K;
}

}  // namespace

MapModel mollify(const MapModel& f, double eps, const Domain& box) {
    if (!(eps > 0.0)) throw std::invalid_argument("mollify: eps must be positive");
    if (box.dim() != f.source_dim) throw std::invalid_argument("mollify: box dimension mismatch");
    auto K = std::make_shared<Kernel>(build_kernel(f.source_dim));
    const Vec lo = box.lower(), hi = box.upper();
    const int m = f.source_dim, n = f.target_dim;

    auto guard = [lo, hi, eps, m](const Vec& x) {
        for (int i = 0; i < m; ++i)
            if (!(x[i] >= lo[i] + eps && x[i] <= hi[i] - eps))
                throw std::domain_error("mollify: evaluation outside the eps-shrunken domain");
    };

    MapModel out;
    out.source_dim = m;
    out.target_dim = n;
    out.eval = [K, eps, n, guard, base = f.eval](const Vec& x) {
        guard(x);
        Vec acc(n);
        for (std::size_t i = 0; i < K->nodes.size(); ++i) {
            Vec p = K->nodes[i];
            p *= -eps;
            p += x;
            const Vec fy = base(p);
            for (int c = 0; c < n; ++c) acc[c] += K->mass[i] * fy[c];
        }
        return acc;
    };
    out.jac = [K, eps, m, n, guard, base = f.eval](const Vec& x) {
        guard(x);
        Matrix J(n, m);
        for (std::size_t i = 0; i < K->nodes.size(); ++i) {
            Vec p = K->nodes[i];
            p *= -eps;
            p += x;
            const Vec fy = base(p);
            for (int mu = 0; mu < m; ++mu) {
                const double g = K->grad[static_cast<size_t>(mu)][i] / eps;
                for (int nu = 0; nu < n; ++nu) J(nu, mu) += g * fy[nu];
            }
        }
        return J;
    };
    out.family = "mollified(" + f.family + ")";
    out.fd_step = f.fd_step;
    return out;
}

std::vector<double> default_eps_schedule(const Domain& box, int levels) {
    std::vector<double> eps;
    const double eps0 = 0.1 * box.diameter();
    for (int l = 0; l < levels; ++l) eps.push_back(eps0 * std::pow(0.5, l));
    return eps;
}

StabilityReport stability_diagnostic(const MapModel& f, int k, const std::vector<double>& eps_schedule,
                                     const QuadratureGrid& grid, const Domain& base_box) {
    if (eps_schedule.size() < 3)
        throw std::invalid_argument("stability_diagnostic: need a schedule of >= 3 eps values");
    for (std::size_t i = 0; i + 1 < eps_schedule.size(); ++i)
        if (!(eps_schedule[i] > eps_schedule[i + 1]))
            throw std::invalid_argument("stability_diagnostic: eps schedule must decrease");

    StabilityReport rep;
    rep.k = k;
    rep.eps_schedule = eps_schedule;

    const std::size_t N = grid.node_count();
    std::vector<double> envelope(N, 0.0);
    std::vector<double> vals(N);
    for (double eps : eps_schedule) {
        const MapModel feps = mollify(f, eps, base_box);
        par::parallel_for(N, [&](std::size_t i) { vals[i] = lambda_norm(feps, grid.node(i), k); });
        rep.per_eps.push_back(par::pairwise_sum(vals) * grid.cell_volume());
        for (std::size_t i = 0; i < N; ++i) envelope[i] = std::max(envelope[i], vals[i]);
        rep.envelope.push_back(par::pairwise_sum(envelope) * grid.cell_volume());
    }
    rep.envelope_growth = classify_growth(rep.envelope);
    return rep;
}

KDaggerReport kdagger_diagnostic(const MapModel& f, int k, const std::vector<double>& eps_schedule,
                                 const QuadratureGrid& grid, const Domain& base_box) {
    const int n = f.target_dim;
    KDaggerReport rep;
    rep.deg_k = stability_diagnostic(f, k, eps_schedule, grid, base_box);
    if (k >= n || k + 1 > std::min(f.source_dim, f.target_dim)) {
        // k = n defers to the degree-k case; a degree beyond min(m,n) has no
        // minors at all, so the second report is trivially bounded.
        rep.deg_k1.k = k + 1;
        rep.deg_k1.eps_schedule = eps_schedule;
        rep.deg_k1.envelope_growth = Growth::finite;
        rep.k_dagger_evidence = rep.deg_k.bounded();
        return rep;
    }
    rep.deg_k1 = stability_diagnostic(f, k + 1, eps_schedule, grid, base_box);
    rep.k_dagger_evidence = rep.deg_k.bounded() && rep.deg_k1.bounded();
    return rep;
}

}  // namespace natform
