#include "natform/quadrature.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "natform/numerics.hpp"
#include "natform/parallel.hpp"

namespace natform {

QuadratureGrid::QuadratureGrid(Domain domain, int resolution_per_axis, double excision_scale)
    : domain_(std::move(domain)), res_(resolution_per_axis), excision_scale_(excision_scale) {
    if (res_ < 1) throw std::invalid_argument("QuadratureGrid: resolution must be >= 1");
    if (!(excision_scale_ > 0.0)) throw std::invalid_argument("QuadratureGrid: excision scale must be > 0");
    const int m = domain_.dim();
    step_.resize(static_cast<size_t>(m));
    cell_volume_ = 1.0;
    std::uint64_t total = 1;
    for (int i = 0; i < m; ++i) {
        step_[static_cast<size_t>(i)] = (domain_.upper()[i] - domain_.lower()[i]) / res_;
        cell_volume_ *= step_[static_cast<size_t>(i)];
        total *= static_cast<std::uint64_t>(res_);
    }
    kept_.reserve(total);
    // Row-major sweep; a node survives if it clears every excision ball.
    std::vector<int> idx(static_cast<size_t>(m), 0);
    for (std::uint64_t flat = 0; flat < total; ++flat) {
        std::uint64_t rem = flat;
        Vec x(m);
        for (int i = m - 1; i >= 0; --i) {
            const int ci = static_cast<int>(rem % static_cast<std::uint64_t>(res_));
            rem /= static_cast<std::uint64_t>(res_);
            x[i] = domain_.lower()[i] + (ci + 0.5) * step_[static_cast<size_t>(i)];
        }
        bool keep = true;
        for (const auto& e : domain_.excluded()) {
            if (dist(x, e.point) < e.radius * excision_scale_) {
                keep = false;
                break;
            }
        }
        if (keep) kept_.push_back(flat);
    }
}

double QuadratureGrid::excision_radius() const {
    if (domain_.excluded().empty()) return 0.0;
    return domain_.excluded().front().radius * excision_scale_;
}

Vec QuadratureGrid::node(std::size_t i) const {
    const int m = domain_.dim();
    std::uint64_t rem = kept_[i];
    Vec x(m);
    for (int d = m - 1; d >= 0; --d) {
        const int ci = static_cast<int>(rem % static_cast<std::uint64_t>(res_));
        rem /= static_cast<std::uint64_t>(res_);
        x[d] = domain_.lower()[d] + (ci + 0.5) * step_[static_cast<size_t>(d)];
    }
    return x;
}

double QuadratureGrid::integrate_value(const std::function<double(const Vec&)>& g) const {
    const std::size_t n = kept_.size();
    std::vector<double> vals(n);
    par::parallel_for(n, [&](std::size_t i) { vals[i] = g(node(i)); });
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(vals[i])) {
            const Vec x = node(i);
            std::ostringstream os;
            os << "integrate: non-finite integrand at node (";
            for (int d = 0; d < x.dim(); ++d) os << (d ? "," : "") << x[d];
            os << ")";
            throw std::domain_error(os.str());
        }
    }
    return par::pairwise_sum(vals) * cell_volume_;
}

double QuadratureGrid::node_max(const std::function<double(const Vec&)>& g) const {
    const std::size_t n = kept_.size();
    std::vector<double> vals(n);
    par::parallel_for(n, [&](std::size_t i) { vals[i] = g(node(i)); });
    double mx = 0.0;
    for (double v : vals) mx = std::max(mx, v);
    return mx;
}

IntegralResult integrate(const std::function<double(const Vec&)>& g, const QuadratureGrid& grid) {
    IntegralResult r;
    r.value = grid.integrate_value(g);
    const int half_res = std::max(1, grid.resolution() / 2);
    const QuadratureGrid coarse(grid.domain(), half_res, grid.excision_scale());
    r.error_estimate = std::abs(r.value - coarse.integrate_value(g));
    return r;
}

std::vector<QuadratureGrid> make_level_grids(const Domain& domain, const GridSchedule& sched) {
    if (sched.levels < 1) throw std::invalid_argument("GridSchedule: levels must be >= 1");
    std::vector<QuadratureGrid> grids;
    grids.reserve(static_cast<size_t>(sched.levels));
    for (int l = 0; l < sched.levels; ++l) {
        const int res = std::max(1, sched.resolution >> (sched.levels - 1 - l));
        const double scale = sched.excision_scale0 * std::pow(0.5, l);
        grids.emplace_back(domain, res, scale);
    }
    return grids;
}

RefinementResult refine_and_extrapolate(const std::function<double(const Vec&)>& g,
                                        const Domain& domain, const GridSchedule& sched) {
    if (sched.levels < 3) throw std::invalid_argument("refine_and_extrapolate: need >= 3 levels");
    RefinementResult out;
    for (const auto& grid : make_level_grids(domain, sched)) {
        out.values.push_back(grid.integrate_value(g));
        out.resolutions.push_back(grid.resolution());
        out.excision_scales.push_back(grid.excision_scale());
    }
    if (auto s = diff_log2_slope(out.values)) {
        out.slope = *s;
    } else {
        out.converged = true;
    }
    return out;
}

}  // namespace natform
