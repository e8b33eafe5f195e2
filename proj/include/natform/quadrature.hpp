#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "natform/domain.hpp"

namespace natform {

/// Coupled refinement schedule: level l in [0, levels) runs at per-axis
/// resolution `resolution >> (levels-1-l)` with excision radii scaled by
/// 2^-l. Shrinking the excision alongside the resolution doubling is what
/// makes distributional mass show up as a non-decaying residual.
struct GridSchedule {
    int resolution = 64;  // finest level, per axis
    int levels = 3;
    double excision_scale0 = 1.0;  // multiplier on Domain excision radii at level 0
};

/// Tensor midpoint grid over a box with excision balls removed. Nodes never
/// touch the boundary or the excluded points. Node enumeration order is
/// row-major and fixed, so reductions are reproducible.
class QuadratureGrid {
public:
    QuadratureGrid(Domain domain, int resolution_per_axis, double excision_scale = 1.0);

    const Domain& domain() const { return domain_; }
    int resolution() const { return res_; }
    double excision_scale() const { return excision_scale_; }
    /// Effective excision radius of the first excluded point (0 if none).
    double excision_radius() const;

    std::size_t node_count() const { return kept_.size(); }
    Vec node(std::size_t i) const;
    double cell_volume() const { return cell_volume_; }
    /// Sum of all weights: box volume minus the volume of dropped cells.
    double total_weight() const { return cell_volume_ * static_cast<double>(kept_.size()); }

    /// Midpoint-rule integral of g, fixed pairwise-summation order.
    /// Throws std::domain_error naming the node if g is non-finite there.
    double integrate_value(const std::function<double(const Vec&)>& g) const;

    /// max over nodes of g (used by L-infinity norms).
    double node_max(const std::function<double(const Vec&)>& g) const;

private:
    Domain domain_;
    int res_;
    double excision_scale_;
    double cell_volume_;
    std::vector<double> step_;
    std::vector<std::uint64_t> kept_;  // row-major indices of nodes outside excisions
};

struct IntegralResult {
    double value = 0.0;
    double error_estimate = 0.0;  // |value(res) - value(res/2)|
};

/// Integrates g at the grid's resolution and at half resolution; the
/// difference is the quadrature error estimate.
IntegralResult integrate(const std::function<double(const Vec&)>& g, const QuadratureGrid& grid);

struct RefinementResult {
    std::vector<double> values;   // one per level, coarse to fine
    std::vector<int> resolutions;
    std::vector<double> excision_scales;
    double slope = 0.0;   // LS slope of log2|v_l - v_{l+1}| per level
    bool converged = false;  // successive values identical; slope undefined
};

/// Runs g through the schedule's level grids and fits the convergence order.
RefinementResult refine_and_extrapolate(const std::function<double(const Vec&)>& g,
                                        const Domain& domain, const GridSchedule& sched);

/// Grids for every level of the schedule, coarse to fine.
std::vector<QuadratureGrid> make_level_grids(const Domain& domain, const GridSchedule& sched);

}  // namespace natform
