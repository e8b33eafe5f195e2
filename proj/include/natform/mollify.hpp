#pragma once

#include <vector>

#include "natform/maps.hpp"
#include "natform/numerics.hpp"
#include "natform/quadrature.hpp"

namespace natform {

/// Componentwise convolution f * rho_eps with the standard bump mollifier,
/// evaluated by a fixed 16-points-per-axis midpoint rule over the kernel
/// ball. Discrete weights are renormalized so that unit mass and the affine
/// first-moment identity hold exactly; the Jacobian is the convolution with
/// grad rho_eps, so the base map's derivatives are never sampled.
/// Evaluation is restricted to the domain shrunk by eps and throws outside.
MapModel mollify(const MapModel& f, double eps, const Domain& box);

/// Default schedule eps0 * 2^-l with eps0 = 0.1 * diameter.
std::vector<double> default_eps_schedule(const Domain& box, int levels = 4);

/// Equi-integrability evidence: per-eps integrals of |Lambda^k f_eps| and the
/// running nodewise sup-envelope integrals. A bounded envelope supports
/// k-stability; blow-up is evidence against.
struct StabilityReport {
    int k = 1;
    std::vector<double> eps_schedule;
    std::vector<double> per_eps;    // integral of |Lambda^k f_eps| per eps
    std::vector<double> envelope;   // integral of the running sup over the schedule
    Growth envelope_growth = Growth::finite;
    bool bounded() const { return envelope_growth == Growth::finite; }
};

/// `grid` lives on the shrunken box U_{eps_max}; `base_box` is the original
/// domain the mollifier kernels may reach into.
StabilityReport stability_diagnostic(const MapModel& f, int k, const std::vector<double>& eps_schedule,
                                     const QuadratureGrid& grid, const Domain& base_box);

/// Joint degree-k / degree-(k+1) diagnostic. For k = n it defers to the
/// degree-k case; a degree above min(m,n) has no minors and is trivially
/// bounded.
struct KDaggerReport {
    StabilityReport deg_k;
    StabilityReport deg_k1;
    bool k_dagger_evidence = false;
};

KDaggerReport kdagger_diagnostic(const MapModel& f, int k, const std::vector<double>& eps_schedule,
                                 const QuadratureGrid& grid, const Domain& base_box);

}  // namespace natform
