#pragma once

#include <optional>
#include <vector>

namespace natform {

/// Least-squares slope of log2|v_l| against level l. nullopt when any value
/// is zero or fewer than two samples remain, i.e. the sequence has converged
/// below representable decay.
std::optional<double> log2_slope(const std::vector<double>& values);

/// Least-squares slope of log2|v_l - v_{l+1}| against l (quadrature
/// convergence order per resolution doubling). nullopt when successive values
/// coincide.
std::optional<double> diff_log2_slope(const std::vector<double>& values);

/// Monotone-growth classification shared by every "does this integral blow
/// up" diagnostic. A sequence of refinements (excision radius halved each
/// step) is `divergent` when every step grows the value by more than
/// growth_frac AND the increments do not decay (ratio >= increment_floor);
/// anything else is `finite`. Values near zero are finite. Non-finite values
/// are divergent. With the defaults, a log-divergent integral (constant
/// increments) classifies as divergent and a convergent tail with
/// geometrically shrinking increments classifies as finite.
enum class Growth { finite, divergent };

Growth classify_growth(const std::vector<double>& values, double growth_frac = 0.05,
                       double increment_floor = 0.9);

}  // namespace natform
