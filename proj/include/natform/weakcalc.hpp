#pragma once

#include <string>
#include <vector>

#include "natform/forms.hpp"
#include "natform/maps.hpp"
#include "natform/pullback.hpp"

namespace natform {

enum class Verdict { holds, fails, inconclusive };

std::string to_string(Verdict v);

/// Residual of a weak identity across the refinement schedule. `holds`
/// requires the finest residual to sit inside the self-scaled tolerance with
/// a decaying level sequence; `fails` requires the residuals to stabilize at
/// a nonzero value across at least 3 levels. Everything else is
/// inconclusive.
struct ResidualReport {
    std::vector<double> per_level;
    std::vector<int> resolutions;
    std::vector<double> epsilons;  // effective excision radius per level (0 when none)
    double residual = 0.0;         // finest level
    double error_estimate = 0.0;   // |v_L - v_{L-1}|
    double slope = 0.0;            // LS slope of log2|v_l|; meaningless when converged
    bool converged = false;        // every level at or below the base tolerance
    double tol = 0.0;              // max(tol_base, 10 * error_estimate)
    Verdict verdict = Verdict::inconclusive;
};

/// Applies the verdict rules to a finished level sequence.
ResidualReport classify_residuals(std::vector<double> per_level, double tol_base);

/// <theta, omega> = integral of theta ^ omega; degrees must sum to the
/// ambient dimension.
double pairing(const FormField& theta, const FormField& omega, const QuadratureGrid& grid);

/// Test hook: flips the sign convention inside pairing so the selftest can
/// demonstrate that the antisymmetry property actually bites.
void debug_flip_pairing_sign(bool flipped);
bool pairing_sign_flipped();

/// Residual of the defining identity of the weak exterior derivative,
///   integral(theta ^ d phi) - (-1)^(k+1) integral(psi ^ phi),
/// across the schedule's levels.
ResidualReport weak_derivative_residual(const FormField& theta, const FormField& psi,
                                        const TestForm& phi, const Domain& domain,
                                        const GridSchedule& sched, double tol_base = 1e-6);

/// psi = 0 special case: is theta weakly closed against phi?
ResidualReport weak_closedness_residual(const FormField& theta, const TestForm& phi,
                                        const Domain& domain, const GridSchedule& sched,
                                        double tol_base = 1e-6);

/// The central functional: residual of d(f* alpha) = f*(d alpha) tested
/// weakly against phi,
///   integral(f*alpha ^ d phi) - (-1)^(k+1) integral(f*(d alpha) ^ phi).
ResidualReport naturality_residual(const MapModel& f, const FormField& alpha, const TestForm& phi,
                                   const Domain& domain, const GridSchedule& sched,
                                   double tol_base = 1e-6);

struct BatteryEntry {
    std::string id;  // "<site>.p<rank>"
    TestForm form;
};

/// Bumps at the domain center, at each excluded point and at one generic
/// off-center point (sites closer than 1e-12 are deduplicated, the singular
/// label wins), in every basis pattern of the requested degree.
std::vector<BatteryEntry> default_battery(const Domain& domain, int degree, double radius,
                                          double amplitude, const std::vector<Vec>& extra_sites = {});

struct BatteryResidual {
    std::string id;
    ResidualReport report;
};

/// naturality_residual against a whole battery, sharing the pullback
/// evaluations per node. Reports come back in battery order.
std::vector<BatteryResidual> naturality_battery(const MapModel& f, const FormField& alpha,
                                                const std::vector<BatteryEntry>& battery,
                                                const Domain& domain, const GridSchedule& sched,
                                                double tol_base = 1e-6);

/// Both sides of the product-decomposition proof route for alpha = a * gamma
/// (gamma closed): route_b pairs the weak derivative of (f*a)(f*gamma)
/// against (f*da) ^ (f*gamma); route_a is the direct naturality residual.
/// The two must agree to rounding (the gap is a Cauchy-Binet-level check).
struct DecomposedReport {
    ResidualReport route_b;
    ResidualReport route_a;
    double route_gap = 0.0;  // max over levels of |route_a - route_b|
};

DecomposedReport naturality_decomposed_residual(const MapModel& f, const FormField& a,
                                                const FormField& gamma, const TestForm& phi,
                                                const Domain& domain, const GridSchedule& sched,
                                                double tol_base = 1e-6);

/// Leibniz residual: weak_derivative_residual(h*beta, dh ^ beta + h*dbeta, phi).
ResidualReport leibniz_residual(const FormField& h, const FormField& beta, const TestForm& phi,
                                const Domain& domain, const GridSchedule& sched,
                                double tol_base = 1e-6);

/// Convergence table for lambda_{alpha,omega}(f_j) = integral(f_j* alpha ^ omega)
/// along a sequence of maps, plus W^{1,1} distance proxies to the limit map.
struct TauReport {
    struct Entry {
        std::size_t alpha_index = 0;
        std::size_t omega_index = 0;
        std::vector<double> lambda_seq;    // one per f_j
        double lambda_limit = 0.0;         // lambda(f)
        std::vector<double> deviations;    // |lambda(f_j) - lambda(f)|
    };
    std::vector<Entry> entries;
    std::vector<double> w11_distance;  // per f_j: integral(|f_j-f| + |Df_j-Df|)
};

TauReport tau_convergence_report(const std::vector<MapModel>& f_seq, const MapModel& f,
                                 const std::vector<FormField>& alphas,
                                 const std::vector<FormField>& omegas, const QuadratureGrid& grid);

}  // namespace natform
