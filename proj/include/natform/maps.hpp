#pragma once

#include <functional>
#include <string>
#include <vector>

#include "natform/domain.hpp"
#include "natform/exterior.hpp"
#include "natform/numerics.hpp"
#include "natform/poly.hpp"
#include "natform/quadrature.hpp"

namespace natform {

/// Small dense row-major matrix; everything here is desk scale.
class Matrix {
public:
    Matrix() = default;
    Matrix(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<size_t>(rows * cols), 0.0) {}

    static Matrix identity(int n);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    double& operator()(int i, int j) { return a_[static_cast<size_t>(i * cols_ + j)]; }
    double operator()(int i, int j) const { return a_[static_cast<size_t>(i * cols_ + j)]; }

    Matrix operator*(const Matrix& o) const;
    Matrix& operator+=(const Matrix& o);
    Matrix& operator-=(const Matrix& o);
    Matrix& operator*=(double s);

    double max_abs() const;

private:
    int rows_ = 0, cols_ = 0;
    std::vector<double> a_;
};

/// Determinant of the k x k submatrix of `jac` with the given rows/cols.
/// Cofactor expansion for k <= 3, LU with partial pivoting above.
double submatrix_det(const Matrix& jac, const std::vector<int>& rows, const std::vector<int>& cols);

/// A map U -> R^n with evaluator, Jacobian (analytic when a closed form
/// exists, finite differences otherwise) and declared singular points.
/// Immutable; all evaluations pure.
struct MapModel {
    int source_dim = 0;
    int target_dim = 0;
    std::function<Vec(const Vec&)> eval;
    std::function<Matrix(const Vec&)> jac;  // empty => finite differences
    std::vector<Vec> singular_points;
    std::string family;
    double fd_step = 1e-5;

    Vec operator()(const Vec& x) const { return eval(x); }
};

/// n x m Jacobian at x: analytic when the model provides one, else central
/// differences with the model's step.
Matrix jacobian(const MapModel& f, const Vec& x);

/// The k-th compound matrix Lambda^k Df(x): entry (I,J) is the k x k minor
/// with target rows I and source columns J, both multi-indices in
/// lexicographic order. Shape C(n,k) x C(m,k); k=1 is the Jacobian itself.
Matrix minor_matrix(const MapModel& f, const Vec& x, int k);
/// Same, from an explicit Jacobian matrix.
Matrix compound_matrix(const Matrix& jac, int k);

/// |Lambda^k f|(x): max absolute minor entry.
double lambda_norm(const MapModel& f, const Vec& x, int k);

struct MembershipReport {
    Growth classification = Growth::finite;
    double estimate = 0.0;          // finest-level integral of |Lambda^k f|^exponent
    std::vector<double> per_level;  // one integral per refinement level
    int k = 1;
    double exponent = 1.0;
};

/// Quadrature diagnostics for the integrability hypotheses: integral of
/// |Lambda^k Df|^exponent with the excision-refinement schedule and the
/// growth-rule classification. k=1 with exponent p is the W^{1,p} probe;
/// k with exponent q probes |Lambda^k f| in L^q. Divergence is a
/// classification, not an error.
MembershipReport membership_report(const MapModel& f, int k, double exponent, const Domain& domain,
                                   const GridSchedule& sched);

/// membership_report with k=1: the integral of |Df|^p.
MembershipReport sobolev_report(const MapModel& f, double p, const Domain& domain,
                                const GridSchedule& sched);

// Fixture families ------------------------------------------------------------

MapModel linear_map(const Matrix& A);
MapModel polynomial_map(std::vector<Poly> components, int source_dim);
/// f_s(x) = |x|^(s-1) x. s=1 is the identity, s=0 the winding map x/|x|;
/// the origin is declared singular for s < 1.
MapModel radial_power_map(double s, int dim);
/// x/|x| in the plane.
MapModel winding_map();
MapModel constant_map(int source_dim, const Vec& value);
/// g after f; analytic Jacobian via the chain rule when both factors have one.
MapModel compose(const MapModel& g, const MapModel& f);

}  // namespace natform
