#include "natform/maps.hpp"

#include <cmath>
#include <stdexcept>

namespace natform {

Matrix Matrix::identity(int n) {
    Matrix I(n, n);
    for (int i = 0; i < n; ++i) I(i, i) = 1.0;
    return I;
}

Matrix Matrix::operator*(const Matrix& o) const {
    if (cols_ != o.rows_) throw std::invalid_argument("Matrix::*: shape mismatch");
    Matrix out(rows_, o.cols_);
    for (int i = 0; i < rows_; ++i)
        for (int k = 0; k < cols_; ++k) {
            const double a = (*this)(i, k);
            if (a == 0.0) continue;
            for (int j = 0; j < o.cols_; ++j) out(i, j) += a * o(k, j);
        }
    return out;
}

Matrix& Matrix::operator+=(const Matrix& o) {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("Matrix::+=: shape mismatch");
    for (size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
    return *this;
}

Matrix& Matrix::operator-=(const Matrix& o) {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("Matrix::-=: shape mismatch");
    for (size_t i = 0; i < a_.size(); ++i) a_[i] -= o.a_[i];
    return *this;
}

Matrix& Matrix::operator*=(double s) {
    for (double& x : a_) x *= s;
    return *this;
}

double Matrix::max_abs() const {
    double mx = 0.0;
    for (double x : a_) mx = std::max(mx, std::abs(x));
    return mx;
}

namespace {

double lu_det(std::vector<double>& a, int k) {
    // In-place LU with partial pivoting on a k x k row-major buffer.
    double det = 1.0;
    for (int col = 0; col < k; ++col) {
        int piv = col;
        double best = std::abs(a[static_cast<size_t>(col * k + col)]);
        for (int r = col + 1; r < k; ++r) {
            const double v = std::abs(a[static_cast<size_t>(r * k + col)]);
            if (v > best) {
                best = v;
                piv = r;
            }
        }
        if (best == 0.0) return 0.0;
        if (piv != col) {
            for (int j = 0; j < k; ++j)
                std::swap(a[static_cast<size_t>(col * k + j)], a[static_cast<size_t>(piv * k + j)]);
            det = -det;
        }
        const double d = a[static_cast<size_t>(col * k + col)];
        det *= d;
        for (int r = col + 1; r < k; ++r) {
            const double factor = a[static_cast<size_t>(r * k + col)] / d;
            if (factor == 0.0) continue;
            for (int j = col + 1; j < k; ++j)
                a[static_cast<size_t>(r * k + j)] -= factor * a[static_cast<size_t>(col * k + j)];
        }
    }
    return det;
}

}  // namespace

double submatrix_det(const Matrix& jac, const std::vector<int>& rows, const std::vector<int>& cols) {
    const int k = static_cast<int>(rows.size());
    if (k != static_cast<int>(cols.size())) throw std::invalid_argument("submatrix_det: non-square");
    auto e = [&](int i, int j) { return jac(rows[static_cast<size_t>(i)], cols[static_cast<size_t>(j)]); };
    switch (k) {
        case 0:
            return 1.0;
        case 1:
            return e(0, 0);
        case 2:
            return e(0, 0) * e(1, 1) - e(0, 1) * e(1, 0);
        case 3:
            return e(0, 0) * (e(1, 1) * e(2, 2) - e(1, 2) * e(2, 1)) -
                   e(0, 1) * (e(1, 0) * e(2, 2) - e(1, 2) * e(2, 0)) +
                   e(0, 2) * (e(1, 0) * e(2, 1) - e(1, 1) * e(2, 0));
        default: {
            std::vector<double> buf(static_cast<size_t>(k * k));
            for (int i = 0; i < k; ++i)
                for (int j = 0; j < k; ++j) buf[static_cast<size_t>(i * k + j)] = e(i, j);
            return lu_det(buf, k);
        }
    }
}

Matrix jacobian(const MapModel& f, const Vec& x) {
    if (f.jac) return f.jac(x);
    const double h = f.fd_step;
    Matrix J(f.target_dim, f.source_dim);
    for (int j = 0; j < f.source_dim; ++j) {
        Vec xp = x, xm = x;
        xp[j] += h;
        xm[j] -= h;
        const Vec fp = f.eval(xp), fm = f.eval(xm);
        for (int i = 0; i < f.target_dim; ++i) J(i, j) = (fp[i] - fm[i]) / (2.0 * h);
    }
    return J;
}

Matrix compound_matrix(const Matrix& jac, int k) {
    const int n = jac.rows(), m = jac.cols();
    if (k < 1 || k > std::min(m, n)) throw std::invalid_argument("compound_matrix: k out of range");
    if (k == 1) return jac;
    const std::int64_t R = binomial(n, k), C = binomial(m, k);
    Matrix out(static_cast<int>(R), static_cast<int>(C));
    for (std::int64_t r = 0; r < R; ++r) {
        const MultiIndex I = MultiIndex::unrank(r, n, k);
        for (std::int64_t c = 0; c < C; ++c) {
            const MultiIndex J = MultiIndex::unrank(c, m, k);
            out(static_cast<int>(r), static_cast<int>(c)) =
                submatrix_det(jac, I.entries(), J.entries());
        }
    }
    return out;
}

Matrix minor_matrix(const MapModel& f, const Vec& x, int k) {
    if (k < 1 || k > std::min(f.source_dim, f.target_dim))
        throw std::invalid_argument("minor_matrix: k out of range");
    return compound_matrix(jacobian(f, x), k);
}

double lambda_norm(const MapModel& f, const Vec& x, int k) {
    return minor_matrix(f, x, k).max_abs();
}

MembershipReport membership_report(const MapModel& f, int k, double exponent, const Domain& domain,
                                   const GridSchedule& sched) {
    if (!(exponent >= 1.0)) throw std::invalid_argument("membership_report: exponent must be >= 1");
    MembershipReport rep;
    rep.k = k;
    rep.exponent = exponent;
    for (const auto& grid : make_level_grids(domain, sched)) {
        rep.per_level.push_back(grid.integrate_value(
            [&](const Vec& x) { return std::pow(lambda_norm(f, x, k), exponent); }));
    }
    rep.estimate = rep.per_level.back();
    rep.classification = classify_growth(rep.per_level);
    return rep;
}

MembershipReport sobolev_report(const MapModel& f, double p, const Domain& domain,
                                const GridSchedule& sched) {
    return membership_report(f, 1, p, domain, sched);
}

MapModel linear_map(const Matrix& A) {
    MapModel f;
    f.source_dim = A.cols();
    f.target_dim = A.rows();
    f.eval = [A](const Vec& x) {
        Vec y(A.rows());
        for (int i = 0; i < A.rows(); ++i) {
            double s = 0.0;
            for (int j = 0; j < A.cols(); ++j) s += A(i, j) * x[j];
            y[i] = s;
        }
        return y;
    };
    f.jac = [A](const Vec&) { return A; };
    f.family = "linear";
    return f;
}

MapModel polynomial_map(std::vector<Poly> components, int source_dim) {
    const int n = static_cast<int>(components.size());
    for (const auto& p : components)
        if (p.nvars() != source_dim)
            throw std::invalid_argument("polynomial_map: component variable count mismatch");
    std::vector<std::vector<Poly>> derivs(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < source_dim; ++j)
            derivs[static_cast<size_t>(i)].push_back(components[static_cast<size_t>(i)].derivative(j));
    MapModel f;
    f.source_dim = source_dim;
    f.target_dim = n;
    f.eval = [components, n](const Vec& x) {
        Vec y(n);
        for (int i = 0; i < n; ++i) y[i] = components[static_cast<size_t>(i)].eval(x);
        return y;
    };
    f.jac = [derivs, n, source_dim](const Vec& x) {
        Matrix J(n, source_dim);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < source_dim; ++j)
                J(i, j) = derivs[static_cast<size_t>(i)][static_cast<size_t>(j)].eval(x);
        return J;
    };
    f.family = "polynomial";
    return f;
}

MapModel radial_power_map(double s, int dim) {
    MapModel f;
    f.source_dim = dim;
    f.target_dim = dim;
    f.eval = [s, dim](const Vec& x) {
        const double r = x.norm();
        if (r == 0.0) return Vec(dim);  // a.e. value; the origin is declared singular for s < 1
        const double scale = std::pow(r, s - 1.0);
        Vec y = x;
        y *= scale;
        return y;
    };
    f.jac = [s, dim](const Vec& x) {
        const double r = x.norm();
        if (r == 0.0) {
            if (s > 1.0) return Matrix(dim, dim);  // Df -> 0 continuously
            if (s == 1.0) return Matrix::identity(dim);
            throw std::domain_error("radial_power_map: Jacobian at the singular point");
        }
        // Df = r^(s-1) (I + (s-1) xhat xhat^T)
        const double scale = std::pow(r, s - 1.0);
        Matrix J(dim, dim);
        for (int i = 0; i < dim; ++i) {
            for (int j = 0; j < dim; ++j)
                J(i, j) = scale * (s - 1.0) * (x[i] / r) * (x[j] / r);
            J(i, i) += scale;
        }
        return J;
    };
    if (s < 1.0) f.singular_points.push_back(Vec(dim));
    f.family = "radial_power";
    return f;
}

MapModel winding_map() {
    MapModel f = radial_power_map(0.0, 2);
    f.family = "winding";
    return f;
}

MapModel constant_map(int source_dim, const Vec& value) {
    MapModel f;
    f.source_dim = source_dim;
    f.target_dim = value.dim();
    f.eval = [value](const Vec&) { return value; };
    f.jac = [value, source_dim](const Vec&) { return Matrix(value.dim(), source_dim); };
    f.family = "constant";
    return f;
}

MapModel compose(const MapModel& g, const MapModel& f) {
    if (g.source_dim != f.target_dim) throw std::invalid_argument("compose: dimension mismatch");
    MapModel h;
    h.source_dim = f.source_dim;
    h.target_dim = g.target_dim;
    h.eval = [ge = g.eval, fe = f.eval](const Vec& x) { return ge(fe(x)); };
    if (g.jac && f.jac) {
        h.jac = [gj = g.jac, fj = f.jac, fe = f.eval](const Vec& x) { return gj(fe(x)) * fj(x); };
    }
    h.singular_points = f.singular_points;
    h.family = "composition";
    h.fd_step = f.fd_step;
    return h;
}

}  // namespace natform
