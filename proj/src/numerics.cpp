#include "natform/numerics.hpp"

#include <cmath>

namespace natform {

namespace {

std::optional<double> ls_slope(const std::vector<double>& ys) {
    const size_t n = ys.size();
    if (n < 2) return std::nullopt;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < n; ++i) {
        const double x = static_cast<double>(i);
        sx += x;
        sy += ys[i];
        sxx += x * x;
        sxy += x * ys[i];
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) return std::nullopt;
    return (n * sxy - sx * sy) / denom;
}

}  // namespace

std::optional<double> log2_slope(const std::vector<double>& values) {
    std::vector<double> ys;
    ys.reserve(values.size());
    for (double v : values) {
        const double a = std::abs(v);
        if (a == 0.0 || !std::isfinite(a)) return std::nullopt;
        ys.push_back(std::log2(a));
    }
    return ls_slope(ys);
}

std::optional<double> diff_log2_slope(const std::vector<double>& values) {
    std::vector<double> diffs;
    for (size_t i = 0; i + 1 < values.size(); ++i) {
        const double d = std::abs(values[i] - values[i + 1]);
        if (d == 0.0 || !std::isfinite(d)) return std::nullopt;
        diffs.push_back(d);
    }
    return log2_slope(diffs);
}

Growth classify_growth(const std::vector<double>& values, double growth_frac,
                       double increment_floor) {
    for (double v : values)
        if (!std::isfinite(v)) return Growth::divergent;
    if (values.size() < 3) return Growth::finite;
    const size_t L = values.size();
    double scale = 0.0;
    for (double v : values) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) return Growth::finite;
    for (size_t i = 0; i + 1 < L; ++i) {
        if (!(values[i + 1] > values[i] * (1.0 + growth_frac))) return Growth::finite;
    }
    for (size_t i = 0; i + 2 < L; ++i) {
        const double d0 = values[i + 1] - values[i];
        const double d1 = values[i + 2] - values[i + 1];
        if (!(d1 >= increment_floor * d0)) return Growth::finite;
    }
    return Growth::divergent;
}

}  // namespace natform
