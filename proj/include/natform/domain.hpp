#pragma once

#include <vector>

#include "natform/vec.hpp"

namespace natform {

/// A point removed from a box domain together with the base excision radius
/// around it. Quadrature levels shrink the effective radius geometrically.
struct Excision {
    Vec point;
    double radius = 0.0;
};

/// Axis-aligned box in R^m with a finite list of excluded singular points.
class Domain {
public:
    Domain(Vec lower, Vec upper, std::vector<Excision> excluded = {});

    int dim() const { return lower_.dim(); }
    const Vec& lower() const { return lower_; }
    const Vec& upper() const { return upper_; }
    const std::vector<Excision>& excluded() const { return excluded_; }

    double diameter() const;
    double volume() const;
    Vec center() const;

    bool contains(const Vec& x) const;
    /// true if x is strictly inside the box.
    bool interior_contains(const Vec& x) const;
    /// Distance from x to the box boundary (positive inside).
    double boundary_distance(const Vec& x) const;

    /// The box shrunk by `margin` on every side, excisions kept.
    Domain shrunk(double margin) const;
    Domain with_excisions(std::vector<Excision> excluded) const;

private:
    Vec lower_, upper_;
    std::vector<Excision> excluded_;
};

}  // namespace natform
