#pragma once

#include <span>
#include <vector>

#include "coda/matrix.hpp"

namespace coda {

// A D-part composition: strictly positive parts summing to 1. Construction
// applies the closure (normalization to unit sum) exactly once.
class Composition {
public:
    // Parts smaller than this (after closure) are rejected to keep every
    // logratio finite in double precision.
    static constexpr double kMinPart = 1e-300;

    explicit Composition(std::vector<double> parts);

    std::size_t dimension() const noexcept { return parts_.size(); }
    const std::vector<double>& parts() const noexcept { return parts_; }
    double operator[](std::size_t i) const { return parts_[i]; }

private:
    std::vector<double> parts_;
};

// Coordinates of a composition with respect to the pivot logratio basis;
// dimension D-1, entries finite.
class IlrVector {
public:
    explicit IlrVector(std::vector<double> coords);

    std::size_t dimension() const noexcept { return coords_.size(); }
    const std::vector<double>& coords() const noexcept { return coords_; }
    double operator[](std::size_t i) const { return coords_[i]; }

private:
    std::vector<double> coords_;
};

// The D x (D-1) matrix linking clr and pivot coordinates:
// ilr(x) = V^T clr(x) and ilr^{-1}(t) = closure(exp(V t)).
// Satisfies V^T V = I_{D-1} and V V^T = I_D - (1/D) 1 1^T.
struct ContrastMatrix {
    Matrix entries;
};

Composition closure(const std::vector<double>& w);

// Component-wise product followed by closure; the simplex group operation.
Composition perturb(const Composition& x, const Composition& y);

// Component-wise power followed by closure; the simplex scalar action.
Composition power(double alpha, const Composition& x);

// (1/2D) sum_{ij} log(x_i/x_j) log(y_i/y_j); equals dot(clr(x), clr(y)).
double aitchison_inner(const Composition& x, const Composition& y);

// Centered logratio: log of parts over their geometric mean; sums to zero.
std::vector<double> clr(const Composition& x);

IlrVector ilr(const Composition& x);
Composition ilr_inv(const IlrVector& v);

ContrastMatrix contrast_matrix(std::size_t d);

namespace detail {
// Row-level pivot transforms used by the dataset pipeline; inputs are
// already-validated compositions / finite coordinate rows.
std::vector<double> pivot_coords(std::span<const double> parts);
std::vector<double> pivot_inverse(std::span<const double> coords);
}  // namespace detail

}  // namespace coda
