#include "coda/simplex.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "coda/errors.hpp"

namespace coda {

Composition::Composition(std::vector<double> parts) : parts_(std::move(parts)) {
    if (parts_.size() < 2)
        throw DimensionTooSmall("a composition needs at least 2 parts, got " +
                                std::to_string(parts_.size()));
    double sum = 0.0;
    for (double p : parts_) {
        if (!(p > 0.0) || !std::isfinite(p))
            throw NonPositiveEntry("composition parts must be strictly positive and finite");
        sum += p;
    }
    for (double& p : parts_) {
        p /= sum;
        if (p < kMinPart)
            throw NonPositiveEntry("composition part underflows after closure");
    }
}

IlrVector::IlrVector(std::vector<double> coords) : coords_(std::move(coords)) {
    for (double c : coords_)
        if (!std::isfinite(c))
            throw NonPositiveEntry("ilr coordinates must be finite");
}

Composition closure(const std::vector<double>& w) { return Composition(w); }

Composition perturb(const Composition& x, const Composition& y) {
    if (x.dimension() != y.dimension())
        throw DimensionMismatch("perturbation requires equal dimensions");
    std::vector<double> prod(x.dimension());
    for (std::size_t i = 0; i < prod.size(); ++i) prod[i] = x[i] * y[i];
    return Composition(std::move(prod));
}

Composition power(double alpha, const Composition& x) {
    std::vector<double> pw(x.dimension());
    for (std::size_t i = 0; i < pw.size(); ++i) pw[i] = std::pow(x[i], alpha);
    return Composition(std::move(pw));
}

double aitchison_inner(const Composition& x, const Composition& y) {
    if (x.dimension() != y.dimension())
        throw DimensionMismatch("inner product requires equal dimensions");
    const std::size_t d = x.dimension();
    double s = 0.0;
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
            s += std::log(x[i] / x[j]) * std::log(y[i] / y[j]);
    return s / (2.0 * static_cast<double>(d));
}

std::vector<double> clr(const Composition& x) {
    const std::size_t d = x.dimension();
    double log_gm = 0.0;
    for (std::size_t i = 0; i < d; ++i) log_gm += std::log(x[i]);
    log_gm /= static_cast<double>(d);
    std::vector<double> out(d);
    for (std::size_t i = 0; i < d; ++i) out[i] = std::log(x[i]) - log_gm;
    return out;
}

namespace detail {

std::vector<double> pivot_coords(std::span<const double> parts) {
    const std::size_t d = parts.size();
    // Suffix sums of log-parts give the trailing geometric means in one pass.
    std::vector<double> logs(d);
    for (std::size_t i = 0; i < d; ++i) logs[i] = std::log(parts[i]);
    std::vector<double> suffix(d + 1, 0.0);
    for (std::size_t i = d; i-- > 0;) suffix[i] = suffix[i + 1] + logs[i];
    std::vector<double> out(d - 1);
    for (std::size_t i = 0; i < d - 1; ++i) {
        const double tail = static_cast<double>(d - 1 - i);  // parts after i
        const double mean_tail = suffix[i + 1] / tail;
        out[i] = std::sqrt(tail / (tail + 1.0)) * (logs[i] - mean_tail);
    }
    return out;
}

std::vector<double> pivot_inverse(std::span<const double> coords) {
    const std::size_t d = coords.size() + 1;
    // Backbone of the inverse map: component j accumulates the negative
    // pivot contributions of all earlier coordinates.
    std::vector<double> backbone(d, 0.0);
    double acc = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
        const double remaining = static_cast<double>(d - j);
        backbone[j] = acc;
        if (j < d - 1) {
            backbone[j] += coords[j] * std::sqrt((remaining - 1.0) / remaining);
            acc -= coords[j] / std::sqrt(remaining * (remaining - 1.0));
        }
    }
    // Shift by the max before exponentiating; closure removes the shift.
    double mx = backbone[0];
    for (double b : backbone) mx = std::max(mx, b);
    std::vector<double> expd(d);
    double sum = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
        expd[j] = std::exp(backbone[j] - mx);
        sum += expd[j];
    }
    for (double& e : expd) e /= sum;
    return expd;
}

}  // namespace detail

IlrVector ilr(const Composition& x) {
    return IlrVector(detail::pivot_coords(x.parts()));
}

Composition ilr_inv(const IlrVector& v) {
    return Composition(detail::pivot_inverse(v.coords()));
}

ContrastMatrix contrast_matrix(std::size_t d) {
    if (d < 2)
        throw DimensionTooSmall("contrast matrix needs dimension >= 2");
    Matrix v(d, d - 1);
    for (std::size_t j = 0; j < d - 1; ++j) {
        const double tail = static_cast<double>(d - 1 - j);  // D-j in 1-based terms
        const double norm = std::sqrt((tail + 1.0) * tail);
        v(j, j) = tail / norm;
        for (std::size_t i = j + 1; i < d; ++i) v(i, j) = -1.0 / norm;
    }
    return ContrastMatrix{std::move(v)};
}

}  // namespace coda
