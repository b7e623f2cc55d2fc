#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace swe {

/// Thrown when an adaptive rule exhausts its interval budget before
/// reaching the requested tolerance.
struct QuadratureFailure : std::runtime_error {
    explicit QuadratureFailure(const std::string& what) : std::runtime_error(what) {}
};

struct GaussLegendreRule {
    std::vector<double> nodes;    // on (-1, 1)
    std::vector<double> weights;  // sum to 2
};

/// Nodes/weights of the n-point Gauss–Legendre rule (cached, thread-safe).
const GaussLegendreRule& gauss_legendre_rule(int n);

/// Fixed-order Gauss–Legendre integral of f over [a, b].
double gauss_legendre(const std::function<double(double)>& f, double a, double b, int n);

struct AdaptiveOptions {
    double rel_tol = 1e-10;
    double abs_tol = 0.0;        // absolute floor; 0 means relative-only
    int max_intervals = 200000;
};

/// Globally adaptive Gauss–Kronrod 15 integration of f over [a, b].
/// `splits` lists interior points where the integrand has kinks or
/// integrable singularities in a derivative; subdivision starts there.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          const AdaptiveOptions& opts = {},
                          std::span<const double> splits = {});

/// ∫_0^h f(w)·w^{-beta} dw with f bounded near 0 and beta in (0,1).
/// The substitution w = v^{1/(1-beta)} absorbs the endpoint singularity exactly.
double integrate_power_left(const std::function<double(double)>& f, double h, double beta,
                            const AdaptiveOptions& opts = {});

}  // namespace swe
