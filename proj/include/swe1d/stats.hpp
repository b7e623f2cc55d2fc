#pragma once

#include <span>
#include <utility>
#include <vector>

namespace swe {

double normal_pdf(double z);
double normal_cdf(double z);

struct BandwidthRule {
    enum class Kind { Silverman, Fixed };
    Kind kind = Kind::Silverman;
    double h = 0.0;

    static BandwidthRule silverman() { return {Kind::Silverman, 0.0}; }
    static BandwidthRule fixed(double h) { return {Kind::Fixed, h}; }
};

/// Gaussian-kernel density estimate on a grid plus distances to N(0,1).
struct DensityReport {
    std::vector<double> grid;
    std::vector<double> density;
    double bandwidth = 0.0;
    std::size_t n = 0;
    double sup_distance = 0.0;  // sup_z |fhat(z) - phi(z)| over the grid
    double kolmogorov = 0.0;    // sup |F_n - Phi| from the empirical CDF (KDE-free)
    double tv_estimate = 0.0;   // 0.5 * Int |fhat - phi|
};

/// Evaluation grid [-6, 6] with step 0.01 (1201 points).
std::vector<double> default_density_grid();

/// KDE with Silverman or fixed bandwidth; requires n >= 100 finite samples
/// and positive spread. Distances are left at 0 (see distances()).
DensityReport kde(std::span<const double> samples, std::span<const double> grid,
                  BandwidthRule rule);

/// Fills sup/Kolmogorov/TV distances of the report against N(0,1).
void distances(DensityReport& report, std::span<const double> samples);

struct RateFit {
    std::vector<std::pair<double, double>> points;  // (log R, log distance)
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
};

/// OLS fit of log(distance) on log(R); needs >= 3 positive-distance points.
RateFit rate_fit(std::span<const std::pair<double, double>> ladder);

}  // namespace swe
