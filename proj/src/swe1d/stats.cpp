#include "swe1d/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace swe {

double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI); }

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

std::vector<double> default_density_grid() {
    std::vector<double> grid(1201);
    for (int i = 0; i < 1201; ++i) grid[i] = -6.0 + 0.01 * i;
    return grid;
}

namespace {
double quantile_sorted(const std::vector<double>& s, double q) {
    // type-7 linear interpolation
    const double pos = q * (static_cast<double>(s.size()) - 1.0);
    const std::size_t lo = static_cast<std::size_t>(pos);
    if (lo + 1 >= s.size()) return s.back();
    const double frac = pos - static_cast<double>(lo);
    return s[lo] * (1.0 - frac) + s[lo + 1] * frac;
}
}  // namespace

DensityReport kde(std::span<const double> samples, std::span<const double> grid,
                  BandwidthRule rule) {
    const std::size_t n = samples.size();
    if (n < 100) throw std::invalid_argument("kde: need >= 100 samples");
    for (double x : samples)
        if (!std::isfinite(x)) throw std::invalid_argument("kde: non-finite sample");

    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());

    double h = rule.h;
    if (rule.kind == BandwidthRule::Kind::Silverman) {
        double s1 = 0.0, s2 = 0.0;
        for (double x : sorted) {
            s1 += x;
            s2 += x * x;
        }
        const double nn = static_cast<double>(n);
        const double sd = std::sqrt(std::max(0.0, (s2 - s1 * s1 / nn) / (nn - 1.0)));
        const double iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
        const double spread = std::min(sd, iqr / 1.34);
        if (!(spread > 0.0)) throw std::invalid_argument("kde: zero-variance sample");
        h = 0.9 * spread * std::pow(nn, -0.2);
    }
    if (!(h > 0.0)) throw std::invalid_argument("kde: bandwidth must be positive");

    DensityReport rep;
    rep.grid.assign(grid.begin(), grid.end());
    rep.density.resize(grid.size());
    rep.bandwidth = h;
    rep.n = n;

    // kernel support truncated at 8.5 h (relative error < 1e-15)
    const double cut = 8.5 * h;
    const double norm = 1.0 / (static_cast<double>(n) * h * std::sqrt(2.0 * M_PI));
#pragma omp parallel for schedule(static)
    for (long gi = 0; gi < static_cast<long>(grid.size()); ++gi) {
        const double z = grid[gi];
        const auto lo = std::lower_bound(sorted.begin(), sorted.end(), z - cut);
        const auto hi = std::upper_bound(sorted.begin(), sorted.end(), z + cut);
        double acc = 0.0;
        for (auto it = lo; it != hi; ++it) {
            const double d = (z - *it) / h;
            acc += std::exp(-0.5 * d * d);
        }
        rep.density[gi] = acc * norm;
    }
    return rep;
}

void distances(DensityReport& report, std::span<const double> samples) {
    double sup = 0.0, l1 = 0.0;
    for (std::size_t i = 0; i < report.grid.size(); ++i) {
        const double diff = std::abs(report.density[i] - normal_pdf(report.grid[i]));
        sup = std::max(sup, diff);
        if (i + 1 < report.grid.size()) {
            const double diff_next =
                std::abs(report.density[i + 1] - normal_pdf(report.grid[i + 1]));
            l1 += 0.5 * (diff + diff_next) * (report.grid[i + 1] - report.grid[i]);
        }
    }
    report.sup_distance = sup;
    report.tv_estimate = 0.5 * l1;

    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    const double nn = static_cast<double>(sorted.size());
    double ks = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double F = normal_cdf(sorted[i]);
        ks = std::max(ks, std::abs(static_cast<double>(i + 1) / nn - F));
        ks = std::max(ks, std::abs(F - static_cast<double>(i) / nn));
    }
    report.kolmogorov = ks;
}

RateFit rate_fit(std::span<const std::pair<double, double>> ladder) {
    if (ladder.size() < 3) throw std::invalid_argument("rate_fit: need >= 3 ladder points");
    RateFit fit;
    for (const auto& [R, d] : ladder) {
        if (!(d > 0.0)) throw std::invalid_argument("rate_fit: distances must be positive");
        if (!(R > 0.0)) throw std::invalid_argument("rate_fit: R must be positive");
        fit.points.emplace_back(std::log(R), std::log(d));
    }
    const double n = static_cast<double>(fit.points.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (const auto& [x, y] : fit.points) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double det = n * sxx - sx * sx;
    fit.slope = (n * sxy - sx * sy) / det;
    fit.intercept = (sy - fit.slope * sx) / n;
    double rss = 0.0;
    for (const auto& [x, y] : fit.points) {
        const double r = y - (fit.intercept + fit.slope * x);
        rss += r * r;
    }
    if (fit.points.size() > 2) {
        const double s2 = rss / (n - 2.0);
        fit.slope_stderr = std::sqrt(s2 * n / det);
    }
    return fit;
}

}  // namespace swe
