#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "swe1d/diffusion.hpp"
#include "swe1d/solver.hpp"

namespace swe {

struct AverageSample {
    double R;
    double t;
    double raw;         // Int_{-R}^{R} (u(t,x) - 1) dx
    double normalized;  // raw / sqrt(sigma2)
    std::uint64_t replicate_id;
};

struct VarianceEstimate {
    enum class Method { Mc, Quadrature };
    double sigma2 = 0.0;
    Method method = Method::Mc;
    double stderr_ = 0.0;  // jackknife for Mc, 0 for quadrature
    double R = 0.0;
    double t = 0.0;
    double beta = 0.0;
};

/// Trapezoid average of (u(t_final, x) - 1) over [-R, R].
double spatial_average(const GridSolution& sol, double R);

/// Sample variance of raw averages with jackknife standard error.
VarianceEstimate estimate_sigma2_mc(std::span<const double> raw, double R, double t, double beta);

/// sigma^2_{R,t} for sigma == const k, by deterministic kernel quadrature.
VarianceEstimate estimate_sigma2_quadrature(double k, double R, double t,
                                            const RieszExponent& beta);

struct EtaCurve {
    std::vector<double> s;
    std::vector<double> eta;
    std::vector<double> stderr_;
};

/// eta(s) = E sigma(u(s, x)), pooled over replicates and over the cells with
/// |x| <= pool_halfwidth (stationarity pooling).
EtaCurve estimate_eta(std::span<const GridSolution> replicates, const Diffusion& diffusion,
                      std::span<const long> s_indices, double pool_halfwidth);

std::vector<AverageSample> normalize(std::span<const double> raw, const VarianceEstimate& variance,
                                     double R, double t);

}  // namespace swe
