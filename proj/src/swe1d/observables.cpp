#include "swe1d/observables.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "swe1d/kernels.hpp"

namespace swe {

double spatial_average(const GridSolution& sol, double R) {
    return window_trapezoid(sol.row(sol.spec.nt), sol.spec, R);
}

VarianceEstimate estimate_sigma2_mc(std::span<const double> raw, double R, double t, double beta) {
    const std::size_t n = raw.size();
    if (n < 1000) throw std::invalid_argument("estimate_sigma2_mc: need >= 1000 samples");
    double s1 = 0.0, s2 = 0.0;
    for (double x : raw) {
        s1 += x;
        s2 += x * x;
    }
    const double nn = static_cast<double>(n);
    const double var = (s2 - s1 * s1 / nn) / (nn - 1.0);

    // jackknife over leave-one-out variances (closed form per deletion)
    double jsum = 0.0, jsq = 0.0;
    for (double x : raw) {
        const double m1 = s1 - x, m2 = s2 - x * x;
        const double v = (m2 - m1 * m1 / (nn - 1.0)) / (nn - 2.0);
        jsum += v;
        jsq += v * v;
    }
    const double jmean = jsum / nn;
    const double se = std::sqrt(std::max(0.0, (nn - 1.0) / nn * (jsq - nn * jmean * jmean)));

    VarianceEstimate est;
    est.sigma2 = var;
    est.method = VarianceEstimate::Method::Mc;
    est.stderr_ = se;
    est.R = R;
    est.t = t;
    est.beta = beta;
    return est;
}

VarianceEstimate estimate_sigma2_quadrature(double k, double R, double t,
                                            const RieszExponent& beta) {
    VarianceEstimate est;
    est.sigma2 = k * k * sigma2_quadrature(WindowFunction(R, t), beta);
    est.method = VarianceEstimate::Method::Quadrature;
    est.stderr_ = 0.0;
    est.R = R;
    est.t = t;
    est.beta = beta.beta;
    return est;
}

EtaCurve estimate_eta(std::span<const GridSolution> replicates, const Diffusion& diffusion,
                      std::span<const long> s_indices, double pool_halfwidth) {
    if (replicates.size() < 100) throw std::invalid_argument("estimate_eta: need >= 100 replicates");
    const NoiseSpec& spec = replicates.front().spec;
    const long jlo = static_cast<long>(std::llround((-pool_halfwidth - spec.origin) / spec.dx));
    const long jhi = static_cast<long>(std::llround((pool_halfwidth - spec.origin) / spec.dx));
    if (jlo < 0 || jhi >= spec.nx || jlo > jhi)
        throw std::invalid_argument("estimate_eta: pooling window exceeds domain");

    EtaCurve curve;
    for (long n : s_indices) {
        if (n < 0 || n > spec.nt) throw std::invalid_argument("estimate_eta: bad time index");
        // one pooled mean per replicate; replicates are i.i.d.
        double acc = 0.0, accsq = 0.0;
        for (const auto& sol : replicates) {
            double m = 0.0;
            for (long j = jlo; j <= jhi; ++j) m += diffusion.sigma(sol.at(n, j));
            m /= static_cast<double>(jhi - jlo + 1);
            acc += m;
            accsq += m * m;
        }
        const double nn = static_cast<double>(replicates.size());
        const double mean = acc / nn;
        const double var = (accsq - nn * mean * mean) / (nn - 1.0);
        curve.s.push_back(spec.t(n));
        curve.eta.push_back(mean);
        curve.stderr_.push_back(std::sqrt(std::max(0.0, var / nn)));
    }
    return curve;
}

std::vector<AverageSample> normalize(std::span<const double> raw, const VarianceEstimate& variance,
                                     double R, double t) {
    if (!(variance.sigma2 > 0.0)) throw std::invalid_argument("normalize: sigma2 must be positive");
    const double inv = 1.0 / std::sqrt(variance.sigma2);
    std::vector<AverageSample> out;
    out.reserve(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i)
        out.push_back({R, t, raw[i], raw[i] * inv, static_cast<std::uint64_t>(i)});
    return out;
}

}  // namespace swe
