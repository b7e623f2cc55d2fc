#include "swe1d/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace swe {

namespace {

// Antiderivative ladder of |a|^{-b}: psi1' = |a|^{-b}, psi2'' = |a|^{-b}, ...
double psi1(double a, double b) { return std::copysign(std::pow(std::abs(a), 1.0 - b), a) / (1.0 - b); }
double psi2(double a, double b) { return std::pow(std::abs(a), 2.0 - b) / ((1.0 - b) * (2.0 - b)); }
double psi4(double a, double b) {
    return std::pow(std::abs(a), 4.0 - b) / ((1.0 - b) * (2.0 - b) * (3.0 - b) * (4.0 - b));
}
double s3(double v, double b) { return std::copysign(std::pow(std::abs(v), 3.0 - b), v) / (3.0 - b); }

// Int_0^inf xi^{b-1} g(xi) dxi for nonnegative g with oscillation scale pi/R.
// `tail_bound(A)` must dominate the remainder beyond A; the domain is extended
// until the bound drops under tol relative to the accumulated value.
double riesz_xi_integral(const std::function<double(double)>& g, double beta, double R,
                         const std::function<double(double)>& tail_bound, double tol) {
    const double block = M_PI / std::max(R, 1.0);
    AdaptiveOptions opts{tol * 0.1, 0.0, 400000};

    auto weighted = [&](double xi) { return std::pow(xi, beta - 1.0) * g(xi); };

    double total = integrate_power_left(g, block, beta, opts);
    double A = block;
    double target = std::max(64.0 * block, 8.0);
    for (int round = 0; round < 48; ++round) {
        std::vector<double> splits;
        for (double x = A + block; x < target; x += block) splits.push_back(x);
        total += integrate_adaptive(weighted, A, target, opts, splits);
        A = target;
        if (tail_bound(A) <= tol * std::abs(total)) return total;
        target = 2.0 * A;
    }
    throw QuadratureFailure("riesz_xi_integral: tail bound not met");
}

}  // namespace

RieszExponent::RieszExponent(double b) : beta(b), hurst(1.0 - b / 2.0) {
    if (!(b > 0.0 && b < 1.0)) throw std::invalid_argument("RieszExponent: beta must lie in (0,1)");
}

WindowFunction::WindowFunction(double R_, double t_) : R(R_), t(t_) {
    if (!(R > 0.0)) throw std::invalid_argument("WindowFunction: R must be positive");
    if (!(t > 0.0)) throw std::invalid_argument("WindowFunction: t must be positive");
}

double green(double t, double x) {
    if (t < 0.0) throw std::invalid_argument("green: negative time");
    return std::abs(x) < t ? 0.5 : 0.0;
}

double phi_window(double R, double lag, double y) {
    if (!(R > 0.0)) throw std::invalid_argument("phi_window: R must be positive");
    if (lag < 0.0) throw std::invalid_argument("phi_window: negative lag");
    const double lo = std::max(y - lag, -R);
    const double hi = std::min(y + lag, R);
    return 0.5 * std::max(0.0, hi - lo);
}

double riesz_box_closed(double t, double s, double x, double xi, const RieszExponent& beta) {
    if (t < 0.0 || s < 0.0) throw std::invalid_argument("riesz_box_closed: negative time");
    const double d = x - xi;
    const double p = 2.0 - beta.beta;
    auto pw = [p](double a) { return std::pow(std::abs(a), p); };
    return pw(d - t - s) + pw(d + t + s) - pw(d + t - s) - pw(d - t + s);
}

double riesz_box_numeric(double t, double s, double x, double xi, const RieszExponent& beta,
                         double tol) {
    if (t < 0.0 || s < 0.0) throw std::invalid_argument("riesz_box_numeric: negative time");
    if (!(tol > 0.0)) throw std::invalid_argument("riesz_box_numeric: tol must be positive");
    if (t == 0.0 || s == 0.0) return 0.0;
    const double b = beta.beta;
    // Inner z-integral over [xi-s, xi+s] via the exact antiderivative; the
    // remaining y-integrand is continuous with infinite-slope points at xi +- s.
    auto f = [&](double y) { return psi1(y - xi + s, b) - psi1(y - xi - s, b); };
    const std::array<double, 2> kinks{xi - s, xi + s};
    AdaptiveOptions opts{tol, 0.0, 200000};
    return integrate_adaptive(f, x - t, x + t, opts, kinks);
}

double cell_covariance(double dx, long lag_index, const RieszExponent& beta) {
    const double l = static_cast<double>(lag_index) * dx;
    const double b = beta.beta;
    return psi2(l + dx, b) + psi2(l - dx, b) - 2.0 * psi2(l, b);
}

double c_beta_analytic(const RieszExponent& beta) { return (1.0 - beta.beta) * (2.0 - beta.beta); }

double hurst_normalization(const RieszExponent& beta) {
    const double H = beta.hurst;
    return H * (2.0 * H - 1.0);
}

double parseval_constant(const RieszExponent& beta) {
    const double b = beta.beta;
    return std::tgamma(1.0 - b) * std::sin(M_PI * b / 2.0) / M_PI;
}

double variance_constant(const RieszExponent& beta, double t,
                         const std::function<double(double)>& eta) {
    if (t < 0.0) throw std::invalid_argument("variance_constant: negative time");
    if (t == 0.0) return 0.0;
    auto f = [&](double s) {
        const double e = eta(s);
        return (t - s) * (t - s) * e * e;
    };
    AdaptiveOptions opts{1e-11, 0.0, 100000};
    return std::pow(2.0, 2.0 - beta.beta) * integrate_adaptive(f, 0.0, t, opts);
}

double window_self_inner(double R, double lag, const RieszExponent& beta) {
    // <phi, phi>_0 for the trapezoid profile. phi'' is four point masses at
    // +-(R+lag), +-|R-lag| with weights +-1/2, so the double integral against
    // |y-z|^{-b} collapses onto the 4th antiderivative.
    const double b = beta.beta;
    if (lag <= 0.0) return 0.0;
    return 0.5 * (psi4(2.0 * (R + lag), b) + psi4(2.0 * (R - lag), b) - 2.0 * psi4(2.0 * R, b) -
                  2.0 * psi4(2.0 * lag, b));
}

double sigma2_quadrature(const WindowFunction& window, const RieszExponent& beta) {
    const double R = window.R, t = window.t;
    auto f = [&](double s) { return window_self_inner(R, t - s, beta); };
    // smooth except where the lag crosses R
    double val;
    if (t > R) {
        val = gauss_legendre(f, 0.0, t - R, 48) + gauss_legendre(f, t - R, t, 48);
    } else {
        val = gauss_legendre(f, 0.0, t, 48);
    }
    return hurst_normalization(beta) * val;
}

double sigma2_quadrature_fourier(const WindowFunction& window, const RieszExponent& beta,
                                 double tol) {
    return g_delta(window, window.t, beta, 1.0, tol);
}

double g_delta(const WindowFunction& window, double delta, const RieszExponent& beta,
               double sigma2, double tol) {
    if (!(sigma2 > 0.0)) throw std::invalid_argument("g_delta: sigma2 must be positive");
    if (delta < 0.0 || delta > window.t + 1e-12)
        throw std::invalid_argument("g_delta: delta outside [0, t]");
    if (delta == 0.0) return 0.0;
    const double R = window.R, b = beta.beta;
    auto g = [&](double xi) {
        const double sr = std::sin(R * xi);
        // Int_0^delta sin^2(s xi) ds, evaluated exactly
        const double tpart = 0.5 * delta - std::sin(2.0 * delta * xi) / (4.0 * xi);
        return 4.0 * sr * sr * tpart / (xi * xi * xi * xi);
    };
    auto tail = [&](double A) {
        return 4.0 * (0.5 * delta + 0.25 / A) * std::pow(A, b - 4.0) / (4.0 - b);
    };
    const double I = riesz_xi_integral(g, b, R, tail, tol);
    return 2.0 * hurst_normalization(beta) * parseval_constant(beta) * I / sigma2;
}

double g_delta_lower_bound(const WindowFunction& window, double delta, const RieszExponent& beta,
                           double sigma2, double tol) {
    if (!(sigma2 > 0.0)) throw std::invalid_argument("g_delta_lower_bound: sigma2 must be positive");
    if (delta <= 0.0) return 0.0;
    const double R = window.R, b = beta.beta;
    auto g = [&](double xi) {
        const double sr = std::sin(R * xi);
        return 4.0 * sr * sr / (xi * xi * (1.0 + xi * xi));
    };
    auto tail = [&](double A) { return 4.0 * std::pow(A, b - 4.0) / (4.0 - b); };
    const double I = riesz_xi_integral(g, b, R, tail, tol);
    const double envelope = std::min(delta, delta * delta * delta) / (16.0 * M_PI * M_PI);
    return hurst_normalization(beta) * parseval_constant(beta) * envelope * 2.0 * I / sigma2;
}

double window_autocorrelation(double R, double lag, double w) {
    if (lag <= 0.0) return 0.0;
    const double L = R + lag;
    const double bp = std::abs(R - lag);
    if (std::abs(w) >= 2.0 * L) return 0.0;
    auto ph = [&](double y) {
        const double lo = std::max(y - lag, -R);
        const double hi = std::min(y + lag, R);
        return 0.5 * std::max(0.0, hi - lo);
    };
    // merged breakpoints of phi(y) and phi(y-w); the product is piecewise
    // quadratic, so Simpson per segment is exact
    std::array<double, 8> pts{-L, -bp, bp, L, w - L, w - bp, w + bp, w + L};
    std::sort(pts.begin(), pts.end());
    double acc = 0.0;
    for (int i = 0; i + 1 < 8; ++i) {
        const double a = pts[i], c = pts[i + 1];
        if (c <= a) continue;
        const double m = 0.5 * (a + c);
        acc += (c - a) / 6.0 * (ph(a) * ph(a - w) + 4.0 * ph(m) * ph(m - w) + ph(c) * ph(c - w));
    }
    return acc;
}

double phi_appendix(double R, double t, const RieszExponent& beta, double tol) {
    if (!(R > 0.0)) throw std::invalid_argument("phi_appendix: R must be positive");
    if (t < 0.0) throw std::invalid_argument("phi_appendix: negative time");
    if (t == 0.0) return 0.0;
    const double b = beta.beta;
    const double cb = c_beta_analytic(beta);

    // H_s(w) = Int_0^s h_a(w) da with h_a the closed-form cone-pair kernel
    auto H_s = [&](double s, double w) {
        return (0.5 * (s3(w + 2.0 * s, b) - s3(w - 2.0 * s, b)) -
                2.0 * s * std::pow(std::abs(w), 2.0 - b)) /
               (4.0 * cb);
    };

    AdaptiveOptions wopts{tol, 0.0, 200000};
    auto inner = [&](double s) {
        const double lag = t - s;
        if (lag <= 0.0) return 0.0;
        const double L = R + lag;
        const double bp = std::abs(R - lag);
        const double wmax = 2.0 * L;
        auto f = [&](double w) { return window_autocorrelation(R, lag, w) * H_s(s, w); };
        const double w1 = std::min(0.25 * wmax, std::min(2.0 * s, L - bp));
        double acc = integrate_power_left([&](double w) { return f(w); }, w1, b, wopts);
        auto weighted = [&](double w) { return f(w) * std::pow(w, -b); };
        const std::array<double, 4> kinks{2.0 * s, L - bp, 2.0 * bp, L + bp};
        acc += integrate_adaptive(weighted, w1, wmax, wopts, kinks);
        return 2.0 * acc;
    };

    if (R < t) {
        return gauss_legendre(inner, 0.0, t - R, 32) + gauss_legendre(inner, t - R, t, 32);
    }
    return gauss_legendre(inner, 0.0, t, 32);
}

CBetaCalibration calibrate_c_beta(const RieszExponent& beta,
                                  const std::vector<std::array<double, 4>>& tuples, double tol) {
    CBetaCalibration cal;
    double lo = 0.0, hi = 0.0, sum = 0.0;
    for (const auto& tu : tuples) {
        const double closed = riesz_box_closed(tu[0], tu[1], tu[2], tu[3], beta);
        const double numeric = riesz_box_numeric(tu[0], tu[1], tu[2], tu[3], beta, tol);
        const double r = closed / numeric;
        if (cal.ratios.empty()) {
            lo = hi = r;
        } else {
            lo = std::min(lo, r);
            hi = std::max(hi, r);
        }
        cal.ratios.push_back(r);
        sum += r;
    }
    cal.estimate = sum / static_cast<double>(cal.ratios.size());
    cal.max_spread = (hi - lo) / cal.estimate;
    return cal;
}

KernelConstants make_kernel_constants(const RieszExponent& beta, double t,
                                      const std::function<double(double)>& eta) {
    KernelConstants kc;
    kc.variance_constant = variance_constant(beta, t, eta);
    std::vector<std::array<double, 4>> tuples;
    for (int i = 0; i < 12; ++i) {
        const double tt = 0.3 + 0.17 * i;
        const double ss = 0.2 + 0.11 * i;
        tuples.push_back({tt, ss, 0.3 * i - 1.0, 0.15 * i});
    }
    kc.c_beta_estimate = calibrate_c_beta(beta, tuples).estimate;
    return kc;
}

}  // namespace swe
