#pragma once

#include <array>
#include <functional>
#include <vector>

#include "swe1d/quadrature.hpp"

namespace swe {

/// Riesz correlation exponent of the spatial noise, beta in (0,1).
/// The equivalent fractional index is hurst = 1 - beta/2 in (1/2, 1).
struct RieszExponent {
    double beta;
    double hurst;

    explicit RieszExponent(double b);
};

/// Averaging window [-R, R] observed at terminal time t.
struct WindowFunction {
    double R;
    double t;

    WindowFunction(double R_, double t_);
};

/// Numeric constants attached to a given beta: the calibrated box-integral
/// normalization and the large-R variance limit.
struct KernelConstants {
    double variance_constant = 0.0;  // lim sigma^2_{R,t} / R^{2-beta}
    double c_beta_estimate = 0.0;    // closed form / quadrature ratio of the box integral
};

// ---------------------------------------------------------------------------
// Closed forms
// ---------------------------------------------------------------------------

/// Wave Green's function in 1D: 1/2 on the open cone |x| < t, else 0.
double green(double t, double x);

/// Window kernel phi_{R,t}(s,y) expressed through the lag t-s:
/// half the overlap length of [y-lag, y+lag] with [-R, R].
double phi_window(double R, double lag, double y);

/// Right-hand side of the closed-form Riesz box integral:
/// |d-t-s|^{2-b} + |d+t+s|^{2-b} - |d+t-s|^{2-b} - |d-t+s|^{2-b}, d = x-xi.
/// Equals c_beta times the double integral of |y-z|^{-b} over the two cones.
double riesz_box_closed(double t, double s, double x, double xi, const RieszExponent& beta);

/// Quadrature evaluation of the box integral itself (left-hand side),
/// relative error <= tol. The inner integral is done with the exact
/// antiderivative of |a|^{-b}; only the outer direction is numeric.
double riesz_box_numeric(double t, double s, double x, double xi, const RieszExponent& beta,
                         double tol);

/// Exact covariance of unit-strength Riesz noise integrated over two cells of
/// width dx at centre distance lag_index*dx:
///   Psi(l+dx) + Psi(l-dx) - 2 Psi(l),  Psi(a) = |a|^{2-b} / ((1-b)(2-b)).
double cell_covariance(double dx, long lag_index, const RieszExponent& beta);

/// Analytic value of the Lemma-constant: (1-beta)(2-beta).
double c_beta_analytic(const RieszExponent& beta);

/// Hurst normalization H(2H-1) carried by the fractional spatial covariance;
/// every physical noise/variance quantity is scaled by this factor.
double hurst_normalization(const RieszExponent& beta);

/// Parseval constant for the plain Riesz kernel:
/// <f,g>_0 = kappa * Int |xi|^{b-1} fhat(xi) conj(ghat(xi)) dxi,
/// kappa = Gamma(1-b) sin(pi b / 2) / pi.
double parseval_constant(const RieszExponent& beta);

// ---------------------------------------------------------------------------
// Variance and small-time covariance mass
// ---------------------------------------------------------------------------

/// Large-R limit constant 2^{2-b} * Int_0^t (t-s)^2 eta(s)^2 ds.
double variance_constant(const RieszExponent& beta, double t,
                         const std::function<double(double)>& eta);

/// sigma^2_{R,t} for sigma == 1 (physical normalization), computed exactly in
/// the space domain through the 4th antiderivative of the Riesz kernel.
double sigma2_quadrature(const WindowFunction& window, const RieszExponent& beta);

/// Same quantity through the Fourier representation (oscillatory quadrature);
/// kept as the independent second route.
double sigma2_quadrature_fourier(const WindowFunction& window, const RieszExponent& beta,
                                 double tol = 1e-9);

/// <phi_s, phi_s>_0 for the window at given lag, plain kernel, closed form.
double window_self_inner(double R, double lag, const RieszExponent& beta);

/// g(delta): share of the window covariance mass carried by the last delta of
/// time, normalized by sigma2. Computed by 1D quadrature in xi after exact
/// s-integration of sin^2(s xi). Nondecreasing in delta; g(t) == 1 when
/// sigma2 = sigma2_quadrature.
double g_delta(const WindowFunction& window, double delta, const RieszExponent& beta,
               double sigma2, double tol = 1e-9);

/// Lower bound for g(delta) via the (delta ∧ delta^3)/(1+|xi|^2) envelope.
double g_delta_lower_bound(const WindowFunction& window, double delta,
                           const RieszExponent& beta, double sigma2, double tol = 1e-9);

// ---------------------------------------------------------------------------
// Appendix functional
// ---------------------------------------------------------------------------

/// Phi_{R,t}: the double-cone/double-kernel functional of the appendix,
/// reduced to Int_0^t Int C_s(w) |w|^{-b} H_s(w) dw ds where C_s is the window
/// autocorrelation and H_s the r-integrated cone-pair kernel (closed form).
double phi_appendix(double R, double t, const RieszExponent& beta, double tol = 1e-8);

/// Autocorrelation of the window profile: Int phi(y) phi(y-w) dy (exact).
double window_autocorrelation(double R, double lag, double w);

// ---------------------------------------------------------------------------
// Calibration
// ---------------------------------------------------------------------------

struct CBetaCalibration {
    double estimate = 0.0;   // mean ratio closed/numeric over probe tuples
    double max_spread = 0.0; // (max-min)/mean across tuples
    std::vector<double> ratios;
};

/// Calibrate c_beta numerically as the ratio closed/numeric over probe tuples.
CBetaCalibration calibrate_c_beta(const RieszExponent& beta,
                                  const std::vector<std::array<double, 4>>& tuples,
                                  double tol = 1e-8);

KernelConstants make_kernel_constants(const RieszExponent& beta, double t,
                                      const std::function<double(double)>& eta);

}  // namespace swe
