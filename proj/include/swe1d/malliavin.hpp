#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "swe1d/diffusion.hpp"
#include "swe1d/noise.hpp"
#include "swe1d/solver.hpp"

namespace swe {

/// First derivative field D_{s,y}u(t_n, x_j) for the base noise cell
/// (base_m, base_k): the derivative of the discrete solution with respect to
/// that cell's increment. Supported inside the forward cone
/// |j - base_k| <= n - base_m - 1 (grid-exact for the leapfrog path).
struct DerivativeField {
    long base_m = 0;
    long base_k = 0;
    std::vector<double> values;  // (nt+1) x nx
    Scheme scheme = Scheme::Leapfrog;
    std::uint64_t noise_id = 0;
    long nx = 0, nt = 0;

    double at(long n, long j) const { return values[static_cast<std::size_t>(n) * nx + j]; }
};

struct SecondDerivativeField {
    long r_m = 0, r_k = 0;  // earlier base (r, z)
    long s_m = 0, s_k = 0;  // later base (s, y)
    std::vector<double> values;  // (nt+1) x nx
    Scheme scheme = Scheme::Leapfrog;
    std::uint64_t noise_id = 0;
    long nx = 0, nt = 0;

    double at(long n, long j) const { return values[static_cast<std::size_t>(n) * nx + j]; }
};

/// Normalized Malliavin data of one replicate: the derivative of the window
/// average over every base cell, the Stein direction w, and their Riesz Gram
/// invariants.
struct MalliavinReport {
    std::vector<double> df;  // nt x nx: D_{s_m, y_k} F
    std::vector<double> w;   // nt x nx: phi_{R,t}(s_m, y_k) sigma(u) / sqrt(sigma2)
    double gram_norm = 0.0;      // ||DF||_H^2
    double stein_pairing = 0.0;  // <DF, w>_H
    double R = 0.0;
    double sigma2 = 0.0;
    long nx = 0, nt = 0;
};

DerivativeField first_derivative(const GridSolution& sol, const NoiseField& noise,
                                 const Diffusion& diffusion, long base_m, long base_k);

/// Requires d_rz.base_m < d_sy.base_m (the paper's r < s ordering).
SecondDerivativeField second_derivative(const GridSolution& sol, const NoiseField& noise,
                                        const Diffusion& diffusion, const DerivativeField& d_rz,
                                        const DerivativeField& d_sy);

/// Value of the scheme's discrete Green kick at (n, j) for a base at
/// (base_m, base_k): what first_derivative equals when sigma' == 0, divided
/// by sigma(u at the base).
double discrete_green(Scheme scheme, long n, long j, long base_m, long base_k);

/// Max |value| outside the base's forward cone (0 for leapfrog by design).
double cone_violation(const DerivativeField& field);

/// One backward (adjoint) pass computing df for all bases at once; values
/// agree with the per-base forward route up to floating reassociation.
MalliavinReport assemble_report(const GridSolution& sol, const NoiseField& noise,
                                const CovarianceModel& model, const Diffusion& diffusion,
                                double R, double sigma2);

struct SmallBallTable {
    std::vector<double> eps;
    std::vector<double> fraction;  // empirical P(gram_norm < eps)
    double min_gram = 0.0;
    double quantile_01 = 0.0;  // 1% quantile
};

SmallBallTable small_ball_probe(std::span<const double> gram_norms,
                                std::span<const double> eps_grid);

/// Coarse-grid estimate of ||D^2 F||_{H (x) H} from a strided base-pair
/// subsample (midpoint strata in time and space).
double d2_norm_estimate(const GridSolution& sol, const NoiseField& noise,
                        const Diffusion& diffusion, double R, double sigma2, long m_count,
                        long k_count);

/// Riesz quadratic/bilinear forms of spatial rows under the covariance row
/// (the H inner product restricted to one time slice, dt included).
class RieszGram {
  public:
    RieszGram(const CovarianceModel& model, long nx);

    struct Forms {
        double aa = 0.0, ab = 0.0, bb = 0.0;
    };
    /// a^T T a, a^T T b, b^T T b with T_ij = row[|i-j|]
    Forms row_forms(const double* a, const double* b);

  private:
    const CovarianceModel* model_;
    long nx_;
    std::unique_ptr<FftPlan> plan_;
    std::vector<double> fa_re_, fa_im_, fb_re_, fb_im_;
};

}  // namespace swe
