#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "swe1d/diffusion.hpp"
#include "swe1d/noise.hpp"

namespace swe {

enum class Scheme { WalshSum, Leapfrog };

struct NumericalBlowup : std::runtime_error {
    long step;
    long cell;
    NumericalBlowup(long n, long j)
        : std::runtime_error("solution lost finiteness at step " + std::to_string(n) + ", cell " +
                             std::to_string(j)),
          step(n),
          cell(j) {}
};

/// Space-time solution values u(t_n, x_j), n = 0..nt, with u(0,.) = 1.
struct GridSolution {
    std::vector<double> u;  // (nt+1) x nx row-major
    NoiseSpec spec;
    Scheme scheme = Scheme::Leapfrog;
    std::uint64_t noise_id = 0;

    double at(long n, long j) const { return u[static_cast<std::size_t>(n) * spec.nx + j]; }
    const double* row(long n) const { return u.data() + static_cast<std::size_t>(n) * spec.nx; }
    double x(long j) const { return spec.x(j); }
};

/// Grid spec whose domain covers [-R-t-pad*dx, R+t+pad*dx] with nodes on
/// multiples of dx and x = 0, +-R on nodes. dt = dx (unit CFL).
NoiseSpec padded_spec(const RieszExponent& beta, double t, double dx, double R,
                      std::uint64_t seed, long pad_cells = 2);

/// Direct transcription of the mild-solution Walsh sum with exact cone
/// windows (left-point sigma). O(nt^2 nx) via sliding prefix sums.
GridSolution solve_walsh(const NoiseField& noise, const Diffusion& diffusion);

/// Unit-CFL three-level scheme; requires dt == dx. The discrete Green's
/// function is exact on the grid cone (even-parity nodes).
GridSolution solve_leapfrog(const NoiseField& noise, const Diffusion& diffusion);

struct DiscrepancyReport {
    double max_abs = 0.0;
    double rms = 0.0;
    std::vector<double> per_time_max;
};

/// Max/RMS discrepancy over cells [jlo, jhi] at every stored time.
DiscrepancyReport cross_validate(const GridSolution& a, const GridSolution& b, long jlo, long jhi);

/// Halved (dt, dx), doubled (nt, nx), same origin and seed.
NoiseSpec refine_spec(const NoiseSpec& coarse);

/// Sum of the four fine sub-cells per coarse cell; exact in law and pathwise
/// coupled to the fine field. Fine grid must halve (dt, dx) of the coarse.
NoiseField coarsen_noise(const NoiseField& fine);

/// Trapezoid integral of (row - 1) over the nodes spanning [-R, R].
double window_trapezoid(const double* row, const NoiseSpec& spec, double R);

/// Trapezoid integral of the row itself (no recentering).
double window_trapezoid_raw(const double* row, const NoiseSpec& spec, double R);

/// Streaming leapfrog for campaigns: synthesizes noise rows on the fly and
/// returns only the window average of u(t)-1. Bit-identical to
/// window_trapezoid(solve_leapfrog(sample_field(...)) final row).
double leapfrog_window_average(const NoiseSpec& spec, std::uint64_t replicate_id,
                               const Diffusion& diffusion, double R, NoiseWorkspace& ws);

}  // namespace swe
