#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "swe1d/fft.hpp"
#include "swe1d/kernels.hpp"
#include "swe1d/rng.hpp"

namespace swe {

struct CovarianceEmbeddingFailure : std::runtime_error {
    explicit CovarianceEmbeddingFailure(const std::string& what) : std::runtime_error(what) {}
};

/// Discretization of the driving noise: nt independent time rows of nx
/// spatially correlated cell increments. dt == dx is required by the
/// unit-CFL scheme; the campaign chooses nx so the padded domain
/// [origin, origin + (nx-1) dx] covers every light cone it observes.
struct NoiseSpec {
    RieszExponent beta;
    double dt;
    double dx;
    long nx;
    long nt;
    std::uint64_t seed;
    double origin = 0.0;  // x-coordinate of cell 0

    void validate() const;
    double x(long j) const { return origin + static_cast<double>(j) * dx; }
    double t(long n) const { return static_cast<double>(n) * dt; }
};

/// Stationary covariance of one time row plus its circulant embedding.
/// row[l] = dt * H(2H-1) * cell_covariance(dx, l): exact cell integrals of
/// the fractional spatial covariance.
struct CovarianceModel {
    enum class Method { Circulant, DenseFactorization };

    std::vector<double> row;            // first nx lags
    std::vector<double> spectrum;       // circulant eigenvalues after clipping
    std::vector<double> sqrt_spectrum;  // sqrt(spectrum), used by synthesis
    std::size_t embed_size = 0;         // M
    Method method = Method::Circulant;
    std::vector<double> cholesky;       // nx*nx lower factor when dense
    long clipped = 0;
    double min_relative_eigenvalue = 0.0;
};

/// One sampled field of increments, immutable after creation.
struct NoiseField {
    std::vector<double> increments;  // nt x nx row-major
    NoiseSpec spec;
    std::uint64_t replicate_id = 0;
    std::uint64_t id = 0;  // provenance key

    double at(long n, long j) const { return increments[static_cast<std::size_t>(n) * spec.nx + j]; }
    std::span<const double> row(long n) const {
        return {increments.data() + static_cast<std::size_t>(n) * spec.nx,
                static_cast<std::size_t>(spec.nx)};
    }
};

CovarianceModel build_covariance(const NoiseSpec& spec);

std::uint64_t noise_field_id(const NoiseSpec& spec, std::uint64_t replicate_id);

/// Per-thread scratch for row synthesis: FFT plan, normals, row buffers.
class NoiseWorkspace {
  public:
    explicit NoiseWorkspace(const CovarianceModel& model);

    /// Deterministically fills rows 2p and 2p+1 (row1 may be null for the
    /// trailing odd row). Stream key: mix(seed, replicate, pair index).
    void sample_pair(const NoiseSpec& spec, std::uint64_t replicate_id, long pair_index,
                     double* row0, double* row1);

  private:
    const CovarianceModel* model_;
    std::unique_ptr<FftPlan> plan_;      // circulant path
    std::vector<double> normals_;
};

NoiseField sample_field(const CovarianceModel& model, const NoiseSpec& spec,
                        std::uint64_t replicate_id);

/// Pooled lag covariance across all rows of all fields, with standard errors
/// computed from the per-row means (rows are i.i.d. by construction).
struct CovarianceReport {
    std::vector<double> lag;        // 0..max_lag
    std::vector<double> expected;   // model row
    std::vector<double> empirical;
    std::vector<double> stderr_;
    double max_abs_z = 0.0;         // spatial lags
    std::vector<double> time_lag_cov;  // time lags 1..max_time_lag, lag-0 in space
    std::vector<double> time_lag_se;
    double max_abs_z_time = 0.0;
};

CovarianceReport empirical_covariance(std::span<const NoiseField> fields, long max_lag,
                                      long max_time_lag = 4);

/// Binary dump: magic, version, spec fields (little-endian), then row-major
/// 64-bit increments.
void dump_noise(const NoiseField& field, const std::string& path);
NoiseField load_noise(const std::string& path);

}  // namespace swe
