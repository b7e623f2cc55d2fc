#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "swe1d/diffusion.hpp"
#include "swe1d/malliavin.hpp"
#include "swe1d/noise.hpp"
#include "swe1d/observables.hpp"
#include "swe1d/stats.hpp"

namespace swe {

inline constexpr const char* kArtifactVersion = "0.1.0";

struct GridRule {
    bool automatic = true;
    double dt = 0.0;
    double dx = 0.0;
};

struct CampaignConfig {
    double beta = 0.5;
    double t = 1.0;
    std::string diffusion = "sin2";
    std::vector<double> r_ladder = {2.0, 4.0, 8.0, 16.0, 32.0};
    long replicates = 1000;
    GridRule grid;
    std::uint64_t seed = 1;
    int workers = 0;  // 0: SWE1D_WORKERS env or OpenMP default
    std::string output_dir = "out";
    std::string dump_noise_path;
    std::string dump_solution_path;

    void validate() const;
    double density_dx() const { return grid.automatic ? t / 128.0 : grid.dx; }
    double malliavin_dx() const { return grid.automatic ? t / 32.0 : grid.dx; }
    std::string canonical() const;
    std::uint64_t config_hash() const;
};

/// key=value file, '#' comments, unknown keys rejected.
CampaignConfig load_config(const std::string& path);

int resolve_workers(int requested);

// ---------------------------------------------------------------------------
// CLT scan
// ---------------------------------------------------------------------------

struct MetricLevel {
    double value = 0.0;
    double floor_median = 0.0;
    double floor_p99 = 0.0;
    double corrected = 0.0;  // max(value - floor_median, 1e-9)
};

struct CltLevelResult {
    double R = 0.0;
    bool ok = false;
    std::string error;
    VarianceEstimate pilot;       // MC variance of the pilot run
    VarianceEstimate normalizer;  // estimate used for normalization
    double bandwidth = 0.0;
    double normalized_mean = 0.0;
    double normalized_mean_se = 0.0;
    std::map<std::string, MetricLevel> metrics;  // sup_density, kolmogorov, tv
};

struct CltScanResult {
    std::vector<CltLevelResult> levels;
    std::map<std::string, RateFit> fits;  // per metric, on corrected values
    bool partial = false;
    std::string out_dir;
};

CltScanResult run_clt_scan(const CampaignConfig& config);

/// Same-n pure-N(0,1) KDE runs: the honest zero of each metric.
struct FloorTable {
    std::size_t n = 0;
    std::map<std::string, std::pair<double, double>> floor;  // metric -> (median, p99)
};
FloorTable kde_floor(std::size_t n, std::uint64_t seed, int runs = 100);

// ---------------------------------------------------------------------------
// Malliavin diagnostics
// ---------------------------------------------------------------------------

struct MalliavinLevel {
    double R = 0.0;
    bool ok = false;
    std::string error;
    double sigma2 = 0.0;
    double gram_mean = 0.0, gram_se = 0.0, gram_var = 0.0;
    double stein_mean = 0.0, stein_se = 0.0;
    double cone_violation_max = 0.0;
    double d2_norm_mean = 0.0;
    SmallBallTable small_ball;
};

struct MalliavinDiagResult {
    std::vector<MalliavinLevel> levels;
    RateFit gram_var_fit;  // log Var||DF||^2 vs log R
    RateFit d2_fit;        // log E||D2F|| vs log R
    bool partial = false;
    std::string out_dir;
};

MalliavinDiagResult run_malliavin_diag(const CampaignConfig& config);

// ---------------------------------------------------------------------------
// Deterministic kernel report
// ---------------------------------------------------------------------------

struct KernelsReportResult {
    double c_beta_estimate = 0.0;
    double c_beta_spread = 0.0;
    double variance_constant_value = 0.0;
    std::vector<std::pair<double, double>> g_ratio;  // (delta, g/delta^3)
    std::vector<std::pair<double, double>> phi_ladder;
    RateFit phi_fit;
    std::string out_dir;
};

KernelsReportResult run_kernels_report(const CampaignConfig& config);

// ---------------------------------------------------------------------------
// Validation subcommands
// ---------------------------------------------------------------------------

struct NoiseCheckResult {
    CovarianceReport report;
    bool pass = false;
    std::string out_dir;
};
NoiseCheckResult run_noise_check(const CampaignConfig& config);

struct SolverCheckRow {
    std::string name;
    double value = 0.0;
    double threshold = 0.0;
    bool pass = false;
};
struct SolverCheckResult {
    std::vector<SolverCheckRow> rows;
    bool pass = false;
    std::string out_dir;
};
SolverCheckResult run_solver_check(const CampaignConfig& config);

}  // namespace swe
