#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "swe1d/campaign.hpp"

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int workers = -1;
    std::string dump_noise;
    std::string dump_solution;
};

void attach_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "campaign config file (key=value lines)");
    cmd->add_option("--out", opts.out_dir, "output directory");
    cmd->add_option("--seed", opts.seed, "master seed")->each([&](const std::string&) {
        opts.seed_set = true;
    });
    cmd->add_option("--workers", opts.workers, "worker threads (default: SWE1D_WORKERS or all)");
    cmd->add_option("--dump-noise", opts.dump_noise, "binary dump of the first noise field");
    cmd->add_option("--dump-solution", opts.dump_solution, "binary dump of one solution");
}

swe::CampaignConfig make_config(const CommonOpts& opts) {
    swe::CampaignConfig cfg;
    if (!opts.config_path.empty()) cfg = swe::load_config(opts.config_path);
    if (opts.seed_set) cfg.seed = opts.seed;
    if (opts.workers >= 0) cfg.workers = opts.workers;
    if (!opts.out_dir.empty()) cfg.output_dir = opts.out_dir;
    cfg.dump_noise_path = opts.dump_noise;
    cfg.dump_solution_path = opts.dump_solution;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"swe1d: 1D stochastic wave equation simulation and verification engine"};
    app.require_subcommand(1);

    CommonOpts clt_opts, mal_opts, ker_opts, noi_opts, sol_opts;
    auto* clt = app.add_subcommand("clt-scan", "density-convergence scan over the R ladder");
    attach_common(clt, clt_opts);
    auto* mal = app.add_subcommand("malliavin-diag", "Malliavin covariance diagnostics");
    attach_common(mal, mal_opts);
    auto* ker = app.add_subcommand("kernels", "deterministic kernel quadrature report");
    attach_common(ker, ker_opts);
    auto* noi = app.add_subcommand("noise-check", "noise covariance validation");
    attach_common(noi, noi_opts);
    auto* sol = app.add_subcommand("solver-check", "scheme validation checks");
    attach_common(sol, sol_opts);

    CLI11_PARSE(app, argc, argv);

    try {
        if (clt->parsed()) {
            const auto result = swe::run_clt_scan(make_config(clt_opts));
            for (const auto& level : result.levels) {
                if (level.ok)
                    std::printf("R=%-6g sup=%.5f ks=%.5f tv=%.5f (floors %.5f/%.5f/%.5f)\n",
                                level.R, level.metrics.at("sup_density").value,
                                level.metrics.at("kolmogorov").value, level.metrics.at("tv").value,
                                level.metrics.at("sup_density").floor_median,
                                level.metrics.at("kolmogorov").floor_median,
                                level.metrics.at("tv").floor_median);
                else
                    std::printf("R=%-6g FAILED: %s\n", level.R, level.error.c_str());
            }
            for (const auto& [metric, fit] : result.fits)
                std::printf("fit %-12s slope=%.4f (stderr %.4f)\n", metric.c_str(), fit.slope,
                            fit.slope_stderr);
            return result.partial ? 2 : 0;
        }
        if (mal->parsed()) {
            const auto result = swe::run_malliavin_diag(make_config(mal_opts));
            for (const auto& level : result.levels) {
                if (level.ok)
                    std::printf(
                        "R=%-6g gram=%.4f+-%.4f stein=%.4f+-%.4f var=%.3e cone=%.2e d2=%.4f\n",
                        level.R, level.gram_mean, level.gram_se, level.stein_mean, level.stein_se,
                        level.gram_var, level.cone_violation_max, level.d2_norm_mean);
                else
                    std::printf("R=%-6g FAILED: %s\n", level.R, level.error.c_str());
            }
            std::printf("Var(gram) slope=%.4f   d2 slope=%.4f\n", result.gram_var_fit.slope,
                        result.d2_fit.slope);
            return result.partial ? 2 : 0;
        }
        if (ker->parsed()) {
            const auto result = swe::run_kernels_report(make_config(ker_opts));
            std::printf("c_beta=%.8f (spread %.2e)\nvariance_constant=%.8f\nphi slope=%.4f\n",
                        result.c_beta_estimate, result.c_beta_spread,
                        result.variance_constant_value, result.phi_fit.slope);
            for (const auto& [delta, ratio] : result.g_ratio)
                std::printf("g(%.2f)/delta^3 = %.5f\n", delta, ratio);
            return 0;
        }
        if (noi->parsed()) {
            const auto result = swe::run_noise_check(make_config(noi_opts));
            std::printf("spatial max |z| = %.3f, time max |z| = %.3f -> %s\n",
                        result.report.max_abs_z, result.report.max_abs_z_time,
                        result.pass ? "PASS" : "FAIL");
            return result.pass ? 0 : 1;
        }
        if (sol->parsed()) {
            const auto result = swe::run_solver_check(make_config(sol_opts));
            for (const auto& row : result.rows)
                std::printf("%-24s value=%.6g threshold=%.6g %s\n", row.name.c_str(), row.value,
                            row.threshold, row.pass ? "PASS" : "FAIL");
            return result.pass ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
