#include "swe1d/campaign.hpp"

#include <omp.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "swe1d/csv.hpp"
#include "swe1d/kernels.hpp"

namespace swe {

using nlohmann::json;

namespace {

enum Purpose : std::uint64_t { kPilot = 1, kMain = 2, kFloor = 3 };

constexpr std::uint64_t kTagClt = 0x636c74;    // "clt"
constexpr std::uint64_t kTagMal = 0x6d616c;    // "mal"
constexpr std::uint64_t kTagNoise = 0x6e6f69;  // "noi"
constexpr std::uint64_t kTagSolver = 0x736f6c; // "sol"

std::string iso_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&tt));
    return buf;
}

std::string r_label(double R) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", R);
    std::string s(buf);
    for (char& c : s)
        if (c == '.') c = 'p';
    return s;
}

json provenance_block(const CampaignConfig& cfg, int workers) {
    json j;
    j["artifact"] = "swe1d";
    j["version"] = kArtifactVersion;
    j["seed"] = cfg.seed;
    j["workers"] = workers;
    j["config"] = cfg.canonical();
    j["config_hash"] = cfg.config_hash();
    j["timestamp"] = iso_timestamp();
    return j;
}

/// Streamed window averages for `n` replicates, OpenMP over replicates,
/// results placed by replicate index (scheduling-independent output).
std::vector<double> collect_averages(const CovarianceModel& model, const NoiseSpec& spec,
                                     const Diffusion& diffusion, double R, long n, int workers) {
    std::vector<double> out(static_cast<std::size_t>(n));
    std::atomic<bool> failed{false};
    std::string message;
#pragma omp parallel num_threads(workers)
    {
        NoiseWorkspace ws(model);
#pragma omp for schedule(dynamic, 8)
        for (long i = 0; i < n; ++i) {
            if (failed.load(std::memory_order_relaxed)) continue;
            try {
                out[static_cast<std::size_t>(i)] = leapfrog_window_average(
                    spec, static_cast<std::uint64_t>(i), diffusion, R, ws);
            } catch (const std::exception& e) {
#pragma omp critical
                {
                    if (!failed.exchange(true)) message = e.what();
                }
            }
        }
    }
    if (failed) throw std::runtime_error("replicate failed: " + message);
    return out;
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double percentile_of(std::vector<double> v, double p) {
    std::sort(v.begin(), v.end());
    const double pos = p * (static_cast<double>(v.size()) - 1.0);
    const std::size_t lo = static_cast<std::size_t>(pos);
    if (lo + 1 >= v.size()) return v.back();
    const double frac = pos - static_cast<double>(lo);
    return v[lo] * (1.0 - frac) + v[lo + 1] * frac;
}

struct MeanSe {
    double mean = 0.0, se = 0.0, var = 0.0;
};
MeanSe mean_se(std::span<const double> v) {
    MeanSe r;
    const double n = static_cast<double>(v.size());
    for (double x : v) r.mean += x;
    r.mean /= n;
    for (double x : v) r.var += (x - r.mean) * (x - r.mean);
    r.var /= (n - 1.0);
    r.se = std::sqrt(r.var / n);
    return r;
}

}  // namespace

void CampaignConfig::validate() const {
    if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("config: beta must be in (0,1)");
    if (!(t > 0.0)) throw std::invalid_argument("config: t must be positive");
    if (r_ladder.empty()) throw std::invalid_argument("config: r_ladder must not be empty");
    for (std::size_t i = 0; i + 1 < r_ladder.size(); ++i)
        if (!(r_ladder[i] < r_ladder[i + 1]))
            throw std::invalid_argument("config: r_ladder must be strictly increasing");
    if (replicates < 100) throw std::invalid_argument("config: replicates must be >= 100");
    if (!grid.automatic && (!(grid.dt > 0.0) || !(grid.dx > 0.0)))
        throw std::invalid_argument("config: explicit grid needs positive dt, dx");
    Diffusion::parse(diffusion);  // throws on unknown names
}

std::string CampaignConfig::canonical() const {
    std::ostringstream os;
    os << "beta=" << format_double17(beta) << ";t=" << format_double17(t)
       << ";diffusion=" << diffusion << ";r_ladder=";
    for (std::size_t i = 0; i < r_ladder.size(); ++i)
        os << (i ? "," : "") << format_double17(r_ladder[i]);
    os << ";replicates=" << replicates << ";grid=";
    if (grid.automatic)
        os << "auto";
    else
        os << format_double17(grid.dt) << "," << format_double17(grid.dx);
    os << ";seed=" << seed;
    return os.str();
}

std::uint64_t CampaignConfig::config_hash() const {
    const std::string s = canonical();
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

CampaignConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_config: cannot open " + path);
    CampaignConfig cfg;
    cfg.r_ladder.clear();
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto strip = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            if (a == std::string::npos) return std::string();
            const auto b = s.find_last_not_of(" \t\r");
            return s.substr(a, b - a + 1);
        };
        line = strip(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("load_config: line " + std::to_string(lineno) +
                                     " is not key=value");
        const std::string key = strip(line.substr(0, eq));
        const std::string value = strip(line.substr(eq + 1));
        if (key == "beta") {
            cfg.beta = std::stod(value);
        } else if (key == "t") {
            cfg.t = std::stod(value);
        } else if (key == "diffusion") {
            cfg.diffusion = value;
        } else if (key == "r_ladder") {
            std::stringstream ss(value);
            std::string tok;
            while (std::getline(ss, tok, ',')) cfg.r_ladder.push_back(std::stod(tok));
        } else if (key == "replicates") {
            cfg.replicates = std::stol(value);
        } else if (key == "grid") {
            if (value == "auto") {
                cfg.grid.automatic = true;
            } else {
                cfg.grid.automatic = false;
                const auto comma = value.find(',');
                if (comma == std::string::npos)
                    throw std::runtime_error("load_config: grid must be 'auto' or 'dt,dx'");
                cfg.grid.dt = std::stod(value.substr(0, comma));
                cfg.grid.dx = std::stod(value.substr(comma + 1));
            }
        } else if (key == "seed") {
            cfg.seed = std::stoull(value);
        } else if (key == "workers") {
            cfg.workers = value == "auto" ? 0 : std::stoi(value);
        } else if (key == "output_dir") {
            cfg.output_dir = value;
        } else {
            throw std::runtime_error("load_config: unknown key '" + key + "' on line " +
                                     std::to_string(lineno));
        }
    }
    if (cfg.r_ladder.empty()) cfg.r_ladder = {2.0, 4.0, 8.0, 16.0, 32.0};
    return cfg;
}

int resolve_workers(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("SWE1D_WORKERS")) {
        const int w = std::atoi(env);
        if (w > 0) return w;
    }
    return omp_get_max_threads();
}

FloorTable kde_floor(std::size_t n, std::uint64_t seed, int runs) {
    FloorTable table;
    table.n = n;
    std::vector<double> sup(runs), ks(runs), tv(runs);
    const auto grid = default_density_grid();
#pragma omp parallel for schedule(dynamic)
    for (int run = 0; run < runs; ++run) {
        Xoshiro256pp rng(mix64({seed, kFloor, static_cast<std::uint64_t>(n),
                                static_cast<std::uint64_t>(run)}));
        std::vector<double> draws(n);
        fill_standard_normal(rng, draws);
        DensityReport rep = kde(draws, grid, BandwidthRule::silverman());
        distances(rep, draws);
        sup[run] = rep.sup_distance;
        ks[run] = rep.kolmogorov;
        tv[run] = rep.tv_estimate;
    }
    table.floor["sup_density"] = {median_of(sup), percentile_of(sup, 0.99)};
    table.floor["kolmogorov"] = {median_of(ks), percentile_of(ks, 0.99)};
    table.floor["tv"] = {median_of(tv), percentile_of(tv, 0.99)};
    return table;
}

CltScanResult run_clt_scan(const CampaignConfig& cfg) {
    cfg.validate();
    const int workers = resolve_workers(cfg.workers);
    const Diffusion diffusion = Diffusion::parse(cfg.diffusion);
    const RieszExponent beta(cfg.beta);
    const double dx = cfg.density_dx();

    CltScanResult result;
    result.out_dir = cfg.output_dir;

    const FloorTable floors = kde_floor(static_cast<std::size_t>(cfg.replicates), cfg.seed);
    const auto grid = default_density_grid();

    Csv metrics_csv({"R", "n", "metric", "value", "floor_value", "bandwidth"});
    json levels_json = json::array();

    for (std::size_t ri = 0; ri < cfg.r_ladder.size(); ++ri) {
        const double R = cfg.r_ladder[ri];
        CltLevelResult level;
        level.R = R;
        try {
            const std::uint64_t pilot_seed = mix64({cfg.seed, kTagClt, ri, kPilot});
            const std::uint64_t main_seed = mix64({cfg.seed, kTagClt, ri, kMain});
            NoiseSpec spec = padded_spec(beta, cfg.t, dx, R, pilot_seed);
            const CovarianceModel model = build_covariance(spec);

            const auto raw_pilot =
                collect_averages(model, spec, diffusion, R, cfg.replicates, workers);
            level.pilot = estimate_sigma2_mc(raw_pilot, R, cfg.t, cfg.beta);
            level.normalizer = diffusion.additive()
                                   ? estimate_sigma2_quadrature(diffusion.k, R, cfg.t, beta)
                                   : level.pilot;

            spec.seed = main_seed;
            const auto raw_main =
                collect_averages(model, spec, diffusion, R, cfg.replicates, workers);
            const auto samples = normalize(raw_main, level.normalizer, R, cfg.t);

            std::vector<double> normalized(samples.size());
            for (std::size_t i = 0; i < samples.size(); ++i) normalized[i] = samples[i].normalized;
            const MeanSe nm = mean_se(normalized);
            level.normalized_mean = nm.mean;
            level.normalized_mean_se = nm.se;

            DensityReport rep = kde(normalized, grid, BandwidthRule::silverman());
            distances(rep, normalized);
            level.bandwidth = rep.bandwidth;

            const std::map<std::string, double> values = {{"sup_density", rep.sup_distance},
                                                          {"kolmogorov", rep.kolmogorov},
                                                          {"tv", rep.tv_estimate}};
            for (const auto& [metric, value] : values) {
                MetricLevel m;
                m.value = value;
                const auto& [med, p99] = floors.floor.at(metric);
                m.floor_median = med;
                m.floor_p99 = p99;
                m.corrected = std::max(value - med, 1e-9);
                level.metrics[metric] = m;
                metrics_csv.add(R)
                    .add(static_cast<long>(cfg.replicates))
                    .add(metric)
                    .add(value)
                    .add(med)
                    .add(rep.bandwidth);
                metrics_csv.end_row();
            }

            Csv samples_csv({"replicate", "R", "t", "beta", "raw", "normalized"});
            for (const auto& s : samples) {
                samples_csv.add(s.replicate_id).add(s.R).add(s.t).add(cfg.beta).add(s.raw).add(
                    s.normalized);
                samples_csv.end_row();
            }
            samples_csv.write(cfg.output_dir + "/clt_samples_R" + r_label(R) + ".csv");

            level.ok = true;
        } catch (const std::exception& e) {
            level.error = e.what();
            result.partial = true;
        }

        json jl;
        jl["R"] = level.R;
        jl["ok"] = level.ok;
        if (!level.ok) jl["error"] = level.error;
        if (level.ok) {
            jl["pilot_sigma2"] = level.pilot.sigma2;
            jl["pilot_sigma2_stderr"] = level.pilot.stderr_;
            jl["normalizer_sigma2"] = level.normalizer.sigma2;
            jl["normalizer_method"] =
                level.normalizer.method == VarianceEstimate::Method::Mc ? "mc" : "quadrature";
            jl["bandwidth"] = level.bandwidth;
            jl["normalized_mean"] = level.normalized_mean;
            jl["normalized_mean_se"] = level.normalized_mean_se;
            for (const auto& [metric, m] : level.metrics) {
                jl["metrics"][metric] = {{"value", m.value},
                                         {"floor_median", m.floor_median},
                                         {"floor_p99", m.floor_p99},
                                         {"corrected", m.corrected}};
            }
        }
        levels_json.push_back(jl);
        result.levels.push_back(std::move(level));
    }

    // rate fits per metric across successful levels
    for (const std::string metric : {"sup_density", "kolmogorov", "tv"}) {
        std::vector<std::pair<double, double>> ladder;
        for (const auto& level : result.levels)
            if (level.ok) ladder.emplace_back(level.R, level.metrics.at(metric).corrected);
        if (ladder.size() >= 3) result.fits[metric] = rate_fit(ladder);
    }

    metrics_csv.write(cfg.output_dir + "/clt_metrics.csv");
    json out;
    out["provenance"] = provenance_block(cfg, workers);
    out["levels"] = levels_json;
    for (const auto& [metric, fit] : result.fits) {
        out["fits"][metric] = {{"slope", fit.slope},
                               {"intercept", fit.intercept},
                               {"slope_stderr", fit.slope_stderr}};
    }
    out["partial"] = result.partial;
    write_text_atomic(cfg.output_dir + "/clt_result.json", out.dump(2) + "\n");
    return result;
}

MalliavinDiagResult run_malliavin_diag(const CampaignConfig& cfg) {
    cfg.validate();
    const int workers = resolve_workers(cfg.workers);
    const Diffusion diffusion = Diffusion::parse(cfg.diffusion);
    const RieszExponent beta(cfg.beta);
    const double dx = cfg.malliavin_dx();
    const long nt = static_cast<long>(std::llround(cfg.t / dx));
    if (nt > 64) throw std::invalid_argument("run_malliavin_diag: grid capped at nt <= 64");

    MalliavinDiagResult result;
    result.out_dir = cfg.output_dir;
    const std::vector<double> eps_grid = {0.02, 0.05, 0.1, 0.2, 0.3, 0.5, 0.75, 1.0, 1.25, 1.5};

    Csv rows_csv({"replicate", "R", "gram_norm", "stein_pairing", "cone_violation",
                  "d2_norm_estimate"});
    Csv ball_csv({"R", "eps", "fraction"});
    json levels_json = json::array();

    for (std::size_t ri = 0; ri < cfg.r_ladder.size(); ++ri) {
        const double R = cfg.r_ladder[ri];
        MalliavinLevel level;
        level.R = R;
        try {
            const std::uint64_t pilot_seed = mix64({cfg.seed, kTagMal, ri, kPilot});
            const std::uint64_t main_seed = mix64({cfg.seed, kTagMal, ri, kMain});
            NoiseSpec spec = padded_spec(beta, cfg.t, dx, R, pilot_seed);
            const CovarianceModel model = build_covariance(spec);

            if (diffusion.additive()) {
                level.sigma2 = estimate_sigma2_quadrature(diffusion.k, R, cfg.t, beta).sigma2;
            } else {
                const auto raw =
                    collect_averages(model, spec, diffusion, R, cfg.replicates, workers);
                level.sigma2 = estimate_sigma2_mc(raw, R, cfg.t, cfg.beta).sigma2;
            }

            spec.seed = main_seed;
            const long n = cfg.replicates;
            std::vector<double> grams(n), steins(n), cones(n), d2s(n);
            std::atomic<bool> failed{false};
            std::string message;
#pragma omp parallel for schedule(dynamic) num_threads(workers)
            for (long i = 0; i < n; ++i) {
                if (failed.load(std::memory_order_relaxed)) continue;
                try {
                    const NoiseField field =
                        sample_field(model, spec, static_cast<std::uint64_t>(i));
                    const GridSolution sol = solve_leapfrog(field, diffusion);
                    const MalliavinReport rep =
                        assemble_report(sol, field, model, diffusion, R, level.sigma2);
                    grams[i] = rep.gram_norm;
                    steins[i] = rep.stein_pairing;
                    const long mid = spec.nx / 2;
                    double worst = 0.0;
                    for (const auto& [bm, bk] :
                         {std::pair<long, long>{nt / 4, mid},
                          std::pair<long, long>{nt / 2, mid + spec.nx / 8},
                          std::pair<long, long>{(3 * nt) / 4, mid - spec.nx / 8}}) {
                        const auto fld = first_derivative(sol, field, diffusion, bm, bk);
                        worst = std::max(worst, cone_violation(fld));
                    }
                    cones[i] = worst;
                    d2s[i] = d2_norm_estimate(sol, field, diffusion, R, level.sigma2, 4, 6);
                } catch (const std::exception& e) {
#pragma omp critical
                    {
                        if (!failed.exchange(true)) message = e.what();
                    }
                }
            }
            if (failed) throw std::runtime_error("replicate failed: " + message);

            const MeanSe g = mean_se(grams);
            const MeanSe s = mean_se(steins);
            const MeanSe d = mean_se(d2s);
            level.gram_mean = g.mean;
            level.gram_se = g.se;
            level.gram_var = g.var;
            level.stein_mean = s.mean;
            level.stein_se = s.se;
            level.cone_violation_max = *std::max_element(cones.begin(), cones.end());
            level.d2_norm_mean = d.mean;
            if (n >= 1000) level.small_ball = small_ball_probe(grams, eps_grid);

            for (long i = 0; i < n; ++i) {
                rows_csv.add(static_cast<std::uint64_t>(i))
                    .add(R)
                    .add(grams[i])
                    .add(steins[i])
                    .add(cones[i])
                    .add(d2s[i]);
                rows_csv.end_row();
            }
            for (std::size_t e = 0; e < level.small_ball.eps.size(); ++e) {
                ball_csv.add(R).add(level.small_ball.eps[e]).add(level.small_ball.fraction[e]);
                ball_csv.end_row();
            }
            level.ok = true;
        } catch (const std::exception& e) {
            level.error = e.what();
            result.partial = true;
        }

        json jl;
        jl["R"] = level.R;
        jl["ok"] = level.ok;
        if (!level.ok) jl["error"] = level.error;
        if (level.ok) {
            jl["sigma2"] = level.sigma2;
            jl["gram_mean"] = level.gram_mean;
            jl["gram_se"] = level.gram_se;
            jl["gram_var"] = level.gram_var;
            jl["stein_mean"] = level.stein_mean;
            jl["stein_se"] = level.stein_se;
            jl["cone_violation_max"] = level.cone_violation_max;
            jl["d2_norm_mean"] = level.d2_norm_mean;
            jl["small_ball_min"] = level.small_ball.min_gram;
            jl["small_ball_q01"] = level.small_ball.quantile_01;
        }
        levels_json.push_back(jl);
        result.levels.push_back(std::move(level));
    }

    std::vector<std::pair<double, double>> var_ladder, d2_ladder;
    for (const auto& level : result.levels) {
        if (!level.ok) continue;
        if (level.gram_var > 0.0) var_ladder.emplace_back(level.R, level.gram_var);
        if (level.d2_norm_mean > 0.0) d2_ladder.emplace_back(level.R, level.d2_norm_mean);
    }
    if (var_ladder.size() >= 3) result.gram_var_fit = rate_fit(var_ladder);
    if (d2_ladder.size() >= 3) result.d2_fit = rate_fit(d2_ladder);

    rows_csv.write(cfg.output_dir + "/malliavin_diag.csv");
    ball_csv.write(cfg.output_dir + "/malliavin_small_ball.csv");
    json out;
    out["provenance"] = provenance_block(cfg, workers);
    out["levels"] = levels_json;
    out["gram_var_fit"] = {{"slope", result.gram_var_fit.slope},
                           {"slope_stderr", result.gram_var_fit.slope_stderr}};
    out["d2_fit"] = {{"slope", result.d2_fit.slope}, {"slope_stderr", result.d2_fit.slope_stderr}};
    out["partial"] = result.partial;
    write_text_atomic(cfg.output_dir + "/malliavin_result.json", out.dump(2) + "\n");
    return result;
}

KernelsReportResult run_kernels_report(const CampaignConfig& cfg) {
    cfg.validate();
    const RieszExponent beta(cfg.beta);
    KernelsReportResult result;
    result.out_dir = cfg.output_dir;

    Csv csv({"quantity", "params", "value", "tolerance"});

    // c_beta calibration over 100 pseudo-random tuples
    {
        Xoshiro256pp rng(mix64({cfg.seed, kTagClt, 0xCB}));
        std::vector<std::array<double, 4>> tuples;
        for (int i = 0; i < 100; ++i)
            tuples.push_back({0.1 + 1.9 * rng.uniform(), 0.1 + 1.9 * rng.uniform(),
                              4.0 * rng.uniform() - 2.0, 4.0 * rng.uniform() - 2.0});
        const auto cal = calibrate_c_beta(beta, tuples, 1e-8);
        result.c_beta_estimate = cal.estimate;
        result.c_beta_spread = cal.max_spread;
        for (std::size_t i = 0; i < tuples.size(); ++i) {
            std::ostringstream p;
            p << "t=" << tuples[i][0] << ";s=" << tuples[i][1] << ";x=" << tuples[i][2]
              << ";xi=" << tuples[i][3];
            csv.add("c_beta_ratio").add(p.str()).add(cal.ratios[i]).add(1e-4);
            csv.end_row();
        }
        csv.add("c_beta_estimate").add("beta=" + format_double17(cfg.beta)).add(cal.estimate).add(
            1e-4);
        csv.end_row();
    }

    // variance constant with eta == 1
    result.variance_constant_value = variance_constant(beta, cfg.t, [](double) { return 1.0; });
    csv.add("variance_constant")
        .add("beta=" + format_double17(cfg.beta) + ";t=" + format_double17(cfg.t) + ";eta=1")
        .add(result.variance_constant_value)
        .add(1e-4);
    csv.end_row();

    // g(delta)/delta^3 at R = 10
    {
        const WindowFunction window(10.0, cfg.t);
        const double sigma2 = sigma2_quadrature(window, beta);
        for (double delta : {0.05, 0.1, 0.2, 0.4}) {
            const double g = g_delta(window, delta, beta, sigma2);
            result.g_ratio.emplace_back(delta, g / (delta * delta * delta));
            csv.add("g_over_delta3")
                .add("R=10;t=" + format_double17(cfg.t) + ";delta=" + format_double17(delta))
                .add(result.g_ratio.back().second)
                .add(0.0);
            csv.end_row();
        }
    }

    // appendix functional ladder
    {
        std::vector<std::pair<double, double>> ladder;
        for (double R : {4.0, 8.0, 16.0, 32.0}) {
            const double phi = phi_appendix(R, cfg.t, beta);
            ladder.emplace_back(R, phi);
            result.phi_ladder.emplace_back(R, phi);
            csv.add("phi_appendix").add("R=" + format_double17(R)).add(phi).add(0.0);
            csv.end_row();
        }
        result.phi_fit = rate_fit(ladder);
        csv.add("phi_exponent")
            .add("ladder=4..32")
            .add(result.phi_fit.slope)
            .add(2.0 - 2.0 * cfg.beta + 0.2);
        csv.end_row();
    }

    csv.write(cfg.output_dir + "/kernels.csv");
    json out;
    out["provenance"] = provenance_block(cfg, 1);
    out["c_beta_estimate"] = result.c_beta_estimate;
    out["c_beta_spread"] = result.c_beta_spread;
    out["variance_constant"] = result.variance_constant_value;
    out["phi_exponent"] = result.phi_fit.slope;
    write_text_atomic(cfg.output_dir + "/kernels_result.json", out.dump(2) + "\n");
    return result;
}

NoiseCheckResult run_noise_check(const CampaignConfig& cfg) {
    cfg.validate();
    const int workers = resolve_workers(cfg.workers);
    const RieszExponent beta(cfg.beta);
    NoiseCheckResult result;
    result.out_dir = cfg.output_dir;

    const double dx = cfg.grid.automatic ? cfg.t / 32.0 : cfg.grid.dx;
    NoiseSpec spec{beta, dx, dx, 64, 8, mix64({cfg.seed, kTagNoise, 0}), 0.0};
    const CovarianceModel model = build_covariance(spec);

    const long n_fields = cfg.replicates;
    std::vector<NoiseField> fields(static_cast<std::size_t>(n_fields));
#pragma omp parallel for schedule(dynamic) num_threads(workers)
    for (long i = 0; i < n_fields; ++i)
        fields[i] = sample_field(model, spec, static_cast<std::uint64_t>(i));

    result.report = empirical_covariance(fields, 16);
    result.pass = result.report.max_abs_z <= 4.0 && result.report.max_abs_z_time <= 4.0;

    if (!cfg.dump_noise_path.empty()) dump_noise(fields.front(), cfg.dump_noise_path);

    Csv csv({"lag", "expected", "empirical", "stderr", "z"});
    for (std::size_t l = 0; l < result.report.lag.size(); ++l) {
        const double se = result.report.stderr_[l];
        csv.add(result.report.lag[l])
            .add(result.report.expected[l])
            .add(result.report.empirical[l])
            .add(se)
            .add(se > 0 ? (result.report.empirical[l] - result.report.expected[l]) / se : 0.0);
        csv.end_row();
    }
    csv.write(cfg.output_dir + "/noise_cov.csv");

    Csv tcsv({"time_lag", "cov", "stderr", "z"});
    for (std::size_t l = 0; l < result.report.time_lag_cov.size(); ++l) {
        const double se = result.report.time_lag_se[l];
        tcsv.add(static_cast<long>(l + 1))
            .add(result.report.time_lag_cov[l])
            .add(se)
            .add(se > 0 ? result.report.time_lag_cov[l] / se : 0.0);
        tcsv.end_row();
    }
    tcsv.write(cfg.output_dir + "/noise_timecov.csv");
    json out;
    out["provenance"] = provenance_block(cfg, workers);
    out["max_abs_z"] = result.report.max_abs_z;
    out["max_abs_z_time"] = result.report.max_abs_z_time;
    out["pass"] = result.pass;
    out["method"] = model.method == CovarianceModel::Method::Circulant ? "circulant"
                                                                        : "dense-factorization";
    write_text_atomic(cfg.output_dir + "/noise_result.json", out.dump(2) + "\n");
    return result;
}

SolverCheckResult run_solver_check(const CampaignConfig& cfg) {
    cfg.validate();
    const int workers = resolve_workers(cfg.workers);
    const RieszExponent beta(cfg.beta);
    const Diffusion diffusion = Diffusion::parse(cfg.diffusion);
    SolverCheckResult result;
    result.out_dir = cfg.output_dir;
    auto push = [&](const std::string& name, double value, double threshold, bool pass) {
        result.rows.push_back({name, value, threshold, pass});
    };

    const double R = 1.0;
    const double dx0 = cfg.t / 32.0;

    // zero noise keeps the constant state in both schemes
    {
        NoiseSpec spec = padded_spec(beta, cfg.t, dx0, R, mix64({cfg.seed, kTagSolver, 1}));
        NoiseField zero;
        zero.spec = spec;
        zero.replicate_id = 0;
        zero.id = noise_field_id(spec, 0);
        zero.increments.assign(static_cast<std::size_t>(spec.nt) * spec.nx, 0.0);
        double dev = 0.0;
        for (const auto& sol : {solve_leapfrog(zero, diffusion), solve_walsh(zero, diffusion)})
            for (double v : sol.u) dev = std::max(dev, std::abs(v - 1.0));
        push("zero_noise_max_dev", dev, 0.0, dev == 0.0);
    }

    // unit impulse reproduces the discrete Green's function (sigma == 1)
    {
        NoiseSpec spec = padded_spec(beta, cfg.t, dx0, R, mix64({cfg.seed, kTagSolver, 2}));
        NoiseField imp;
        imp.spec = spec;
        imp.replicate_id = 0;
        imp.id = noise_field_id(spec, 0);
        imp.increments.assign(static_cast<std::size_t>(spec.nt) * spec.nx, 0.0);
        const long j0 = spec.nx / 2;
        imp.increments[j0] = 1.0;  // cell (0, j0)
        const Diffusion one = Diffusion::constant(1.0);
        const GridSolution sol = solve_leapfrog(imp, one);
        double dev = 0.0;
        for (long n = 0; n <= spec.nt; ++n)
            for (long j = 0; j < spec.nx; ++j)
                dev = std::max(dev, std::abs(sol.at(n, j) - 1.0 -
                                             discrete_green(Scheme::Leapfrog, n, j, 0, j0)));
        push("impulse_green_max_dev", dev, 0.0, dev == 0.0);
    }

    // additive MC variance against the kernel quadrature
    {
        NoiseSpec spec = padded_spec(beta, cfg.t, dx0, R, mix64({cfg.seed, kTagSolver, 3}));
        const CovarianceModel model = build_covariance(spec);
        const Diffusion one = Diffusion::constant(1.0);
        const auto raw = collect_averages(model, spec, one, R, cfg.replicates, workers);
        const auto mc = estimate_sigma2_mc(raw, R, cfg.t, cfg.beta);
        const auto quad = estimate_sigma2_quadrature(1.0, R, cfg.t, beta);
        const double se = mc.sigma2 * std::sqrt(2.0 / static_cast<double>(cfg.replicates));
        const double z = (mc.sigma2 - quad.sigma2) / se;
        push("additive_variance_z", z, 4.0, std::abs(z) <= 4.0);
    }

    // scheme agreement under refinement (window averages, parity-free)
    {
        std::vector<std::pair<double, double>> ladder;
        for (double dx : {cfg.t / 8.0, cfg.t / 16.0, cfg.t / 32.0}) {
            NoiseSpec spec = padded_spec(beta, cfg.t, dx, R, mix64({cfg.seed, kTagSolver, 4}));
            const CovarianceModel model = build_covariance(spec);
            std::vector<double> devs;
            for (long rep = 0; rep < 8; ++rep) {
                const NoiseField field = sample_field(model, spec, rep);
                const GridSolution lf = solve_leapfrog(field, diffusion);
                const GridSolution ws = solve_walsh(field, diffusion);
                devs.push_back(std::abs(spatial_average(lf, R) - spatial_average(ws, R)));
            }
            ladder.emplace_back(1.0 / dx, median_of(devs));
        }
        const RateFit fit = rate_fit(ladder);  // vs 1/dx, so slope should be <= -0.5
        push("scheme_agreement_slope", fit.slope, -0.5, fit.slope <= -0.5 + 0.25);
        if (!cfg.dump_solution_path.empty()) {
            NoiseSpec spec =
                padded_spec(beta, cfg.t, cfg.t / 16.0, R, mix64({cfg.seed, kTagSolver, 4}));
            const CovarianceModel model = build_covariance(spec);
            const NoiseField field = sample_field(model, spec, 0);
            const GridSolution sol = solve_leapfrog(field, diffusion);
            // reuse the noise dump layout for the solution array
            NoiseField as_field;
            as_field.spec = sol.spec;
            as_field.spec.nt = sol.spec.nt + 1;
            as_field.replicate_id = 0;
            as_field.id = sol.noise_id;
            as_field.increments = sol.u;
            dump_noise(as_field, cfg.dump_solution_path);
        }
    }

    result.pass = true;
    for (const auto& row : result.rows) result.pass = result.pass && row.pass;

    Csv csv({"check", "value", "threshold", "pass"});
    for (const auto& row : result.rows) {
        csv.add(row.name).add(row.value).add(row.threshold).add(std::string(row.pass ? "1" : "0"));
        csv.end_row();
    }
    csv.write(cfg.output_dir + "/solver_check.csv");
    json out;
    out["provenance"] = provenance_block(cfg, workers);
    out["pass"] = result.pass;
    write_text_atomic(cfg.output_dir + "/solver_result.json", out.dump(2) + "\n");
    return result;
}

}  // namespace swe
