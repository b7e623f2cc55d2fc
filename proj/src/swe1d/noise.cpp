#include "swe1d/noise.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <numeric>

#include "swe1d/hot.hpp"

namespace swe {

void NoiseSpec::validate() const {
    if (!(dt > 0.0) || !(dx > 0.0)) throw std::invalid_argument("NoiseSpec: dt, dx must be positive");
    if (nx < 2) throw std::invalid_argument("NoiseSpec: nx must be >= 2");
    if (nt < 1) throw std::invalid_argument("NoiseSpec: nt must be >= 1");
}

CovarianceModel build_covariance(const NoiseSpec& spec) {
    spec.validate();
    CovarianceModel model;
    const double strength = spec.dt * hurst_normalization(spec.beta);

    const std::size_t nx = static_cast<std::size_t>(spec.nx);
    const std::size_t M = next_fft_size(2 * (nx - 1));
    model.embed_size = M;

    // even embedding row, true covariance out to lag M/2
    std::vector<double> embed(M);
    for (std::size_t l = 0; l <= M / 2; ++l) {
        const double c = strength * cell_covariance(spec.dx, static_cast<long>(l), spec.beta);
        embed[l] = c;
        if (l != 0 && l != M - l) embed[M - l] = c;
    }
    model.row.assign(embed.begin(), embed.begin() + nx);

    FftPlan plan(M);
    for (std::size_t k = 0; k < M; ++k) {
        plan.in()[k][0] = embed[k];
        plan.in()[k][1] = 0.0;
    }
    plan.execute();
    model.spectrum.resize(M);
    double max_eig = 0.0, min_eig = 0.0;
    for (std::size_t k = 0; k < M; ++k) {
        model.spectrum[k] = plan.out()[k][0];
        max_eig = std::max(max_eig, model.spectrum[k]);
        min_eig = std::min(min_eig, model.spectrum[k]);
    }
    model.min_relative_eigenvalue = max_eig > 0.0 ? min_eig / max_eig : 0.0;

    if (min_eig >= -1e-10 * max_eig) {
        for (double& e : model.spectrum) {
            if (e < 0.0) {
                e = 0.0;
                ++model.clipped;
            }
        }
        model.method = CovarianceModel::Method::Circulant;
        model.sqrt_spectrum.resize(M);
        for (std::size_t k = 0; k < M; ++k) model.sqrt_spectrum[k] = std::sqrt(model.spectrum[k]);
        return model;
    }

    if (spec.nx > 2048)
        throw CovarianceEmbeddingFailure(
            "circulant spectrum negative beyond tolerance (min/max = " +
            std::to_string(model.min_relative_eigenvalue) + ") and nx > 2048");

    // dense symmetric factorization of the Toeplitz covariance
    model.method = CovarianceModel::Method::DenseFactorization;
    const long n = spec.nx;
    std::vector<double>& L = model.cholesky;
    L.assign(static_cast<std::size_t>(n) * n, 0.0);
    auto toep = [&](long i, long j) { return model.row[static_cast<std::size_t>(std::labs(i - j))]; };
    for (long j = 0; j < n; ++j) {
        double d = toep(j, j);
        for (long k = 0; k < j; ++k) d -= L[j * n + k] * L[j * n + k];
        if (!(d > 0.0))
            throw CovarianceEmbeddingFailure("dense factorization hit a nonpositive pivot");
        const double lj = std::sqrt(d);
        L[j * n + j] = lj;
        for (long i = j + 1; i < n; ++i) {
            double s = toep(i, j);
            for (long k = 0; k < j; ++k) s -= L[i * n + k] * L[j * n + k];
            L[i * n + j] = s / lj;
        }
    }
    return model;
}

std::uint64_t noise_field_id(const NoiseSpec& spec, std::uint64_t replicate_id) {
    std::uint64_t dt_bits, dx_bits, beta_bits;
    std::memcpy(&dt_bits, &spec.dt, 8);
    std::memcpy(&dx_bits, &spec.dx, 8);
    std::memcpy(&beta_bits, &spec.beta.beta, 8);
    return mix64({spec.seed, replicate_id, static_cast<std::uint64_t>(spec.nx),
                  static_cast<std::uint64_t>(spec.nt), dt_bits, dx_bits, beta_bits});
}

NoiseWorkspace::NoiseWorkspace(const CovarianceModel& model) : model_(&model) {
    if (model.method == CovarianceModel::Method::Circulant) {
        plan_ = std::make_unique<FftPlan>(model.embed_size);
        normals_.resize(2 * model.embed_size);
    }
}

void NoiseWorkspace::sample_pair(const NoiseSpec& spec, std::uint64_t replicate_id,
                                 long pair_index, double* row0, double* row1) {
    Xoshiro256pp rng(mix64({spec.seed, replicate_id, static_cast<std::uint64_t>(pair_index),
                            0x6e6f697365ULL}));  // "noise"
    const std::size_t nx = static_cast<std::size_t>(spec.nx);

    if (model_->method == CovarianceModel::Method::Circulant) {
        const std::size_t M = model_->embed_size;
        // two independent rows per complex transform: real and imaginary parts
        fill_standard_normal(rng, normals_);  // 2M draws: (a_k, b_k) interleaved
        hot::scale_into_complex(normals_.data(), model_->sqrt_spectrum.data(),
                                reinterpret_cast<double*>(plan_->in()), M);
        plan_->execute();
        const double inv = 1.0 / std::sqrt(static_cast<double>(M));
        const fftw_complex* out = plan_->out();
        for (std::size_t j = 0; j < nx; ++j) row0[j] = out[j][0] * inv;
        if (row1)
            for (std::size_t j = 0; j < nx; ++j) row1[j] = out[j][1] * inv;
        return;
    }

    // dense path: L * z per row
    const long n = spec.nx;
    std::vector<double> z(nx);
    const std::vector<double>& L = model_->cholesky;
    auto apply = [&](const double* zz, double* dst) {
        for (long i = 0; i < n; ++i) {
            double acc = 0.0;
            const double* Li = L.data() + static_cast<std::size_t>(i) * n;
            for (long k = 0; k <= i; ++k) acc += Li[k] * zz[k];
            dst[i] = acc;
        }
    };
    fill_standard_normal(rng, z);
    apply(z.data(), row0);
    if (row1) {
        fill_standard_normal(rng, z);
        apply(z.data(), row1);
    }
}

NoiseField sample_field(const CovarianceModel& model, const NoiseSpec& spec,
                        std::uint64_t replicate_id) {
    spec.validate();
    NoiseField field;
    field.spec = spec;
    field.replicate_id = replicate_id;
    field.id = noise_field_id(spec, replicate_id);
    field.increments.resize(static_cast<std::size_t>(spec.nt) * spec.nx);
    NoiseWorkspace ws(model);
    for (long p = 0; 2 * p < spec.nt; ++p) {
        double* r0 = field.increments.data() + static_cast<std::size_t>(2 * p) * spec.nx;
        double* r1 = (2 * p + 1 < spec.nt)
                         ? field.increments.data() + static_cast<std::size_t>(2 * p + 1) * spec.nx
                         : nullptr;
        ws.sample_pair(spec, replicate_id, p, r0, r1);
    }
    return field;
}

CovarianceReport empirical_covariance(std::span<const NoiseField> fields, long max_lag,
                                      long max_time_lag) {
    if (fields.size() < 2) throw std::invalid_argument("empirical_covariance: need >= 2 fields");
    const NoiseSpec& spec = fields.front().spec;
    for (const auto& f : fields) {
        if (f.spec.nx != spec.nx || f.spec.nt != spec.nt || f.spec.dx != spec.dx ||
            f.spec.dt != spec.dt || f.spec.beta.beta != spec.beta.beta)
            throw std::invalid_argument("empirical_covariance: mismatched specs");
    }
    const long nx = spec.nx;
    CovarianceReport rep;
    const auto model_row = build_covariance(spec).row;

    const std::size_t n_rows = fields.size() * static_cast<std::size_t>(spec.nt);
    std::vector<double> means(n_rows);
    for (long lag = 0; lag <= max_lag; ++lag) {
        std::size_t r = 0;
        for (const auto& f : fields) {
            for (long n = 0; n < spec.nt; ++n, ++r) {
                const double* row = f.increments.data() + static_cast<std::size_t>(n) * nx;
                double acc = 0.0;
                for (long j = 0; j + lag < nx; ++j) acc += row[j] * row[j + lag];
                means[r] = acc / static_cast<double>(nx - lag);
            }
        }
        const double mean = std::accumulate(means.begin(), means.end(), 0.0) / n_rows;
        double var = 0.0;
        for (double m : means) var += (m - mean) * (m - mean);
        var /= static_cast<double>(n_rows - 1);
        const double se = std::sqrt(var / static_cast<double>(n_rows));
        rep.lag.push_back(static_cast<double>(lag));
        rep.expected.push_back(model_row[lag]);
        rep.empirical.push_back(mean);
        rep.stderr_.push_back(se);
        if (se > 0.0) rep.max_abs_z = std::max(rep.max_abs_z, std::abs(mean - model_row[lag]) / se);
    }

    // whiteness in time: lag-0-in-space covariance across rows tau apart,
    // one observation per field (fields are independent)
    for (long tau = 1; tau <= std::min<long>(max_time_lag, spec.nt - 1); ++tau) {
        std::vector<double> per_field(fields.size());
        for (std::size_t fi = 0; fi < fields.size(); ++fi) {
            const auto& f = fields[fi];
            double acc = 0.0;
            long cnt = 0;
            for (long n = 0; n + tau < spec.nt; ++n) {
                const double* a = f.increments.data() + static_cast<std::size_t>(n) * nx;
                const double* b = f.increments.data() + static_cast<std::size_t>(n + tau) * nx;
                for (long j = 0; j < nx; ++j) acc += a[j] * b[j];
                cnt += nx;
            }
            per_field[fi] = acc / static_cast<double>(cnt);
        }
        const double mean =
            std::accumulate(per_field.begin(), per_field.end(), 0.0) / per_field.size();
        double var = 0.0;
        for (double m : per_field) var += (m - mean) * (m - mean);
        var /= static_cast<double>(per_field.size() - 1);
        const double se = std::sqrt(var / static_cast<double>(per_field.size()));
        rep.time_lag_cov.push_back(mean);
        rep.time_lag_se.push_back(se);
        if (se > 0.0) rep.max_abs_z_time = std::max(rep.max_abs_z_time, std::abs(mean) / se);
    }
    return rep;
}

namespace {
constexpr char kNoiseMagic[8] = {'S', 'W', 'E', '1', 'N', 'O', 'I', 'S'};
constexpr std::uint32_t kNoiseVersion = 1;

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
}  // namespace

void dump_noise(const NoiseField& field, const std::string& path) {
    const std::string tmp = path + ".tmp";
    std::unique_ptr<std::FILE, FileCloser> f(std::fopen(tmp.c_str(), "wb"));
    if (!f) throw std::runtime_error("dump_noise: cannot open " + tmp);
    auto put = [&](const void* p, std::size_t n) {
        if (std::fwrite(p, 1, n, f.get()) != n) throw std::runtime_error("dump_noise: short write");
    };
    put(kNoiseMagic, 8);
    put(&kNoiseVersion, 4);
    put(&field.spec.beta.beta, 8);
    put(&field.spec.dt, 8);
    put(&field.spec.dx, 8);
    const std::uint64_t nx = field.spec.nx, nt = field.spec.nt;
    put(&nx, 8);
    put(&nt, 8);
    put(&field.spec.seed, 8);
    put(&field.spec.origin, 8);
    put(&field.replicate_id, 8);
    put(field.increments.data(), field.increments.size() * sizeof(double));
    f.reset();
    std::filesystem::rename(tmp, path);
}

NoiseField load_noise(const std::string& path) {
    std::unique_ptr<std::FILE, FileCloser> f(std::fopen(path.c_str(), "rb"));
    if (!f) throw std::runtime_error("load_noise: cannot open " + path);
    auto get = [&](void* p, std::size_t n) {
        if (std::fread(p, 1, n, f.get()) != n) throw std::runtime_error("load_noise: short read");
    };
    char magic[8];
    std::uint32_t version;
    get(magic, 8);
    get(&version, 4);
    if (std::memcmp(magic, kNoiseMagic, 8) != 0 || version != kNoiseVersion)
        throw std::runtime_error("load_noise: bad header");
    double beta, dt, dx, origin;
    std::uint64_t nx, nt, seed, replicate;
    get(&beta, 8);
    get(&dt, 8);
    get(&dx, 8);
    get(&nx, 8);
    get(&nt, 8);
    get(&seed, 8);
    get(&origin, 8);
    get(&replicate, 8);
    NoiseField field{.increments = {},
                     .spec = NoiseSpec{RieszExponent(beta), dt, dx, static_cast<long>(nx),
                                       static_cast<long>(nt), seed, origin},
                     .replicate_id = replicate,
                     .id = 0};
    field.id = noise_field_id(field.spec, replicate);
    field.increments.resize(nx * nt);
    get(field.increments.data(), field.increments.size() * sizeof(double));
    return field;
}

}  // namespace swe
