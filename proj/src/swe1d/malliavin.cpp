#include "swe1d/malliavin.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "swe1d/kernels.hpp"

namespace swe {

namespace {

void check_provenance(const GridSolution& sol, const NoiseField& noise, const char* who) {
    if (sol.noise_id != noise.id)
        throw std::invalid_argument(std::string(who) + ": solution and noise provenance mismatch");
}

// window sum of prefix row P (exclusive, length nx+1) over |j - k| <= h
inline double cone_window(const double* P, long nx, long j, long h) {
    const long lo = std::max<long>(j - h, 0);
    const long hi = std::min<long>(j + h, nx - 1);
    return P[hi + 1] - P[lo];
}

std::vector<double> trapezoid_weights(const NoiseSpec& spec, double R) {
    const long jlo = static_cast<long>(std::llround((-R - spec.origin) / spec.dx));
    const long jhi = static_cast<long>(std::llround((R - spec.origin) / spec.dx));
    if (jlo < 0 || jhi >= spec.nx || jlo >= jhi)
        throw std::invalid_argument("window exceeds the grid domain");
    std::vector<double> w(spec.nx, 0.0);
    for (long j = jlo; j <= jhi; ++j) w[j] = spec.dx;
    w[jlo] = w[jhi] = 0.5 * spec.dx;
    return w;
}

}  // namespace

double discrete_green(Scheme scheme, long n, long j, long base_m, long base_k) {
    if (n <= base_m) return 0.0;
    const long d = std::labs(j - base_k);
    const long h = n - base_m - 1;
    if (d > h) return 0.0;
    const double c = base_m == 0 ? 0.5 : 1.0;
    if (scheme == Scheme::WalshSum) return 0.5;  // continuum G inside the cone
    return ((d - h) % 2 == 0) ? c : 0.0;         // parity lattice of the stencil
}

DerivativeField first_derivative(const GridSolution& sol, const NoiseField& noise,
                                 const Diffusion& diffusion, long base_m, long base_k) {
    check_provenance(sol, noise, "first_derivative");
    const NoiseSpec& spec = sol.spec;
    const long nx = spec.nx, nt = spec.nt;
    if (base_m < 0 || base_m >= nt || base_k < 0 || base_k >= nx)
        throw std::invalid_argument("first_derivative: base outside grid");

    DerivativeField f;
    f.base_m = base_m;
    f.base_k = base_k;
    f.scheme = sol.scheme;
    f.noise_id = noise.id;
    f.nx = nx;
    f.nt = nt;
    f.values.assign(static_cast<std::size_t>(nt + 1) * nx, 0.0);
    const double seed = diffusion.sigma(sol.at(base_m, base_k));

    if (sol.scheme == Scheme::Leapfrog) {
        const double c = base_m == 0 ? 0.5 : 1.0;
        f.values[static_cast<std::size_t>(base_m + 1) * nx + base_k] = c * seed;
        for (long n = base_m + 1; n < nt; ++n) {
            const double* vm = f.values.data() + static_cast<std::size_t>(n - 1) * nx;
            const double* vc = f.values.data() + static_cast<std::size_t>(n) * nx;
            double* vn = f.values.data() + static_cast<std::size_t>(n + 1) * nx;
            const double* wn = noise.increments.data() + static_cast<std::size_t>(n) * nx;
            const double* un = sol.row(n);
            for (long j = 0; j < nx; ++j) {
                const double left = j > 0 ? vc[j - 1] : 0.0;
                const double right = j + 1 < nx ? vc[j + 1] : 0.0;
                vn[j] = left + right - vm[j] + diffusion.sigma_prime(un[j]) * wn[j] * vc[j];
            }
        }
        return f;
    }

    // Walsh path: direct transcription of the linear recursion
    std::vector<double> prefix(static_cast<std::size_t>(nt) * (nx + 1), 0.0);
    for (long n = base_m + 1; n <= nt; ++n) {
        double* vn = f.values.data() + static_cast<std::size_t>(n) * nx;
        const long h0 = n - base_m - 1;
        for (long j = std::max<long>(base_k - h0, 0); j <= std::min<long>(base_k + h0, nx - 1); ++j)
            vn[j] = 0.5 * seed;
        for (long m = base_m + 1; m < n; ++m) {
            const double* pm = prefix.data() + static_cast<std::size_t>(m) * (nx + 1);
            const long h = n - m - 1;
            for (long j = 0; j < nx; ++j) vn[j] += 0.5 * cone_window(pm, nx, j, h);
        }
        if (n < nt) {
            const double* um = sol.row(n);
            const double* wm = noise.increments.data() + static_cast<std::size_t>(n) * nx;
            double* pn = prefix.data() + static_cast<std::size_t>(n) * (nx + 1);
            double acc = 0.0;
            pn[0] = 0.0;
            for (long k = 0; k < nx; ++k) {
                acc += diffusion.sigma_prime(um[k]) * wm[k] * vn[k];
                pn[k + 1] = acc;
            }
        }
    }
    return f;
}

SecondDerivativeField second_derivative(const GridSolution& sol, const NoiseField& noise,
                                        const Diffusion& diffusion, const DerivativeField& d_rz,
                                        const DerivativeField& d_sy) {
    check_provenance(sol, noise, "second_derivative");
    if (d_rz.noise_id != noise.id || d_sy.noise_id != noise.id)
        throw std::invalid_argument("second_derivative: derivative field provenance mismatch");
    if (d_rz.scheme != sol.scheme || d_sy.scheme != sol.scheme)
        throw std::invalid_argument("second_derivative: scheme mismatch");
    if (!(d_rz.base_m < d_sy.base_m))
        throw std::invalid_argument("second_derivative: bases must be ordered r < s");

    const NoiseSpec& spec = sol.spec;
    const long nx = spec.nx, nt = spec.nt;
    const long m0 = d_sy.base_m, k0 = d_sy.base_k;

    SecondDerivativeField f;
    f.r_m = d_rz.base_m;
    f.r_k = d_rz.base_k;
    f.s_m = m0;
    f.s_k = k0;
    f.scheme = sol.scheme;
    f.noise_id = noise.id;
    f.nx = nx;
    f.nt = nt;
    f.values.assign(static_cast<std::size_t>(nt + 1) * nx, 0.0);

    const double seed = diffusion.sigma_prime(sol.at(m0, k0)) * d_rz.at(m0, k0);

    if (sol.scheme == Scheme::Leapfrog) {
        f.values[static_cast<std::size_t>(m0 + 1) * nx + k0] = seed;  // m0 >= 1 here
        for (long n = m0 + 1; n < nt; ++n) {
            const double* hm = f.values.data() + static_cast<std::size_t>(n - 1) * nx;
            const double* hc = f.values.data() + static_cast<std::size_t>(n) * nx;
            double* hn = f.values.data() + static_cast<std::size_t>(n + 1) * nx;
            const double* wn = noise.increments.data() + static_cast<std::size_t>(n) * nx;
            const double* un = sol.row(n);
            const double* vr = d_rz.values.data() + static_cast<std::size_t>(n) * nx;
            const double* vs = d_sy.values.data() + static_cast<std::size_t>(n) * nx;
            for (long j = 0; j < nx; ++j) {
                const double left = j > 0 ? hc[j - 1] : 0.0;
                const double right = j + 1 < nx ? hc[j + 1] : 0.0;
                hn[j] = left + right - hm[j] +
                        wn[j] * (diffusion.sigma_second(un[j]) * vr[j] * vs[j] +
                                 diffusion.sigma_prime(un[j]) * hc[j]);
            }
        }
        return f;
    }

    std::vector<double> prefix(static_cast<std::size_t>(nt) * (nx + 1), 0.0);
    for (long n = m0 + 1; n <= nt; ++n) {
        double* hn = f.values.data() + static_cast<std::size_t>(n) * nx;
        const long h0 = n - m0 - 1;
        for (long j = std::max<long>(k0 - h0, 0); j <= std::min<long>(k0 + h0, nx - 1); ++j)
            hn[j] = 0.5 * seed;
        for (long m = m0 + 1; m < n; ++m) {
            const double* pm = prefix.data() + static_cast<std::size_t>(m) * (nx + 1);
            const long h = n - m - 1;
            for (long j = 0; j < nx; ++j) hn[j] += 0.5 * cone_window(pm, nx, j, h);
        }
        if (n < nt) {
            const double* um = sol.row(n);
            const double* wm = noise.increments.data() + static_cast<std::size_t>(n) * nx;
            const double* vr = d_rz.values.data() + static_cast<std::size_t>(n) * nx;
            const double* vs = d_sy.values.data() + static_cast<std::size_t>(n) * nx;
            double* pn = prefix.data() + static_cast<std::size_t>(n) * (nx + 1);
            double acc = 0.0;
            pn[0] = 0.0;
            for (long k = 0; k < nx; ++k) {
                acc += wm[k] * (diffusion.sigma_second(um[k]) * vr[k] * vs[k] +
                                diffusion.sigma_prime(um[k]) * hn[k]);
                pn[k + 1] = acc;
            }
        }
    }
    return f;
}

double cone_violation(const DerivativeField& field) {
    double worst = 0.0;
    for (long n = 0; n <= field.nt; ++n) {
        const long h = n - field.base_m - 1;
        for (long j = 0; j < field.nx; ++j) {
            if (n > field.base_m && std::labs(j - field.base_k) <= h) continue;
            worst = std::max(worst, std::abs(field.at(n, j)));
        }
    }
    return worst;
}

RieszGram::RieszGram(const CovarianceModel& model, long nx) : model_(&model), nx_(nx) {
    if (model.method == CovarianceModel::Method::Circulant) {
        plan_ = std::make_unique<FftPlan>(model.embed_size);
        fa_re_.resize(model.embed_size);
        fa_im_.resize(model.embed_size);
        fb_re_.resize(model.embed_size);
        fb_im_.resize(model.embed_size);
    }
}

RieszGram::Forms RieszGram::row_forms(const double* a, const double* b) {
    Forms forms;
    if (model_->method == CovarianceModel::Method::Circulant) {
        const std::size_t M = model_->embed_size;
        auto transform = [&](const double* src, std::vector<double>& re, std::vector<double>& im) {
            fftw_complex* in = plan_->in();
            for (std::size_t k = 0; k < M; ++k) {
                in[k][0] = (k < static_cast<std::size_t>(nx_)) ? src[k] : 0.0;
                in[k][1] = 0.0;
            }
            plan_->execute();
            const fftw_complex* out = plan_->out();
            for (std::size_t k = 0; k < M; ++k) {
                re[k] = out[k][0];
                im[k] = out[k][1];
            }
        };
        transform(a, fa_re_, fa_im_);
        transform(b, fb_re_, fb_im_);
        double aa = 0.0, ab = 0.0, bb = 0.0;
        for (std::size_t k = 0; k < M; ++k) {
            const double lam = model_->spectrum[k];
            aa += lam * (fa_re_[k] * fa_re_[k] + fa_im_[k] * fa_im_[k]);
            bb += lam * (fb_re_[k] * fb_re_[k] + fb_im_[k] * fb_im_[k]);
            ab += lam * (fa_re_[k] * fb_re_[k] + fa_im_[k] * fb_im_[k]);
        }
        const double inv = 1.0 / static_cast<double>(M);
        forms.aa = aa * inv;
        forms.ab = ab * inv;
        forms.bb = bb * inv;
        return forms;
    }
    // dense model: direct Toeplitz forms
    for (long i = 0; i < nx_; ++i) {
        double ta = 0.0, tb = 0.0;
        for (long j = 0; j < nx_; ++j) {
            const double r = model_->row[std::labs(i - j)];
            ta += r * a[j];
            tb += r * b[j];
        }
        forms.aa += a[i] * ta;
        forms.ab += a[i] * tb;
        forms.bb += b[i] * tb;
    }
    return forms;
}

MalliavinReport assemble_report(const GridSolution& sol, const NoiseField& noise,
                                const CovarianceModel& model, const Diffusion& diffusion,
                                double R, double sigma2) {
    check_provenance(sol, noise, "assemble_report");
    if (!(sigma2 > 0.0)) throw std::invalid_argument("assemble_report: sigma2 must be positive");
    const NoiseSpec& spec = sol.spec;
    const long nx = spec.nx, nt = spec.nt;
    const double inv_sigma = 1.0 / std::sqrt(sigma2);
    const double t = spec.t(nt);

    MalliavinReport rep;
    rep.R = R;
    rep.sigma2 = sigma2;
    rep.nx = nx;
    rep.nt = nt;
    rep.df.assign(static_cast<std::size_t>(nt) * nx, 0.0);
    rep.w.assign(static_cast<std::size_t>(nt) * nx, 0.0);

    const std::vector<double> wtrap = trapezoid_weights(spec, R);

    if (sol.scheme == Scheme::Leapfrog) {
        // psi[n][j] = d(window average)/d(injection into u[n][j]); two rolling rows
        std::vector<double> psi(static_cast<std::size_t>(nt + 2) * nx, 0.0);
        std::copy(wtrap.begin(), wtrap.end(), psi.begin() + static_cast<std::size_t>(nt) * nx);
        for (long n = nt - 1; n >= 1; --n) {
            const double* p1 = psi.data() + static_cast<std::size_t>(n + 1) * nx;
            const double* p2 = psi.data() + static_cast<std::size_t>(n + 2) * nx;
            double* pc = psi.data() + static_cast<std::size_t>(n) * nx;
            const double* wn = noise.increments.data() + static_cast<std::size_t>(n) * nx;
            const double* un = sol.row(n);
            for (long j = 0; j < nx; ++j) {
                const double left = j > 0 ? p1[j - 1] : 0.0;
                const double right = j + 1 < nx ? p1[j + 1] : 0.0;
                pc[j] = left + right - p2[j] + diffusion.sigma_prime(un[j]) * wn[j] * p1[j];
            }
        }
        for (long m = 0; m < nt; ++m) {
            const double c = m == 0 ? 0.5 : 1.0;
            const double* um = sol.row(m);
            const double* pm1 = psi.data() + static_cast<std::size_t>(m + 1) * nx;
            double* dfm = rep.df.data() + static_cast<std::size_t>(m) * nx;
            for (long k = 0; k < nx; ++k) dfm[k] = c * diffusion.sigma(um[k]) * pm1[k] * inv_sigma;
        }
    } else {
        // Walsh adjoint: S[m][k] = sum_{n>m} (1/2) window sums of mu[n]
        std::vector<double> prefix(static_cast<std::size_t>(nt + 1) * (nx + 1), 0.0);
        auto build_prefix = [&](long n, const double* row) {
            double* pn = prefix.data() + static_cast<std::size_t>(n) * (nx + 1);
            double acc = 0.0;
            pn[0] = 0.0;
            for (long k = 0; k < nx; ++k) {
                acc += row[k];
                pn[k + 1] = acc;
            }
        };
        build_prefix(nt, wtrap.data());
        std::vector<double> mu(nx), S(nx);
        for (long m = nt - 1; m >= 0; --m) {
            std::fill(S.begin(), S.end(), 0.0);
            for (long n = m + 1; n <= nt; ++n) {
                const double* pn = prefix.data() + static_cast<std::size_t>(n) * (nx + 1);
                const long h = n - m - 1;
                for (long k = 0; k < nx; ++k) S[k] += 0.5 * cone_window(pn, nx, k, h);
            }
            const double* um = sol.row(m);
            const double* wm = noise.increments.data() + static_cast<std::size_t>(m) * nx;
            double* dfm = rep.df.data() + static_cast<std::size_t>(m) * nx;
            for (long k = 0; k < nx; ++k) {
                dfm[k] = diffusion.sigma(um[k]) * S[k] * inv_sigma;
                mu[k] = diffusion.sigma_prime(um[k]) * wm[k] * S[k];
            }
            build_prefix(m, mu.data());
        }
    }

    for (long m = 0; m < nt; ++m) {
        const double lag = t - spec.t(m);
        const double* um = sol.row(m);
        double* wm = rep.w.data() + static_cast<std::size_t>(m) * nx;
        for (long k = 0; k < nx; ++k)
            wm[k] = phi_window(R, lag, spec.x(k)) * diffusion.sigma(um[k]) * inv_sigma;
    }

    RieszGram gram(model, nx);
    double gg = 0.0, gw = 0.0;
    for (long m = 0; m < nt; ++m) {
        const auto forms = gram.row_forms(rep.df.data() + static_cast<std::size_t>(m) * nx,
                                          rep.w.data() + static_cast<std::size_t>(m) * nx);
        gg += forms.aa;
        gw += forms.ab;
    }
    rep.gram_norm = gg;
    rep.stein_pairing = gw;
    return rep;
}

SmallBallTable small_ball_probe(std::span<const double> gram_norms,
                                std::span<const double> eps_grid) {
    if (gram_norms.size() < 1000)
        throw std::invalid_argument("small_ball_probe: need >= 1000 reports");
    std::vector<double> sorted(gram_norms.begin(), gram_norms.end());
    std::sort(sorted.begin(), sorted.end());
    SmallBallTable table;
    for (double eps : eps_grid) {
        const auto it = std::lower_bound(sorted.begin(), sorted.end(), eps);
        table.eps.push_back(eps);
        table.fraction.push_back(static_cast<double>(it - sorted.begin()) /
                                 static_cast<double>(sorted.size()));
    }
    table.min_gram = sorted.front();
    table.quantile_01 = sorted[static_cast<std::size_t>(0.01 * (sorted.size() - 1))];
    return table;
}

double d2_norm_estimate(const GridSolution& sol, const NoiseField& noise,
                        const Diffusion& diffusion, double R, double sigma2, long m_count,
                        long k_count) {
    if (!(sigma2 > 0.0)) throw std::invalid_argument("d2_norm_estimate: sigma2 must be positive");
    const NoiseSpec& spec = sol.spec;
    const long nt = spec.nt;
    const double t = spec.t(nt);
    const double inv_sigma = 1.0 / std::sqrt(sigma2);
    const RieszExponent beta = spec.beta;

    // midpoint strata: m over (0, nt), k over [-(R+t), R+t]
    std::vector<long> ms(m_count), ks(k_count);
    for (long i = 0; i < m_count; ++i)
        ms[i] = std::clamp<long>(static_cast<long>((i + 0.5) * nt / m_count), 1, nt - 1);
    const double span = 2.0 * (R + t);
    const double dxc = span / static_cast<double>(k_count);
    for (long i = 0; i < k_count; ++i) {
        const double xc = -(R + t) + (i + 0.5) * dxc;
        ks[i] = std::clamp<long>(static_cast<long>(std::llround((xc - spec.origin) / spec.dx)), 0,
                                 spec.nx - 1);
    }
    const double dtc = t / static_cast<double>(m_count);

    std::vector<DerivativeField> firsts(static_cast<std::size_t>(m_count) * k_count);
    for (long i = 0; i < m_count; ++i)
        for (long j = 0; j < k_count; ++j)
            firsts[i * k_count + j] = first_derivative(sol, noise, diffusion, ms[i], ks[j]);

    // coarse-cell Gram weights
    const double strength = hurst_normalization(beta);
    std::vector<double> wsp(k_count);
    for (long l = 0; l < k_count; ++l) wsp[l] = strength * cell_covariance(dxc, l, beta);

    double total = 0.0;
    std::vector<double> B(static_cast<std::size_t>(k_count) * k_count);
    for (long mr = 0; mr < m_count; ++mr) {
        for (long msi = mr + 1; msi < m_count; ++msi) {
            for (long kr = 0; kr < k_count; ++kr) {
                const auto& vr = firsts[mr * k_count + kr];
                for (long ky = 0; ky < k_count; ++ky) {
                    const auto& vs = firsts[msi * k_count + ky];
                    const auto d2 = second_derivative(sol, noise, diffusion, vr, vs);
                    B[ky * k_count + kr] = window_trapezoid_raw(
                        d2.values.data() + static_cast<std::size_t>(nt) * spec.nx, spec, R);
                }
            }
            // quadratic form sum_{ky,ky',kr,kr'} B[ky][kr] B[ky'][kr'] wsp(|ky-ky'|) wsp(|kr-kr'|)
            double block = 0.0;
            for (long a = 0; a < k_count; ++a)
                for (long b = 0; b < k_count; ++b)
                    for (long c = 0; c < k_count; ++c)
                        for (long d = 0; d < k_count; ++d)
                            block += B[a * k_count + c] * B[b * k_count + d] *
                                     wsp[std::labs(a - b)] * wsp[std::labs(c - d)];
            total += 2.0 * dtc * dtc * block;
        }
    }
    return std::sqrt(std::max(0.0, total)) * inv_sigma;
}

}  // namespace swe
