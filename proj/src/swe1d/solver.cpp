#include "swe1d/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "swe1d/hot.hpp"

namespace swe {

namespace {

void check_row_finite(const double* row, long nx, long step) {
    double m = 0.0;
    for (long j = 0; j < nx; ++j) m = std::max(m, std::abs(row[j]));
    if (!(m < 1e150)) {
        for (long j = 0; j < nx; ++j)
            if (!std::isfinite(row[j]) || !(std::abs(row[j]) < 1e150))
                throw NumericalBlowup(step, j);
        throw NumericalBlowup(step, -1);
    }
}

void leapfrog_row(const Diffusion& d, const double* um, const double* uc, const double* w,
                  double* un, long nx) {
    switch (d.kind) {
        case Diffusion::Kind::Sin2:
            hot::leapfrog_row_sin2(um, uc, w, un, static_cast<std::size_t>(nx));
            break;
        case Diffusion::Kind::Constant:
            hot::leapfrog_row_const(d.k, um, uc, w, un, static_cast<std::size_t>(nx));
            break;
        case Diffusion::Kind::Sqrt1p:
            hot::leapfrog_row_sqrt1p(um, uc, w, un, static_cast<std::size_t>(nx));
            break;
    }
    // boundary cells with constant ghost value 1 (outside every observed cone)
    un[0] = 1.0 + uc[1] - um[0] + d.sigma(uc[0]) * w[0];
    un[nx - 1] = uc[nx - 2] + 1.0 - um[nx - 1] + d.sigma(uc[nx - 1]) * w[nx - 1];
}

void leapfrog_first_row(const Diffusion& d, const double* w, double* u1, long nx) {
    // averaged stencil on u0 == 1 with half-weight noise (flat start)
    const double s1 = d.sigma(1.0);
    for (long j = 0; j < nx; ++j) u1[j] = 1.0 + 0.5 * s1 * w[j];
}

}  // namespace

NoiseSpec padded_spec(const RieszExponent& beta, double t, double dx, double R,
                      std::uint64_t seed, long pad_cells) {
    const long half = static_cast<long>(std::llround((R + t) / dx)) + pad_cells;
    const long nt = static_cast<long>(std::llround(t / dx));
    NoiseSpec spec{beta, dx, dx, 2 * half + 1, nt, seed, -static_cast<double>(half) * dx};
    spec.validate();
    return spec;
}

GridSolution solve_walsh(const NoiseField& noise, const Diffusion& diffusion) {
    const NoiseSpec& spec = noise.spec;
    spec.validate();
    const long nx = spec.nx, nt = spec.nt;

    GridSolution sol;
    sol.spec = spec;
    sol.scheme = Scheme::WalshSum;
    sol.noise_id = noise.id;
    sol.u.assign(static_cast<std::size_t>(nt + 1) * nx, 1.0);

    // prefix[m][k] = sum_{i<k} sigma(u[m][i]) dW[m][i]
    std::vector<double> prefix(static_cast<std::size_t>(nt) * (nx + 1), 0.0);
    for (long n = 1; n <= nt; ++n) {
        {
            const long m = n - 1;  // prefix row for the newly available level
            const double* um = sol.row(m);
            const double* wm = noise.increments.data() + static_cast<std::size_t>(m) * nx;
            double* pm = prefix.data() + static_cast<std::size_t>(m) * (nx + 1);
            double acc = 0.0;
            pm[0] = 0.0;
            for (long k = 0; k < nx; ++k) {
                acc += diffusion.sigma(um[k]) * wm[k];
                pm[k + 1] = acc;
            }
        }
        double* un = sol.u.data() + static_cast<std::size_t>(n) * nx;
        for (long m = 0; m < n; ++m) {
            const double* pm = prefix.data() + static_cast<std::size_t>(m) * (nx + 1);
            const long h = n - m - 1;  // strict cone: |j-k| dx < (n-m) dt
            for (long j = 0; j < nx; ++j) {
                const long lo = std::max<long>(j - h, 0);
                const long hi = std::min<long>(j + h, nx - 1);
                un[j] += 0.5 * (pm[hi + 1] - pm[lo]);
            }
        }
        check_row_finite(un, nx, n);
    }
    return sol;
}

GridSolution solve_leapfrog(const NoiseField& noise, const Diffusion& diffusion) {
    const NoiseSpec& spec = noise.spec;
    spec.validate();
    if (spec.dt != spec.dx) throw std::invalid_argument("solve_leapfrog: requires dt == dx");
    const long nx = spec.nx, nt = spec.nt;

    GridSolution sol;
    sol.spec = spec;
    sol.scheme = Scheme::Leapfrog;
    sol.noise_id = noise.id;
    sol.u.assign(static_cast<std::size_t>(nt + 1) * nx, 1.0);

    leapfrog_first_row(diffusion, noise.increments.data(), sol.u.data() + nx, nx);
    check_row_finite(sol.row(1), nx, 1);
    for (long n = 1; n < nt; ++n) {
        leapfrog_row(diffusion, sol.row(n - 1), sol.row(n),
                     noise.increments.data() + static_cast<std::size_t>(n) * nx,
                     sol.u.data() + static_cast<std::size_t>(n + 1) * nx, nx);
        check_row_finite(sol.row(n + 1), nx, n + 1);
    }
    return sol;
}

DiscrepancyReport cross_validate(const GridSolution& a, const GridSolution& b, long jlo,
                                 long jhi) {
    if (a.spec.nx != b.spec.nx || a.spec.nt != b.spec.nt || a.spec.dx != b.spec.dx ||
        a.spec.dt != b.spec.dt)
        throw std::invalid_argument("cross_validate: mismatched grids");
    if (jlo < 0 || jhi >= a.spec.nx || jlo > jhi)
        throw std::invalid_argument("cross_validate: bad region");
    DiscrepancyReport rep;
    double sq = 0.0;
    std::size_t count = 0;
    rep.per_time_max.resize(a.spec.nt + 1, 0.0);
    for (long n = 0; n <= a.spec.nt; ++n) {
        double m = 0.0;
        for (long j = jlo; j <= jhi; ++j) {
            const double d = std::abs(a.at(n, j) - b.at(n, j));
            m = std::max(m, d);
            sq += d * d;
            ++count;
        }
        rep.per_time_max[n] = m;
        rep.max_abs = std::max(rep.max_abs, m);
    }
    rep.rms = std::sqrt(sq / static_cast<double>(count));
    return rep;
}

NoiseSpec refine_spec(const NoiseSpec& coarse) {
    NoiseSpec fine = coarse;
    fine.dt = 0.5 * coarse.dt;
    fine.dx = 0.5 * coarse.dx;
    fine.nt = 2 * coarse.nt;
    fine.nx = 2 * coarse.nx;
    return fine;
}

NoiseField coarsen_noise(const NoiseField& fine) {
    const NoiseSpec& fs = fine.spec;
    if (fs.nt % 2 != 0 || fs.nx % 2 != 0)
        throw std::invalid_argument("coarsen_noise: fine grid not refinable (need even nt, nx)");
    NoiseSpec cs = fs;
    cs.dt = 2.0 * fs.dt;
    cs.dx = 2.0 * fs.dx;
    cs.nt = fs.nt / 2;
    cs.nx = fs.nx / 2;  // left-edge cells: coarse cell k = fine cells 2k, 2k+1
    NoiseField coarse;
    coarse.spec = cs;
    coarse.replicate_id = fine.replicate_id;
    coarse.id = noise_field_id(cs, fine.replicate_id);
    coarse.increments.assign(static_cast<std::size_t>(cs.nt) * cs.nx, 0.0);
    for (long m = 0; m < cs.nt; ++m) {
        const double* f0 = fine.increments.data() + static_cast<std::size_t>(2 * m) * fs.nx;
        const double* f1 = fine.increments.data() + static_cast<std::size_t>(2 * m + 1) * fs.nx;
        double* c = coarse.increments.data() + static_cast<std::size_t>(m) * cs.nx;
        for (long k = 0; k < cs.nx; ++k) c[k] = f0[2 * k] + f0[2 * k + 1] + f1[2 * k] + f1[2 * k + 1];
    }
    return coarse;
}

double window_trapezoid(const double* row, const NoiseSpec& spec, double R) {
    const long jlo = static_cast<long>(std::llround((-R - spec.origin) / spec.dx));
    const long jhi = static_cast<long>(std::llround((R - spec.origin) / spec.dx));
    if (jlo < 0 || jhi >= spec.nx || jlo >= jhi)
        throw std::invalid_argument("window_trapezoid: window exceeds the grid domain");
    double acc = 0.5 * ((row[jlo] - 1.0) + (row[jhi] - 1.0));
    for (long j = jlo + 1; j < jhi; ++j) acc += row[j] - 1.0;
    return acc * spec.dx;
}

double window_trapezoid_raw(const double* row, const NoiseSpec& spec, double R) {
    const long jlo = static_cast<long>(std::llround((-R - spec.origin) / spec.dx));
    const long jhi = static_cast<long>(std::llround((R - spec.origin) / spec.dx));
    if (jlo < 0 || jhi >= spec.nx || jlo >= jhi)
        throw std::invalid_argument("window_trapezoid_raw: window exceeds the grid domain");
    double acc = 0.5 * (row[jlo] + row[jhi]);
    for (long j = jlo + 1; j < jhi; ++j) acc += row[j];
    return acc * spec.dx;
}

double leapfrog_window_average(const NoiseSpec& spec, std::uint64_t replicate_id,
                               const Diffusion& diffusion, double R, NoiseWorkspace& ws) {
    spec.validate();
    if (spec.dt != spec.dx)
        throw std::invalid_argument("leapfrog_window_average: requires dt == dx");
    const long nx = spec.nx, nt = spec.nt;

    std::vector<double> um(nx, 1.0), uc(nx), un(nx);
    std::vector<double> w0(nx), w1(nx);

    ws.sample_pair(spec, replicate_id, 0, w0.data(), nt > 1 ? w1.data() : nullptr);
    leapfrog_first_row(diffusion, w0.data(), uc.data(), nx);
    check_row_finite(uc.data(), nx, 1);
    for (long n = 1; n < nt; ++n) {
        const double* w;
        if (n % 2 == 1) {
            w = w1.data();
        } else {
            ws.sample_pair(spec, replicate_id, n / 2, w0.data(),
                           n + 1 < nt ? w1.data() : nullptr);
            w = w0.data();
        }
        leapfrog_row(diffusion, um.data(), uc.data(), w, un.data(), nx);
        check_row_finite(un.data(), nx, n + 1);
        std::swap(um, uc);
        std::swap(uc, un);
    }
    return window_trapezoid(uc.data(), spec, R);
}

}  // namespace swe
