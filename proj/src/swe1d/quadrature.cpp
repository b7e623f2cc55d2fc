#include "swe1d/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <queue>

namespace swe {

namespace {

// 15-point Kronrod / 7-point Gauss pair (QUADPACK dqk15 abscissae).
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a, b, value, error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

Segment gk15(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double resk = 0.0, resg = 0.0;
    const double fc = f(c);
    resk += kWgk[7] * fc;
    resg += kWg[3] * fc;
    for (int i = 0; i < 7; ++i) {
        const double dx = h * kXgk[i];
        const double fsum = f(c - dx) + f(c + dx);
        resk += kWgk[i] * fsum;
        if (i % 2 == 1) resg += kWg[i / 2] * fsum;
    }
    const double value = resk * h;
    const double err = std::abs((resk - resg) * h);
    return {a, b, value, err};
}

}  // namespace

const GaussLegendreRule& gauss_legendre_rule(int n) {
    static std::mutex mu;
    static std::map<int, GaussLegendreRule> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    GaussLegendreRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        // Newton iteration from the Chebyshev estimate of the i-th root of P_n.
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    return cache.emplace(n, std::move(rule)).first->second;
}

double gauss_legendre(const std::function<double(double)>& f, double a, double b, int n) {
    const auto& rule = gauss_legendre_rule(n);
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += rule.weights[i] * f(c + h * rule.nodes[i]);
    return acc * h;
}

double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          const AdaptiveOptions& opts, std::span<const double> splits) {
    if (a == b) return 0.0;

    std::vector<double> pts;
    pts.push_back(a);
    for (double s : splits)
        if (s > a && s < b) pts.push_back(s);
    pts.push_back(b);
    std::sort(pts.begin(), pts.end());

    std::priority_queue<Segment> heap;
    double total = 0.0, err = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        auto seg = gk15(f, pts[i], pts[i + 1]);
        total += seg.value;
        err += seg.error;
        heap.push(seg);
    }

    int n_intervals = static_cast<int>(pts.size()) - 1;
    while (err > std::max(opts.abs_tol, opts.rel_tol * std::abs(total))) {
        if (n_intervals >= opts.max_intervals || heap.empty())
            throw QuadratureFailure("adaptive GK15 did not converge: error " +
                                    std::to_string(err) + " over " +
                                    std::to_string(n_intervals) + " intervals");
        Segment worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b)
            throw QuadratureFailure("adaptive GK15 stalled at machine resolution");
        auto left = gk15(f, worst.a, mid);
        auto right = gk15(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++n_intervals;
    }
    return total;
}

double integrate_power_left(const std::function<double(double)>& f, double h, double beta,
                            const AdaptiveOptions& opts) {
    if (h <= 0.0) return 0.0;
    const double q = 1.0 - beta;
    const double vmax = std::pow(h, q);
    auto g = [&](double v) { return f(std::pow(v, 1.0 / q)) / q; };
    return integrate_adaptive(g, 0.0, vmax, opts);
}

}  // namespace swe
