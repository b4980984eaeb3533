#include "bvwave/timefun.hpp"

#include <algorithm>
#include <cmath>

#include "bvwave/errors.hpp"

namespace bvwave {

double StepFunction::operator()(double t) const {
    // value on (breakpoints[i], breakpoints[i+1]], left value at interior breakpoints
    const auto it = std::lower_bound(breakpoints.begin() + 1, breakpoints.end(), t);
    size_t i = static_cast<size_t>(it - breakpoints.begin()) - 1;
    if (i >= values.size()) i = values.size() - 1;
    return values[i];
}

double StepFunction::integral() const {
    double s = 0;
    for (size_t i = 0; i < values.size(); ++i)
        s += values[i] * (breakpoints[i + 1] - breakpoints[i]);
    return s;
}

double StepFunction::total_variation() const {
    double s = 0;
    for (size_t i = 1; i < values.size(); ++i) s += std::abs(values[i] - values[i - 1]);
    return s;
}

void StepFunction::merge_equal(double tol) {
    std::vector<double> bp{breakpoints.front()};
    std::vector<double> vs{values.front()};
    for (size_t i = 1; i < values.size(); ++i) {
        if (std::abs(values[i] - vs.back()) <= tol) continue; // extend current segment
        bp.push_back(breakpoints[i]);
        vs.push_back(values[i]);
    }
    bp.push_back(breakpoints.back());
    breakpoints = std::move(bp);
    values = std::move(vs);
}

StepFunction constant_step(double value, double T) {
    StepFunction u;
    u.breakpoints = {0.0, T};
    u.values = {value};
    return u;
}

double l1_distance(const StepFunction& a, const StepFunction& b) {
    std::vector<double> cuts;
    cuts.reserve(a.breakpoints.size() + b.breakpoints.size());
    cuts.insert(cuts.end(), a.breakpoints.begin(), a.breakpoints.end());
    cuts.insert(cuts.end(), b.breakpoints.begin(), b.breakpoints.end());
    std::sort(cuts.begin(), cuts.end());
    double s = 0;
    for (size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double len = cuts[i + 1] - cuts[i];
        if (len <= 0) continue;
        const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
        s += std::abs(a(mid) - b(mid)) * len;
    }
    return s;
}

double PiecewiseLinear::operator()(double t) const {
    const double tau = grid.tau();
    int m = static_cast<int>(std::floor(t / tau));
    m = std::clamp(m, 0, grid.steps - 1);
    const double s = (t - grid.node(m)) / tau;
    return (1.0 - s) * values[m] + s * values[m + 1];
}

double PiecewiseQuadratic::operator()(double t) const {
    const double tau = grid.tau();
    int m = static_cast<int>(std::floor(t / tau));
    m = std::clamp(m, 0, grid.steps - 1);
    const double s = t - grid.node(m);
    return (a[m] * s + b[m]) * s + c[m];
}

PiecewiseLinear PiecewiseQuadratic::derivative() const {
    PiecewiseLinear d;
    d.grid = grid;
    d.values.resize(grid.steps + 1);
    for (int m = 0; m < grid.steps; ++m) d.values[m] = b[m];
    d.values[grid.steps] = 2.0 * a[grid.steps - 1] * grid.tau() + b[grid.steps - 1];
    return d;
}

MaxAbsResult global_max_abs(const PiecewiseQuadratic& p) {
    const double tau = p.grid.tau();
    MaxAbsResult best;
    best.t = 0;
    best.value = std::abs(p.c.empty() ? 0.0 : p.c[0]);
    auto consider = [&](double t, double v) {
        v = std::abs(v);
        if (v > best.value) { // strict, so ties keep the earliest t
            best.value = v;
            best.t = t;
        }
    };
    for (int m = 0; m < p.grid.steps; ++m) {
        consider(p.grid.node(m), p.c[m]);
        if (p.a[m] != 0.0) {
            const double s = -p.b[m] / (2.0 * p.a[m]);
            if (s > 0.0 && s < tau)
                consider(p.grid.node(m) + s, (p.a[m] * s + p.b[m]) * s + p.c[m]);
        }
        // right-limit candidate; for a continuous function it coincides with
        // the next piece's left value and the strict update keeps the earlier t
        consider(p.grid.node(m + 1), (p.a[m] * tau + p.b[m]) * tau + p.c[m]);
    }
    return best;
}

Eigen::VectorXd step_hat_integrals(const StepFunction& u, const TimeGrid& grid) {
    const double tau = grid.tau();
    Eigen::VectorXd r = Eigen::VectorXd::Zero(grid.steps + 1);
    size_t bp = 1; // next interior breakpoint of u to consider
    for (int m = 0; m < grid.steps; ++m) {
        const double t0 = grid.node(m), t1 = grid.node(m + 1);
        double p = t0;
        while (true) {
            double q = t1;
            while (bp + 1 < u.breakpoints.size() && u.breakpoints[bp] <= p) ++bp;
            if (bp + 1 < u.breakpoints.size() && u.breakpoints[bp] < t1)
                q = u.breakpoints[bp];
            if (q > p) {
                const double v = u(0.5 * (p + q));
                r[m] += v * ((t1 - p) * (t1 - p) - (t1 - q) * (t1 - q)) / (2.0 * tau);
                r[m + 1] += v * ((q - t0) * (q - t0) - (p - t0) * (p - t0)) / (2.0 * tau);
            }
            if (q >= t1) break;
            p = q;
            ++bp;
        }
    }
    return r;
}

Eigen::VectorXd smooth_hat_integrals(const std::function<double(double)>& f,
                                     const TimeGrid& grid) {
    const double tau = grid.tau();
    const auto& gl = gauss16();
    Eigen::VectorXd r = Eigen::VectorXd::Zero(grid.steps + 1);
    for (int m = 0; m < grid.steps; ++m) {
        const double t0 = grid.node(m), t1 = grid.node(m + 1);
        const double mid = 0.5 * (t0 + t1), half = 0.5 * (t1 - t0);
        for (const auto& [xi, w] : gl) {
            const double t = mid + half * xi;
            const double fw = half * w * f(t);
            r[m] += fw * (t1 - t) / tau;
            r[m + 1] += fw * (t - t0) / tau;
        }
    }
    return r;
}

double step_linear_integral(const StepFunction& u, const PiecewiseLinear& d) {
    const TimeGrid& grid = d.grid;
    double s = 0;
    size_t bp = 1;
    for (int m = 0; m < grid.steps; ++m) {
        const double t0 = grid.node(m), t1 = grid.node(m + 1);
        double p = t0;
        while (true) {
            double q = t1;
            while (bp + 1 < u.breakpoints.size() && u.breakpoints[bp] <= p) ++bp;
            if (bp + 1 < u.breakpoints.size() && u.breakpoints[bp] < t1)
                q = u.breakpoints[bp];
            if (q > p) s += u(0.5 * (p + q)) * 0.5 * (d(p) + d(q)) * (q - p);
            if (q >= t1) break;
            p = q;
            ++bp;
        }
    }
    return s;
}

const std::vector<std::pair<double, double>>& gauss16() {
    static const std::vector<std::pair<double, double>> table = [] {
        constexpr int n = 16;
        std::vector<std::pair<double, double>> t(n);
        for (int i = 0; i < n; ++i) {
            double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
            double dp = 0;
            for (int it = 0; it < 100; ++it) {
                // Legendre recurrence for P_n and its derivative at x
                double p0 = 1.0, p1 = x;
                for (int k = 2; k <= n; ++k) {
                    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n * (x * p1 - p0) / (x * x - 1.0);
                const double dx = p1 / dp;
                x -= dx;
                if (std::abs(dx) < 1e-15) break;
            }
            t[i] = {x, 2.0 / ((1.0 - x * x) * dp * dp)};
        }
        std::sort(t.begin(), t.end());
        return t;
    }();
    return table;
}

double gauss_integral(const std::function<double(double)>& f, double a, double b,
                      int panels) {
    const auto& gl = gauss16();
    double s = 0;
    for (int p = 0; p < panels; ++p) {
        const double pa = a + (b - a) * p / panels;
        const double pb = a + (b - a) * (p + 1) / panels;
        const double mid = 0.5 * (pa + pb), half = 0.5 * (pb - pa);
        for (const auto& [xi, w] : gl) s += half * w * f(mid + half * xi);
    }
    return s;
}

} // namespace bvwave
