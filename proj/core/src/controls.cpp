#include "bvwave/controls.hpp"

#include <algorithm>
#include <cmath>

#include "bvwave/errors.hpp"

namespace bvwave {

int MeasureControl::total_atoms() const {
    int n = 0;
    for (const auto& comp : atoms) n += static_cast<int>(comp.size());
    return n;
}

double MeasureControl::tv(int component) const {
    double s = 0;
    for (const auto& a : atoms[component]) s += std::abs(a.weight);
    return s;
}

void MeasureControl::normalize(double tol) {
    for (auto& comp : atoms) {
        std::sort(comp.begin(), comp.end(),
                  [](const Atom& a, const Atom& b) { return a.t < b.t; });
        std::vector<Atom> merged;
        std::vector<double> mass, moment; // |weight| totals per merged group
        for (const auto& a : comp) {
            const double aw = std::abs(a.weight);
            if (!merged.empty() && a.t - merged.back().t <= tol) {
                merged.back().weight += a.weight;
                mass.back() += aw;
                moment.back() += aw * a.t;
                if (mass.back() > 0) merged.back().t = moment.back() / mass.back();
            } else {
                merged.push_back(a);
                mass.push_back(aw);
                moment.push_back(aw * a.t);
            }
        }
        std::erase_if(merged, [](const Atom& a) { return a.weight == 0.0; });
        comp = std::move(merged);
    }
}

StepFunction apply_B(const MeasureControl& control, int component, double T) {
    const auto& comp = control.atoms[component];
    // mean of the pure-jump part sum_l c_l 1_{(t_l,T]} is sum_l c_l (T-t_l)/T;
    // subtracting it per atom makes the atom part exactly zero-mean
    double base = control.offset[component];
    for (const auto& a : comp) base -= a.weight * (T - a.t) / T;
    StepFunction u;
    u.breakpoints.push_back(0.0);
    u.values.push_back(base);
    double acc = base;
    for (const auto& a : comp) {
        if (a.t <= 0.0 || a.t >= T)
            throw ConfigError("control atom time outside (0,T)");
        if (a.t <= u.breakpoints.back())
            throw ConfigError("control atom times must be strictly increasing");
        acc += a.weight;
        u.breakpoints.push_back(a.t);
        u.values.push_back(acc);
    }
    u.breakpoints.push_back(T);
    return u;
}

std::vector<PiecewiseQuadratic> compute_p1(const SpaceTimeField& adjoint,
                                           const std::vector<Eigen::VectorXd>& g_loads) {
    const int M = adjoint.grid.steps;
    const double tau = adjoint.grid.tau();
    std::vector<PiecewiseQuadratic> out(g_loads.size());
    for (size_t j = 0; j < g_loads.size(); ++j) {
        Eigen::VectorXd d(M + 1);
        for (int m = 0; m <= M; ++m) d[m] = g_loads[j].dot(adjoint.slice[m]);
        PiecewiseQuadratic p;
        p.grid = adjoint.grid;
        p.a.resize(M);
        p.b.resize(M);
        p.c.resize(M);
        // antiderivative of the piecewise-linear d with p1(T) = 0:
        // p1(t_m + s) = p1(t_m) + d_m s + (d_{m+1} - d_m) s^2 / (2 tau)
        std::vector<double> nodal(M + 1);
        nodal[M] = 0.0;
        for (int m = M - 1; m >= 0; --m)
            nodal[m] = nodal[m + 1] - 0.5 * tau * (d[m] + d[m + 1]);
        for (int m = 0; m < M; ++m) {
            p.a[m] = (d[m + 1] - d[m]) / (2.0 * tau);
            p.b[m] = d[m];
            p.c[m] = nodal[m];
        }
        out[j] = std::move(p);
    }
    return out;
}

PiecewiseLinear compute_z(const PiecewiseQuadratic& p1) {
    return p1.derivative();
}

BStarResult apply_B_star(const SpaceTimeField& q, const std::vector<Eigen::VectorXd>& g_loads) {
    BStarResult res;
    res.wprime.resize(g_loads.size());
    res.pairing.resize(static_cast<int>(g_loads.size()));
    const auto p1s = compute_p1(q, g_loads);
    for (size_t j = 0; j < g_loads.size(); ++j) {
        const PiecewiseQuadratic& p1 = p1s[j];
        const double p10 = p1.c.empty() ? 0.0 : p1.c[0];
        res.pairing[static_cast<int>(j)] = -p10;
        PiecewiseQuadratic w = p1;
        const double T = p1.grid.T;
        // w'(t) = -p1(t) + ((T - t)/T) p1(0); the correction is linear in t
        for (int m = 0; m < p1.grid.steps; ++m) {
            const double tm = p1.grid.node(m);
            w.a[m] = -p1.a[m];
            w.b[m] = -p1.b[m] - p10 / T;
            w.c[m] = -p1.c[m] + (T - tm) / T * p10;
        }
        res.wprime[j] = std::move(w);
    }
    return res;
}

double duality_pairing(const MeasureControl& control, const BStarResult& bs) {
    double s = 0;
    for (int i = 0; i < control.components(); ++i) {
        for (const auto& a : control.atoms[i]) s += a.weight * bs.wprime[i](a.t);
        s += control.offset[i] * bs.pairing[i];
    }
    return s;
}

} // namespace bvwave
