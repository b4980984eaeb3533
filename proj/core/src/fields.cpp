#include "bvwave/fields.hpp"

#include <cmath>

#include "bvwave/errors.hpp"

namespace bvwave {

bool SpaceTimeField::all_finite() const {
    for (const auto& s : slice)
        if (!s.allFinite()) return false;
    return true;
}

SpaceTimeField zero_field(const TimeGrid& grid, int dofs) {
    SpaceTimeField f;
    f.grid = grid;
    f.slice.assign(grid.steps + 1, Eigen::VectorXd::Zero(dofs));
    return f;
}

SpaceTimeField reversed(const SpaceTimeField& f) {
    SpaceTimeField r;
    r.grid = f.grid;
    r.slice.assign(f.slice.rbegin(), f.slice.rend());
    return r;
}

TimeLoad reversed(const TimeLoad& f) {
    TimeLoad r;
    r.grid = f.grid;
    r.r.assign(f.r.rbegin(), f.r.rend());
    return r;
}

void axpy(SpaceTimeField& y, double alpha, const SpaceTimeField& x) {
    for (size_t m = 0; m < y.slice.size(); ++m) y.slice[m] += alpha * x.slice[m];
}

void axpy(TimeLoad& y, double alpha, const TimeLoad& x) {
    for (size_t m = 0; m < y.r.size(); ++m) y.r[m] += alpha * x.r[m];
}

double st_inner(const SpaceTimeField& a, const SpaceTimeField& b, const SparseSym& mass) {
    const int M = a.grid.steps;
    const double tau = a.grid.tau();
    std::vector<Eigen::VectorXd> mb(M + 1);
    for (int m = 0; m <= M; ++m) mb[m] = mass * b.slice[m];
    double s = 0;
    for (int m = 0; m < M; ++m) {
        s += 2.0 * a.slice[m].dot(mb[m]) + a.slice[m].dot(mb[m + 1]) +
             a.slice[m + 1].dot(mb[m]) + 2.0 * a.slice[m + 1].dot(mb[m + 1]);
    }
    return s * tau / 6.0;
}

double st_norm_sq(const SpaceTimeField& a, const SparseSym& mass) {
    return st_inner(a, a, mass);
}

double pair_load(const SpaceTimeField& a, const TimeLoad& load) {
    double s = 0;
    for (size_t m = 0; m < a.slice.size(); ++m) s += a.slice[m].dot(load.r[m]);
    return s;
}

TimeLoad load_of_field(const SpaceTimeField& f, const SparseSym& mass) {
    const int M = f.grid.steps;
    const double tau = f.grid.tau();
    TimeLoad out;
    out.grid = f.grid;
    out.r.resize(M + 1);
    for (int m = 0; m <= M; ++m) {
        Eigen::VectorXd w = (m == 0 || m == M ? tau / 3.0 : 2.0 * tau / 3.0) * f.slice[m];
        if (m > 0) w += tau / 6.0 * f.slice[m - 1];
        if (m < M) w += tau / 6.0 * f.slice[m + 1];
        out.r[m] = mass * w;
    }
    return out;
}

TimeLoad load_of_step_forcing(const StepFunction& u, const Eigen::VectorXd& g_load,
                              const TimeGrid& grid) {
    const Eigen::VectorXd hats = step_hat_integrals(u, grid);
    TimeLoad out;
    out.grid = grid;
    out.r.resize(grid.steps + 1);
    for (int m = 0; m <= grid.steps; ++m) out.r[m] = hats[m] * g_load;
    return out;
}

TimeLoad load_of_smooth_forcing(const std::function<double(double)>& theta,
                                const Eigen::VectorXd& g_load, const TimeGrid& grid) {
    const Eigen::VectorXd hats = smooth_hat_integrals(theta, grid);
    TimeLoad out;
    out.grid = grid;
    out.r.resize(grid.steps + 1);
    for (int m = 0; m <= grid.steps; ++m) out.r[m] = hats[m] * g_load;
    return out;
}

namespace {

// fine node (ix, iy) and its coarse parent node(s) with interpolation weights
template <typename Accum>
void for_each_parent(int ix, int iy, int nps_coarse, Accum&& acc) {
    const bool ox = ix & 1, oy = iy & 1;
    auto id = [&](int cx, int cy) { return cy * nps_coarse + cx; };
    if (!ox && !oy) {
        acc(id(ix / 2, iy / 2), 1.0);
    } else if (ox && oy) {
        // midpoint of the coarse square diagonal
        acc(id((ix - 1) / 2, (iy - 1) / 2), 0.5);
        acc(id((ix + 1) / 2, (iy + 1) / 2), 0.5);
    } else if (ox) {
        acc(id((ix - 1) / 2, iy / 2), 0.5);
        acc(id((ix + 1) / 2, iy / 2), 0.5);
    } else {
        acc(id(ix / 2, (iy - 1) / 2), 0.5);
        acc(id(ix / 2, (iy + 1) / 2), 0.5);
    }
}

} // namespace

Eigen::VectorXd prolong_space_once(const TriMesh& coarse, const TriMesh& fine,
                                   const Eigen::VectorXd& v) {
    if (fine.level != coarse.level + 1)
        throw NumericalError("prolong_space_once needs consecutive levels");
    Eigen::VectorXd cf = Eigen::VectorXd::Zero(coarse.n_nodes());
    for (int d = 0; d < coarse.n_interior(); ++d) cf[coarse.interior_node[d]] = v[d];
    Eigen::VectorXd out = Eigen::VectorXd::Zero(fine.n_interior());
    const int nps_f = fine.nodes_per_side;
    for (int iy = 0; iy < nps_f; ++iy) {
        for (int ix = 0; ix < nps_f; ++ix) {
            const int df = fine.interior_index[iy * nps_f + ix];
            if (df < 0) continue;
            double s = 0;
            for_each_parent(ix, iy, coarse.nodes_per_side,
                            [&](int cnode, double w) { s += w * cf[cnode]; });
            out[df] = s;
        }
    }
    return out;
}

Eigen::VectorXd restrict_space_once(const TriMesh& coarse, const TriMesh& fine,
                                    const Eigen::VectorXd& v) {
    if (fine.level != coarse.level + 1)
        throw NumericalError("restrict_space_once needs consecutive levels");
    Eigen::VectorXd ca = Eigen::VectorXd::Zero(coarse.n_nodes());
    const int nps_f = fine.nodes_per_side;
    for (int iy = 0; iy < nps_f; ++iy) {
        for (int ix = 0; ix < nps_f; ++ix) {
            const int df = fine.interior_index[iy * nps_f + ix];
            if (df < 0) continue;
            for_each_parent(ix, iy, coarse.nodes_per_side,
                            [&](int cnode, double w) { ca[cnode] += w * v[df]; });
        }
    }
    Eigen::VectorXd out(coarse.n_interior());
    for (int d = 0; d < coarse.n_interior(); ++d) out[d] = ca[coarse.interior_node[d]];
    return out;
}

SpaceTimeField prolong_field(const SpaceTimeField& f,
                             const std::vector<const TriMesh*>& chain, int steps_to) {
    SpaceTimeField cur = f;
    for (size_t c = 0; c + 1 < chain.size(); ++c) {
        for (auto& s : cur.slice) s = prolong_space_once(*chain[c], *chain[c + 1], s);
    }
    while (cur.grid.steps < steps_to) {
        const int M = cur.grid.steps;
        SpaceTimeField next;
        next.grid = TimeGrid{cur.grid.T, 2 * M};
        next.slice.resize(2 * M + 1);
        for (int m = 0; m <= M; ++m) next.slice[2 * m] = cur.slice[m];
        for (int m = 0; m < M; ++m)
            next.slice[2 * m + 1] = 0.5 * (cur.slice[m] + cur.slice[m + 1]);
        cur = std::move(next);
    }
    if (cur.grid.steps != steps_to)
        throw NumericalError("prolong_field requires a power-of-two step ratio");
    return cur;
}

TimeLoad restrict_load(const TimeLoad& fine, const std::vector<const TriMesh*>& chain,
                       int steps_to) {
    TimeLoad cur = fine;
    while (cur.grid.steps > steps_to) {
        const int M = cur.grid.steps;
        if (M % 2 != 0)
            throw NumericalError("restrict_load requires a power-of-two step ratio");
        TimeLoad next;
        next.grid = TimeGrid{cur.grid.T, M / 2};
        next.r.resize(M / 2 + 1);
        for (int m = 0; m <= M / 2; ++m) {
            Eigen::VectorXd acc = cur.r[2 * m];
            if (2 * m - 1 >= 0) acc += 0.5 * cur.r[2 * m - 1];
            if (2 * m + 1 <= M) acc += 0.5 * cur.r[2 * m + 1];
            next.r[m] = std::move(acc);
        }
        cur = std::move(next);
    }
    if (cur.grid.steps != steps_to)
        throw NumericalError("restrict_load requires a power-of-two step ratio");
    for (size_t c = chain.size(); c-- > 1;) {
        for (auto& s : cur.r) s = restrict_space_once(*chain[c - 1], *chain[c], s);
    }
    return cur;
}

} // namespace bvwave
