#include "bvwave/pdap.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>

#include "bvwave/errors.hpp"

namespace bvwave {
namespace {

double kkt_residual_gamma(const Eigen::MatrixXd& G, const Eigen::VectorXd& r,
                          const Eigen::VectorXd& alpha, int n_atoms, double gamma,
                          const Eigen::VectorXd& q) {
    Eigen::VectorXd g = r - G * q;
    for (int l = 0; l < n_atoms; ++l) g[l] -= gamma * q[l];
    double worst = 0;
    for (int l = 0; l < static_cast<int>(q.size()); ++l) {
        double v;
        if (l < n_atoms) {
            if (q[l] > 0)
                v = std::abs(g[l] - alpha[l]);
            else if (q[l] < 0)
                v = std::abs(g[l] + alpha[l]);
            else
                v = std::max(std::abs(g[l]) - alpha[l], 0.0);
        } else {
            v = std::abs(g[l]);
        }
        worst = std::max(worst, v);
    }
    return worst;
}

struct PdasOutcome {
    Eigen::VectorXd q;
    double kkt = std::numeric_limits<double>::infinity();
    bool ok = false;
    int iters = 0;
};

// Active-set semismooth Newton at fixed gamma. Accepts on the measured KKT
// residual; near-degenerate Gram blocks make the sign classification flicker
// at the threshold, so the best iterate seen is kept and returned.
PdasOutcome pdas_fixed_gamma(const Eigen::MatrixXd& G, const Eigen::VectorXd& r,
                             const Eigen::VectorXd& alpha, int n_atoms, double gamma,
                             Eigen::VectorXd q, double accept_tol) {
    const int dim = static_cast<int>(r.size());
    Eigen::MatrixXd H = G;
    for (int l = 0; l < n_atoms; ++l) H(l, l) += gamma;
    PdasOutcome best;
    best.q = q;
    best.kkt = kkt_residual_gamma(G, r, alpha, n_atoms, gamma, q);
    if (best.kkt <= accept_tol) {
        best.ok = true;
        return best;
    }
    std::set<std::string> seen;
    std::vector<signed char> sign(n_atoms, 0);
    for (int it = 1; it <= 80; ++it) {
        best.iters = it;
        const Eigen::VectorXd xi = q + (r - H * q);
        for (int l = 0; l < n_atoms; ++l)
            sign[l] = xi[l] > alpha[l] ? 1 : (xi[l] < -alpha[l] ? -1 : 0);
        std::string key(sign.begin(), sign.end());
        if (!seen.insert(key).second) break; // pattern revisited, no progress left

        std::vector<int> free_idx;
        for (int l = 0; l < n_atoms; ++l)
            if (sign[l] != 0) free_idx.push_back(l);
        for (int c = n_atoms; c < dim; ++c) free_idx.push_back(c);
        Eigen::VectorXd qn = Eigen::VectorXd::Zero(dim);
        bool finite = true;
        // solve the free block; an atom whose solution contradicts its own sign
        // pattern (degenerate near-duplicate columns) is clamped to zero and
        // the reduced block re-solved
        while (!free_idx.empty()) {
            const int nf = static_cast<int>(free_idx.size());
            Eigen::MatrixXd Hff(nf, nf);
            Eigen::VectorXd rhs(nf);
            for (int i = 0; i < nf; ++i) {
                rhs[i] = r[free_idx[i]] -
                         (free_idx[i] < n_atoms ? alpha[free_idx[i]] * sign[free_idx[i]] : 0.0);
                for (int j = 0; j < nf; ++j) Hff(i, j) = H(free_idx[i], free_idx[j]);
            }
            const Eigen::VectorXd qf = Hff.ldlt().solve(rhs);
            if (!qf.allFinite()) {
                finite = false;
                break;
            }
            int worst_i = -1;
            double worst_mag = 0;
            for (int i = 0; i < nf; ++i) {
                const int l = free_idx[i];
                if (l < n_atoms && qf[i] * sign[l] < 0 && std::abs(qf[i]) > worst_mag) {
                    worst_mag = std::abs(qf[i]);
                    worst_i = i;
                }
            }
            if (worst_i < 0) {
                for (int i = 0; i < nf; ++i) qn[free_idx[i]] = qf[i];
                break;
            }
            free_idx.erase(free_idx.begin() + worst_i);
        }
        if (!finite) break;
        q = std::move(qn);
        const double kkt = kkt_residual_gamma(G, r, alpha, n_atoms, gamma, q);
        if (kkt < best.kkt) {
            best.q = q;
            best.kkt = kkt;
        }
        if (kkt <= accept_tol) {
            best.ok = true;
            return best;
        }
    }
    return best;
}

Eigen::VectorXd ista(const Eigen::MatrixXd& G, const Eigen::VectorXd& r,
                     const Eigen::VectorXd& alpha, int n_atoms, double gamma,
                     Eigen::VectorXd q, double tol_abs, int max_iters) {
    const double L = G.cwiseAbs().rowwise().sum().maxCoeff() + gamma + 1e-300;
    const double step = 1.0 / L;
    for (int it = 0; it < max_iters; ++it) {
        Eigen::VectorXd g = r - G * q;
        for (int l = 0; l < n_atoms; ++l) g[l] -= gamma * q[l];
        for (int l = 0; l < static_cast<int>(q.size()); ++l) {
            if (l < n_atoms) {
                const double v = q[l] + step * g[l];
                const double th = step * alpha[l];
                q[l] = v > th ? v - th : (v < -th ? v + th : 0.0);
            } else {
                q[l] += step * g[l];
            }
        }
        if (it % 64 == 0 &&
            kkt_residual_gamma(G, r, alpha, n_atoms, gamma, q) <= tol_abs)
            break;
    }
    return q;
}

} // namespace

SubproblemResult solve_magnitude_subproblem(const SubproblemModel& model,
                                            const Eigen::VectorXd* warm_start,
                                            double gamma_min_rel, double tol) {
    const int dim = model.n_atoms + model.n_offsets;
    const Eigen::MatrixXd& G = model.gram;
    const Eigen::VectorXd& r = model.linear;
    if (G.rows() != dim || G.cols() != dim || r.size() != dim ||
        model.alpha.size() != model.n_atoms)
        throw NumericalError("inconsistent subproblem model sizes");

    const double diag_scale = dim > 0 ? G.diagonal().cwiseAbs().maxCoeff() : 0.0;
    for (int i = 0; i < dim; ++i)
        if (G(i, i) < -1e-12 * std::max(diag_scale, 1.0))
            throw NumericalError("Gram matrix has a negative diagonal entry");
    if (model.n_offsets > 0) {
        Eigen::LLT<Eigen::MatrixXd> llt(
            G.bottomRightCorner(model.n_offsets, model.n_offsets));
        if (llt.info() != Eigen::Success)
            throw NumericalError("offset Gram block is not positive definite");
    }

    SubproblemResult res;
    if (dim == 0) {
        res.converged = true;
        return res;
    }
    double gamma0 = G.trace() / dim;
    if (!(gamma0 > 0)) gamma0 = 1.0;
    const double gamma_min = gamma_min_rel * gamma0;
    const double scale = std::max(1.0, r.lpNorm<Eigen::Infinity>());

    Eigen::VectorXd q = Eigen::VectorXd::Zero(dim);
    if (warm_start && warm_start->size() == dim) q = *warm_start;

    const bool dbg = std::getenv("BVWAVE_DEBUG_SUBPROBLEM") != nullptr;
    const double accept = 0.05 * tol * scale;
    double gamma = gamma0, last_gamma = gamma0;
    while (gamma >= gamma_min * 0.999) {
        auto out = pdas_fixed_gamma(G, r, model.alpha, model.n_atoms, gamma, q, accept);
        res.iterations += out.iters;
        for (int round = 0; round < 3 && !out.ok; ++round) {
            res.used_fallback = true;
            Eigen::VectorXd qi = ista(G, r, model.alpha, model.n_atoms, gamma, out.q,
                                      0.1 * tol * scale, 200000);
            auto out2 =
                pdas_fixed_gamma(G, r, model.alpha, model.n_atoms, gamma, qi, accept);
            res.iterations += out2.iters;
            if (out2.kkt < out.kkt) out = out2;
        }
        q = out.q;
        if (dbg)
            std::fprintf(stderr, "  [sub] dim=%d gamma=%.3e ok=%d iters=%d kkt=%.3e\n",
                         dim, gamma, out.ok ? 1 : 0, out.iters, out.kkt);
        last_gamma = gamma;
        gamma /= 10.0;
    }

    res.kkt_residual = kkt_residual_gamma(G, r, model.alpha, model.n_atoms, last_gamma, q);
    if (res.kkt_residual > tol * scale) {
        res.used_fallback = true;
        q = ista(G, r, model.alpha, model.n_atoms, last_gamma, q, tol * scale, 500000);
        res.kkt_residual = kkt_residual_gamma(G, r, model.alpha, model.n_atoms, last_gamma, q);
    }
    res.q = std::move(q);
    res.converged = res.kkt_residual <= tol * scale;
    return res;
}

namespace {

// Column store with a growing Gram matrix. Field storage of columns that
// leave the support is released; the Gram rows and data pairings persist.
struct ColumnEngine {
    const PdapProblem* prob;
    struct Col {
        int comp = 0;
        double t = 0;
        bool offset = false;
        std::optional<SpaceTimeField> field;
        double rdot = 0;
    };
    std::vector<Col> cols;
    Eigen::MatrixXd gram;
    std::map<std::pair<int, double>, int> atom_index;
    std::vector<int> offset_ids;

    explicit ColumnEngine(const PdapProblem& p) : prob(&p) {
        const int m = static_cast<int>(p.g_loads.size());
        gram.resize(0, 0);
        for (int i = 0; i < m; ++i) offset_ids.push_back(add(make_col(i, 0.0, true)));
    }

    SpaceTimeField build_field(int comp, double t, bool offset) const {
        const TimeGrid& grid = prob->op->grid();
        StepFunction u;
        if (offset) {
            u = constant_step(1.0, grid.T);
        } else {
            u.breakpoints = {0.0, t, grid.T};
            u.values = {-(grid.T - t) / grid.T, t / grid.T};
        }
        const TimeLoad load = load_of_step_forcing(u, prob->g_loads[comp], grid);
        return prob->op->solve_forward(&load, nullptr, nullptr);
    }

    Col make_col(int comp, double t, bool offset) const {
        Col c;
        c.comp = comp;
        c.t = t;
        c.offset = offset;
        c.field = build_field(comp, t, offset);
        c.rdot = pair_load(*c.field, prob->data_load);
        return c;
    }

    int add(Col c) {
        const int id = static_cast<int>(cols.size());
        Eigen::MatrixXd g2(id + 1, id + 1);
        g2.topLeftCorner(id, id) = gram;
        for (int i = 0; i < id; ++i) {
            const double v = st_inner(field(i), *c.field, prob->op->mass());
            g2(i, id) = g2(id, i) = v;
        }
        g2(id, id) = st_inner(*c.field, *c.field, prob->op->mass());
        gram = std::move(g2);
        cols.push_back(std::move(c));
        return id;
    }

    int ensure_atom(int comp, double t) {
        const auto key = std::make_pair(comp, t);
        const auto it = atom_index.find(key);
        if (it != atom_index.end()) return it->second;
        const int id = add(make_col(comp, t, false));
        atom_index.emplace(key, id);
        return id;
    }

    const SpaceTimeField& field(int id) {
        if (!cols[id].field)
            cols[id].field = build_field(cols[id].comp, cols[id].t, cols[id].offset);
        return *cols[id].field;
    }

    void release_except(const std::vector<int>& keep) {
        std::set<int> k(keep.begin(), keep.end());
        for (int id : offset_ids) k.insert(id);
        for (size_t i = 0; i < cols.size(); ++i)
            if (!k.count(static_cast<int>(i))) cols[i].field.reset();
    }
};

} // namespace

PdapResult run_pdap(const PdapProblem& problem, const PdapOptions& options) {
    const WaveOperator& op = *problem.op;
    const int m = static_cast<int>(problem.g_loads.size());
    if (static_cast<int>(options.alpha.size()) != m)
        throw ConfigError("pdap needs one alpha per control component");
    for (int i = 0; i < m; ++i)
        if (!(options.alpha[i] > 0)) throw ConfigError("pdap penalty weights must be positive");

    const TimeGrid grid = op.grid();
    const double T = grid.T;
    const double J0 = 0.5 * problem.data_sq;
    const double gap_tol = options.gap_tol > 0 ? options.gap_tol : options.gap_tol_rel * J0;
    const double R = options.tv_cap > 0 ? options.tv_cap : 10.0 * J0 / options.alpha.minCoeff();
    const double merge_tol = options.merge_tol_rel * T;

    ColumnEngine eng(problem);

    std::vector<std::pair<int, double>> atoms; // (component, time), sorted
    std::map<std::pair<int, double>, double> weight;
    Eigen::VectorXd offsets = Eigen::VectorXd::Zero(m);

    PdapResult res;
    double cost = J0;
    SpaceTimeField S = zero_field(grid, op.dofs());
    bool solved_any = false;

    for (int it = 0;; ++it) {
        TimeLoad res_load = load_of_field(S, op.mass());
        axpy(res_load, -1.0, problem.data_load);
        const SpaceTimeField adj = op.solve_adjoint(res_load);
        const auto p1 = compute_p1(adj, problem.g_loads);

        std::vector<MaxAbsResult> maxima(m);
        double gap = 0, kkt_violation = -std::numeric_limits<double>::infinity(),
               off_res = 0;
        for (int i = 0; i < m; ++i) {
            maxima[i] = global_max_abs(p1[i]);
            gap += R * std::max(maxima[i].value - options.alpha[i], 0.0);
            kkt_violation = std::max(kkt_violation,
                                     maxima[i].value / options.alpha[i] - 1.0);
            const double p10 = p1[i].c.empty() ? 0.0 : p1[i].c[0];
            gap += R * std::abs(p10);
            off_res = std::max(off_res, std::abs(p10));
        }
        for (const auto& a : atoms) {
            const double w = weight.at(a);
            gap += options.alpha[a.first] * std::abs(w) - w * p1[a.first](a.second);
        }

        res.history.push_back({it, cost, kkt_violation, gap,
                               static_cast<int>(atoms.size()), off_res});
        res.cost = cost;
        res.gap = gap;
        res.kkt_violation = kkt_violation;
        res.offset_residual = off_res;
        res.p1 = p1;
        res.state = S;
        res.iterations = it;
        if (gap <= gap_tol) {
            res.converged = true;
            break;
        }
        if (it >= options.max_iterations) break;

        if (std::getenv("BVWAVE_DEBUG_SUBPROBLEM"))
            std::fprintf(stderr, "[pdap] it=%d cost=%.12g gap=%.3e max=%.6e t=%.12f atoms=%zu\n",
                         it, cost, gap, maxima[0].value, maxima[0].t, atoms.size());
        bool inserted = false;
        for (int i = 0; i < m; ++i) {
            const double t = maxima[i].t;
            if (maxima[i].value <= options.alpha[i]) continue;
            if (t <= 0.0 || t >= T) continue; // endpoint maximum belongs to the offset
            bool dup = false;
            for (const auto& a : atoms)
                if (a.first == i && std::abs(a.second - t) <= merge_tol) {
                    dup = true;
                    break;
                }
            if (!dup) {
                atoms.emplace_back(i, t);
                inserted = true;
            }
        }
        if (!inserted && solved_any) break; // no usable direction left, stalled
        std::sort(atoms.begin(), atoms.end());

        const int na = static_cast<int>(atoms.size());
        std::vector<int> cid(na + m);
        for (int j = 0; j < na; ++j) cid[j] = eng.ensure_atom(atoms[j].first, atoms[j].second);
        for (int i = 0; i < m; ++i) cid[na + i] = eng.offset_ids[i];

        SubproblemModel model;
        model.n_atoms = na;
        model.n_offsets = m;
        model.gram.resize(na + m, na + m);
        model.linear.resize(na + m);
        model.alpha.resize(na);
        for (int i = 0; i < na + m; ++i) {
            model.linear[i] = eng.cols[cid[i]].rdot;
            for (int j = 0; j < na + m; ++j) model.gram(i, j) = eng.gram(cid[i], cid[j]);
        }
        for (int j = 0; j < na; ++j) model.alpha[j] = options.alpha[atoms[j].first];
        Eigen::VectorXd warm(na + m);
        for (int j = 0; j < na; ++j) {
            const auto w = weight.find(atoms[j]);
            warm[j] = w == weight.end() ? 0.0 : w->second;
        }
        warm.tail(m) = offsets;

        const SubproblemResult sub = solve_magnitude_subproblem(
            model, &warm, options.gamma_min_rel, options.subproblem_tol);
        if (!sub.converged)
            throw NumericalError("magnitude subproblem missed its KKT tolerance");
        solved_any = true;

        // prune exact zeros, then merge collapsing atoms onto the earlier time
        std::vector<std::pair<int, double>> kept;
        std::vector<double> kw;
        for (int j = 0; j < na; ++j) {
            if (sub.q[j] == 0.0) continue;
            if (!kept.empty() && kept.back().first == atoms[j].first &&
                atoms[j].second - kept.back().second <= merge_tol) {
                kw.back() += sub.q[j];
                continue;
            }
            kept.push_back(atoms[j]);
            kw.push_back(sub.q[j]);
        }
        atoms.clear();
        weight.clear();
        for (size_t j = 0; j < kept.size(); ++j) {
            if (kw[j] == 0.0) continue;
            atoms.push_back(kept[j]);
            weight[kept[j]] = kw[j];
        }
        offsets = sub.q.tail(m);

        // cost and state of the pruned-and-merged iterate
        std::vector<int> sup_cid;
        std::vector<double> sup_w;
        std::vector<double> sup_alpha;
        for (const auto& a : atoms) {
            sup_cid.push_back(eng.ensure_atom(a.first, a.second));
            sup_w.push_back(weight.at(a));
            sup_alpha.push_back(options.alpha[a.first]);
        }
        for (int i = 0; i < m; ++i) {
            sup_cid.push_back(eng.offset_ids[i]);
            sup_w.push_back(offsets[i]);
            sup_alpha.push_back(0.0);
        }
        double quad = 0, lin = 0, pen = 0;
        for (size_t i = 0; i < sup_cid.size(); ++i) {
            lin += sup_w[i] * eng.cols[sup_cid[i]].rdot;
            pen += sup_alpha[i] * std::abs(sup_w[i]);
            for (size_t j = 0; j < sup_cid.size(); ++j)
                quad += sup_w[i] * sup_w[j] * eng.gram(sup_cid[i], sup_cid[j]);
        }
        cost = 0.5 * quad - lin + J0 + pen;

        S = zero_field(grid, op.dofs());
        for (size_t i = 0; i < sup_cid.size(); ++i)
            if (sup_w[i] != 0.0) axpy(S, sup_w[i], eng.field(sup_cid[i]));
        eng.release_except(sup_cid);
    }

    res.control.atoms.assign(m, {});
    for (const auto& a : atoms)
        res.control.atoms[a.first].push_back({a.second, weight.at(a)});
    res.control.offset = offsets;
    // insertion times that the subproblem could not tell apart stand for one
    // jump; consolidate them so the support reads off cleanly
    res.control.normalize(std::max(merge_tol, options.readout_merge_rel * T));
    return res;
}

} // namespace bvwave
