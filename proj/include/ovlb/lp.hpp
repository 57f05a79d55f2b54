#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "ovlb/errors.hpp"
#include "ovlb/linalg.hpp"

namespace ovlb {

enum class RowSense { le, ge };

/// Dense inequality-constrained linear program over a small number of
/// variables and a possibly large number of rows:
///   max (or min)  objective . x   subject to   rows_j . x  <=/>=  rhs_j.
struct LinearProgram {
    std::vector<double> objective;
    std::vector<std::vector<double>> rows;
    std::vector<double> rhs;
    std::vector<RowSense> sense;
    bool maximize = true;

    int vars() const { return static_cast<int>(objective.size()); }
    int constraints() const { return static_cast<int>(rows.size()); }

    void validate() const {
        if (objective.empty()) throw input_error("lp: no variables");
        if (rows.empty()) throw input_error("lp: no constraints");
        if (rows.size() != rhs.size() || rows.size() != sense.size())
            throw input_error("lp: row/rhs/sense count mismatch");
        for (double c : objective)
            if (!std::isfinite(c)) throw input_error("lp: non-finite objective coefficient");
        for (std::size_t j = 0; j < rows.size(); ++j) {
            if (rows[j].size() != objective.size())
                throw input_error("lp: row " + std::to_string(j) + " width mismatch");
            if (!std::isfinite(rhs[j])) throw input_error("lp: non-finite rhs");
            for (double a : rows[j])
                if (!std::isfinite(a)) throw input_error("lp: non-finite row entry");
        }
    }
};

enum class LPStatus { optimal, unbounded, infeasible };

inline const char* lp_status_name(LPStatus s) {
    switch (s) {
        case LPStatus::optimal: return "optimal";
        case LPStatus::unbounded: return "unbounded";
        default: return "infeasible";
    }
}

struct LPSolution {
    LPStatus status = LPStatus::optimal;
    std::vector<double> x;
    double objective_value = std::numeric_limits<double>::quiet_NaN();
    std::vector<int> active_rows;        ///< rows in the optimal working set
    std::vector<double> row_multipliers; ///< nonnegative certificate, one per row
    std::vector<double> ray;             ///< improving feasible direction when unbounded
    long iterations = 0;
};

struct LPOptions {
    double feastol = 1e-9;   ///< relative feasibility tolerance
    double opttol = 1e-9;    ///< relative reduced-cost tolerance
    double pivot_tol = 1e-11;
    int stall_limit = 50;    ///< degenerate iterations before switching to Bland's rule
    long max_iterations = 0; ///< 0 picks 500 + 40 * (rows + vars)
};

/// Worst signed constraint violation of x (negative means strictly interior).
inline double check_feasibility(const std::vector<double>& x, const LinearProgram& p) {
    double worst = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < p.constraints(); ++j) {
        const double ax = dot(p.rows[static_cast<std::size_t>(j)], x);
        const double v = p.sense[static_cast<std::size_t>(j)] == RowSense::le
                             ? ax - p.rhs[static_cast<std::size_t>(j)]
                             : p.rhs[static_cast<std::size_t>(j)] - ax;
        worst = std::max(worst, v);
    }
    return worst;
}

namespace detail {

/// Solve R y = r by LU with partial pivoting plus two steps of iterative
/// refinement with compensated residuals.  Returns false when R is
/// numerically singular.
inline bool lu_solve_refined(std::vector<std::vector<double>> R, std::vector<double> r,
                             std::vector<double>& y) {
    const int n = static_cast<int>(r.size());
    const std::vector<std::vector<double>> R0 = R;
    const std::vector<double> r0 = r;
    std::vector<int> perm(static_cast<std::size_t>(n));
    double scale = 0.0;
    for (const auto& row : R)
        for (double v : row) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) return false;

    for (int k = 0; k < n; ++k) {
        int piv = k;
        for (int i = k + 1; i < n; ++i)
            if (std::abs(R[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)]) >
                std::abs(R[static_cast<std::size_t>(piv)][static_cast<std::size_t>(k)]))
                piv = i;
        if (std::abs(R[static_cast<std::size_t>(piv)][static_cast<std::size_t>(k)]) < 1e-14 * scale)
            return false;
        std::swap(R[static_cast<std::size_t>(k)], R[static_cast<std::size_t>(piv)]);
        perm[static_cast<std::size_t>(k)] = piv;
        for (int i = k + 1; i < n; ++i) {
            double& m = R[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
            m /= R[static_cast<std::size_t>(k)][static_cast<std::size_t>(k)];
            for (int j = k + 1; j < n; ++j)
                R[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] -=
                    m * R[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)];
        }
    }

    auto substitute = [&](std::vector<double> b) {
        for (int k = 0; k < n; ++k) std::swap(b[static_cast<std::size_t>(k)], b[static_cast<std::size_t>(perm[static_cast<std::size_t>(k)])]);
        for (int i = 1; i < n; ++i) {
            CompensatedSum s;
            s.add(b[static_cast<std::size_t>(i)]);
            for (int j = 0; j < i; ++j)
                s.add(-R[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] * b[static_cast<std::size_t>(j)]);
            b[static_cast<std::size_t>(i)] = s.value();
        }
        for (int i = n - 1; i >= 0; --i) {
            CompensatedSum s;
            s.add(b[static_cast<std::size_t>(i)]);
            for (int j = i + 1; j < n; ++j)
                s.add(-R[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] * b[static_cast<std::size_t>(j)]);
            b[static_cast<std::size_t>(i)] = s.value() / R[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)];
        }
        return b;
    };

    y = substitute(r);
    for (int pass = 0; pass < 2; ++pass) {
        std::vector<double> res(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            CompensatedSum s;
            s.add(r0[static_cast<std::size_t>(i)]);
            for (int j = 0; j < n; ++j)
                s.add(-R0[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] * y[static_cast<std::size_t>(j)]);
            res[static_cast<std::size_t>(i)] = s.value();
        }
        const std::vector<double> d = substitute(std::move(res));
        for (int i = 0; i < n; ++i) y[static_cast<std::size_t>(i)] += d[static_cast<std::size_t>(i)];
    }
    return true;
}

} // namespace detail

/// Two-phase primal simplex run on the standard-form dual
///   min  b.lambda   s.t.   G^T lambda = c,  lambda >= 0,
/// which has only `vars` equations however many rows the caller supplies; the
/// caller's solution is read off the simplex multipliers.  Rows are
/// equilibrated to unit max-entry, pricing is reduced cost over column norm
/// with a Bland fallback after a stall, and the final point is polished by
/// re-solving the active set with refined LU when it is square.
inline LPSolution solve_lp(const LinearProgram& p, const LPOptions& opt = {}) {
    p.validate();
    const int n = p.vars();
    const int m = p.constraints();

    // Canonical maximization with <= rows, then equilibration.
    std::vector<double> chat(p.objective);
    if (!p.maximize)
        for (double& c : chat) c = -c;
    std::vector<double> sigma(static_cast<std::size_t>(m), 1.0), rowscale(static_cast<std::size_t>(m), 1.0);
    std::vector<double> bscaled(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j) {
        sigma[static_cast<std::size_t>(j)] = p.sense[static_cast<std::size_t>(j)] == RowSense::le ? 1.0 : -1.0;
        double s = 0.0;
        for (double a : p.rows[static_cast<std::size_t>(j)]) s = std::max(s, std::abs(a));
        rowscale[static_cast<std::size_t>(j)] = s > 0.0 ? s : 1.0;
        bscaled[static_cast<std::size_t>(j)] =
            sigma[static_cast<std::size_t>(j)] * p.rhs[static_cast<std::size_t>(j)] / rowscale[static_cast<std::size_t>(j)];
    }
    auto gcol = [&](int j, int i) {  // scaled canonical G'_j[i]
        return sigma[static_cast<std::size_t>(j)] *
               p.rows[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] /
               rowscale[static_cast<std::size_t>(j)];
    };

    // Tableau over the dual: n equation rows, m lambda columns, n artificials.
    const int width = m + n;
    std::vector<double> flip(static_cast<std::size_t>(n), 1.0);
    std::vector<std::vector<double>> T(static_cast<std::size_t>(n),
                                       std::vector<double>(static_cast<std::size_t>(width), 0.0));
    std::vector<double> rhs(static_cast<std::size_t>(n));
    std::vector<int> basis(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        flip[static_cast<std::size_t>(i)] = chat[static_cast<std::size_t>(i)] < 0.0 ? -1.0 : 1.0;
        for (int j = 0; j < m; ++j)
            T[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = flip[static_cast<std::size_t>(i)] * gcol(j, i);
        T[static_cast<std::size_t>(i)][static_cast<std::size_t>(m + i)] = 1.0;
        rhs[static_cast<std::size_t>(i)] = flip[static_cast<std::size_t>(i)] * chat[static_cast<std::size_t>(i)];
        basis[static_cast<std::size_t>(i)] = m + i;
    }

    // Reduced-cost rows for phase 1 (artificial mass) and phase 2 (dual cost).
    std::vector<double> z1(static_cast<std::size_t>(width), 0.0), z2(static_cast<std::size_t>(width), 0.0);
    for (int j = 0; j < m; ++j) {
        CompensatedSum s;
        for (int i = 0; i < n; ++i) s.add(T[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
        z1[static_cast<std::size_t>(j)] = -s.value();
        z2[static_cast<std::size_t>(j)] = bscaled[static_cast<std::size_t>(j)];
    }

    double bmax = 0.0;
    for (double b : bscaled) bmax = std::max(bmax, std::abs(b));
    const double tol1 = opt.opttol;
    const double tol2 = opt.opttol * (1.0 + bmax);
    double rhs_mass0 = 0.0;
    for (double r : rhs) rhs_mass0 += r;
    const double feas_thresh = opt.feastol * (1.0 + rhs_mass0);
    const long max_iter = opt.max_iterations > 0 ? opt.max_iterations : 500 + 40L * (m + n);

    LPSolution sol;
    bool bland = false;
    int stall = 0;
    double prev_obj = std::numeric_limits<double>::infinity();

    auto phase1_objective = [&]() {
        CompensatedSum s;
        for (int i = 0; i < n; ++i)
            if (basis[static_cast<std::size_t>(i)] >= m) s.add(std::max(0.0, rhs[static_cast<std::size_t>(i)]));
        return s.value();
    };

    auto pivot = [&](int r, int e) {
        auto& prow = T[static_cast<std::size_t>(r)];
        const double piv = prow[static_cast<std::size_t>(e)];
        for (double& v : prow) v /= piv;
        rhs[static_cast<std::size_t>(r)] /= piv;
        prow[static_cast<std::size_t>(e)] = 1.0;
        for (int i = 0; i < n; ++i) {
            if (i == r) continue;
            const double f = T[static_cast<std::size_t>(i)][static_cast<std::size_t>(e)];
            if (f == 0.0) continue;
            auto& row = T[static_cast<std::size_t>(i)];
            for (int j = 0; j < width; ++j) row[static_cast<std::size_t>(j)] -= f * prow[static_cast<std::size_t>(j)];
            row[static_cast<std::size_t>(e)] = 0.0;
            rhs[static_cast<std::size_t>(i)] -= f * rhs[static_cast<std::size_t>(r)];
            if (rhs[static_cast<std::size_t>(i)] < 0.0 && rhs[static_cast<std::size_t>(i)] > -1e-13 * (1.0 + rhs_mass0))
                rhs[static_cast<std::size_t>(i)] = 0.0;
        }
        for (auto* z : {&z1, &z2}) {
            const double f = (*z)[static_cast<std::size_t>(e)];
            if (f == 0.0) continue;
            for (int j = 0; j < width; ++j) (*z)[static_cast<std::size_t>(j)] -= f * prow[static_cast<std::size_t>(j)];
            (*z)[static_cast<std::size_t>(e)] = 0.0;
        }
        basis[static_cast<std::size_t>(r)] = e;
    };

    auto choose_entering = [&](const std::vector<double>& z, double tol) {
        int best = -1;
        double best_score = -tol;
        for (int j = 0; j < m; ++j) {  // artificials never re-enter
            const double rc = z[static_cast<std::size_t>(j)];
            if (rc >= -tol) continue;
            if (bland) return j;
            CompensatedSum s;
            for (int i = 0; i < n; ++i) {
                const double v = T[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
                s.add(v * v);
            }
            const double score = rc / std::sqrt(1.0 + s.value());
            if (score < best_score) {
                best_score = score;
                best = j;
            }
        }
        return best;
    };

    auto choose_leaving = [&](int e) {
        int r = -1;
        double best_ratio = 0.0;
        for (int i = 0; i < n; ++i) {
            const double a = T[static_cast<std::size_t>(i)][static_cast<std::size_t>(e)];
            if (a <= opt.pivot_tol) continue;
            const double ratio = std::max(0.0, rhs[static_cast<std::size_t>(i)]) / a;
            if (r < 0 || ratio < best_ratio - 1e-15 * (1.0 + best_ratio)) {
                best_ratio = ratio;
                r = i;
            } else if (ratio <= best_ratio + 1e-15 * (1.0 + best_ratio)) {
                // Tie: Bland mode keeps the lowest basis index (anti-cycling);
                // otherwise kick artificials first, then take the larger pivot.
                if (bland) {
                    if (basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(r)]) r = i;
                    continue;
                }
                const bool cand_art = basis[static_cast<std::size_t>(i)] >= m;
                const bool cur_art = basis[static_cast<std::size_t>(r)] >= m;
                const double cur_a = T[static_cast<std::size_t>(r)][static_cast<std::size_t>(e)];
                if ((cand_art && !cur_art) || (cand_art == cur_art && a > cur_a)) r = i;
            }
        }
        return r;
    };

    auto run_phase = [&](const std::vector<double>& z, double tol, bool phase1) {
        prev_obj = std::numeric_limits<double>::infinity();
        stall = 0;
        while (true) {
            if (phase1 && phase1_objective() <= 0.0) return true;  // exact feasibility, done early
            const int e = choose_entering(z, tol);
            if (e < 0) return true;
            const int r = choose_leaving(e);
            if (r < 0) return false;  // unbounded in the current phase
            pivot(r, e);
            if (++sol.iterations > max_iter)
                throw numeric_error("lp: simplex iteration limit of " + std::to_string(max_iter) +
                                    " reached");
            const double obj = phase1 ? phase1_objective() : [&] {
                CompensatedSum s;
                for (int i = 0; i < n; ++i)
                    if (basis[static_cast<std::size_t>(i)] < m)
                        s.add(bscaled[static_cast<std::size_t>(basis[static_cast<std::size_t>(i)])] *
                              rhs[static_cast<std::size_t>(i)]);
                return s.value();
            }();
            if (obj > prev_obj - 1e-13 * (1.0 + std::abs(prev_obj))) {
                if (++stall > opt.stall_limit) bland = true;
            } else {
                stall = 0;
            }
            prev_obj = obj;
        }
    };

    if (!run_phase(z1, tol1, true))
        throw numeric_error("lp: phase one lost direction on sub-tolerance pivots");

    if (phase1_objective() > feas_thresh) {
        // Dual infeasible: the primal is unbounded along the phase-one multipliers.
        sol.status = LPStatus::unbounded;
        sol.ray.resize(static_cast<std::size_t>(n));
        double rmax = 0.0;
        for (int i = 0; i < n; ++i) {
            sol.ray[static_cast<std::size_t>(i)] =
                flip[static_cast<std::size_t>(i)] * (1.0 - z1[static_cast<std::size_t>(m + i)]);
            rmax = std::max(rmax, std::abs(sol.ray[static_cast<std::size_t>(i)]));
        }
        if (rmax > 0.0)
            for (double& v : sol.ray) v /= rmax;
        sol.objective_value = p.maximize ? std::numeric_limits<double>::infinity()
                                         : -std::numeric_limits<double>::infinity();
        return sol;
    }

    bland = false;
    if (!run_phase(z2, tol2, false)) {
        sol.status = LPStatus::infeasible;  // dual unbounded below
        return sol;
    }

    // Multipliers of the dual equations are the primal point.
    std::vector<double> x(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        x[static_cast<std::size_t>(i)] =
            flip[static_cast<std::size_t>(i)] * (-z2[static_cast<std::size_t>(m + i)]);

    // The z2 entries drift over long pivot paths on ill-conditioned bases, so
    // recompute the same multipliers from the final basis with one fresh
    // refined solve of B^T y = cost_B against the original data.
    {
        std::vector<std::vector<double>> Bt(static_cast<std::size_t>(n),
                                            std::vector<double>(static_cast<std::size_t>(n), 0.0));
        std::vector<double> cb(static_cast<std::size_t>(n), 0.0);
        for (int i = 0; i < n; ++i) {
            const int bj = basis[static_cast<std::size_t>(i)];
            if (bj < m) {
                for (int k = 0; k < n; ++k)
                    Bt[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] =
                        flip[static_cast<std::size_t>(k)] * gcol(bj, k);
                cb[static_cast<std::size_t>(i)] = bscaled[static_cast<std::size_t>(bj)];
            } else {
                Bt[static_cast<std::size_t>(i)][static_cast<std::size_t>(bj - m)] = 1.0;
            }
        }
        std::vector<double> y;
        if (detail::lu_solve_refined(std::move(Bt), std::move(cb), y)) {
            std::vector<double> xb(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i)
                xb[static_cast<std::size_t>(i)] =
                    flip[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(i)];
            if (check_feasibility(xb, p) < check_feasibility(x, p)) x = std::move(xb);
        }
    }

    sol.row_multipliers.assign(static_cast<std::size_t>(m), 0.0);
    for (int i = 0; i < n; ++i)
        if (basis[static_cast<std::size_t>(i)] < m) {
            const int j = basis[static_cast<std::size_t>(i)];
            sol.active_rows.push_back(j);
            sol.row_multipliers[static_cast<std::size_t>(j)] =
                std::max(0.0, rhs[static_cast<std::size_t>(i)]) / rowscale[static_cast<std::size_t>(j)];
        }
    std::sort(sol.active_rows.begin(), sol.active_rows.end());

    // Polish: when the working set is square, re-solve it directly and keep
    // whichever point satisfies the full row set better.
    if (static_cast<int>(sol.active_rows.size()) == n) {
        std::vector<std::vector<double>> R;
        std::vector<double> rrhs;
        for (int j : sol.active_rows) {
            R.push_back(p.rows[static_cast<std::size_t>(j)]);
            rrhs.push_back(p.rhs[static_cast<std::size_t>(j)]);
        }
        std::vector<double> xr;
        if (detail::lu_solve_refined(std::move(R), std::move(rrhs), xr) &&
            check_feasibility(xr, p) < check_feasibility(x, p))
            x = std::move(xr);
    }

    double rhs_scale = 0.0;
    for (double b : p.rhs) rhs_scale = std::max(rhs_scale, std::abs(b));
    const double viol = check_feasibility(x, p);
    if (viol > opt.feastol * (1.0 + rhs_scale) * 100.0)
        throw numeric_error("lp: recovered point violates the rows by " + std::to_string(viol) +
                            "; active set is numerically singular");

    sol.status = LPStatus::optimal;
    sol.objective_value = dot(p.objective, x);
    sol.x = std::move(x);
    return sol;
}

} // namespace ovlb
