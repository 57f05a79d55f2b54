#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include "ovlb/errors.hpp"
#include "ovlb/indicator.hpp"
#include "ovlb/lp.hpp"
#include "ovlb/moments.hpp"
#include "ovlb/spectrum.hpp"

namespace ovlb {

enum class BoundDirection { lower, upper };

inline const char* direction_name(BoundDirection d) {
    return d == BoundDirection::lower ? "lower" : "upper";
}

/// One solved bound: the optimal polynomial one-sided approximation of the
/// target function on the constraint grid, paired with its moment pairing.
struct BoundResult {
    BoundDirection direction = BoundDirection::lower;
    int degree = 0;
    MomentBasis basis = MomentBasis::chebyshev;
    std::vector<double> coefficients;  ///< expansion in the moment basis
    double raw_value = 0.0;            ///< objective . coefficients, unclamped
    double clamped_value = 0.0;        ///< raw value clipped to [0, max f]
    double certified_margin = std::numeric_limits<double>::quiet_NaN();
    bool certified = false;            ///< margin known and within tolerance
    LPStatus lp_status = LPStatus::optimal;
    long lp_iterations = 0;
    std::vector<int> active_rows;
    int grid_points = 0;
    GridProvenance provenance = GridProvenance::exact_spectrum;
};

namespace detail {

inline void require_matching_window(const MomentVector& M, const ConstraintGrid& grid) {
    // Raw (window-free) monomial moments pair with the identity window.
    const ScalingWindow mw = M.window ? *M.window : ScalingWindow{-1.0, 1.0};
    const double tol = 1e-12 * std::max(1.0, std::max(std::abs(mw.lo), std::abs(mw.hi)));
    if (std::abs(mw.lo - grid.window.lo) > tol || std::abs(mw.hi - grid.window.hi) > tol)
        throw input_error("bound: moment window [" + std::to_string(mw.lo) + ", " +
                          std::to_string(mw.hi) + "] does not match grid window [" +
                          std::to_string(grid.window.lo) + ", " + std::to_string(grid.window.hi) +
                          "]");
}

} // namespace detail

/// Best bound of the requested direction and degree over the grid: maximize
/// (minimize) the moment pairing over polynomials lying below (above) the
/// target values at every grid point.  The result is clamped to [0, max f],
/// always admissible for a unit-mass spectral measure.
inline BoundResult optimal_bound(const MomentVector& M, const ConstraintGrid& grid, int degree,
                                 BoundDirection dir, const LPOptions& lpopt = {}) {
    M.validate();
    grid.validate();
    if (degree < 0) throw input_error("bound: negative degree");
    if (degree > M.degree())
        throw input_error("bound: degree " + std::to_string(degree) + " exceeds moment order " +
                          std::to_string(M.degree()));
    detail::require_matching_window(M, grid);

    LinearProgram lp;
    lp.maximize = dir == BoundDirection::lower;
    lp.objective.assign(M.values.begin(), M.values.begin() + degree + 1);
    lp.rows.reserve(static_cast<std::size_t>(grid.size()));
    for (const auto& pt : grid.points) {
        lp.rows.push_back(basis_values(M.basis, pt.x, degree));
        lp.rhs.push_back(pt.f);
        lp.sense.push_back(dir == BoundDirection::lower ? RowSense::le : RowSense::ge);
    }

    const LPSolution s = solve_lp(lp, lpopt);
    if (s.status == LPStatus::unbounded)
        throw numeric_error("bound: program is unbounded; degree " + std::to_string(degree) +
                            " exceeds what " + std::to_string(grid.size()) +
                            " grid points can pin down, refine the grid");
    if (s.status == LPStatus::infeasible)
        throw numeric_error("bound: one-sided program reported infeasible; grid is corrupt");

    BoundResult r;
    r.direction = dir;
    r.degree = degree;
    r.basis = M.basis;
    r.coefficients = s.x;
    r.raw_value = s.objective_value;
    const double cap = grid.max_value();
    r.clamped_value = std::min(std::max(s.objective_value, 0.0), cap);
    r.lp_status = s.status;
    r.lp_iterations = s.iterations;
    r.active_rows = s.active_rows;
    r.grid_points = grid.size();
    r.provenance = grid.provenance;
    if (grid.provenance == GridProvenance::exact_spectrum) {
        r.certified_margin = 0.0;  // the grid already is the whole spectrum
        r.certified = true;
    }
    return r;
}

struct CertifyOptions {
    int factor = 4;            ///< verification grid refinement factor
    int max_rounds = 3;        ///< re-solve attempts on the refined grid
    double margin_tol = 1e-6;  ///< acceptable violation on the verification grid
    LPOptions lp;
};

namespace detail {

inline double verification_margin(const BoundResult& r, const ConstraintGrid& fine) {
    double worst = 0.0;
    for (const auto& pt : fine.points) {
        const double pv = eval_expansion(r.coefficients, r.basis, pt.x);
        const double v = r.direction == BoundDirection::lower ? pv - pt.f : pt.f - pv;
        worst = std::max(worst, v);
    }
    return worst;
}

} // namespace detail

/// Certify a discretized bound by checking its polynomial on a `factor`-times
/// finer grid.  While the worst violation exceeds the tolerance, the program
/// is re-solved on the finer grid and checked again, up to `max_rounds`
/// times; the final margin is reported either way, with `certified` saying
/// whether it met the tolerance.  Exact-spectrum results come back unchanged:
/// their grid is the complete spectrum, so there is nothing to certify
/// against.
inline BoundResult certify(const BoundResult& r, const MomentVector& M, const ConstraintGrid& grid,
                           const CertifyOptions& opt = {}) {
    if (r.provenance == GridProvenance::exact_spectrum || grid.provenance == GridProvenance::exact_spectrum)
        return r;
    if (opt.factor < 2) throw input_error("certify: factor must be at least 2");

    BoundResult cur = r;
    ConstraintGrid work = grid;
    for (int round = 0;; ++round) {
        const ConstraintGrid fine = refine(work, opt.factor);
        const double margin = detail::verification_margin(cur, fine);
        if (margin <= opt.margin_tol) {
            cur.certified = true;
            cur.certified_margin = margin;
            return cur;
        }
        if (round >= opt.max_rounds) {
            cur.certified = false;
            cur.certified_margin = margin;
            return cur;
        }
        work = fine;
        cur = optimal_bound(M, work, r.degree, r.direction, opt.lp);
    }
}

struct SweepOptions {
    bool do_certify = true;  ///< certify interval-grid results
    CertifyOptions certify;
    LPOptions lp;
    int threads = 1;  ///< deterministic regardless of the thread count
};

/// Solve a whole degree ladder in both directions.  Results are ordered by
/// degree, lower before upper.  The cells are independent, so they can be
/// fanned out over threads without changing any value.
inline std::vector<BoundResult> degree_sweep(const MomentVector& M, const ConstraintGrid& grid,
                                             const std::vector<int>& degrees,
                                             const SweepOptions& opt = {}) {
    if (degrees.empty()) throw input_error("degree_sweep: empty degree list");
    struct Cell {
        int degree;
        BoundDirection dir;
    };
    std::vector<Cell> cells;
    for (int d : degrees)
        for (BoundDirection dir : {BoundDirection::lower, BoundDirection::upper})
            cells.push_back({d, dir});

    std::vector<BoundResult> out(cells.size());
    std::vector<std::string> failures(cells.size());
    auto work = [&](std::size_t k) {
        try {
            BoundResult r = optimal_bound(M, grid, cells[k].degree, cells[k].dir, opt.lp);
            if (opt.do_certify && grid.provenance == GridProvenance::discretized_intervals)
                r = certify(r, M, grid, opt.certify);
            out[k] = std::move(r);
        } catch (const std::exception& e) {
            failures[k] = e.what();
        }
    };

    const int threads = std::max(1, opt.threads);
    if (threads == 1 || cells.size() <= 1) {
        for (std::size_t k = 0; k < cells.size(); ++k) work(k);
    } else {
        std::vector<std::thread> pool;
        std::size_t next = 0;
        const std::size_t chunk = (cells.size() + threads - 1) / static_cast<std::size_t>(threads);
        for (int t = 0; t < threads && next < cells.size(); ++t) {
            const std::size_t lo = next, hi = std::min(cells.size(), next + chunk);
            next = hi;
            pool.emplace_back([&, lo, hi] {
                for (std::size_t k = lo; k < hi; ++k) work(k);
            });
        }
        for (auto& th : pool) th.join();
    }
    for (std::size_t k = 0; k < cells.size(); ++k)
        if (!failures[k].empty())
            throw numeric_error("degree_sweep: degree " + std::to_string(cells[k].degree) + " " +
                                direction_name(cells[k].dir) + " failed: " + failures[k]);
    return out;
}

// ---------------------------------------------------------------------------
// Closed-form low-order bounds and their error terms.

/// Classic variational lower bound on the ground-level overlap:
/// (E_1 - <H>) / (E_1 - E_0).  Negative when the mean lies above E_1.
inline double eckart_lower(double mean, double e0, double e1) {
    if (!(e0 < e1)) throw input_error("eckart: requires E0 < E1");
    return (e1 - mean) / (e1 - e0);
}

/// Literature comparator (as printed): (<H> - E_0)^2 / (2 Var).  Reported
/// alongside the optimal bounds for reference only; it is not used as a
/// certificate.  Undefined when the state is an eigenstate.
inline double mora_upper(double mean, double second_moment, double e0) {
    const double var = second_moment - mean * mean;
    if (var <= 1e-14)
        throw input_error("mora: vanishing variance, the state is an eigenstate; bound undefined");
    const double d = mean - e0;
    return d * d / (2.0 * var);
}

struct FirstOrderBounds {
    double lower = 0.0;
    double upper = 0.0;
    double s = 0.0;           ///< E_1 - <H>; negative flips the lower bound to 0
    bool trivial_lower = false;
};

/// Degree-one bounds in closed form.  The upper bound is the chord through
/// (E_0, 1) and (E_D, 0); the lower bound is the Eckart line unless the mean
/// exceeds E_1, where only the trivial 0 remains valid.
inline FirstOrderBounds first_order_bounds(double mean, double e0, double e1, double ed) {
    if (!(e0 < e1) || !(e1 <= ed)) throw input_error("first_order: requires E0 < E1 <= ED");
    FirstOrderBounds r;
    r.s = e1 - mean;
    if (r.s < 0.0) {
        r.lower = 0.0;
        r.trivial_lower = true;
    } else {
        r.lower = eckart_lower(mean, e0, e1);
    }
    r.upper = (ed - mean) / (ed - e0);
    return r;
}

struct ErrorDecomposition {
    double delta = 0.0;                 ///< |sum_k P_k (f(E_k) - p(E_k))|
    double expectation = 0.0;           ///< sum_k P_k p(E_k)
    std::vector<double> per_level;      ///< P_k (f(E_k) - p(E_k))
};

/// Spectral error of a bounding polynomial: how far its moment pairing sits
/// from the exact target expectation, resolved level by level.
inline ErrorDecomposition error_decomposition(const SpectralModel& S,
                                              const std::vector<double>& coefficients,
                                              MomentBasis basis, const ScalingWindow& window,
                                              const IndicatorSpec& spec) {
    S.validate();
    spec.validate();
    window.validate();
    if (coefficients.empty()) throw input_error("error_decomposition: empty coefficient list");
    ErrorDecomposition out;
    CompensatedSum total, expect;
    for (int k = 0; k < S.levels(); ++k) {
        const double e = S.eigenvalues[static_cast<std::size_t>(k)];
        const double p = S.overlaps[static_cast<std::size_t>(k)];
        const double pv = eval_expansion(coefficients, basis, rescale_energy(e, window));
        const double term = p * (spec.value_at(e) - pv);
        out.per_level.push_back(term);
        total.add(term);
        expect.add(p * pv);
    }
    out.delta = std::abs(total.value());
    out.expectation = expect.value();
    return out;
}

} // namespace ovlb
