// Acceptance gate: nine criteria, one [PASS]/[FAIL] line each.
// Exit status is the number of failed criteria.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "ovlb/ovlb.hpp"
#include "ovlb/serialize.hpp"

using namespace ovlb;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances.
constexpr double kBracketSlack = 1e-7;     // criterion 1, 7
constexpr double kMonotoneSlack = 1e-9;    // criterion 2
constexpr double kFullDegreeGap = 1e-6;    // criterion 2, 7
constexpr double kClosedFormTol = 1e-9;    // criterion 3
constexpr double kErrorFormulaTol = 1e-10; // criterion 4
constexpr double kErrorDefectTol = 1e-9;   // criterion 4
constexpr double kCertifyTol = 1e-6;       // criterion 5
constexpr double kOrderingSlack = 1e-8;    // criterion 5
constexpr double kErrorShrinkFactor = 10.0;// criterion 6
constexpr double kBasisAgreeTol = 1e-6;    // criterion 8
constexpr double kSuiteBudgetSeconds = 60.0;

int g_failures = 0;

void report(int k, bool pass, const std::string& text) {
    std::printf("[%s] criterion %d: %s\n", pass ? "PASS" : "FAIL", k, text.c_str());
    if (!pass) ++g_failures;
}

// ---------------------------------------------------------------------------
// Random instance construction.  Eigenvalues sit near Chebyshev nodes with a
// bounded jitter so full-degree collocation stays well conditioned up to the
// 40-level ceiling.  Overlap profiles: uniform mass puts the mean
// mid-spectrum (trivial Eckart branch), ground-heavy mass models a good trial
// state (mean below E1, nontrivial Eckart), top-heavy mass engineers s < 0.

enum class Mass { uniform, ground_heavy, top_heavy };

SpectralModel random_model(std::mt19937_64& rng, int min_levels, int max_levels,
                           Mass profile = Mass::uniform) {
    std::uniform_int_distribution<int> nl(min_levels, max_levels);
    std::uniform_real_distribution<double> jit(-0.2, 0.2);
    std::uniform_real_distribution<double> pu(0.02, 1.0);
    const int L = nl(rng);
    SpectralModel S;
    for (int k = L - 1; k >= 0; --k) {
        const double theta = 3.14159265358979323846 * (k + 0.5 + jit(rng)) / L;
        S.eigenvalues.push_back(std::cos(theta));
    }
    double sum = 0.0;
    for (int k = 0; k < L; ++k) {
        double p = pu(rng);
        if (profile == Mass::top_heavy) p = std::exp(6.0 * k / std::max(1, L - 1));
        if (profile == Mass::ground_heavy) p = std::exp(-5.0 * k) + 1e-4 * p;
        S.overlaps.push_back(p);
        sum += p;
    }
    for (double& p : S.overlaps) p /= sum;
    S.validate();
    return S;
}

struct Instance {
    std::string id;
    SpectralModel S;
    MomentVector M;
    ScalingWindow w;
    int full = 0;
};

Instance model_instance(SpectralModel S, const std::string& id) {
    Instance in;
    in.id = id;
    in.full = S.levels() - 1;
    in.w = round_window_outward(S.eigenvalues.front(), S.eigenvalues.back());
    in.M = moments_from_spectrum(S, in.full, MomentBasis::chebyshev, in.w);
    in.S = std::move(S);
    return in;
}

// Dense matrices drawn rotation-invariantly: a random orthogonal conjugation
// of a spread eigenvalue ladder.  Near-degenerate pairs are excluded by
// construction; a polynomial that separates levels at distance eps needs
// coefficients of size 1/eps, which no double-precision solver can keep
// grid-feasible at full degree.
Instance matrix_instance(std::mt19937_64& rng, const std::string& id) {
    std::uniform_int_distribution<int> nd(8, 24);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> su(0.5, 3.0), tu(-1.0, 1.0), jit(-0.2, 0.2);
    const int n = nd(rng);

    // Eigenvalues: affinely placed jittered Chebyshev nodes.
    const double scale = su(rng), shift = tu(rng);
    std::vector<double> lambda(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k)
        lambda[static_cast<std::size_t>(n - 1 - k)] =
            shift + scale * std::cos(3.14159265358979323846 * (k + 0.5 + jit(rng)) / n);

    // Random orthogonal Q from Gram-Schmidt on a Gaussian matrix.
    std::vector<std::vector<double>> q(static_cast<std::size_t>(n),
                                       std::vector<double>(static_cast<std::size_t>(n)));
    for (auto& col : q) {
        for (double& v : col) v = gauss(rng);
    }
    for (int j = 0; j < n; ++j) {
        auto& col = q[static_cast<std::size_t>(j)];
        for (int r = 0; r < 2; ++r)
            for (int i = 0; i < j; ++i) {
                const double pr = dot(col, q[static_cast<std::size_t>(i)]);
                for (int k = 0; k < n; ++k)
                    col[static_cast<std::size_t>(k)] -=
                        pr * q[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
            }
        const double nrm = norm2(col);
        for (double& v : col) v /= nrm;
    }

    std::vector<double> e(static_cast<std::size_t>(n) * n, 0.0);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k <= j; ++k) {
            CompensatedSum s;
            for (int l = 0; l < n; ++l)
                s.add(lambda[static_cast<std::size_t>(l)] *
                      q[static_cast<std::size_t>(l)][static_cast<std::size_t>(j)] *
                      q[static_cast<std::size_t>(l)][static_cast<std::size_t>(k)]);
            e[static_cast<std::size_t>(j) * n + k] = s.value();
            e[static_cast<std::size_t>(k) * n + j] = s.value();
        }
    const DenseSymmetricMatrix A(n, std::move(e));
    std::vector<double> raw(static_cast<std::size_t>(n));
    for (double& x : raw) x = gauss(rng);
    double nrm = norm2(raw);
    for (double& x : raw) x /= nrm;
    const StateVector phi(raw);

    Instance in;
    in.id = id;
    in.S = spectral_from_matrix(A, phi);
    in.full = in.S.levels() - 1;
    in.w = round_window_outward(in.S.eigenvalues.front(), in.S.eigenvalues.back());
    in.M = chebyshev_moments(A, phi, in.full, in.w);
    return in;
}

struct TargetSet {
    std::string name;
    std::vector<int> idx;
    std::vector<double> weights;
};

std::vector<TargetSet> target_sets(const SpectralModel& S) {
    std::vector<TargetSet> t;
    t.push_back({"ground", {0}, {}});
    t.push_back({"excited", {1}, {}});
    if (S.levels() >= 3) t.push_back({"multi", {0, 1, 2}, {1.0, 0.6, 0.3}});
    return t;
}

struct Cell {
    std::vector<int> degrees;
    std::vector<BoundResult> res;  // degree-major, lower before upper
    double exact = 0.0;
};

Cell solve_cell(const Instance& in, const TargetSet& t) {
    Cell c;
    for (int d = 1; d <= std::min(8, in.full); ++d) c.degrees.push_back(d);
    if (in.full > 8) c.degrees.push_back(in.full);
    const ConstraintGrid grid =
        discretize(build_exact_indicator(in.S, t.idx, t.weights), in.w);
    c.res = degree_sweep(in.M, grid, c.degrees);
    c.exact = exact_overlap(in.S, t.idx, t.weights);
    return c;
}

double model_mean(const SpectralModel& S) {
    CompensatedSum m;
    for (int i = 0; i < S.levels(); ++i)
        m.add(S.overlaps[static_cast<std::size_t>(i)] *
              S.eigenvalues[static_cast<std::size_t>(i)]);
    return m.value();
}

// ---------------------------------------------------------------------------

struct SuiteResults {
    std::vector<Instance> instances;
    std::vector<std::vector<Cell>> cells;  // per instance, per target set
    double seconds = 0.0;
};

SuiteResults run_suite() {
    const auto t0 = std::chrono::steady_clock::now();
    SuiteResults out;
    std::mt19937_64 rng(20260101u);
    for (int k = 0; k < 50; ++k) {
        const Mass profile = k < 20   ? Mass::ground_heavy
                             : k < 40 ? Mass::uniform
                                      : Mass::top_heavy;
        out.instances.push_back(
            model_instance(random_model(rng, 5, 40, profile), "model-" + std::to_string(k)));
    }
    for (int k = 0; k < 20; ++k)
        out.instances.push_back(matrix_instance(rng, "matrix-" + std::to_string(k)));
    for (const Instance& in : out.instances) {
        std::vector<Cell> per_target;
        for (const TargetSet& t : target_sets(in.S)) per_target.push_back(solve_cell(in, t));
        out.cells.push_back(std::move(per_target));
    }
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

void criterion_1(const SuiteResults& suite) {
    int bad = 0, cells = 0;
    for (const auto& per_target : suite.cells)
        for (const Cell& c : per_target) {
            ++cells;
            for (std::size_t k = 0; k < c.res.size(); k += 2) {
                const BoundResult& lo = c.res[k];
                const BoundResult& hi = c.res[k + 1];
                if (!lo.certified || !hi.certified) ++bad;
                if (!(lo.clamped_value <= c.exact + kBracketSlack)) ++bad;
                if (!(hi.clamped_value >= c.exact - kBracketSlack)) ++bad;
            }
        }
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "bracketing on 70 instances x %d target cells in %.1f s (%d violations)",
                  cells, suite.seconds, bad);
    report(1, bad == 0 && suite.seconds < kSuiteBudgetSeconds, buf);
}

void criterion_2(const SuiteResults& suite) {
    int mono_bad = 0, gap_bad = 0;
    double worst_gap = 0.0;
    for (const auto& per_target : suite.cells)
        for (const Cell& c : per_target) {
            for (std::size_t k = 2; k < c.res.size(); k += 2) {
                if (c.res[k].clamped_value < c.res[k - 2].clamped_value - kMonotoneSlack)
                    ++mono_bad;
                if (c.res[k + 1].clamped_value > c.res[k - 1].clamped_value + kMonotoneSlack)
                    ++mono_bad;
            }
            const double gap = c.res[c.res.size() - 1].clamped_value -
                               c.res[c.res.size() - 2].clamped_value;
            worst_gap = std::max(worst_gap, gap);
            if (gap > kFullDegreeGap) ++gap_bad;
        }
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "degree monotonicity (%d violations), full-degree gap <= 1e-6 "
                  "(worst %.2e, %d violations)",
                  mono_bad, worst_gap, gap_bad);
    report(2, mono_bad == 0 && gap_bad == 0, buf);
}

void criterion_3(const SuiteResults& suite) {
    int bad = 0, s_neg = 0, s_pos = 0;
    for (std::size_t i = 0; i < suite.instances.size(); ++i) {
        const Instance& in = suite.instances[i];
        const Cell& ground = suite.cells[i][0];
        const double mean = model_mean(in.S);
        const double eck = eckart_lower(mean, in.S.eigenvalues.front(), in.S.eigenvalues[1]);
        const FirstOrderBounds fo = first_order_bounds(
            mean, in.S.eigenvalues.front(), in.S.eigenvalues[1], in.S.eigenvalues.back());
        (fo.s < 0.0 ? s_neg : s_pos)++;
        if (std::abs(ground.res[0].clamped_value - std::max(0.0, eck)) > kClosedFormTol) ++bad;
        if (std::abs(ground.res[1].raw_value - fo.upper) > kClosedFormTol) ++bad;
    }
    char buf[220];
    std::snprintf(buf, sizeof buf,
                  "degree-1 LP equals max(0, Eckart) and first-order upper within 1e-9 "
                  "(%d mismatches; %d instances on the nontrivial branch, %d on s < 0)",
                  bad, s_pos, s_neg);
    report(3, bad == 0 && s_neg >= 10 && s_pos >= 15, buf);
}

void criterion_4() {
    std::mt19937_64 rng(404u);
    int bad_formula = 0, bad_defect = 0;
    for (int rep = 0; rep < 20; ++rep) {
        const bool topheavy = rep >= 10;
        const SpectralModel S =
            random_model(rng, 4, 12, topheavy ? Mass::top_heavy : Mass::ground_heavy);
        const Instance in = model_instance(S, "err");
        const double mid = (in.w.lo + in.w.hi) / 2.0, half = in.w.span() / 2.0;
        const double e0 = S.eigenvalues.front(), e1 = S.eigenvalues[1],
                     ed = S.eigenvalues.back();
        const IndicatorSpec ground = build_exact_indicator(S, {0});

        // Upper chord through (E0, 1), (ED, 0): delta = sum_{i>=1} P_i (ED-E_i)/(ED-E0).
        {
            const std::vector<double> c{(ed - mid) / (ed - e0), -half / (ed - e0)};
            const ErrorDecomposition e =
                error_decomposition(S, c, MomentBasis::chebyshev, in.w, ground);
            CompensatedSum want;
            for (int i = 1; i < S.levels(); ++i)
                want.add(S.overlaps[static_cast<std::size_t>(i)] *
                         (ed - S.eigenvalues[static_cast<std::size_t>(i)]) / (ed - e0));
            if (std::abs(e.delta - want.value()) > kErrorFormulaTol) ++bad_formula;
        }
        // Lower bound: the s >= 0 chord through (E0, 1), (E1, 0), or the
        // trivial zero polynomial when the mean exceeds E1.
        if (topheavy) {
            const ErrorDecomposition e = error_decomposition(
                S, {0.0}, MomentBasis::chebyshev, in.w, ground);
            if (std::abs(e.delta - S.overlaps.front()) > kErrorFormulaTol) ++bad_formula;
        } else {
            const std::vector<double> c{(e1 - mid) / (e1 - e0), -half / (e1 - e0)};
            const ErrorDecomposition e =
                error_decomposition(S, c, MomentBasis::chebyshev, in.w, ground);
            CompensatedSum want;
            for (int i = 2; i < S.levels(); ++i)
                want.add(S.overlaps[static_cast<std::size_t>(i)] *
                         (S.eigenvalues[static_cast<std::size_t>(i)] - e1) / (e1 - e0));
            if (std::abs(e.delta - want.value()) > kErrorFormulaTol) ++bad_formula;
        }
        // LP-optimal polynomials: delta equals |raw - exact|.
        const ConstraintGrid grid = discretize(ground, in.w);
        const double exact = S.overlaps.front();
        for (int d = 1; d <= std::min(4, in.full); ++d)
            for (BoundDirection dir : {BoundDirection::lower, BoundDirection::upper}) {
                const BoundResult r = optimal_bound(in.M, grid, d, dir);
                const ErrorDecomposition e =
                    error_decomposition(S, r.coefficients, r.basis, in.w, ground);
                if (std::abs(e.delta - std::abs(r.raw_value - exact)) > kErrorDefectTol)
                    ++bad_defect;
            }
    }
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "analytic error formulas within 1e-10 (%d misses), LP defect identity "
                  "within 1e-9 (%d misses) on 20 instances",
                  bad_formula, bad_defect);
    report(4, bad_formula == 0 && bad_defect == 0, buf);
}

void criterion_5() {
    const SpectralModel S = gen_cluster_model();
    const ScalingWindow w = round_window_outward(S.eigenvalues.front(), S.eigenvalues.back());
    const MomentVector M = moments_from_spectrum(S, 8, MomentBasis::chebyshev, w);

    const std::vector<LevelWindow> lw = level_windows(S, 2, 0.3, 0.3);
    const std::array<double, 2> outer{std::min(w.lo, lw.front().lo),
                                      std::max(w.hi, lw.back().hi)};
    const IndicatorSpec spec = build_interval_indicator(lw, {0}, {}, outer).spec;
    const ConstraintGrid ivgrid = discretize(spec, w);  // 20/200 defaults
    const ConstraintGrid exgrid = discretize(build_exact_indicator(S, {0}), w);

    std::vector<int> degrees;
    for (int d = 1; d <= 8; ++d) degrees.push_back(d);
    const std::vector<BoundResult> iv = degree_sweep(M, ivgrid, degrees);
    const std::vector<BoundResult> ex = degree_sweep(M, exgrid, degrees);

    int uncertified = 0, ordering_bad = 0;
    double worst_margin = 0.0;
    for (std::size_t k = 0; k < iv.size(); ++k) {
        if (!iv[k].certified || !(iv[k].certified_margin <= kCertifyTol)) ++uncertified;
        worst_margin = std::max(worst_margin, iv[k].certified_margin);
        const bool lower = iv[k].direction == BoundDirection::lower;
        if (lower && iv[k].clamped_value > ex[k].clamped_value + kOrderingSlack) ++ordering_bad;
        if (!lower && iv[k].clamped_value < ex[k].clamped_value - kOrderingSlack) ++ordering_bad;
    }
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "interval grids certify (worst margin %.2e, %d uncertified) and never "
                  "beat exact grids (%d ordering violations)",
                  worst_margin, uncertified, ordering_bad);
    report(5, uncertified == 0 && ordering_bad == 0, buf);
}

void criterion_6() {
    const std::vector<double> gaps{0.05, 0.1, 0.2, 0.4};
    const int max_degree = 10;
    // mean error over both directions, indexed [degree-1][gap]
    std::vector<std::array<double, 4>> err(max_degree);
    for (std::size_t g = 0; g < gaps.size(); ++g) {
        const SpectralModel S = gen_cluster_model_gap(gaps[g]);
        const Instance in = model_instance(S, "gap");
        const ConstraintGrid grid = discretize(build_exact_indicator(S, {0}), in.w);
        const double exact = exact_overlap(S, {0});
        std::vector<int> degrees;
        for (int d = 1; d <= max_degree; ++d) degrees.push_back(d);
        const std::vector<BoundResult> res = degree_sweep(in.M, grid, degrees);
        for (int d = 1; d <= max_degree; ++d) {
            const double el = std::abs(res[2 * (d - 1)].clamped_value - exact);
            const double eu = std::abs(res[2 * (d - 1) + 1].clamped_value - exact);
            err[static_cast<std::size_t>(d - 1)][g] = (el + eu) / 2.0;
        }
    }
    int per_degree_bad = 0;
    for (int d = 1; d <= 6; ++d)
        for (std::size_t g = 1; g < gaps.size(); ++g)
            if (err[static_cast<std::size_t>(d - 1)][g] >
                err[static_cast<std::size_t>(d - 1)][g - 1] + 1e-12)
                ++per_degree_bad;
    std::array<double, 4> avg{};
    for (const auto& row : err)
        for (std::size_t g = 0; g < 4; ++g) avg[g] += row[g] / max_degree;
    bool avg_ok = true;
    for (std::size_t g = 1; g < 4; ++g) avg_ok = avg_ok && avg[g] <= avg[g - 1];

    const double e2 = err[1][3], e10 = err[9][3];
    const bool shrink_ok = e10 == 0.0 || e2 / e10 >= kErrorShrinkFactor;
    char buf[220];
    std::snprintf(buf, sizeof buf,
                  "error vs gap trend (per-degree inversions: %d, degree-averaged trend "
                  "holds: %s), gap 0.4 error shrinks %.0fx from degree 2 to 10",
                  per_degree_bad, avg_ok ? "yes" : "no",
                  e10 > 0.0 ? e2 / e10 : std::numeric_limits<double>::infinity());
    report(6, (per_degree_bad == 0 || avg_ok) && shrink_ok, buf);
}

void criterion_7() {
    std::mt19937_64 rng(707u);
    std::uniform_real_distribution<double> vu(0.0, 1.0);
    int bracket_bad = 0, threshold_bad = 0;
    for (int rep = 0; rep < 15; ++rep) {
        const SpectralModel S = random_model(rng, 5, 15);
        const Instance in = model_instance(S, "ms");
        const int L = S.levels();

        std::vector<int> all(static_cast<std::size_t>(L));
        std::vector<double> v(static_cast<std::size_t>(L));
        for (int i = 0; i < L; ++i) {
            all[static_cast<std::size_t>(i)] = i;
            v[static_cast<std::size_t>(i)] = vu(rng);
        }
        const ConstraintGrid grid = discretize(build_exact_indicator(S, all, v), in.w);
        const double exact = exact_overlap(S, all, v);
        std::vector<int> degrees;
        for (int d = 1; d <= std::min(8, in.full); ++d) degrees.push_back(d);
        const std::vector<BoundResult> res = degree_sweep(in.M, grid, degrees);
        for (std::size_t k = 0; k < res.size(); k += 2) {
            if (!(res[k].clamped_value <= exact + kBracketSlack)) ++bracket_bad;
            if (!(res[k + 1].clamped_value >= exact - kBracketSlack)) ++bracket_bad;
        }

        // Threshold style: v = 1 strictly below a mid-spectrum cutoff.
        const int split = L / 2;
        const double cut = (S.eigenvalues[static_cast<std::size_t>(split - 1)] +
                            S.eigenvalues[static_cast<std::size_t>(split)]) /
                           2.0;
        std::vector<int> below;
        CompensatedSum cum;
        for (int i = 0; i < L; ++i)
            if (S.eigenvalues[static_cast<std::size_t>(i)] < cut) {
                below.push_back(i);
                cum.add(S.overlaps[static_cast<std::size_t>(i)]);
            }
        const ConstraintGrid tgrid = discretize(build_exact_indicator(S, below), in.w);
        const BoundResult tlo = optimal_bound(in.M, tgrid, in.full, BoundDirection::lower);
        const BoundResult thi = optimal_bound(in.M, tgrid, in.full, BoundDirection::upper);
        if (std::abs(tlo.clamped_value - cum.value()) > kFullDegreeGap) ++threshold_bad;
        if (std::abs(thi.clamped_value - cum.value()) > kFullDegreeGap) ++threshold_bad;
    }
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "weighted multi-state bracketing (%d violations) and threshold "
                  "cumulative overlap at full degree (%d misses) on 15 models",
                  bracket_bad, threshold_bad);
    report(7, bracket_bad == 0 && threshold_bad == 0, buf);
}

void criterion_8() {
    std::mt19937_64 rng(808u);
    int basis_bad = 0;
    double worst = 0.0;
    for (int rep = 0; rep < 10; ++rep) {
        const SpectralModel S = random_model(rng, 12, 20);
        const ScalingWindow w =
            round_window_outward(S.eigenvalues.front(), S.eigenvalues.back());
        const MomentVector Mc = moments_from_spectrum(S, 10, MomentBasis::chebyshev, w);
        const MomentVector Mm = moments_from_spectrum(S, 10, MomentBasis::monomial, w);
        const ConstraintGrid grid = discretize(build_exact_indicator(S, {0}), w);
        for (int d = 1; d <= 10; ++d)
            for (BoundDirection dir : {BoundDirection::lower, BoundDirection::upper}) {
                const BoundResult rc = optimal_bound(Mc, grid, d, dir);
                const BoundResult rm = optimal_bound(Mm, grid, d, dir);
                const double diff = std::abs(rc.clamped_value - rm.clamped_value);
                worst = std::max(worst, diff);
                if (diff > kBasisAgreeTol) ++basis_bad;
            }
    }

    // The CLI path comes from the test harness; when run by hand, look for the
    // tool next to this binary instead.
    std::string bin;
    if (const char* env = std::getenv("OVLB_CLI_BIN")) {
        bin = env;
    } else {
        std::error_code ec;
        const fs::path self = fs::read_symlink("/proc/self/exe", ec);
        if (!ec) {
            const fs::path guess = self.parent_path().parent_path() / "tools" / "ovlb";
            if (fs::exists(guess)) bin = guess.string();
        }
    }
    bool cli_ok = false;
    std::string cli_note = "CLI determinism: ovlb binary not found (set OVLB_CLI_BIN)";
    if (!bin.empty()) {
        const fs::path dir =
            fs::temp_directory_path() / ("ovlb_accept_" + std::to_string(::getpid()));
        fs::create_directories(dir);
        const std::string cd = "cd '" + dir.string() + "' && '" + bin + "' ";
        const std::string quiet = " > /dev/null 2>&1";
        const std::string args = "bound --model m.json --mode intervals --degrees 1..4";
        cli_ok = std::system((cd + "gen-model --out m.json" + quiet).c_str()) == 0 &&
                 std::system((cd + args + " --out a.csv --json a.json" + quiet).c_str()) == 0 &&
                 std::system((cd + args + " --out b.csv --json b.json" + quiet).c_str()) == 0 &&
                 read_text_file((dir / "a.csv").string()) ==
                     read_text_file((dir / "b.csv").string()) &&
                 read_text_file((dir / "a.json").string()) ==
                     read_text_file((dir / "b.json").string());
        cli_note = cli_ok ? "CLI reruns byte-identical" : "CLI reruns differ";
        std::error_code ec;
        fs::remove_all(dir, ec);
    }
    char buf[220];
    std::snprintf(buf, sizeof buf,
                  "chebyshev vs monomial agree within 1e-6 (worst %.2e, %d misses); %s",
                  worst, basis_bad, cli_note.c_str());
    report(8, basis_bad == 0 && cli_ok, buf);
}

void criterion_9() {
    std::printf("    two-level comparator report (report-only):\n");
    std::printf("    %-6s %-12s %-22s %s\n", "P0", "exact", "comparator value", "note");
    for (const double p0 : {0.5, 0.75, 0.9}) {
        SpectralModel S;
        S.eigenvalues = {0.0, 1.0};
        S.overlaps = {p0, 1.0 - p0};
        const double mean = model_mean(S);
        double second = 0.0;
        for (int i = 0; i < 2; ++i)
            second += S.overlaps[static_cast<std::size_t>(i)] *
                      S.eigenvalues[static_cast<std::size_t>(i)] *
                      S.eigenvalues[static_cast<std::size_t>(i)];
        const double m = mora_upper(mean, second, S.eigenvalues.front());
        std::printf("    %-6g %-12g %-22.16g %s\n", p0, p0, m,
                    m < p0 ? "sits below the exact overlap" : "");
    }
    report(9, true, "comparator values emitted for P0 in {0.5, 0.75, 0.9} (no assertion)");
}

} // namespace

int main() {
    const SuiteResults suite = run_suite();
    criterion_1(suite);
    criterion_2(suite);
    criterion_3(suite);
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    if (g_failures == 0)
        std::printf("all 9 acceptance criteria passed\n");
    else
        std::printf("%d acceptance criteria FAILED\n", g_failures);
    return g_failures;
}
