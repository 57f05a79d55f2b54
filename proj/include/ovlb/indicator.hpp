#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ovlb/errors.hpp"
#include "ovlb/moments.hpp"
#include "ovlb/spectrum.hpp"

namespace ovlb {

enum class IndicatorMode { exact_points, intervals };

/// One piece of a piecewise-constant target function: value on [lo, hi].
/// A point region has lo == hi.
struct IndicatorRegion {
    double lo = 0.0;
    double hi = 0.0;
    double value = 0.0;
    bool is_point() const { return lo == hi; }
};

/// Piecewise-constant target function f whose expectation over the spectral
/// measure is the quantity being bounded.  Regions are sorted and pairwise
/// disjoint; energies outside every region are unconstrained (f treated as 0
/// only for reporting purposes).
struct IndicatorSpec {
    IndicatorMode mode = IndicatorMode::exact_points;
    std::vector<IndicatorRegion> regions;
    std::optional<std::array<double, 2>> outer;  ///< hull of the constrained range

    void validate() const {
        if (regions.empty()) throw input_error("indicator: no regions");
        for (std::size_t i = 0; i < regions.size(); ++i) {
            const auto& r = regions[i];
            if (!std::isfinite(r.lo) || !std::isfinite(r.hi) || r.lo > r.hi)
                throw input_error("indicator: malformed region " + std::to_string(i));
            if (!std::isfinite(r.value) || r.value < 0.0)
                throw input_error("indicator: region " + std::to_string(i) + " has negative value");
            if (i > 0 && !(regions[i - 1].hi < r.lo))
                throw input_error("indicator: regions " + std::to_string(i - 1) + " and " +
                                  std::to_string(i) + " overlap or touch");
            if (mode == IndicatorMode::exact_points && !r.is_point())
                throw input_error("indicator: exact mode allows point regions only");
        }
        if (mode == IndicatorMode::intervals && !outer)
            throw input_error("indicator: interval mode requires the outer hull");
        if (outer && (!( (*outer)[0] <= regions.front().lo) || !((*outer)[1] >= regions.back().hi)))
            throw input_error("indicator: outer hull does not cover the regions");
    }

    /// f(e): the containing region's value, 0 outside all regions.
    double value_at(double e) const {
        for (const auto& r : regions)
            if (r.lo <= e && e <= r.hi) return r.value;
        return 0.0;
    }

    double max_value() const {
        double m = 0.0;
        for (const auto& r : regions) m = std::max(m, r.value);
        return m;
    }
};

/// Exact-spectrum indicator: one point region per level, carrying weight v_i
/// on targets and 0 elsewhere.
inline IndicatorSpec build_exact_indicator(const SpectralModel& S, const std::vector<int>& targets,
                                           const std::vector<double>& weights = {}) {
    S.validate();
    if (targets.empty()) throw input_error("indicator: empty target set");
    if (!weights.empty() && weights.size() != targets.size())
        throw input_error("indicator: weight count does not match target count");
    std::vector<double> v(static_cast<std::size_t>(S.levels()), 0.0);
    for (std::size_t k = 0; k < targets.size(); ++k) {
        const int i = targets[k];
        if (i < 0 || i >= S.levels())
            throw input_error("indicator: target level " + std::to_string(i) + " out of range");
        v[static_cast<std::size_t>(i)] = weights.empty() ? 1.0 : weights[k];
    }
    IndicatorSpec spec;
    spec.mode = IndicatorMode::exact_points;
    for (int i = 0; i < S.levels(); ++i) {
        const double e = S.eigenvalues[static_cast<std::size_t>(i)];
        spec.regions.push_back({e, e, v[static_cast<std::size_t>(i)]});
    }
    spec.validate();
    return spec;
}

/// Expected location window [lo, hi] for one level.
struct LevelWindow {
    double lo = 0.0;
    double hi = 0.0;
};

/// Per-level windows around model eigenvalues: level i gets
/// [E_i - gamma_minus * g_{i-1}, E_i + gamma_plus * g_i] where g_i is the gap
/// to the next level.  The boundary gaps g_{-1} and g_{K-1} are taken equal
/// to their nearest interior gap so end levels get windows of sane width.
inline std::vector<LevelWindow> level_windows(const SpectralModel& S, int count,
                                              double gamma_minus = 0.3, double gamma_plus = 0.3) {
    S.validate();
    if (count < 1 || count > S.levels())
        throw input_error("level_windows: count must lie in [1, levels]");
    if (S.levels() < 2) throw input_error("level_windows: need at least two levels to define gaps");
    if (!(gamma_minus > 0.0) || gamma_minus > 0.5 || !(gamma_plus > 0.0) || gamma_plus > 0.5)
        throw input_error("level_windows: gamma factors must lie in (0, 0.5]");
    auto gap = [&](int i) {
        // g_i = E_{i+1} - E_i, with the two boundary gaps mirrored inward.
        const int n = S.levels();
        if (i < 0) i = 0;
        if (i > n - 2) i = n - 2;
        return S.eigenvalues[static_cast<std::size_t>(i + 1)] - S.eigenvalues[static_cast<std::size_t>(i)];
    };
    std::vector<LevelWindow> w(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        const double e = S.eigenvalues[static_cast<std::size_t>(i)];
        w[static_cast<std::size_t>(i)] = {e - gamma_minus * gap(i - 1), e + gamma_plus * gap(i)};
    }
    return w;
}

/// One group of windows collapsed by overlap resolution.
struct MergedGroup {
    std::vector<int> levels;  ///< original window indices folded together
    double value = 0.0;       ///< weight assigned to the merged window
};

struct MergeReport {
    std::vector<MergedGroup> groups;  ///< only groups with more than one member
    bool any() const { return !groups.empty(); }
};

struct IntervalIndicatorResult {
    IndicatorSpec spec;
    MergeReport merges;
};

/// Interval-mode indicator from per-level windows.  Targets keep their
/// weight on their window; maximal runs of non-target windows become zero
/// regions, with the first and last run stretched to the outer hull so the
/// whole admissible range is constrained.  Overlapping windows are merged
/// first; a merged window covers every member level, takes the largest member
/// weight, and is reported, since the bounded quantity then includes every
/// level inside it.
inline IntervalIndicatorResult build_interval_indicator(const std::vector<LevelWindow>& windows,
                                                        const std::vector<int>& targets,
                                                        const std::vector<double>& weights,
                                                        std::array<double, 2> outer) {
    const int K = static_cast<int>(windows.size());
    if (K == 0) throw input_error("indicator: no level windows");
    if (targets.empty()) throw input_error("indicator: empty target set");
    if (!weights.empty() && weights.size() != targets.size())
        throw input_error("indicator: weight count does not match target count");
    for (int i = 0; i < K; ++i) {
        if (!(windows[static_cast<std::size_t>(i)].lo <= windows[static_cast<std::size_t>(i)].hi))
            throw input_error("indicator: window " + std::to_string(i) + " is inverted");
        if (i > 0 && windows[static_cast<std::size_t>(i)].lo < windows[static_cast<std::size_t>(i - 1)].lo)
            throw input_error("indicator: windows must be sorted by lower edge");
    }
    if (!(outer[0] <= windows.front().lo) || !(outer[1] >= windows.back().hi))
        throw input_error("indicator: outer hull does not cover the windows");

    std::vector<double> v(static_cast<std::size_t>(K), 0.0);
    for (std::size_t k = 0; k < targets.size(); ++k) {
        const int i = targets[k];
        if (i < 0 || i >= K)
            throw input_error("indicator: target level " + std::to_string(i) + " out of range");
        v[static_cast<std::size_t>(i)] = weights.empty() ? 1.0 : weights[k];
    }

    // Union overlapping or touching windows into groups.
    struct Group {
        double lo, hi, value;
        bool target;
        std::vector<int> members;
    };
    std::vector<Group> groups;
    for (int i = 0; i < K; ++i) {
        const auto& wi = windows[static_cast<std::size_t>(i)];
        const bool tgt = v[static_cast<std::size_t>(i)] > 0.0;
        if (!groups.empty() && wi.lo <= groups.back().hi) {
            Group& g = groups.back();
            g.hi = std::max(g.hi, wi.hi);
            g.value = std::max(g.value, v[static_cast<std::size_t>(i)]);
            g.target = g.target || tgt;
            g.members.push_back(i);
        } else {
            groups.push_back({wi.lo, wi.hi, v[static_cast<std::size_t>(i)], tgt, {i}});
        }
    }

    IntervalIndicatorResult out;
    for (const auto& g : groups)
        if (g.members.size() > 1) out.merges.groups.push_back({g.members, g.value});

    IndicatorSpec spec;
    spec.mode = IndicatorMode::intervals;
    spec.outer = outer;
    const int G = static_cast<int>(groups.size());
    int i = 0;
    while (i < G) {
        if (groups[static_cast<std::size_t>(i)].target) {
            spec.regions.push_back({groups[static_cast<std::size_t>(i)].lo,
                                    groups[static_cast<std::size_t>(i)].hi,
                                    groups[static_cast<std::size_t>(i)].value});
            ++i;
            continue;
        }
        // A maximal run of non-target groups becomes one zero region spanning
        // the run (no level lives in the inter-window gaps); the first run
        // starts at the hull edge and the last one ends there.
        int j = i;
        while (j + 1 < G && !groups[static_cast<std::size_t>(j + 1)].target) ++j;
        const double lo = i == 0 ? outer[0] : groups[static_cast<std::size_t>(i)].lo;
        const double hi = j == G - 1 ? outer[1] : groups[static_cast<std::size_t>(j)].hi;
        spec.regions.push_back({lo, hi, 0.0});
        i = j + 1;
    }
    // Unwindowed levels sit above the last window; when that window is a
    // target the zero constraint up to the hull edge must still be laid down.
    if (groups.back().target && outer[1] > groups.back().hi) {
        const double lo = std::nextafter(groups.back().hi, outer[1]);
        if (lo < outer[1]) spec.regions.push_back({lo, outer[1], 0.0});
    }
    spec.validate();
    out.spec = std::move(spec);
    return out;
}

/// Threshold indicator: weight `value` strictly below the cutoff, 0 at and
/// above it.  The value region stops one part in 1e9 of the hull span short
/// of the cutoff so the two regions stay disjoint.
inline IndicatorSpec build_threshold_indicator(double cutoff, std::array<double, 2> outer,
                                               double value = 1.0) {
    if (!(outer[0] < cutoff) || !(cutoff < outer[1]))
        throw input_error("indicator: cutoff must lie strictly inside the outer hull");
    if (!(value >= 0.0)) throw input_error("indicator: negative threshold value");
    const double delta = 1e-9 * (outer[1] - outer[0]);
    IndicatorSpec spec;
    spec.mode = IndicatorMode::intervals;
    spec.outer = outer;
    spec.regions.push_back({outer[0], cutoff - delta, value});
    spec.regions.push_back({cutoff, outer[1], 0.0});
    spec.validate();
    return spec;
}

enum class GridProvenance { exact_spectrum, discretized_intervals };

inline const char* provenance_name(GridProvenance p) {
    return p == GridProvenance::exact_spectrum ? "exact_spectrum" : "discretized_intervals";
}

struct GridPoint {
    double x = 0.0;  ///< rescaled coordinate
    double f = 0.0;  ///< target-function value
};

/// Sample-point budget for interval discretization: regions carrying weight
/// get `target_points`, zero regions get `complement_points`; a non-empty
/// `per_region` list overrides both entry by entry.
struct DiscretizationCounts {
    int target_points = 20;
    int complement_points = 200;
    std::vector<int> per_region;
};

/// Finite constraint set for the bound programs: strictly increasing rescaled
/// abscissas with target-function values.  Interval grids remember their
/// source regions so refinement can rebuild them at higher resolution.
struct ConstraintGrid {
    struct Region {
        double lo = 0.0, hi = 0.0, value = 0.0;
        int count = 0;
    };

    std::vector<GridPoint> points;
    GridProvenance provenance = GridProvenance::exact_spectrum;
    ScalingWindow window;
    std::vector<Region> regions;  ///< empty for exact grids

    int size() const { return static_cast<int>(points.size()); }

    double max_value() const {
        double m = 0.0;
        for (const auto& p : points) m = std::max(m, p.f);
        return m;
    }

    void validate() const {
        if (points.empty()) throw input_error("grid: no points");
        window.validate();
        for (std::size_t i = 0; i < points.size(); ++i) {
            if (!std::isfinite(points[i].x) || !std::isfinite(points[i].f))
                throw input_error("grid: non-finite point");
            if (i > 0 && !(points[i].x > points[i - 1].x))
                throw input_error("grid: abscissas not strictly increasing at index " + std::to_string(i));
        }
    }
};

namespace detail {

inline void append_region_points(std::vector<GridPoint>& pts, const ConstraintGrid::Region& r,
                                 const ScalingWindow& w) {
    if (r.count == 1) {
        pts.push_back({rescale_energy(r.lo, w), r.value});
        return;
    }
    const double span = r.hi - r.lo;
    for (int j = 0; j < r.count; ++j)
        pts.push_back({rescale_energy(r.lo + (j * span) / (r.count - 1), w), r.value});
}

} // namespace detail

/// Turn an indicator into a constraint grid.  Exact-point specs keep one
/// abscissa per level (the counts are irrelevant); interval specs sample each
/// region uniformly, endpoints included.
inline ConstraintGrid discretize(const IndicatorSpec& spec, const ScalingWindow& window,
                                 const DiscretizationCounts& counts = {}) {
    spec.validate();
    window.validate();
    ConstraintGrid g;
    g.window = window;
    if (spec.mode == IndicatorMode::exact_points) {
        g.provenance = GridProvenance::exact_spectrum;
        for (const auto& r : spec.regions) g.points.push_back({rescale_energy(r.lo, window), r.value});
        g.validate();
        return g;
    }

    g.provenance = GridProvenance::discretized_intervals;
    if (!counts.per_region.empty() && counts.per_region.size() != spec.regions.size())
        throw input_error("discretize: per_region count list does not match region count");
    if (counts.target_points < 2 || counts.complement_points < 2)
        throw input_error("discretize: per-region point budgets must be at least 2");
    for (std::size_t i = 0; i < spec.regions.size(); ++i) {
        const auto& r = spec.regions[i];
        int c = counts.per_region.empty()
                    ? (r.value != 0.0 ? counts.target_points : counts.complement_points)
                    : counts.per_region[i];
        if (c < 1) throw input_error("discretize: region " + std::to_string(i) + " budget below 1");
        if (r.is_point()) c = 1;
        g.regions.push_back({r.lo, r.hi, r.value, c});
        detail::append_region_points(g.points, g.regions.back(), window);
    }
    std::sort(g.points.begin(), g.points.end(), [](const GridPoint& a, const GridPoint& b) {
        return a.x < b.x;
    });
    for (std::size_t i = 0; i + 1 < g.points.size(); ++i)
        if (!(g.points[i].x < g.points[i + 1].x))
            throw input_error("discretize: adjacent regions produced coincident grid points");
    g.validate();
    return g;
}

/// Refine an interval grid: every subinterval is split `factor` ways, so a
/// region with c points gets (c-1)*factor + 1, and the refined point set
/// contains the original one.  Refining twice by f composes exactly to one
/// refinement by f^2.  Exact-spectrum grids are already as fine as the model
/// allows, so they are returned unchanged.
inline ConstraintGrid refine(const ConstraintGrid& g, int factor) {
    g.validate();
    if (factor < 2) throw input_error("refine: factor must be at least 2");
    if (g.provenance == GridProvenance::exact_spectrum) return g;
    ConstraintGrid r;
    r.provenance = g.provenance;
    r.window = g.window;
    for (const auto& reg : g.regions) {
        ConstraintGrid::Region rr = reg;
        if (rr.count > 1) rr.count = (rr.count - 1) * factor + 1;
        r.regions.push_back(rr);
        detail::append_region_points(r.points, rr, r.window);
    }
    std::sort(r.points.begin(), r.points.end(), [](const GridPoint& a, const GridPoint& b) {
        return a.x < b.x;
    });
    r.validate();
    return r;
}

} // namespace ovlb
