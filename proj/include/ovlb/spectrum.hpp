#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "ovlb/errors.hpp"
#include "ovlb/linalg.hpp"

namespace ovlb {

/// Discrete spectral measure of a state: eigenvalues with squared overlaps.
/// `complete` marks whether the listed overlaps carry (within 1e-10) the whole
/// unit mass; `dropped_mass` tracks what a floor filter discarded.
struct SpectralModel {
    std::vector<double> eigenvalues;  ///< strictly ascending
    std::vector<double> overlaps;     ///< non-negative, pairs with eigenvalues
    bool complete = true;
    double dropped_mass = 0.0;

    int levels() const { return static_cast<int>(eigenvalues.size()); }

    double overlap_sum() const {
        CompensatedSum s;
        for (double p : overlaps) s.add(p);
        return s.value();
    }

    void validate() const {
        if (eigenvalues.empty()) throw input_error("spectral model: no levels");
        if (eigenvalues.size() != overlaps.size())
            throw input_error("spectral model: eigenvalue/overlap count mismatch");
        for (std::size_t i = 0; i < eigenvalues.size(); ++i) {
            if (!std::isfinite(eigenvalues[i])) throw input_error("spectral model: non-finite eigenvalue");
            if (!std::isfinite(overlaps[i]) || overlaps[i] < 0.0)
                throw input_error("spectral model: overlap " + std::to_string(i) + " is negative or non-finite");
            if (i > 0 && !(eigenvalues[i] > eigenvalues[i - 1]))
                throw input_error("spectral model: eigenvalues not strictly ascending at index " +
                                  std::to_string(i));
        }
        if (complete && std::abs(overlap_sum() - 1.0) > 1e-10)
            throw input_error("spectral model: flagged complete but overlaps sum to " +
                              std::to_string(overlap_sum()));
    }
};

/// Exact weighted overlap of a target level set: sum of v_i * P_i.  Weights
/// default to 1; when given, they pair with `targets` entry by entry.
inline double exact_overlap(const SpectralModel& S, const std::vector<int>& targets,
                            const std::vector<double>& weights = {}) {
    if (targets.empty()) throw input_error("exact_overlap: empty target set");
    if (!weights.empty() && weights.size() != targets.size())
        throw input_error("exact_overlap: weight count does not match target count");
    std::vector<int> seen;
    CompensatedSum s;
    for (std::size_t k = 0; k < targets.size(); ++k) {
        const int i = targets[k];
        if (i < 0 || i >= S.levels())
            throw input_error("exact_overlap: target level " + std::to_string(i) + " out of range");
        if (std::find(seen.begin(), seen.end(), i) != seen.end())
            throw input_error("exact_overlap: duplicate target level " + std::to_string(i));
        seen.push_back(i);
        const double v = weights.empty() ? 1.0 : weights[k];
        s.add(v * S.overlaps[static_cast<std::size_t>(i)]);
    }
    return s.value();
}

/// Parameters of the synthetic benchmark spectrum: an isolated ground level,
/// two five-level clusters with Gaussian-weighted overlaps, and a uniform
/// background grid carrying the residual mass.
struct ClusterModelParams {
    double ground_energy = -1.0;
    double ground_overlap = 0.4;
    double first_center = -0.4;
    double second_center = 0.2;
    int cluster_size = 5;
    double cluster_spacing = 0.02;
    double cluster_sigma = 0.04;
    double cluster_mass = 0.2;  ///< per cluster
    double grid_lo = -0.9;
    double grid_hi = 1.0;
    int grid_count = 19;
};

/// Build the synthetic cluster model.  Entries closer than 1e-9 of the total
/// spread are deterministically separated by nudging the later one up by
/// 1e-6 of the spread; if a handful of sweeps cannot untangle them, the
/// parameter set is rejected.
inline SpectralModel gen_cluster_model(const ClusterModelParams& p = {}) {
    if (p.cluster_size < 1 || p.grid_count < 2)
        throw input_error("cluster model: cluster_size >= 1 and grid_count >= 2 required");
    if (!(p.ground_overlap > 0.0) || !(p.cluster_mass >= 0.0))
        throw input_error("cluster model: non-positive mass parameters");
    if (!(p.cluster_sigma > 0.0)) throw input_error("cluster model: sigma must be positive");
    if (!(p.grid_lo < p.grid_hi)) throw input_error("cluster model: grid_lo must be below grid_hi");
    if (!(p.ground_energy < p.grid_lo))
        throw input_error("cluster model: ground energy must sit below the grid");
    const double residual = 1.0 - p.ground_overlap - 2.0 * p.cluster_mass;
    if (residual < 0.0) throw input_error("cluster model: masses exceed 1");

    std::vector<std::pair<double, double>> ep;  // (energy, overlap)
    ep.emplace_back(p.ground_energy, p.ground_overlap);

    for (double center : {p.first_center, p.second_center}) {
        std::vector<double> w(static_cast<std::size_t>(p.cluster_size));
        double wsum = 0.0;
        for (int i = 0; i < p.cluster_size; ++i) {
            const double e = center + (i - (p.cluster_size - 1) / 2.0) * p.cluster_spacing;
            const double g = std::exp(-(e - center) * (e - center) / (2.0 * p.cluster_sigma * p.cluster_sigma));
            w[static_cast<std::size_t>(i)] = g;
            wsum += g;
        }
        for (int i = 0; i < p.cluster_size; ++i) {
            const double e = center + (i - (p.cluster_size - 1) / 2.0) * p.cluster_spacing;
            ep.emplace_back(e, p.cluster_mass * w[static_cast<std::size_t>(i)] / wsum);
        }
    }

    for (int i = 0; i < p.grid_count; ++i) {
        const double e = p.grid_lo + (i * (p.grid_hi - p.grid_lo)) / (p.grid_count - 1);
        ep.emplace_back(e, residual / p.grid_count);
    }

    std::stable_sort(ep.begin(), ep.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    const double spread = ep.back().first - ep.front().first;
    const double minsep = 1e-9 * spread;
    const double nudge = 1e-6 * spread;
    bool clean = false;
    for (int sweep = 0; sweep < 8 && !clean; ++sweep) {
        clean = true;
        for (std::size_t i = 0; i + 1 < ep.size(); ++i)
            if (ep[i + 1].first - ep[i].first < minsep) {
                ep[i + 1].first = ep[i].first + nudge;
                clean = false;
            }
        if (!clean)
            std::stable_sort(ep.begin(), ep.end(),
                             [](const auto& a, const auto& b) { return a.first < b.first; });
    }
    if (!clean) throw input_error("cluster model: could not separate near-degenerate levels");

    SpectralModel S;
    double psum = 0.0;
    for (const auto& [e, q] : ep) psum += q;
    for (const auto& [e, q] : ep) {
        S.eigenvalues.push_back(e);
        S.overlaps.push_back(q / psum);
    }
    S.complete = true;
    S.validate();
    return S;
}

/// Variant used for gap studies: the background grid (and with it the first
/// excited level) starts at ground_energy + gap while the clusters stay put.
inline SpectralModel gen_cluster_model_gap(double gap, double second_center = 0.2) {
    if (!(gap > 0.0) || !(gap <= 0.5))
        throw input_error("cluster model: gap must lie in (0, 0.5]");
    ClusterModelParams p;
    p.second_center = second_center;
    p.grid_lo = p.ground_energy + gap;
    return gen_cluster_model(p);
}

/// Exact spectral measure of (A, phi) through the dense eigensolver oracle.
/// Eigenvalues closer than 1e-9 of the spectral spread merge into one level
/// at their overlap-weighted mean; overlaps below `floor` are dropped into
/// `dropped_mass`.
inline SpectralModel spectral_from_matrix(const DenseSymmetricMatrix& A, const StateVector& phi,
                                          double floor = 1e-20, int max_dim = 512) {
    if (phi.size() != A.size()) throw input_error("spectral_from_matrix: dimension mismatch");
    const EighResult eg = eigh(A, max_dim);
    const int n = A.size();

    const double spread = eg.eigenvalues.back() - eg.eigenvalues.front();
    const double merge_tol = 1e-9 * spread;

    SpectralModel S;
    S.complete = true;
    int k = 0;
    while (k < n) {
        int j = k;
        while (j + 1 < n && eg.eigenvalues[static_cast<std::size_t>(j + 1)] -
                                    eg.eigenvalues[static_cast<std::size_t>(j)] <=
                                merge_tol)
            ++j;
        CompensatedSum mass, weighted;
        double plain = 0.0;
        for (int i = k; i <= j; ++i) {
            const double c = dot(eg.eigenvector(i), phi.amplitudes());
            mass.add(c * c);
            weighted.add(c * c * eg.eigenvalues[static_cast<std::size_t>(i)]);
            plain += eg.eigenvalues[static_cast<std::size_t>(i)];
        }
        const double p = mass.value();
        const double e = p > 1e-300 ? weighted.value() / p : plain / (j - k + 1);
        if (p < floor)
            S.dropped_mass += p;
        else {
            S.eigenvalues.push_back(e);
            S.overlaps.push_back(p);
        }
        k = j + 1;
    }
    if (S.eigenvalues.empty())
        throw numeric_error("spectral_from_matrix: every overlap fell below the floor");
    S.complete = std::abs(S.overlap_sum() - 1.0) <= 1e-10;
    S.validate();
    return S;
}

} // namespace ovlb
