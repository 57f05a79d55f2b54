#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ovlb/errors.hpp"
#include "ovlb/linalg.hpp"
#include "ovlb/spectrum.hpp"

namespace ovlb {

/// Spectral scaling window [lo, hi].  Mapping an operator through the window
/// sends [lo, hi] onto [-1, 1], the natural domain of the Chebyshev basis.
struct ScalingWindow {
    double lo = -1.0;
    double hi = 1.0;

    void validate() const {
        if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi))
            throw input_error("window: need finite lo < hi, got [" + std::to_string(lo) + ", " +
                              std::to_string(hi) + "]");
    }
    double span() const { return hi - lo; }
    bool contains(double e) const { return lo <= e && e <= hi; }
};

inline double rescale_energy(double e, const ScalingWindow& w) {
    return (2.0 * e - (w.lo + w.hi)) / (w.hi - w.lo);
}

inline double unrescale_energy(double x, const ScalingWindow& w) {
    return 0.5 * ((w.hi - w.lo) * x + (w.lo + w.hi));
}

/// Apply the window map to the operator itself: (2A - (lo+hi) I) / (hi - lo).
inline DenseSymmetricMatrix rescale_matrix(const DenseSymmetricMatrix& A, const ScalingWindow& w) {
    w.validate();
    const int n = A.size();
    const double scale = 2.0 / w.span();
    const double shift = (w.lo + w.hi) / w.span();
    std::vector<double> e = A.entries();
    for (double& v : e) v *= scale;
    for (int j = 0; j < n; ++j) e[static_cast<std::size_t>(j) * n + j] -= shift;
    return DenseSymmetricMatrix(n, std::move(e));
}

/// Round a window outward to a fixed number of decimals; degenerate results
/// are widened by one decimal step on each side.
inline ScalingWindow round_window_outward(double lo, double hi, int decimals = 1) {
    if (!(lo <= hi)) throw input_error("window: lo must not exceed hi");
    const double f = std::pow(10.0, decimals);
    ScalingWindow w{std::floor(lo * f) / f, std::ceil(hi * f) / f};
    if (!(w.lo < w.hi)) {
        w.lo -= 1.0 / f;
        w.hi += 1.0 / f;
    }
    w.validate();
    return w;
}

enum class MomentBasis { monomial, chebyshev };

inline const char* basis_name(MomentBasis b) {
    return b == MomentBasis::monomial ? "monomial" : "chebyshev";
}

/// Moments of a normalized state against a polynomial basis: values[n] is
/// the expectation of the n-th basis function of the (optionally rescaled)
/// operator.  values[0] is identically 1.
struct MomentVector {
    MomentBasis basis = MomentBasis::monomial;
    std::vector<double> values;
    std::optional<ScalingWindow> window;

    int degree() const { return static_cast<int>(values.size()) - 1; }

    void validate() const {
        if (values.empty()) throw input_error("moments: empty value list");
        for (double v : values)
            if (!std::isfinite(v)) throw input_error("moments: non-finite value");
        if (std::abs(values.front() - 1.0) > 1e-12)
            throw input_error("moments: zeroth moment must be 1, got " + std::to_string(values.front()));
        if (basis == MomentBasis::chebyshev && !window)
            throw input_error("moments: chebyshev basis requires a scaling window");
        if (window) window->validate();
    }
};

/// Values of the first N+1 basis functions at a point.
inline std::vector<double> basis_values(MomentBasis basis, double x, int degree) {
    if (degree < 0) throw input_error("basis_values: negative degree");
    std::vector<double> b(static_cast<std::size_t>(degree) + 1);
    b[0] = 1.0;
    if (degree >= 1) b[1] = x;
    for (int n = 2; n <= degree; ++n)
        b[static_cast<std::size_t>(n)] = basis == MomentBasis::chebyshev
                                             ? 2.0 * x * b[static_cast<std::size_t>(n - 1)] -
                                                   b[static_cast<std::size_t>(n - 2)]
                                             : x * b[static_cast<std::size_t>(n - 1)];
    return b;
}

/// Evaluate a coefficient expansion: Horner for monomials, Clenshaw for
/// Chebyshev.  `x` is already in rescaled coordinates.
inline double eval_expansion(const std::vector<double>& coeffs, MomentBasis basis, double x) {
    if (coeffs.empty()) throw input_error("eval_expansion: empty coefficient list");
    if (basis == MomentBasis::monomial) {
        double r = 0.0;
        for (std::size_t i = coeffs.size(); i-- > 0;) r = r * x + coeffs[i];
        return r;
    }
    double b1 = 0.0, b2 = 0.0;
    for (std::size_t i = coeffs.size(); i-- > 1;) {
        const double b0 = 2.0 * x * b1 - b2 + coeffs[i];
        b2 = b1;
        b1 = b0;
    }
    return x * b1 - b2 + coeffs[0];
}

/// Power moments <phi| A^n |phi> for n = 0..N, evaluated with the symmetric
/// split <A^ceil(n/2) phi, A^floor(n/2) phi> so only ceil(N/2) matrix-vector
/// products are needed and each moment is a single compensated inner product.
inline MomentVector power_moments(const DenseSymmetricMatrix& A, const StateVector& phi, int N) {
    if (N < 0) throw input_error("power_moments: negative order");
    if (phi.size() != A.size()) throw input_error("power_moments: dimension mismatch");
    std::vector<std::vector<double>> ws;
    ws.push_back(phi.amplitudes());
    const int half = (N + 1) / 2;
    for (int j = 1; j <= half; ++j) ws.push_back(matvec(A, ws.back()));

    MomentVector M;
    M.basis = MomentBasis::monomial;
    M.values.resize(static_cast<std::size_t>(N) + 1);
    M.values[0] = 1.0;  // <phi|phi> for a normalized state, by contract
    for (int n = 1; n <= N; ++n)
        M.values[static_cast<std::size_t>(n)] =
            dot(ws[static_cast<std::size_t>(n - n / 2)], ws[static_cast<std::size_t>(n / 2)]);
    M.validate();
    return M;
}

/// Power moments of the window-rescaled operator.
inline MomentVector power_moments(const DenseSymmetricMatrix& A, const StateVector& phi, int N,
                                  const ScalingWindow& w) {
    MomentVector M = power_moments(rescale_matrix(A, w), phi, N);
    M.window = w;
    return M;
}

/// Chebyshev moments <phi| T_n(A_rs) |phi> via the vector three-term
/// recurrence w_{n+1} = 2 A_rs w_n - w_{n-1}; one matrix-vector product per
/// order, with the rescaling applied on the fly.
inline MomentVector chebyshev_moments(const DenseSymmetricMatrix& A, const StateVector& phi, int N,
                                      const ScalingWindow& w) {
    if (N < 0) throw input_error("chebyshev_moments: negative order");
    if (phi.size() != A.size()) throw input_error("chebyshev_moments: dimension mismatch");
    w.validate();
    const int n = A.size();
    const double scale = 2.0 / w.span();
    const double shift = (w.lo + w.hi) / w.span();
    auto apply = [&](const std::vector<double>& x) {
        std::vector<double> y = matvec(A, x);
        for (int i = 0; i < n; ++i)
            y[static_cast<std::size_t>(i)] = scale * y[static_cast<std::size_t>(i)] -
                                             shift * x[static_cast<std::size_t>(i)];
        return y;
    };

    MomentVector M;
    M.basis = MomentBasis::chebyshev;
    M.window = w;
    M.values.resize(static_cast<std::size_t>(N) + 1);
    M.values[0] = 1.0;
    if (N >= 1) {
        std::vector<double> prev = phi.amplitudes();
        std::vector<double> cur = apply(prev);
        M.values[1] = dot(phi.amplitudes(), cur);
        for (int k = 2; k <= N; ++k) {
            std::vector<double> next = apply(cur);
            for (int i = 0; i < n; ++i)
                next[static_cast<std::size_t>(i)] =
                    2.0 * next[static_cast<std::size_t>(i)] - prev[static_cast<std::size_t>(i)];
            M.values[static_cast<std::size_t>(k)] = dot(phi.amplitudes(), next);
            prev = std::move(cur);
            cur = std::move(next);
        }
    }
    M.validate();
    return M;
}

/// Moments synthesized directly from a spectral model.  The model must carry
/// the full unit mass: moments of a partial level list would misstate the
/// expectations of the underlying normalized state.
inline MomentVector moments_from_spectrum(const SpectralModel& S, int N, MomentBasis basis,
                                          std::optional<ScalingWindow> window = std::nullopt) {
    if (N < 0) throw input_error("moments_from_spectrum: negative order");
    S.validate();
    if (std::abs(S.overlap_sum() - 1.0) > 1e-10)
        throw input_error("moments_from_spectrum: listed overlaps carry mass " +
                          std::to_string(S.overlap_sum()) + ", need a complete model");
    if (basis == MomentBasis::chebyshev && !window)
        throw input_error("moments_from_spectrum: chebyshev basis requires a window");
    if (window) window->validate();

    std::vector<CompensatedSum> acc(static_cast<std::size_t>(N) + 1);
    for (int i = 0; i < S.levels(); ++i) {
        const double p = S.overlaps[static_cast<std::size_t>(i)];
        const double x = window ? rescale_energy(S.eigenvalues[static_cast<std::size_t>(i)], *window)
                                : S.eigenvalues[static_cast<std::size_t>(i)];
        const std::vector<double> b = basis_values(basis, x, N);
        for (int k = 0; k <= N; ++k) acc[static_cast<std::size_t>(k)].add(p * b[static_cast<std::size_t>(k)]);
    }

    MomentVector M;
    M.basis = basis;
    M.window = window;
    M.values.resize(static_cast<std::size_t>(N) + 1);
    M.values[0] = 1.0;
    for (int k = 1; k <= N; ++k) M.values[static_cast<std::size_t>(k)] = acc[static_cast<std::size_t>(k)].value();
    M.validate();
    return M;
}

struct HankelReport {
    int order = 0;            ///< Hankel matrix dimension
    double min_eigenvalue = 0.0;
    bool pass = false;        ///< min eigenvalue >= -1e-8
};

/// Positive-semidefiniteness check of the monomial moment Hankel matrix
/// H_jk = M_{j+k}.  A clearly negative eigenvalue means the moment list is
/// inconsistent with any spectral measure.
inline HankelReport hankel_consistency(const MomentVector& M) {
    M.validate();
    if (M.basis != MomentBasis::monomial)
        throw input_error("hankel_consistency: needs monomial moments");
    if (M.degree() < 2)
        throw input_error("hankel_consistency: needs moments through order 2 at least");
    const int k = M.degree() / 2;
    std::vector<double> h(static_cast<std::size_t>(k + 1) * (k + 1));
    for (int i = 0; i <= k; ++i)
        for (int j = 0; j <= k; ++j)
            h[static_cast<std::size_t>(i) * (k + 1) + j] = M.values[static_cast<std::size_t>(i + j)];
    const EighResult eg = eigh(DenseSymmetricMatrix(k + 1, std::move(h)));
    HankelReport r;
    r.order = k + 1;
    r.min_eigenvalue = eg.eigenvalues.front();
    r.pass = r.min_eigenvalue >= -1e-8;
    return r;
}

} // namespace ovlb
