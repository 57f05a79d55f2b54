#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "ovlb/errors.hpp"

namespace ovlb {

/// Neumaier-compensated accumulator.  Keeps a running correction term so that
/// long sums and inner products lose far less precision than naive addition.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            corr_ += (sum_ - t) + x;
        else
            corr_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + corr_; }

private:
    double sum_ = 0.0;
    double corr_ = 0.0;
};

/// Compensated inner product of two equally sized vectors.
inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size())
        throw input_error("dot: size mismatch (" + std::to_string(a.size()) + " vs " +
                          std::to_string(b.size()) + ")");
    CompensatedSum s;
    for (std::size_t i = 0; i < a.size(); ++i) s.add(a[i] * b[i]);
    return s.value();
}

inline double norm2(const std::vector<double>& a) {
    return std::sqrt(std::max(0.0, dot(a, a)));
}

/// Dense real symmetric matrix, row-major storage.  Symmetry is checked at
/// construction (tolerance 1e-12 relative to the largest entry) and the
/// stored copy is exactly symmetrized so downstream kernels never see a
/// nonsymmetric residue.
class DenseSymmetricMatrix {
public:
    DenseSymmetricMatrix(int n, std::vector<double> entries) : n_(n), a_(std::move(entries)) {
        if (n_ <= 0) throw input_error("matrix: dimension must be positive");
        if (a_.size() != static_cast<std::size_t>(n_) * n_)
            throw input_error("matrix: expected " + std::to_string(n_ * n_) + " entries, got " +
                              std::to_string(a_.size()));
        double amax = 0.0;
        for (double v : a_) {
            if (!std::isfinite(v)) throw input_error("matrix: non-finite entry");
            amax = std::max(amax, std::abs(v));
        }
        for (int j = 0; j < n_; ++j)
            for (int k = j + 1; k < n_; ++k) {
                double &ajk = a_[idx(j, k)], &akj = a_[idx(k, j)];
                if (std::abs(ajk - akj) > 1e-12 * std::max(1.0, amax))
                    throw input_error("matrix: entry (" + std::to_string(j) + "," +
                                      std::to_string(k) + ") breaks symmetry");
                ajk = akj = 0.5 * (ajk + akj);
            }
    }

    static DenseSymmetricMatrix identity(int n) {
        std::vector<double> e(static_cast<std::size_t>(n) * n, 0.0);
        for (int j = 0; j < n; ++j) e[static_cast<std::size_t>(j) * n + j] = 1.0;
        return DenseSymmetricMatrix(n, std::move(e));
    }

    static DenseSymmetricMatrix diagonal(const std::vector<double>& d) {
        const int n = static_cast<int>(d.size());
        std::vector<double> e(static_cast<std::size_t>(n) * n, 0.0);
        for (int j = 0; j < n; ++j) e[static_cast<std::size_t>(j) * n + j] = d[j];
        return DenseSymmetricMatrix(n, std::move(e));
    }

    int size() const { return n_; }
    double operator()(int j, int k) const { return a_[idx(j, k)]; }
    const std::vector<double>& entries() const { return a_; }

    double frobenius_norm() const {
        CompensatedSum s;
        for (double v : a_) s.add(v * v);
        return std::sqrt(std::max(0.0, s.value()));
    }

private:
    std::size_t idx(int j, int k) const { return static_cast<std::size_t>(j) * n_ + k; }
    int n_;
    std::vector<double> a_;
};

/// Normalized real state vector.  The squared norm must sit within 1e-10 of 1;
/// use StateVector::normalized to build one from arbitrary amplitudes.
class StateVector {
public:
    explicit StateVector(std::vector<double> amplitudes) : v_(std::move(amplitudes)) {
        if (v_.empty()) throw input_error("state: empty amplitude vector");
        for (double x : v_)
            if (!std::isfinite(x)) throw input_error("state: non-finite amplitude");
        const double nrm = norm2(v_);
        if (std::abs(nrm - 1.0) > 1e-10)
            throw input_error("state: norm " + std::to_string(nrm) + " deviates from 1 beyond 1e-10");
    }

    static StateVector normalized(std::vector<double> amplitudes) {
        double nrm = norm2(amplitudes);
        if (!(nrm > 0.0)) throw input_error("state: cannot normalize the zero vector");
        for (double& x : amplitudes) x /= nrm;
        return StateVector(std::move(amplitudes));
    }

    int size() const { return static_cast<int>(v_.size()); }
    double operator[](int i) const { return v_[static_cast<std::size_t>(i)]; }
    const std::vector<double>& amplitudes() const { return v_; }

private:
    std::vector<double> v_;
};

inline std::vector<double> matvec(const DenseSymmetricMatrix& A, const std::vector<double>& x) {
    const int n = A.size();
    if (static_cast<int>(x.size()) != n) throw input_error("matvec: dimension mismatch");
    std::vector<double> y(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        CompensatedSum s;
        for (int k = 0; k < n; ++k) s.add(A(j, k) * x[static_cast<std::size_t>(k)]);
        y[static_cast<std::size_t>(j)] = s.value();
    }
    return y;
}

inline std::vector<double> matvec(const DenseSymmetricMatrix& A, const StateVector& x) {
    return matvec(A, x.amplitudes());
}

struct EighResult {
    std::vector<double> eigenvalues;   ///< ascending
    std::vector<double> eigenvectors;  ///< row-major n x n; column k pairs with eigenvalues[k]
    int sweeps = 0;

    std::vector<double> eigenvector(int k) const {
        const int n = static_cast<int>(eigenvalues.size());
        std::vector<double> v(static_cast<std::size_t>(n));
        for (int j = 0; j < n; ++j) v[j] = eigenvectors[static_cast<std::size_t>(j) * n + k];
        return v;
    }
};

/// Full symmetric eigendecomposition by cyclic Jacobi sweeps.  Intended as a
/// small-matrix oracle: dimensions above `max_dim` are rejected so nobody
/// leans on an O(n^3)-per-sweep routine for large operators.  Converged when
/// the off-diagonal Frobenius mass drops below 1e-12 * ||A||_F.
inline EighResult eigh(const DenseSymmetricMatrix& A, int max_dim = 512) {
    const int n = A.size();
    if (n > max_dim)
        throw input_error("eigh: dimension " + std::to_string(n) + " exceeds oracle cap " +
                          std::to_string(max_dim));

    std::vector<double> B = A.entries();
    std::vector<double> V(static_cast<std::size_t>(n) * n, 0.0);
    for (int j = 0; j < n; ++j) V[static_cast<std::size_t>(j) * n + j] = 1.0;
    auto at = [n](std::vector<double>& m, int j, int k) -> double& {
        return m[static_cast<std::size_t>(j) * n + k];
    };

    const double fnorm = A.frobenius_norm();
    const double tol = 1e-12 * fnorm;
    auto off_norm = [&]() {
        CompensatedSum s;
        for (int j = 0; j < n; ++j)
            for (int k = j + 1; k < n; ++k) s.add(2.0 * at(B, j, k) * at(B, j, k));
        return std::sqrt(std::max(0.0, s.value()));
    };

    int sweeps = 0;
    const int max_sweeps = 64;
    while (off_norm() > tol) {
        if (++sweeps > max_sweeps)
            throw numeric_error("eigh: Jacobi failed to converge in " + std::to_string(max_sweeps) +
                                " sweeps (off-diagonal " + std::to_string(off_norm()) + ")");
        // Skip rotations that cannot move the off-norm meaningfully this sweep.
        const double skip = tol / std::max(1, n);
        for (int p = 0; p < n - 1; ++p)
            for (int q = p + 1; q < n; ++q) {
                const double apq = at(B, p, q);
                if (std::abs(apq) <= skip) continue;
                const double theta = (at(B, q, q) - at(B, p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(1.0 + theta * theta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                const double app = at(B, p, p), aqq = at(B, q, q);
                at(B, p, p) = app - t * apq;
                at(B, q, q) = aqq + t * apq;
                at(B, p, q) = at(B, q, p) = 0.0;
                for (int i = 0; i < n; ++i) {
                    if (i == p || i == q) continue;
                    const double aip = at(B, i, p), aiq = at(B, i, q);
                    at(B, i, p) = at(B, p, i) = c * aip - s * aiq;
                    at(B, i, q) = at(B, q, i) = s * aip + c * aiq;
                }
                for (int i = 0; i < n; ++i) {
                    const double vip = at(V, i, p), viq = at(V, i, q);
                    at(V, i, p) = c * vip - s * viq;
                    at(V, i, q) = s * vip + c * viq;
                }
            }
    }

    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return at(B, a, a) < at(B, b, b); });

    EighResult r;
    r.sweeps = sweeps;
    r.eigenvalues.resize(static_cast<std::size_t>(n));
    r.eigenvectors.assign(static_cast<std::size_t>(n) * n, 0.0);
    for (int k = 0; k < n; ++k) {
        r.eigenvalues[static_cast<std::size_t>(k)] = at(B, order[k], order[k]);
        for (int j = 0; j < n; ++j)
            r.eigenvectors[static_cast<std::size_t>(j) * n + k] = at(V, j, order[k]);
    }
    return r;
}

/// Gershgorin disc enclosure: every eigenvalue lies in [first, second].
inline std::pair<double, double> gershgorin(const DenseSymmetricMatrix& A) {
    const int n = A.size();
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j) {
        double radius = 0.0;
        for (int k = 0; k < n; ++k)
            if (k != j) radius += std::abs(A(j, k));
        lo = std::min(lo, A(j, j) - radius);
        hi = std::max(hi, A(j, j) + radius);
    }
    return {lo, hi};
}

struct LanczosResult {
    std::vector<double> alphas;  ///< tridiagonal diagonal, one per completed step
    std::vector<double> betas;   ///< tridiagonal off-diagonal (size steps-1)
    double ritz_min = 0.0;
    double ritz_max = 0.0;
    double residual_min = 0.0;  ///< |beta_m * y[m-1]| for the lowest Ritz pair
    double residual_max = 0.0;  ///< same for the highest Ritz pair
    int steps = 0;
    bool breakdown = false;  ///< Krylov space became invariant before m steps
};

/// m-step Lanczos with full reorthogonalization (two classical Gram-Schmidt
/// passes per step).  Returns extremal Ritz values with residual estimates;
/// [ritz_min - residual_min, ritz_max + residual_max] is the usual cheap
/// spectral enclosure.  A residual of zero after breakdown is exact: the Ritz
/// values are then eigenvalues of the restriction to an invariant subspace.
inline LanczosResult lanczos_extremal(const DenseSymmetricMatrix& A, const StateVector& start,
                                      int m) {
    const int n = A.size();
    if (start.size() != n) throw input_error("lanczos: start vector dimension mismatch");
    if (m < 1 || m > n)
        throw input_error("lanczos: step count must satisfy 1 <= m <= n, got " + std::to_string(m));

    std::vector<std::vector<double>> Q;
    Q.push_back(start.amplitudes());
    std::vector<double> alphas, betas;
    double last_beta = 0.0;
    bool breakdown = false;

    for (int j = 0; j < m; ++j) {
        std::vector<double> w = matvec(A, Q[static_cast<std::size_t>(j)]);
        const double alpha = dot(Q[static_cast<std::size_t>(j)], w);
        alphas.push_back(alpha);
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& q : Q) {
                const double c = dot(q, w);
                for (int i = 0; i < n; ++i) w[static_cast<std::size_t>(i)] -= c * q[static_cast<std::size_t>(i)];
            }
        const double beta = norm2(w);
        if (j + 1 == m) {
            last_beta = beta;
            break;
        }
        if (beta < 1e-13) {
            breakdown = true;
            last_beta = 0.0;
            break;
        }
        betas.push_back(beta);
        for (double& x : w) x /= beta;
        Q.push_back(std::move(w));
    }

    const int steps = static_cast<int>(alphas.size());
    std::vector<double> T(static_cast<std::size_t>(steps) * steps, 0.0);
    for (int i = 0; i < steps; ++i) T[static_cast<std::size_t>(i) * steps + i] = alphas[static_cast<std::size_t>(i)];
    for (int i = 0; i + 1 < steps; ++i) {
        T[static_cast<std::size_t>(i) * steps + i + 1] = betas[static_cast<std::size_t>(i)];
        T[static_cast<std::size_t>(i + 1) * steps + i] = betas[static_cast<std::size_t>(i)];
    }
    const EighResult tr = eigh(DenseSymmetricMatrix(steps, std::move(T)));

    LanczosResult r;
    r.alphas = std::move(alphas);
    r.betas = std::move(betas);
    r.steps = steps;
    r.breakdown = breakdown;
    r.ritz_min = tr.eigenvalues.front();
    r.ritz_max = tr.eigenvalues.back();
    const double tail_min = std::abs(tr.eigenvectors[static_cast<std::size_t>(steps - 1) * steps + 0]);
    const double tail_max = std::abs(tr.eigenvectors[static_cast<std::size_t>(steps - 1) * steps + (steps - 1)]);
    r.residual_min = last_beta * tail_min;
    r.residual_max = last_beta * tail_max;
    return r;
}

} // namespace ovlb
