#include "bifkit/tridiagonal.hpp"

#include "bifkit/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bifkit {

Eigen::VectorXd SymTridiag::apply(const Eigen::VectorXd& x) const {
    const Eigen::Index n = size();
    Eigen::VectorXd y = diag.cwiseProduct(x);
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
        y[i] += off[i] * x[i + 1];
        y[i + 1] += off[i] * x[i];
    }
    return y;
}

Eigen::SparseMatrix<double> SymTridiag::to_sparse() const {
    const Eigen::Index n = size();
    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(static_cast<std::size_t>(3 * n));
    for (Eigen::Index i = 0; i < n; ++i) {
        entries.emplace_back(i, i, diag[i]);
        if (i + 1 < n) {
            entries.emplace_back(i, i + 1, off[i]);
            entries.emplace_back(i + 1, i, off[i]);
        }
    }
    Eigen::SparseMatrix<double> s(n, n);
    s.setFromTriplets(entries.begin(), entries.end());
    return s;
}

SymTridiag shifted(const SymTridiag& a, const Eigen::VectorXd& b, double shift) {
    return SymTridiag{a.diag - shift * b, a.off};
}

Eigen::VectorXd solve_tridiagonal(const SymTridiag& a, const Eigen::VectorXd& rhs) {
    // LAPACK dgtsv, 0-based, with zero pivots perturbed instead of reported.
    const Eigen::Index n = a.size();
    Eigen::VectorXd d = a.diag;
    Eigen::VectorXd dl = a.off;
    Eigen::VectorXd du = a.off;
    Eigen::VectorXd x = rhs;
    if (n == 0) return x;

    const double scale = std::max(d.cwiseAbs().maxCoeff(), n > 1 ? dl.cwiseAbs().maxCoeff() : 0.0);
    const double tiny = std::numeric_limits<double>::epsilon() * std::max(scale, 1e-300);
    auto guard = [tiny](double& p) {
        if (p == 0.0) p = tiny;
    };

    for (Eigen::Index i = 0; i + 1 < n; ++i) {
        if (std::abs(d[i]) >= std::abs(dl[i])) {
            guard(d[i]);
            const double fact = dl[i] / d[i];
            d[i + 1] -= fact * du[i];
            x[i + 1] -= fact * x[i];
            dl[i] = 0.0;
        } else {
            const double fact = d[i] / dl[i];
            d[i] = dl[i];
            const double temp = d[i + 1];
            d[i + 1] = du[i] - fact * temp;
            if (i + 2 < n) {
                dl[i] = du[i + 1];
                du[i + 1] = -fact * dl[i];
            } else {
                dl[i] = 0.0;
            }
            du[i] = temp;
            const double bt = x[i];
            x[i] = x[i + 1];
            x[i + 1] = bt - fact * x[i + 1];
        }
    }
    guard(d[n - 1]);

    x[n - 1] /= d[n - 1];
    if (n > 1) x[n - 2] = (x[n - 2] - du[n - 2] * x[n - 1]) / d[n - 2];
    for (Eigen::Index i = n - 3; i >= 0; --i) {
        x[i] = (x[i] - du[i] * x[i + 1] - dl[i] * x[i + 2]) / d[i];
    }
    return x;
}

Eigen::Index count_below(const SymTridiag& a, const Eigen::VectorXd& b, double sigma) {
    const Eigen::Index n = a.size();
    double max_off2 = 1.0;
    for (Eigen::Index i = 0; i + 1 < n; ++i) max_off2 = std::max(max_off2, a.off[i] * a.off[i]);
    const double pivmin = std::numeric_limits<double>::min() * max_off2;

    Eigen::Index negatives = 0;
    double d = 1.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        d = a.diag[i] - sigma * b[i] - (i > 0 ? a.off[i - 1] * a.off[i - 1] / d : 0.0);
        if (std::abs(d) < pivmin) d = -pivmin;
        if (d < 0.0) ++negatives;
    }
    return negatives;
}

std::pair<double, double> spectrum_bounds(const SymTridiag& a, const Eigen::VectorXd& b) {
    const Eigen::Index n = a.size();
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double center = a.diag[i] / b[i];
        double radius = 0.0;
        if (i > 0) radius += std::abs(a.off[i - 1]) / std::sqrt(b[i - 1] * b[i]);
        if (i + 1 < n) radius += std::abs(a.off[i]) / std::sqrt(b[i] * b[i + 1]);
        lo = std::min(lo, center - radius);
        hi = std::max(hi, center + radius);
    }
    const double pad = 1e-12 * std::max({std::abs(lo), std::abs(hi), 1.0});
    return {lo - pad, hi + pad};
}

double pencil_eigenvalue(const SymTridiag& a, const Eigen::VectorXd& b, Eigen::Index k) {
    const Eigen::Index n = a.size();
    if (k < 0 || k >= n) {
        throw Error(ErrorCode::SolverFailure, "eigenvalue index out of range");
    }
    auto [lo, hi] = spectrum_bounds(a, b);
    // count_below(lo) <= k < count_below(hi)
    for (int it = 0; it < 4000; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (count_below(a, b, mid) > k) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return 0.5 * (lo + hi);
}

namespace {

void b_orthogonalize(Eigen::VectorXd& x, const Eigen::VectorXd& b,
                     const std::vector<Eigen::VectorXd>& basis) {
    for (const auto& q : basis) {
        x -= (q.cwiseProduct(b).dot(x)) * q;
    }
}

void b_normalize(Eigen::VectorXd& x, const Eigen::VectorXd& b) {
    const double norm = std::sqrt(x.cwiseProduct(b).dot(x));
    if (!(norm > 0.0) || !std::isfinite(norm)) {
        throw Error(ErrorCode::SolverFailure, "inverse iteration collapsed");
    }
    x /= norm;
}

}  // namespace

Eigen::VectorXd pencil_eigenvector(const SymTridiag& a, const Eigen::VectorXd& b, double lambda,
                                   const std::vector<Eigen::VectorXd>& previous) {
    const Eigen::Index n = a.size();
    const SymTridiag shifted_a = shifted(a, b, lambda);

    Eigen::VectorXd x(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        // deterministic start with components along every mode
        x[i] = 1.0 + 0.5 * std::sin(0.7 * static_cast<double>(i) + 0.3 * static_cast<double>(previous.size()));
    }
    b_orthogonalize(x, b, previous);
    b_normalize(x, b);

    for (int it = 0; it < 6; ++it) {
        Eigen::VectorXd y = solve_tridiagonal(shifted_a, b.cwiseProduct(x));
        b_orthogonalize(y, b, previous);
        b_normalize(y, b);
        const double change = std::min((y - x).cwiseAbs().maxCoeff(), (y + x).cwiseAbs().maxCoeff());
        x = std::move(y);
        if (it >= 2 && change < 1e-14 * x.cwiseAbs().maxCoeff()) break;
    }

    // Sign convention: the first entry of non-negligible size is positive.
    const double cutoff = 1e-3 * x.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < n; ++i) {
        if (std::abs(x[i]) > cutoff) {
            if (x[i] < 0.0) x = -x;
            break;
        }
    }
    return x;
}

std::pair<double, double> eigenvalues_around(const SymTridiag& a, const Eigen::VectorXd& b,
                                             double sigma) {
    const Eigen::Index n = a.size();
    const Eigen::Index c = count_below(a, b, sigma);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double below = c > 0 ? pencil_eigenvalue(a, b, c - 1) : nan;
    const double above = c < n ? pencil_eigenvalue(a, b, c) : nan;
    return {below, above};
}

}  // namespace bifkit
