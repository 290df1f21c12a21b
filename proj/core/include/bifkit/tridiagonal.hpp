#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <vector>

namespace bifkit {

/// Symmetric tridiagonal matrix stored as its diagonal and first off-diagonal.
struct SymTridiag {
    Eigen::VectorXd diag;
    Eigen::VectorXd off;  // size() - 1 entries, off[i] couples rows i and i+1

    Eigen::Index size() const { return diag.size(); }
    Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
    Eigen::SparseMatrix<double> to_sparse() const;
};

/// a - shift * diag(b)
SymTridiag shifted(const SymTridiag& a, const Eigen::VectorXd& b, double shift);

/// Solves a x = rhs by Gaussian elimination with partial pivoting. Exactly
/// singular pivots are replaced by a tiny value, which is what inverse
/// iteration needs.
Eigen::VectorXd solve_tridiagonal(const SymTridiag& a, const Eigen::VectorXd& rhs);

// Generalized eigenproblems a x = lambda diag(b) x with b > 0. The inertia of
// a - sigma*diag(b) equals the number of pencil eigenvalues below sigma
// (Sylvester), which gives robust bisection without forming b^{-1/2} a b^{-1/2}.

/// Number of pencil eigenvalues strictly below sigma.
Eigen::Index count_below(const SymTridiag& a, const Eigen::VectorXd& b, double sigma);

/// Interval guaranteed to contain the whole pencil spectrum (Gershgorin on the
/// symmetrically scaled matrix).
std::pair<double, double> spectrum_bounds(const SymTridiag& a, const Eigen::VectorXd& b);

/// k-th smallest pencil eigenvalue (0-based), bisected to machine precision.
double pencil_eigenvalue(const SymTridiag& a, const Eigen::VectorXd& b, Eigen::Index k);

/// Eigenvector for a converged eigenvalue by inverse iteration, b-orthogonalized
/// against `previous` (used inside clusters) and normalized to unit b-norm.
Eigen::VectorXd pencil_eigenvector(const SymTridiag& a, const Eigen::VectorXd& b, double lambda,
                                   const std::vector<Eigen::VectorXd>& previous = {});

/// The eigenvalues immediately below and at/above sigma (either may be absent
/// at the ends of the spectrum, reported as NaN).
std::pair<double, double> eigenvalues_around(const SymTridiag& a, const Eigen::VectorXd& b,
                                             double sigma);

}  // namespace bifkit
