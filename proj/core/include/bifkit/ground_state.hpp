#pragma once

#include "bifkit/domain_mesh.hpp"

#include <Eigen/Core>

namespace bifkit {

/// Positive solution omega of -Δω - ω = -ω³ on the mesh.
struct GroundState {
    Eigen::VectorXd omega;
    double residual_norm = 0.0;          // max-norm of the strong-form residual
    double nondegeneracy_margin = 0.0;   // min |eig| of -Δ - 1 + 3ω² against the mass
    double lambda1 = 0.0;                // principal Dirichlet eigenvalue of the mesh
    int newton_iterations = 0;
};

/// Strong-form residual -Δ_h u - u + u³.
Eigen::VectorXd scalar_residual(const Discretization& disc, const Eigen::VectorXd& u);

/// Newton's method from the energy-minimizing multiple of φ₁, with step
/// halving whenever a full step increases the residual or leaves the positive
/// cone. Throws NoPositiveSolution when Λ₁ >= 1 and SolverFailure when the
/// iteration stalls above `tol` or the limit changes sign.
GroundState solve_omega(const Discretization& disc, double tol = 1e-10);

/// Smallest |eigenvalue| of (K - M + 3 M diag(omega²)) ψ = ν M ψ. Positive
/// values certify nondegeneracy on this mesh.
double nondegeneracy_margin(const Discretization& disc, const Eigen::VectorXd& omega);

inline double nondegeneracy_check(const GroundState& state, const Discretization& disc) {
    return nondegeneracy_margin(disc, state.omega);
}

}  // namespace bifkit
