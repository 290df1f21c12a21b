#include "bifkit/ground_state.hpp"

#include "bifkit/error.hpp"

#include <cmath>
#include <limits>

namespace bifkit {

namespace {

constexpr int kMaxNewton = 100;
constexpr int kMaxHalvings = 30;

Eigen::VectorXd weak_residual(const Discretization& disc, const Eigen::VectorXd& u) {
    const Eigen::VectorXd& w = disc.mesh.weights();
    return disc.stiffness.apply(u) - w.cwiseProduct(u) + w.cwiseProduct(u.array().cube().matrix());
}

double strong_norm(const Discretization& disc, const Eigen::VectorXd& weak) {
    return weak.cwiseQuotient(disc.mesh.weights()).cwiseAbs().maxCoeff();
}

}  // namespace

Eigen::VectorXd scalar_residual(const Discretization& disc, const Eigen::VectorXd& u) {
    return weak_residual(disc, u).cwiseQuotient(disc.mesh.weights());
}

GroundState solve_omega(const Discretization& disc, double tol) {
    const auto principal = principal_eigenpair(disc.stiffness, disc.mass);
    if (principal.lambda1 >= 1.0) {
        throw Error(ErrorCode::NoPositiveSolution,
                    "principal eigenvalue " + std::to_string(principal.lambda1) + " >= 1");
    }
    const Eigen::VectorXd& w = disc.mesh.weights();
    const Eigen::VectorXd& phi = principal.phi1;

    // Minimizer of the energy along the ray c*phi (phi is mass-normalized):
    // E(c) = (Λ₁-1)c²/2 + c⁴/4 ∫φ⁴.
    const double quartic = w.dot(phi.array().pow(4).matrix());
    Eigen::VectorXd u = std::sqrt((1.0 - principal.lambda1) / quartic) * phi;

    // Rounding floor of the strong residual: roughly eps * |K|/w * max u.
    const double operator_scale =
        (2.0 * disc.stiffness.matrix.diag.cwiseAbs()).cwiseQuotient(w).maxCoeff() + 1.0;

    Eigen::VectorXd res = weak_residual(disc, u);
    double norm = strong_norm(disc, res);
    int iterations = 0;
    while (norm > tol) {
        if (iterations++ >= kMaxNewton) {
            throw Error(ErrorCode::SolverFailure, "Newton iteration limit reached for the ground state");
        }
        SymTridiag jac = disc.stiffness.matrix;
        jac.diag += w.cwiseProduct((3.0 * u.array().square() - 1.0).matrix());
        const Eigen::VectorXd step = solve_tridiagonal(jac, -res);

        double damping = 1.0;
        bool accepted = false;
        for (int halving = 0; halving <= kMaxHalvings; ++halving, damping *= 0.5) {
            Eigen::VectorXd trial = u + damping * step;
            if (trial.minCoeff() <= 0.0) continue;
            Eigen::VectorXd trial_res = weak_residual(disc, trial);
            const double trial_norm = strong_norm(disc, trial_res);
            if (trial_norm < norm) {
                u = std::move(trial);
                res = std::move(trial_res);
                norm = trial_norm;
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            const double floor = 64.0 * std::numeric_limits<double>::epsilon() * operator_scale * u.maxCoeff();
            if (norm <= floor) break;
            throw Error(ErrorCode::SolverFailure,
                        "ground state Newton stalled at residual " + std::to_string(norm));
        }
    }
    if (u.minCoeff() <= 0.0) {
        throw Error(ErrorCode::SolverFailure, "ground state is not positive");
    }

    GroundState state;
    state.omega = std::move(u);
    state.residual_norm = norm;
    state.lambda1 = principal.lambda1;
    state.newton_iterations = iterations;
    state.nondegeneracy_margin = nondegeneracy_margin(disc, state.omega);
    return state;
}

double nondegeneracy_margin(const Discretization& disc, const Eigen::VectorXd& omega) {
    const Eigen::VectorXd& w = disc.mesh.weights();
    SymTridiag lin = disc.stiffness.matrix;
    lin.diag += w.cwiseProduct((3.0 * omega.array().square() - 1.0).matrix());
    const auto [below, above] = eigenvalues_around(lin, w, 0.0);
    double margin = std::numeric_limits<double>::infinity();
    if (!std::isnan(below)) margin = std::min(margin, std::abs(below));
    if (!std::isnan(above)) margin = std::min(margin, std::abs(above));
    return margin;
}

}  // namespace bifkit
