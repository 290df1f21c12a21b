#pragma once

#include "bifkit/bifurcation_detector.hpp"
#include "bifkit/coupling_algebra.hpp"
#include "bifkit/domain_mesh.hpp"
#include "bifkit/ground_state.hpp"
#include "bifkit/partition_reduction.hpp"
#include "bifkit/weighted_spectrum.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <array>
#include <limits>
#include <optional>
#include <vector>

namespace bifkit {

struct ContinuationSettings {
    double ds = 1e-2;
    double ds_min = 1e-6;
    double ds_max = 1e-1;
    double corrector_tol = 1e-9;
    int max_steps = 500;
    int max_corrector_iters = 12;
    /// Transverse amplitude of the branch-switching kick; unset selects 1e-3 max|ω|.
    std::optional<double> kick_amplitude;
    /// The relaxed system has no sign condition, so by default the trace runs
    /// on through positivity loss and only flags the points.
    bool stop_on_positivity_loss = false;
    double beta_lo = -std::numeric_limits<double>::infinity();
    double beta_hi = std::numeric_limits<double>::infinity();
    double max_norm = 1e3;
    int max_folds = -1;  // negative: unlimited

    /// Throws InvalidConfig when the step bounds or tolerances are inconsistent.
    void validate() const;
};

enum class Termination { MaxSteps, PositivityLost, LeftWindow, Fold, CorrectorFailure };
const char* to_string(Termination t);

struct ContinuationPoint {
    double beta = 0.0;
    Eigen::VectorXd v_a;
    Eigen::VectorXd v_b;
    double residual_norm = 0.0;
    std::array<double, 2> min_values{};
    bool positive = false;
    double arclength = 0.0;
    int corrector_iterations = 0;
};

struct BranchSegment {
    std::vector<ContinuationPoint> points;
    BifurcationPoint origin;
    Partition partition;
    Termination termination = Termination::MaxSteps;
    int fold_count = 0;
};

/// Strong-form residuals of the reduced two-block system
///   -Δv_i - v_i - μ_eff_i(β) v_i³ - β v_o² v_i,  i in {A, B}, o the other block.
std::array<Eigen::VectorXd, 2> discrete_residual(const Discretization& disc, const CouplingConfig& config,
                                                 const Partition& partition, double beta,
                                                 const Eigen::VectorXd& v_a, const Eigen::VectorXd& v_b);

/// Jacobian of the weak-form reduced residual with respect to (v_A, v_B).
Eigen::SparseMatrix<double> reduced_jacobian(const Discretization& disc, const CouplingConfig& config,
                                             const Partition& partition, double beta,
                                             const Eigen::VectorXd& v_a, const Eigen::VectorXd& v_b);

/// Discrete energy J_β(u) by nodal quadrature.
double energy(const Discretization& disc, const CouplingConfig& config, double beta,
              const std::vector<Eigen::VectorXd>& u);

/// Gradient of the discrete energy: the mass-weighted residual of the full
/// n-component system, K u_j - M u_j - M(μ_j u_j³ + β Σ_{k≠j} u_k² u_j).
std::vector<Eigen::VectorXd> full_weak_residual(const Discretization& disc, const CouplingConfig& config,
                                                double beta, const std::vector<Eigen::VectorXd>& u);

/// Max-norm of the strong-form residual of the full system.
double full_residual_norm(const Discretization& disc, const CouplingConfig& config, double beta,
                          const std::vector<Eigen::VectorXd>& u);

/// Initial guess on a bifurcating P_A-branch.
struct Predictor {
    double beta = 0.0;
    Eigen::VectorXd v_a;
    Eigen::VectorXd v_b;
    /// Kernel direction ψ_k ⊗ w in reduced coordinates.
    Eigen::VectorXd kernel_a;
    Eigen::VectorXd kernel_b;
    double amplitude = 0.0;
};

/// Branch switching and pseudo-arclength continuation of bipartition branches
/// on one discretization. Holds references; the referenced objects must
/// outlive the engine.
class ContinuationEngine {
public:
    ContinuationEngine(const Discretization& disc, const CouplingConfig& config, const GroundState& state,
                       const WeightedSpectrum& spectrum);

    /// u(β_k) + s ψ_k ⊗ w with w ⟂ (a_A, a_B); throws DegenerateOrigin or
    /// MultiplicityUnsupported.
    Predictor branch_switch(const BifurcationPoint& origin, const Partition& partition,
                            const ContinuationSettings& settings) const;

    /// Corrects the predictor at fixed ω²-weighted projection onto the kernel
    /// direction, then traces the branch away from the synchronized branch.
    BranchSegment continue_branch(const BifurcationPoint& origin, const Partition& partition,
                                  const Predictor& predictor, const ContinuationSettings& settings) const;

    /// Lifts a reduced point back to n components.
    std::vector<Eigen::VectorXd> lift_point(const Partition& partition, const ContinuationPoint& point) const;

private:
    const Discretization& disc_;
    const CouplingConfig& config_;
    const GroundState& state_;
    const WeightedSpectrum& spectrum_;
};

}  // namespace bifkit
