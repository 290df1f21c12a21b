#pragma once

#include <Eigen/Core>

#include <limits>
#include <string>
#include <vector>

namespace bifkit {

/// Self-couplings μ₁ <= ... <= μₙ of the symmetric system (a = -1), n >= 3.
class CouplingConfig {
public:
    explicit CouplingConfig(std::vector<double> mu);

    int n() const { return static_cast<int>(mu_.size()); }
    const std::vector<double>& mu() const { return mu_; }
    double mu(int j) const { return mu_[static_cast<std::size_t>(j)]; }

private:
    std::vector<double> mu_;
};

enum class CaseKind { Focusing, Defocusing, Mixed };

struct CaseInfo {
    CaseKind kind;
    int split = 0;  // Mixed only: number of negative couplings (μ_split < 0 < μ_{split+1}, 1-based)
};

/// Throws DegenerateCoupling if some μ_j = 0.
CaseInfo classify(const CouplingConfig& config);
std::string to_string(CaseKind kind);

/// g(β) = 1 + β Σ 1/(μ_j - β), summed with Neumaier compensation.
double g(const CouplingConfig& config, double beta);
double g_prime(const CouplingConfig& config, double beta);

/// f(β) = -1 - 2/g(β); throws PoleAtBetaBar when |g| < 1e-14.
double f(const CouplingConfig& config, double beta);
double f_prime(const CouplingConfig& config, double beta);

/// Common limit of f as β → -∞: -1 + 2/(n-1) = (3-n)/(n-1).
double f_asymptote(int n);

/// Unique zero of g: in (-∞, 0) when focusing, in (μₙ, ∞) when defocusing.
/// Throws NotApplicable in the mixed case.
double beta_bar(const CouplingConfig& config);

struct OpenInterval {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();

    bool contains(double x) const { return x > lo && x < hi; }
};

/// β-range of the synchronized branch.
std::vector<OpenInterval> branch_interval(const CouplingConfig& config);
bool in_branch_interval(const CouplingConfig& config, double beta);

/// (β - μ_j) g(β) > 0 for every j, evaluated directly.
bool synchronization_condition(const CouplingConfig& config, double beta);

struct BranchPoint {
    double beta = 0.0;
    Eigen::VectorXd alphas;  // α_j = ((β - μ_j) g(β))^{-1/2}
    double g_value = 0.0;
    double f_value = 0.0;
};

/// Coefficients of the synchronized solution u_j = α_j ω; throws
/// OutsideBranchInterval when β is not in the branch interval.
BranchPoint branch_point(const CouplingConfig& config, double beta);

/// Residual of μ_j α_j² + β Σ_{k≠j} α_k² = -1, per j.
Eigen::VectorXd branch_identity_residual(const CouplingConfig& config, const BranchPoint& point);

/// Coefficient matrix of the linearization at the synchronized point:
/// M_jj = 3μ_jα_j² + β Σ_{k≠j} α_k², M_jk = 2β α_j α_k.
Eigen::MatrixXd linearization(const CouplingConfig& config, const BranchPoint& point);

/// Orthonormal basis (as columns) of {v : Σ α_j v_j = 0}.
Eigen::MatrixXd kernel_direction_basis(const CouplingConfig& config, const BranchPoint& point);

}  // namespace bifkit
