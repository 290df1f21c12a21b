#pragma once

#include "bifkit/domain_mesh.hpp"
#include "bifkit/ground_state.hpp"

#include <Eigen/Core>

#include <vector>

namespace bifkit {

/// One distinct eigenvalue of -Δψ - ψ = λ ω² ψ with its eigenspace.
struct EigenCluster {
    double lambda = 0.0;
    int multiplicity = 1;
    std::vector<Eigen::VectorXd> basis;  // mass-orthonormal within the cluster
};

struct WeightedSpectrum {
    std::vector<EigenCluster> clusters;  // strictly increasing lambda
    /// Every pencil eigenvalue below this value is listed in `clusters`.
    double complete_below = 0.0;
    /// Number of clusters with negative eigenvalue (λ_{k0} < 0 < λ_{k0+1}).
    int k0 = 0;
    double cluster_tol = 1e-7;
    /// Pairs of consecutive clusters separated by less than 10 cluster widths.
    std::vector<std::pair<int, int>> ambiguous_gaps;

    std::size_t size() const { return clusters.size(); }
    const EigenCluster& operator[](std::size_t k) const { return clusters[k]; }
};

struct WindowEntry {
    int k;  // 1-based cluster index
    double lambda;
    int multiplicity;
};

/// The k_max smallest eigenvalues of (K - M) ψ = λ W ψ, W = M diag(ω²),
/// grouped into clusters whose members agree within cluster_tol*(1+|λ|).
WeightedSpectrum compute_spectrum(const Discretization& disc, const GroundState& state,
                                  int k_max = 20, double cluster_tol = 1e-7);

/// Distinct eigenvalues strictly inside (lo, hi).
std::vector<WindowEntry> count_in_window(const WeightedSpectrum& spectrum, double lo, double hi);

/// Generalized Rayleigh quotient ψᵀ(K - M)ψ / ψᵀWψ.
double weighted_rayleigh_quotient(const Discretization& disc, const Eigen::VectorXd& omega,
                                  const Eigen::VectorXd& psi);

}  // namespace bifkit
