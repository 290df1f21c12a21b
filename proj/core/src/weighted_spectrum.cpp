#include "bifkit/weighted_spectrum.hpp"

#include "bifkit/error.hpp"

#include <algorithm>
#include <cmath>

namespace bifkit {

namespace {

bool same_cluster(double a, double b, double tol) { return std::abs(b - a) <= tol * (1.0 + std::abs(a)); }

}  // namespace

WeightedSpectrum compute_spectrum(const Discretization& disc, const GroundState& state, int k_max,
                                  double cluster_tol) {
    const Eigen::Index m = disc.mesh.size();
    if (k_max < 2) throw Error(ErrorCode::InvalidConfig, "k_max must be at least 2");
    if (!(cluster_tol > 0.0)) throw Error(ErrorCode::InvalidConfig, "cluster_tol must be positive");
    if (state.omega.size() != m) throw Error(ErrorCode::InvalidMesh, "ground state is on another mesh");
    if (state.omega.minCoeff() <= 0.0) throw Error(ErrorCode::SolverFailure, "omega is not positive");
    if (k_max + 1 > m) throw Error(ErrorCode::InvalidConfig, "k_max exceeds the number of mesh nodes");

    const Eigen::VectorXd& w = disc.mesh.weights();
    SymTridiag shifted_k = disc.stiffness.matrix;
    shifted_k.diag -= w;
    const Eigen::VectorXd weight = w.cwiseProduct(state.omega.cwiseAbs2());

    // One extra eigenvalue decides whether the last cluster is complete.
    std::vector<double> values(static_cast<std::size_t>(k_max + 1));
    for (int k = 0; k <= k_max; ++k) values[static_cast<std::size_t>(k)] = pencil_eigenvalue(shifted_k, weight, k);

    std::vector<std::vector<double>> groups;
    for (double v : values) {
        if (!groups.empty() && same_cluster(groups.back().back(), v, cluster_tol)) {
            groups.back().push_back(v);
        } else {
            groups.push_back({v});
        }
    }
    WeightedSpectrum out;
    out.cluster_tol = cluster_tol;
    // The group holding the sentinel may be cut short; drop it.
    out.complete_below = groups.back().front();
    groups.pop_back();

    for (const auto& group : groups) {
        EigenCluster cluster;
        double sum = 0.0;
        for (double v : group) sum += v;
        cluster.lambda = sum / static_cast<double>(group.size());
        cluster.multiplicity = static_cast<int>(group.size());

        std::vector<Eigen::VectorXd> w_basis;
        for (double v : group) w_basis.push_back(pencil_eigenvector(shifted_k, weight, v, w_basis));
        // Re-orthonormalize in the mass inner product.
        for (auto& q : w_basis) {
            for (const auto& p : cluster.basis) q -= disc.mesh.inner(p, q) * p;
            q /= disc.mesh.l2_norm(q);
            cluster.basis.push_back(q);
        }
        out.clusters.push_back(std::move(cluster));
    }

    for (std::size_t k = 0; k + 1 < out.clusters.size(); ++k) {
        const double a = out.clusters[k].lambda;
        const double b = out.clusters[k + 1].lambda;
        if (std::abs(b - a) < 10.0 * cluster_tol * (1.0 + std::abs(a))) {
            out.ambiguous_gaps.emplace_back(static_cast<int>(k), static_cast<int>(k + 1));
        }
    }
    out.k0 = static_cast<int>(std::count_if(out.clusters.begin(), out.clusters.end(),
                                            [](const EigenCluster& c) { return c.lambda < 0.0; }));
    return out;
}

std::vector<WindowEntry> count_in_window(const WeightedSpectrum& spectrum, double lo, double hi) {
    std::vector<WindowEntry> entries;
    if (!(lo < hi)) return entries;
    for (std::size_t k = 0; k < spectrum.clusters.size(); ++k) {
        const auto& c = spectrum.clusters[k];
        if (c.lambda > lo && c.lambda < hi) {
            entries.push_back({static_cast<int>(k + 1), c.lambda, c.multiplicity});
        }
    }
    return entries;
}

double weighted_rayleigh_quotient(const Discretization& disc, const Eigen::VectorXd& omega,
                                  const Eigen::VectorXd& psi) {
    const Eigen::VectorXd& w = disc.mesh.weights();
    const double num = psi.dot(disc.stiffness.apply(psi)) - psi.dot(w.cwiseProduct(psi));
    const double den = psi.dot(w.cwiseProduct(omega.cwiseAbs2()).cwiseProduct(psi));
    return num / den;
}

}  // namespace bifkit
