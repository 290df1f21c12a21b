#pragma once

#include "bifkit/coupling_algebra.hpp"

#include <Eigen/Core>

#include <string>
#include <vector>

namespace bifkit {

/// Partition of the component indices {0, ..., n-1}. Blocks are kept sorted
/// internally and ordered by their smallest element, so equal partitions
/// compare equal.
class Partition {
public:
    Partition() = default;
    Partition(int n, std::vector<std::vector<int>> blocks);

    /// Parses "1|23" or "1|2,3" (1-based component labels).
    static Partition parse(int n, const std::string& text);
    static Partition bipartition(int n, const std::vector<int>& a);

    int n() const { return n_; }
    int size() const { return static_cast<int>(blocks_.size()); }
    const std::vector<std::vector<int>>& blocks() const { return blocks_; }
    const std::vector<int>& block(int i) const { return blocks_[static_cast<std::size_t>(i)]; }
    int block_of(int component) const;

    /// 1-based text form, e.g. "1|23"; elements are dot-separated when n >= 10.
    std::string to_string() const;

    bool operator==(const Partition& other) const = default;

private:
    int n_ = 0;
    std::vector<std::vector<int>> blocks_;
};

/// Effective data of the |P|-component system satisfied by P-synchronized
/// solutions u_j = t_j v_i (j in block i), valid for β < μ₁:
///   h_i = (Σ_{k∈P_i} 1/(μ_k-β))^{-1},  μ_eff_i = β + h_i,  t_j = sqrt(h_i/(μ_j-β)).
struct ReducedConfig {
    double beta = 0.0;
    Partition partition;
    Eigen::VectorXd h;
    Eigen::VectorXd mu_eff;
    Eigen::VectorXd t;  // per original component
};

/// Throws InvalidBeta unless β < μ₁.
ReducedConfig reduce(const CouplingConfig& config, const Partition& partition, double beta);

/// 1 + β Σ_i 1/(μ_eff_i - β): the coupling function of the reduced system.
double g_reduced(const ReducedConfig& reduced);

/// Synchronized point of the reduced system: v_i = a_i ω with
/// a_i = ((β - μ_eff_i) g)^{-1/2}.
Eigen::VectorXd reduced_synchronized_coefficients(const ReducedConfig& reduced);

/// u_j = t_j v_i for j in block i.
std::vector<Eigen::VectorXd> lift(const std::vector<Eigen::VectorXd>& reduced_solution,
                                  const ReducedConfig& reduced);

/// One bipartition {A, A^c} per complement pair: A ranges over the subsets
/// that contain component 0, excluding the full set.
std::vector<Partition> enumerate_bipartitions(int n);

/// Finest partition grouping components that are pairwise proportional:
/// node-wise ratios are compared where the reference component exceeds
/// 1e-8 of its max-norm, and must agree to relative tolerance `tol`.
Partition detect_synchrony(const std::vector<Eigen::VectorXd>& u, double tol = 1e-6);

}  // namespace bifkit
