#pragma once

#include "bifkit/coupling_algebra.hpp"

#include <optional>
#include <string>
#include <vector>

namespace bifkit {

/// Parameters of the general system -Δu_j + a_j u_j = μ_j u_j³ + β Σ_{k≠j} u_k² u_j.
struct GeneralConfig {
    std::vector<double> a;
    std::vector<double> mu;  // sorted ascending
    double beta = 0.0;
    double lambda1 = 0.0;    // principal Dirichlet eigenvalue of the domain

    int n() const { return static_cast<int>(mu.size()); }

    /// Throws InvalidConfig on size mismatch, unsorted μ, n < 3 or lambda1 <= 0.
    void validate() const;

    /// The symmetric system a ≡ -1.
    static GeneralConfig symmetric(std::vector<double> mu, double beta, double lambda1);
};

enum class Criterion { I, II, III, IV };
std::string to_string(Criterion c);

struct CriterionFiring {
    Criterion criterion;
    // 0-based witness indices: (i) uses j only, (ii) uses both.
    std::optional<int> i;
    std::optional<int> j;
    bool boundary_marginal = false;
    std::string note;
};

struct NonexistenceVerdict {
    std::vector<CriterionFiring> fired;
    std::optional<double> beta_bar;  // set when (iii) was tested

    bool any() const { return !fired.empty(); }
    bool fires(Criterion c) const;
};

/// Tests every criterion; (iii) only for focusing μ, (iv) only for mixed
/// signs. The first witness found (lexicographic in the indices) is kept.
NonexistenceVerdict evaluate(const GeneralConfig& config);

/// Deterministic interior samples of the branch interval.
std::vector<double> sample_branch_interval(const CouplingConfig& config, int count);

/// True iff no criterion fires at any of `samples` points of the branch
/// interval of the symmetric system. Requires lambda1 < 1.
bool consistency_with_branch(const CouplingConfig& config, double lambda1, int samples = 100);

struct ExclusionInterval {
    Criterion criterion;
    double beta_lo;
    double beta_hi;  // +inf when unbounded
};

/// β-ranges on which each criterion excludes positive solutions of the
/// symmetric system, given lambda1 < 1.
std::vector<ExclusionInterval> exclusion_intervals(const CouplingConfig& config, double lambda1);

}  // namespace bifkit
