#pragma once

#include "bifkit/coupling_algebra.hpp"
#include "bifkit/weighted_spectrum.hpp"

#include <optional>
#include <vector>

namespace bifkit {

/// A solution β_k of f(β) = λ_k on the branch interval.
struct BifurcationPoint {
    double beta = 0.0;
    double lambda = 0.0;
    int k = 0;             // 1-based index of the eigenvalue cluster
    int multiplicity = 1;  // n_k
    int kernel_dim = 0;    // (n-1) n_k
    double f_prime = 0.0;
    bool degenerate = false;   // |f'(β_k)| below the threshold: bifurcation not certified
    bool global_full = false;  // (n-1) n_k odd
    std::optional<int> morse_left;
    std::optional<int> morse_right;
};

struct DetectorOptions {
    double degeneracy_threshold = 1e-8;
    /// β_min is pushed left until |f(β_min) - asymptote| < asymptote_tol.
    double asymptote_tol = 1e-6;
    /// Mixed case: log-spaced samples in μ₁ - β plus this many uniform ones.
    int log_samples = 20000;
    int uniform_samples = 10000;
};

struct BifurcationScan {
    std::vector<BifurcationPoint> points;  // sorted by β
    double beta_min = 0.0;                  // left cutoff used for the unbounded interval
    int samples = 0;                        // mixed case sampling resolution (0 otherwise)
    std::vector<int> unresolved;            // clusters whose root lies beyond the cutoff
};

/// Locates every crossing f(β) = λ_k on the branch interval. Focusing and
/// defocusing use monotone bracketing; the mixed case samples f and bisects
/// each sign change. Throws InsufficientSpectrum when the computed spectrum
/// does not reach the range of f that matters.
BifurcationScan find_bifurcations(const CouplingConfig& config, const WeightedSpectrum& spectrum,
                                  const DetectorOptions& options = {});

/// Left cutoff β_min < μ₁ with |f(β_min) - asymptote| < tol.
double left_cutoff(const CouplingConfig& config, double tol);

/// Morse index m(β) = (n-1) Σ_{λ_k < f(β)} n_k of the energy at the
/// synchronized point. Throws TooCloseToCrossing when f(β) sits on an
/// eigenvalue and InsufficientSpectrum when f(β) exceeds the computed range.
int morse_index(const CouplingConfig& config, const WeightedSpectrum& spectrum, double beta);

/// Whether ( |P| - 1 ) n_k is odd.
bool classify_globality(const BifurcationPoint& point, int partition_size);

}  // namespace bifkit
