#pragma once

#include "bifkit/continuation.hpp"
#include "bifkit/domain_mesh.hpp"
#include "bifkit/ground_state.hpp"
#include "bifkit/weighted_spectrum.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <map>
#include <memory>
#include <random>

namespace fixtures {

inline constexpr double kTwoPi = 6.283185307179586;

// Mesh, ground state and weighted spectrum of the interval (0, L), cached per
// mesh size because several suites share them.
struct Problem {
    bifkit::Discretization disc;
    bifkit::GroundState state;
    bifkit::WeightedSpectrum spectrum;
};

inline const Problem& interval(Eigen::Index m, int k_max = 20, double length = kTwoPi) {
    static std::map<std::tuple<Eigen::Index, int, double>, std::unique_ptr<Problem>> cache;
    auto& slot = cache[{m, k_max, length}];
    if (!slot) {
        auto disc = bifkit::make_discretization(bifkit::DomainSpec::interval(length), m);
        auto state = bifkit::solve_omega(disc);
        auto spectrum = bifkit::compute_spectrum(disc, state, k_max);
        slot = std::make_unique<Problem>(Problem{std::move(disc), std::move(state), std::move(spectrum)});
    }
    return *slot;
}

inline Eigen::MatrixXd dense(const bifkit::SymTridiag& a) { return Eigen::MatrixXd(a.to_sparse()); }

// Sorted random couplings of one sign pattern, bounded away from zero and
// from each other.
inline std::vector<double> random_mu(std::mt19937_64& rng, int n, int negatives) {
    std::uniform_real_distribution<double> mag(0.2, 4.0);
    std::vector<double> mu;
    for (int j = 0; j < n; ++j) mu.push_back(j < negatives ? -mag(rng) : mag(rng));
    std::sort(mu.begin(), mu.end());
    return mu;
}

}  // namespace fixtures
