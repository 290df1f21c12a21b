#include "bifkit/bifurcation_detector.hpp"

#include "bifkit/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bifkit {

namespace {

constexpr double kCrossingTol = 1e-12;
constexpr double kMorseEpsCap = 1e-3;
constexpr double kFarLeft = 1e15;

// Bisection to machine precision on a bracket where above(lo) != above(hi);
// returns whichever final endpoint gives the smaller |f - target|.
double refine_root(const CouplingConfig& config, double lo, double hi, double target) {
    const bool lo_above = f(config, lo) > target;
    for (int it = 0; it < 300; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if ((f(config, mid) > target) == lo_above) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return std::abs(f(config, lo) - target) <= std::abs(f(config, hi) - target) ? lo : hi;
}

// Point just left of the right end `edge` of an interval where the predicate holds.
template <typename Pred>
std::optional<double> approach_from_left(double edge, Pred ok) {
    double delta = 1e-3 * std::max(1.0, std::abs(edge));
    for (int it = 0; it < 1000; ++it) {
        const double b = edge - delta;
        if (b >= edge) return std::nullopt;
        if (ok(b)) return b;
        delta *= 0.5;
    }
    return std::nullopt;
}

template <typename Pred>
std::optional<double> walk_left(double edge, Pred ok) {
    double delta = 1.0;
    while (delta < kFarLeft) {
        const double b = edge - delta;
        if (ok(b)) return b;
        delta *= 2.0;
    }
    return std::nullopt;
}

std::vector<double> mixed_samples(double mu1, double beta_min, const DetectorOptions& options) {
    std::vector<double> betas;
    betas.reserve(static_cast<std::size_t>(options.log_samples + options.uniform_samples + 2));
    const double span = mu1 - beta_min;
    const double near = 1e-9 * std::max(1.0, std::abs(mu1));
    const double s_lo = std::log(near);
    const double s_hi = std::log(span);
    for (int i = 0; i < options.log_samples; ++i) {
        const double s = s_lo + (s_hi - s_lo) * static_cast<double>(i) / static_cast<double>(options.log_samples - 1);
        betas.push_back(mu1 - std::exp(s));
    }
    const double right = mu1 - near;
    for (int i = 0; i < options.uniform_samples; ++i) {
        betas.push_back(beta_min + (right - beta_min) * static_cast<double>(i) /
                                       static_cast<double>(options.uniform_samples - 1));
    }
    betas.push_back(beta_min);
    std::sort(betas.begin(), betas.end());
    betas.erase(std::unique(betas.begin(), betas.end()), betas.end());
    betas.erase(std::remove_if(betas.begin(), betas.end(), [&](double b) { return !(b < mu1); }), betas.end());
    return betas;
}

double morse_epsilon(double beta, const std::vector<double>& others, const std::vector<double>& edges) {
    double gap = std::numeric_limits<double>::infinity();
    for (double o : others) {
        if (o != beta) gap = std::min(gap, std::abs(o - beta));
    }
    for (double e : edges) {
        if (std::isfinite(e)) gap = std::min(gap, std::abs(e - beta));
    }
    return std::min(0.5 * gap, kMorseEpsCap);
}

}  // namespace

double left_cutoff(const CouplingConfig& config, double tol) {
    const double asym = f_asymptote(config.n());
    const double mu1 = config.mu().front();
    auto b = walk_left(std::min(mu1, 0.0), [&](double x) { return std::abs(f(config, x) - asym) < tol; });
    if (!b) throw Error(ErrorCode::SolverFailure, "f does not approach its asymptote");
    return *b;
}

BifurcationScan find_bifurcations(const CouplingConfig& config, const WeightedSpectrum& spectrum,
                                  const DetectorOptions& options) {
    const CaseInfo info = classify(config);
    const int n = config.n();
    const double asym = f_asymptote(n);
    const double mu1 = config.mu().front();

    BifurcationScan scan;
    scan.beta_min = left_cutoff(config, options.asymptote_tol);

    std::vector<double> mixed_grid;
    std::vector<double> mixed_f;
    double coverage = asym;
    if (info.kind == CaseKind::Mixed) {
        mixed_grid = mixed_samples(mu1, scan.beta_min, options);
        mixed_f.reserve(mixed_grid.size());
        for (double b : mixed_grid) mixed_f.push_back(f(config, b));
        coverage = std::max(coverage, *std::max_element(mixed_f.begin(), mixed_f.end()));
        scan.samples = static_cast<int>(mixed_grid.size());
    }
    if (!(spectrum.complete_below > coverage)) {
        throw Error(ErrorCode::InsufficientSpectrum,
                    "computed eigenvalues stop at " + std::to_string(spectrum.complete_below) +
                        ", below the range of f (" + std::to_string(coverage) + ")");
    }

    struct Root {
        double beta;
        int cluster;
    };
    std::vector<Root> roots;

    for (std::size_t c = 0; c < spectrum.clusters.size(); ++c) {
        const double lambda = spectrum.clusters[c].lambda;
        if (lambda <= -1.0 + 1e-8) continue;  // f > -1 on (-∞, μ₁) and f < -1 on (μₙ, β̄)
        const int cluster = static_cast<int>(c);
        switch (info.kind) {
            case CaseKind::Focusing: {
                if (lambda <= asym) break;
                const double bb = beta_bar(config);
                auto hi = approach_from_left(bb, [&](double b) { return f(config, b) > lambda; });
                auto lo = walk_left(bb, [&](double b) { return f(config, b) < lambda; });
                if (!hi || !lo) {
                    scan.unresolved.push_back(cluster + 1);
                    break;
                }
                roots.push_back({refine_root(config, *lo, *hi, lambda), cluster});
                break;
            }
            case CaseKind::Defocusing: {
                if (lambda >= asym) break;
                auto hi = approach_from_left(mu1, [&](double b) { return f(config, b) < lambda; });
                auto lo = walk_left(mu1, [&](double b) { return f(config, b) > lambda; });
                if (!hi || !lo) {
                    scan.unresolved.push_back(cluster + 1);
                    break;
                }
                roots.push_back({refine_root(config, *lo, *hi, lambda), cluster});
                break;
            }
            case CaseKind::Mixed: {
                for (std::size_t i = 0; i + 1 < mixed_grid.size(); ++i) {
                    const bool left_above = mixed_f[i] > lambda;
                    const bool right_above = mixed_f[i + 1] > lambda;
                    if (left_above != right_above) {
                        roots.push_back({refine_root(config, mixed_grid[i], mixed_grid[i + 1], lambda), cluster});
                    }
                }
                break;
            }
        }
    }

    std::vector<double> all_betas;
    for (const auto& r : roots) all_betas.push_back(r.beta);
    std::vector<double> edges;
    for (const auto& iv : branch_interval(config)) {
        edges.push_back(iv.lo);
        edges.push_back(iv.hi);
    }

    for (const auto& r : roots) {
        const auto& cl = spectrum.clusters[static_cast<std::size_t>(r.cluster)];
        BifurcationPoint p;
        p.beta = r.beta;
        p.lambda = cl.lambda;
        p.k = r.cluster + 1;
        p.multiplicity = cl.multiplicity;
        p.kernel_dim = (n - 1) * cl.multiplicity;
        p.f_prime = f_prime(config, r.beta);
        p.degenerate = std::abs(p.f_prime) < options.degeneracy_threshold;
        p.global_full = p.kernel_dim % 2 == 1;
        const double eps = morse_epsilon(r.beta, all_betas, edges);
        try {
            p.morse_left = morse_index(config, spectrum, r.beta - eps);
            p.morse_right = morse_index(config, spectrum, r.beta + eps);
        } catch (const Error&) {
            p.morse_left.reset();
            p.morse_right.reset();
        }
        scan.points.push_back(p);
    }
    std::sort(scan.points.begin(), scan.points.end(),
              [](const BifurcationPoint& a, const BifurcationPoint& b) { return a.beta < b.beta; });
    return scan;
}

int morse_index(const CouplingConfig& config, const WeightedSpectrum& spectrum, double beta) {
    if (!in_branch_interval(config, beta)) {
        throw Error(ErrorCode::OutsideBranchInterval, "Morse index requested off the branch interval");
    }
    const double fv = f(config, beta);
    if (!(fv < spectrum.complete_below)) {
        throw Error(ErrorCode::InsufficientSpectrum, "f(beta) exceeds the computed spectrum");
    }
    int count = 0;
    for (const auto& c : spectrum.clusters) {
        if (std::abs(fv - c.lambda) <= kCrossingTol * (1.0 + std::abs(c.lambda))) {
            throw Error(ErrorCode::TooCloseToCrossing, "f(beta) coincides with an eigenvalue");
        }
        if (c.lambda < fv) count += c.multiplicity;
    }
    return (config.n() - 1) * count;
}

bool classify_globality(const BifurcationPoint& point, int partition_size) {
    return ((partition_size - 1) * point.multiplicity) % 2 == 1;
}

}  // namespace bifkit
