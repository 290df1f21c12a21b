#include "bifkit/coupling_algebra.hpp"

#include "bifkit/error.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>

namespace bifkit {

namespace {

constexpr double kPoleTol = 1e-14;
constexpr double kBetaBarPole = 1e-14;

// Neumaier's variant of Kahan summation.
class CompensatedSum {
public:
    explicit CompensatedSum(double init = 0.0) : sum_(init) {}

    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            c_ += (sum_ - t) + x;
        } else {
            c_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    double value() const { return sum_ + c_; }

private:
    double sum_;
    double c_ = 0.0;
};

void check_pole(const CouplingConfig& config, double beta) {
    for (double mu : config.mu()) {
        if (std::abs(beta - mu) <= kPoleTol * std::max(1.0, std::abs(mu))) {
            throw Error(ErrorCode::PoleAtMu, "beta coincides with a self-coupling");
        }
    }
}

template <typename Pred>
double bisect(double lo, double hi, Pred is_left) {
    // is_left(lo) is true, is_left(hi) is false
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (is_left(mid)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

CouplingConfig::CouplingConfig(std::vector<double> mu) : mu_(std::move(mu)) {
    if (mu_.size() < 3) {
        throw Error(ErrorCode::InvalidConfig, "need at least three components");
    }
    for (double m : mu_) {
        if (!std::isfinite(m)) throw Error(ErrorCode::InvalidConfig, "self-couplings must be finite");
    }
    if (!std::is_sorted(mu_.begin(), mu_.end())) {
        throw Error(ErrorCode::InvalidConfig, "self-couplings must be sorted ascending");
    }
}

CaseInfo classify(const CouplingConfig& config) {
    const auto& mu = config.mu();
    if (std::any_of(mu.begin(), mu.end(), [](double m) { return m == 0.0; })) {
        throw Error(ErrorCode::DegenerateCoupling, "a self-coupling equals zero");
    }
    if (mu.front() > 0.0) return {CaseKind::Focusing, 0};
    if (mu.back() < 0.0) return {CaseKind::Defocusing, 0};
    const auto negatives = std::count_if(mu.begin(), mu.end(), [](double m) { return m < 0.0; });
    return {CaseKind::Mixed, static_cast<int>(negatives)};
}

std::string to_string(CaseKind kind) {
    switch (kind) {
        case CaseKind::Focusing: return "focusing";
        case CaseKind::Defocusing: return "defocusing";
        case CaseKind::Mixed: return "mixed";
    }
    return "unknown";
}

double g(const CouplingConfig& config, double beta) {
    check_pole(config, beta);
    CompensatedSum sum(1.0);
    for (double mu : config.mu()) sum.add(beta / (mu - beta));
    return sum.value();
}

double g_prime(const CouplingConfig& config, double beta) {
    check_pole(config, beta);
    CompensatedSum sum;
    for (double mu : config.mu()) {
        const double d = mu - beta;
        sum.add(mu / (d * d));
    }
    return sum.value();
}

double f(const CouplingConfig& config, double beta) {
    const double gv = g(config, beta);
    if (std::abs(gv) < kBetaBarPole) throw Error(ErrorCode::PoleAtBetaBar, "g vanishes at beta");
    return -1.0 - 2.0 / gv;
}

double f_prime(const CouplingConfig& config, double beta) {
    const double gv = g(config, beta);
    if (std::abs(gv) < kBetaBarPole) throw Error(ErrorCode::PoleAtBetaBar, "g vanishes at beta");
    return 2.0 * g_prime(config, beta) / (gv * gv);
}

double f_asymptote(int n) { return -1.0 + 2.0 / static_cast<double>(n - 1); }

double beta_bar(const CouplingConfig& config) {
    const auto kind = classify(config).kind;
    if (kind == CaseKind::Mixed) {
        throw Error(ErrorCode::NotApplicable, "beta_bar is not defined in the mixed case");
    }
    if (kind == CaseKind::Focusing) {
        // g increases from 1-n to +∞ on (-∞, μ₁) and g(0) = 1.
        double lo = -1.0;
        while (g(config, lo) >= 0.0) lo *= 2.0;
        return bisect(lo, 0.0, [&](double b) { return g(config, b) < 0.0; });
    }
    // Defocusing: g decreases from +∞ (at μₙ⁺) to 1-n on (μₙ, ∞).
    const double mu_n = config.mu().back();
    const double scale = std::max(1.0, std::abs(mu_n));
    double delta = 1e-8 * scale;
    while (g(config, mu_n + delta) <= 0.0) delta *= 0.5;
    double span = scale;
    while (g(config, mu_n + span) >= 0.0) span *= 2.0;
    return bisect(mu_n + delta, mu_n + span, [&](double b) { return g(config, b) > 0.0; });
}

std::vector<OpenInterval> branch_interval(const CouplingConfig& config) {
    const double inf = std::numeric_limits<double>::infinity();
    const auto& mu = config.mu();
    switch (classify(config).kind) {
        case CaseKind::Focusing:
            return {OpenInterval{-inf, beta_bar(config)}};
        case CaseKind::Defocusing:
            return {OpenInterval{-inf, mu.front()}, OpenInterval{mu.back(), beta_bar(config)}};
        case CaseKind::Mixed:
            return {OpenInterval{-inf, mu.front()}};
    }
    return {};
}

bool in_branch_interval(const CouplingConfig& config, double beta) {
    const auto intervals = branch_interval(config);
    return std::any_of(intervals.begin(), intervals.end(), [&](const OpenInterval& iv) { return iv.contains(beta); });
}

bool synchronization_condition(const CouplingConfig& config, double beta) {
    double gv = 0.0;
    try {
        gv = g(config, beta);
    } catch (const Error&) {
        return false;
    }
    return std::all_of(config.mu().begin(), config.mu().end(), [&](double mu) { return (beta - mu) * gv > 0.0; });
}

BranchPoint branch_point(const CouplingConfig& config, double beta) {
    if (!in_branch_interval(config, beta) || !synchronization_condition(config, beta)) {
        throw Error(ErrorCode::OutsideBranchInterval, "beta = " + std::to_string(beta) + " is outside the branch interval");
    }
    BranchPoint p;
    p.beta = beta;
    p.g_value = g(config, beta);
    p.f_value = -1.0 - 2.0 / p.g_value;
    p.alphas.resize(config.n());
    for (int j = 0; j < config.n(); ++j) {
        p.alphas[j] = 1.0 / std::sqrt((beta - config.mu(j)) * p.g_value);
    }
    return p;
}

Eigen::VectorXd branch_identity_residual(const CouplingConfig& config, const BranchPoint& point) {
    const int n = config.n();
    const Eigen::VectorXd sq = point.alphas.cwiseAbs2();
    const double total = sq.sum();
    Eigen::VectorXd r(n);
    for (int j = 0; j < n; ++j) {
        r[j] = config.mu(j) * sq[j] + point.beta * (total - sq[j]) + 1.0;
    }
    return r;
}

Eigen::MatrixXd linearization(const CouplingConfig& config, const BranchPoint& point) {
    const int n = config.n();
    const Eigen::VectorXd& a = point.alphas;
    const Eigen::VectorXd sq = a.cwiseAbs2();
    const double total = sq.sum();
    Eigen::MatrixXd m(n, n);
    for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
            m(j, k) = j == k ? 3.0 * config.mu(j) * sq[j] + point.beta * (total - sq[j])
                             : 2.0 * point.beta * a[j] * a[k];
        }
    }
    return m;
}

Eigen::MatrixXd kernel_direction_basis(const CouplingConfig& config, const BranchPoint& point) {
    const int n = config.n();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(point.alphas);
    const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
    return q.rightCols(n - 1);
}

}  // namespace bifkit
