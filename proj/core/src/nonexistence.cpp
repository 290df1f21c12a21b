#include "bifkit/nonexistence.hpp"

#include "bifkit/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bifkit {

namespace {

constexpr double kMarginal = 1e-10;

enum class Signs { Positive, Negative, Mixed };

Signs sign_pattern(const std::vector<double>& mu) {
    if (std::all_of(mu.begin(), mu.end(), [](double m) { return m > 0.0; })) return Signs::Positive;
    if (std::all_of(mu.begin(), mu.end(), [](double m) { return m < 0.0; })) return Signs::Negative;
    return Signs::Mixed;
}

std::optional<CriterionFiring> criterion_i(const GeneralConfig& c) {
    if (!(c.beta >= 0.0)) return std::nullopt;
    for (int j = 0; j < c.n(); ++j) {
        if (c.a[static_cast<std::size_t>(j)] <= -c.lambda1 && c.mu[static_cast<std::size_t>(j)] > 0.0) {
            return CriterionFiring{Criterion::I, std::nullopt, j, false, ""};
        }
    }
    return std::nullopt;
}

std::optional<CriterionFiring> criterion_ii(const GeneralConfig& c) {
    for (int i = 0; i < c.n(); ++i) {
        for (int j = i + 1; j < c.n(); ++j) {
            const double ai = c.a[static_cast<std::size_t>(i)];
            const double aj = c.a[static_cast<std::size_t>(j)];
            const double mi = c.mu[static_cast<std::size_t>(i)];
            const double mj = c.mu[static_cast<std::size_t>(j)];
            if (!(aj <= ai && mi <= c.beta && c.beta <= mj)) continue;
            if (aj < ai || mi < c.beta || c.beta < mj) return CriterionFiring{Criterion::II, i, j, false, ""};
        }
    }
    return std::nullopt;
}

std::optional<CriterionFiring> criterion_iii(const GeneralConfig& c, double bb) {
    bool strict = c.beta > bb;
    for (double a : c.a) {
        if (!(a <= -c.lambda1)) return std::nullopt;
        strict = strict || a < -c.lambda1;
    }
    if (!(c.beta >= bb) || !strict) return std::nullopt;
    CriterionFiring fire{Criterion::III, std::nullopt, std::nullopt, std::abs(c.beta - bb) <= kMarginal, ""};
    if (c.beta >= 0.0) {
        fire.note = "beta >= 0: the argument of criterion (i) applies";
    } else if (c.beta > bb) {
        fire.note = "beta_bar < beta < 0: weighted test against phi_1";
    } else {
        fire.note = "beta = beta_bar: strictness carried by a";
    }
    return fire;
}

std::optional<CriterionFiring> criterion_iv(const GeneralConfig& c) {
    const double a1 = c.a.front();
    const double an = c.a.back();
    const double mu1 = c.mu.front();
    if (!(an <= a1 && a1 <= -c.lambda1 && c.beta >= mu1)) return std::nullopt;
    if (an < a1 || a1 < -c.lambda1 || c.beta > mu1) {
        return CriterionFiring{Criterion::IV, 0, c.n() - 1, false, ""};
    }
    return std::nullopt;
}

}  // namespace

void GeneralConfig::validate() const {
    if (mu.size() < 3) throw Error(ErrorCode::InvalidConfig, "need at least three components");
    if (a.size() != mu.size()) throw Error(ErrorCode::InvalidConfig, "a and mu differ in length");
    if (!std::is_sorted(mu.begin(), mu.end())) throw Error(ErrorCode::InvalidConfig, "mu must be sorted");
    auto finite = [](double x) { return std::isfinite(x); };
    if (!std::all_of(mu.begin(), mu.end(), finite) || !std::all_of(a.begin(), a.end(), finite) ||
        !std::isfinite(beta)) {
        throw Error(ErrorCode::InvalidConfig, "parameters must be finite");
    }
    if (!(lambda1 > 0.0) || !std::isfinite(lambda1)) throw Error(ErrorCode::InvalidConfig, "lambda1 must be positive");
}

GeneralConfig GeneralConfig::symmetric(std::vector<double> mu, double beta, double lambda1) {
    GeneralConfig c;
    c.a.assign(mu.size(), -1.0);
    c.mu = std::move(mu);
    c.beta = beta;
    c.lambda1 = lambda1;
    return c;
}

std::string to_string(Criterion c) {
    switch (c) {
        case Criterion::I: return "i";
        case Criterion::II: return "ii";
        case Criterion::III: return "iii";
        case Criterion::IV: return "iv";
    }
    return "?";
}

bool NonexistenceVerdict::fires(Criterion c) const {
    return std::any_of(fired.begin(), fired.end(), [c](const CriterionFiring& f) { return f.criterion == c; });
}

NonexistenceVerdict evaluate(const GeneralConfig& config) {
    config.validate();
    NonexistenceVerdict v;
    if (auto fire = criterion_i(config)) v.fired.push_back(*fire);
    if (auto fire = criterion_ii(config)) v.fired.push_back(*fire);
    const Signs signs = sign_pattern(config.mu);
    if (signs == Signs::Positive) {
        v.beta_bar = beta_bar(CouplingConfig(config.mu));
        if (auto fire = criterion_iii(config, *v.beta_bar)) v.fired.push_back(*fire);
    }
    if (signs == Signs::Mixed) {
        if (auto fire = criterion_iv(config)) v.fired.push_back(*fire);
    }
    return v;
}

std::vector<double> sample_branch_interval(const CouplingConfig& config, int count) {
    const auto intervals = branch_interval(config);
    std::vector<double> out;
    if (intervals.empty() || count <= 0) return out;
    const int per = std::max(1, count / static_cast<int>(intervals.size()));
    for (std::size_t k = 0; k < intervals.size(); ++k) {
        const OpenInterval& iv = intervals[k];
        const int c = k + 1 == intervals.size() ? count - per * static_cast<int>(k) : per;
        for (int s = 0; s < c; ++s) {
            const double t = c == 1 ? 0.5 : static_cast<double>(s) / static_cast<double>(c - 1);
            double b;
            if (std::isfinite(iv.lo) && std::isfinite(iv.hi)) {
                b = iv.lo + (iv.hi - iv.lo) * (static_cast<double>(s) + 0.5) / static_cast<double>(c);
            } else {
                // Offsets from the finite end, log-spaced over 10 decades.
                const double edge = std::isfinite(iv.hi) ? iv.hi : iv.lo;
                const double d = std::max(1.0, std::abs(edge)) * std::pow(10.0, -6.0 + 10.0 * t);
                b = std::isfinite(iv.hi) ? edge - d : edge + d;
            }
            if (iv.contains(b)) out.push_back(b);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

bool consistency_with_branch(const CouplingConfig& config, double lambda1, int samples) {
    for (double b : sample_branch_interval(config, samples)) {
        if (evaluate(GeneralConfig::symmetric(config.mu(), b, lambda1)).any()) return false;
    }
    return true;
}

std::vector<ExclusionInterval> exclusion_intervals(const CouplingConfig& config, double lambda1) {
    if (!(lambda1 > 0.0 && lambda1 < 1.0)) {
        throw Error(ErrorCode::InvalidConfig, "exclusion intervals need 0 < lambda1 < 1");
    }
    const double inf = std::numeric_limits<double>::infinity();
    const auto& mu = config.mu();
    std::vector<ExclusionInterval> out;
    const Signs signs = sign_pattern(mu);
    if (mu.back() > 0.0) out.push_back({Criterion::I, 0.0, inf});
    if (mu.front() < mu.back()) out.push_back({Criterion::II, mu.front(), mu.back()});
    if (signs == Signs::Positive) out.push_back({Criterion::III, beta_bar(config), inf});
    if (signs == Signs::Mixed) out.push_back({Criterion::IV, mu.front(), inf});
    return out;
}

}  // namespace bifkit
