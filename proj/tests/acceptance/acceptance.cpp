// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include "bifkit/bifurcation_detector.hpp"
#include "bifkit/continuation.hpp"
#include "bifkit/coupling_algebra.hpp"
#include "bifkit/domain_mesh.hpp"
#include "bifkit/ground_state.hpp"
#include "bifkit/nonexistence.hpp"
#include "bifkit/partition_reduction.hpp"
#include "bifkit/weighted_spectrum.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

using namespace bifkit;

namespace {

constexpr double kTwoPi = 6.283185307179586;

struct Outcome {
    bool pass = true;
    std::string detail;
};

struct Problem {
    Discretization disc;
    GroundState state;
    WeightedSpectrum spectrum;
};

const Problem& interval_problem() {
    static const Problem p = [] {
        auto disc = make_discretization(DomainSpec::interval(kTwoPi), 2048);
        auto state = solve_omega(disc, 1e-10);
        auto spectrum = compute_spectrum(disc, state, 20);
        return Problem{std::move(disc), std::move(state), std::move(spectrum)};
    }();
    return p;
}

std::vector<double> random_mu(std::mt19937_64& rng, int n, int negatives) {
    std::uniform_real_distribution<double> mag(0.2, 4.0);
    std::vector<double> mu;
    for (int j = 0; j < n; ++j) mu.push_back(j < negatives ? -mag(rng) : mag(rng));
    std::sort(mu.begin(), mu.end());
    return mu;
}

// Number of negative couplings for case index 0 (focusing), 1 (defocusing), 2 (mixed).
int negatives_for(std::mt19937_64& rng, int n, int kase) {
    if (kase == 0) return 0;
    if (kase == 1) return n;
    std::uniform_int_distribution<int> k(1, n - 1);
    return k(rng);
}

double sample_beta(std::mt19937_64& rng, const CouplingConfig& c) {
    const auto iv = branch_interval(c);
    std::uniform_int_distribution<std::size_t> pick(0, iv.size() - 1);
    const OpenInterval& i = iv[pick(rng)];
    std::uniform_real_distribution<double> u(0.02, 0.98);
    if (std::isfinite(i.lo)) return i.lo + u(rng) * (i.hi - i.lo);
    std::uniform_real_distribution<double> e(-3.0, 3.0);
    return i.hi - std::pow(10.0, e(rng));
}

std::string fmt(const char* f, double v) {
    char buf[96];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

Outcome weighted_first_eigenvalue() {
    const Problem& p = interval_problem();
    const double l1 = p.spectrum[0].lambda;
    const Eigen::VectorXd& psi = p.spectrum[0].basis.front();
    const Eigen::VectorXd& w = p.state.omega;
    const double scale = p.disc.mesh.inner(psi, w) / p.disc.mesh.inner(w, w);
    const double rel = p.disc.mesh.l2_norm(psi / scale - w) / p.disc.mesh.l2_norm(w);
    Outcome o;
    o.pass = std::abs(l1 + 1.0) <= 1e-6 && rel <= 1e-4;
    o.detail = "|lambda_1+1| = " + fmt("%.3e", std::abs(l1 + 1.0)) + ", eigenfunction vs omega rel L2 = " + fmt("%.3e", rel);
    return o;
}

Outcome linearization_eigenstructure() {
    std::mt19937_64 rng(1001);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 3 + trial % 3;
        const int kase = (trial / 3) % 3;
        const CouplingConfig c(random_mu(rng, n, negatives_for(rng, n, kase)));
        const BranchPoint bp = branch_point(c, sample_beta(rng, c));
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(linearization(c, bp));
        std::vector<double> expected(static_cast<std::size_t>(n), bp.f_value);
        expected[0] = -3.0;
        std::sort(expected.begin(), expected.end());
        for (int k = 0; k < n; ++k) {
            const double e = expected[static_cast<std::size_t>(k)];
            worst = std::max(worst, std::abs(es.eigenvalues()[k] - e) / std::max(1.0, std::abs(e)));
        }
    }
    return {worst <= 1e-10, "max relative eigenvalue error over 100 configs = " + fmt("%.3e", worst)};
}

Outcome branch_residual() {
    const Problem& p = interval_problem();
    std::mt19937_64 rng(1002);
    double worst = 0.0;
    for (int kase = 0; kase < 3; ++kase) {
        const int n = 3 + kase;
        const CouplingConfig c(random_mu(rng, n, negatives_for(rng, n, kase)));
        for (int s = 0; s < 20; ++s) {
            const double beta = sample_beta(rng, c);
            const BranchPoint bp = branch_point(c, beta);
            std::vector<Eigen::VectorXd> u;
            for (int j = 0; j < n; ++j) u.push_back(bp.alphas[j] * p.state.omega);
            worst = std::max(worst, full_residual_norm(p.disc, c, beta, u));
        }
    }
    return {worst <= 1e-8, "max discrete residual over 60 samples = " + fmt("%.3e", worst)};
}

Outcome morse_jump() {
    const Problem& p = interval_problem();
    const CouplingConfig c({1, 2, 3});
    const auto scan = find_bifurcations(c, p.spectrum);
    int checked = 0;
    bool ok = !scan.points.empty();
    for (const auto& pt : scan.points) {
        if (pt.degenerate) continue;
        ++checked;
        ok = ok && pt.morse_left && pt.morse_right && *pt.morse_right - *pt.morse_left == (c.n() - 1) * pt.multiplicity &&
             (c.n() - 1) * pt.multiplicity == 2;
    }
    return {ok && checked > 0, std::to_string(checked) + " nondegenerate points, each jump = 2"};
}

Outcome case_windows() {
    const Problem& p = interval_problem();
    std::string detail;
    bool ok = true;
    for (int n = 3; n <= 5; ++n) {
        std::vector<double> mu;
        for (int j = 0; j < n; ++j) mu.push_back(1.0 + j);
        const CouplingConfig c(mu);
        const double asym = f_asymptote(n);
        const auto scan = find_bifurcations(c, p.spectrum);
        for (std::size_t k = 0; k < p.spectrum.size(); ++k) {
            const auto hits = std::count_if(scan.points.begin(), scan.points.end(),
                                            [&](const BifurcationPoint& q) { return q.k == static_cast<int>(k + 1); });
            ok = ok && hits == (p.spectrum[k].lambda > asym ? 1 : 0);
        }
    }
    detail += "focusing n=3..5 ok=" + std::to_string(ok);

    bool def_ok = true;
    for (int n = 3; n <= 5; ++n) {
        std::vector<double> mu;
        for (int j = 0; j < n; ++j) mu.push_back(-static_cast<double>(n - j));
        const CouplingConfig c(mu);
        const double hi = -1.0 + 2.0 / (n - 1);
        const double bb = beta_bar(c);
        const auto scan = find_bifurcations(c, p.spectrum);
        for (const auto& q : scan.points) {
            def_ok = def_ok && q.lambda > -1.0 && q.lambda < hi && !(q.beta > mu.back() && q.beta < bb);
        }
        std::size_t eligible = 0;
        for (const auto& cl : p.spectrum.clusters) eligible += (cl.lambda > -1.0 + 1e-8 && cl.lambda < hi) ? 1 : 0;
        def_ok = def_ok && scan.points.size() == eligible;
    }
    detail += ", defocusing ok=" + std::to_string(def_ok);

    bool mix_ok = true;
    int mixed_roots = 0;
    for (const auto& mu : {std::vector<double>{-1, 1, 2}, std::vector<double>{-2, -1, 3, 4}, std::vector<double>{-3, 0.5, 1, 1.5, 2}}) {
        const CouplingConfig c(mu);
        const auto scan = find_bifurcations(c, p.spectrum);
        const double mu1 = mu.front();
        const double right = mu1 - 1e-9 * std::max(1.0, std::abs(mu1));
        for (std::size_t k = 0; k < p.spectrum.size(); ++k) {
            const double lambda = p.spectrum[k].lambda;
            if (lambda <= -1.0 + 1e-8) continue;
            int changes = 0;
            double prev = f(c, scan.beta_min) - lambda;
            for (int s = 1; s < 10000; ++s) {
                const double b = scan.beta_min + (right - scan.beta_min) * s / 9999.0;
                const double cur = f(c, b) - lambda;
                if ((cur > 0.0) != (prev > 0.0)) ++changes;
                prev = cur;
            }
            const auto hits = std::count_if(scan.points.begin(), scan.points.end(),
                                            [&](const BifurcationPoint& q) { return q.k == static_cast<int>(k + 1); });
            mix_ok = mix_ok && hits == changes;
            mixed_roots += changes;
        }
    }
    detail += ", mixed sign-change oracle ok=" + std::to_string(mix_ok) + " (" + std::to_string(mixed_roots) + " roots)";
    return {ok && def_ok && mix_ok, detail};
}

Outcome reduction_identity() {
    std::mt19937_64 rng(1006);
    double worst_g = 0.0;
    double worst_lift = 0.0;
    const Eigen::VectorXd omega = Eigen::VectorXd::LinSpaced(16, 0.05, 0.95);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 3 + trial % 3;
        const CouplingConfig c(random_mu(rng, n, negatives_for(rng, n, trial % 3)));
        const double hi = std::min(branch_interval(c).front().hi, c.mu().front());
        std::uniform_real_distribution<double> e(-3.0, 3.0);
        const double beta = hi - std::pow(10.0, e(rng));
        std::uniform_int_distribution<unsigned> mask(1, (1u << n) - 1);
        std::vector<int> label(static_cast<std::size_t>(n));
        std::uniform_int_distribution<int> blk(0, n - 1);
        for (auto& l : label) l = blk(rng);
        std::vector<std::vector<int>> blocks(static_cast<std::size_t>(n));
        for (int j = 0; j < n; ++j) blocks[static_cast<std::size_t>(label[static_cast<std::size_t>(j)])].push_back(j);
        blocks.erase(std::remove_if(blocks.begin(), blocks.end(), [](const auto& b) { return b.empty(); }), blocks.end());
        const Partition part(n, blocks);
        const ReducedConfig r = reduce(c, part, beta);
        worst_g = std::max(worst_g, std::abs(g_reduced(r) - g(c, beta)));
        const Eigen::VectorXd a = reduced_synchronized_coefficients(r);
        std::vector<Eigen::VectorXd> v;
        for (Eigen::Index i = 0; i < a.size(); ++i) v.push_back(a[i] * omega);
        const auto u = lift(v, r);
        const BranchPoint bp = branch_point(c, beta);
        for (int j = 0; j < n; ++j) {
            worst_lift = std::max(worst_lift, (u[static_cast<std::size_t>(j)] - bp.alphas[j] * omega).cwiseAbs().maxCoeff());
        }
    }
    return {worst_g <= 1e-12 && worst_lift <= 1e-10,
            "max |g_red - g| = " + fmt("%.3e", worst_g) + ", max lift error = " + fmt("%.3e", worst_lift)};
}

Outcome continuation() {
    const Problem& p = interval_problem();
    const CouplingConfig c({1, 2, 3});
    const auto scan = find_bifurcations(c, p.spectrum);
    const ContinuationEngine engine(p.disc, c, p.state, p.spectrum);
    const Partition part = Partition::parse(3, "1|23");
    ContinuationSettings st;
    st.max_steps = 50;
    const BifurcationPoint& origin = scan.points.front();
    const BranchSegment seg = engine.continue_branch(origin, part, engine.branch_switch(origin, part, st), st);
    int accepted = static_cast<int>(seg.points.size()) - 1;
    double worst = 0.0;
    bool first_positive = seg.points.size() >= 4;
    bool sync = true;
    bool still_positive = true;
    for (std::size_t i = 0; i < seg.points.size(); ++i) {
        const auto& pt = seg.points[i];
        worst = std::max(worst, pt.residual_norm);
        if (i < 4) first_positive = first_positive && pt.positive;
        still_positive = still_positive && pt.positive;
        if (still_positive) sync = sync && detect_synchrony(engine.lift_point(part, pt)) == part;
    }
    return {accepted == 50 && worst <= 1e-9 && first_positive && sync,
            std::to_string(accepted) + " accepted steps, max residual = " + fmt("%.3e", worst) +
                ", first 3 steps positive = " + std::to_string(first_positive) + ", synchrony {1|23} = " +
                std::to_string(sync)};
}

Outcome branch_distinctness() {
    const Problem& p = interval_problem();
    const CouplingConfig c({1, 2, 3});
    const auto scan = find_bifurcations(c, p.spectrum);
    const ContinuationEngine engine(p.disc, c, p.state, p.spectrum);
    ContinuationSettings st;
    st.max_steps = 50;
    const BifurcationPoint& origin = scan.points.front();
    const Partition a = Partition::parse(3, "1|23");
    const Partition b = Partition::parse(3, "2|13");
    const auto sa = engine.continue_branch(origin, a, engine.branch_switch(origin, a, st), st);
    const auto sb = engine.continue_branch(origin, b, engine.branch_switch(origin, b, st), st);
    std::vector<Partition> pa;
    std::vector<Partition> pb;
    for (const auto& pt : sa.points) pa.push_back(detect_synchrony(engine.lift_point(a, pt)));
    for (const auto& pt : sb.points) pb.push_back(detect_synchrony(engine.lift_point(b, pt)));
    bool disjoint = sa.points.size() > 1 && sb.points.size() > 1;
    for (const auto& x : pa) {
        for (const auto& y : pb) disjoint = disjoint && !(x == y);
    }
    return {disjoint, std::to_string(sa.points.size()) + " x " + std::to_string(sb.points.size()) +
                          " point pairs, synchrony partitions always differ = " + std::to_string(disjoint)};
}

Outcome nonexistence_consistency() {
    bool ok = true;
    for (const auto& mu : {std::vector<double>{1, 2, 3}, std::vector<double>{-3, -2, -1}, std::vector<double>{-1, 1, 2}}) {
        ok = ok && consistency_with_branch(CouplingConfig(mu), 0.25, 100);
    }
    const auto v = evaluate(GeneralConfig::symmetric({1, 1, 1}, -0.4, 0.25));
    const double err = v.beta_bar ? std::abs(*v.beta_bar + 0.5) : 1.0;
    const auto ex = exclusion_intervals(CouplingConfig({1, 1, 1}), 0.25);
    double boundary_err = 1.0;
    for (const auto& e : ex) {
        if (e.criterion == Criterion::III) boundary_err = std::abs(e.beta_lo + 0.5);
    }
    return {ok && err <= 1e-10 && boundary_err <= 1e-10,
            "no criterion fires on 3 x 100 samples = " + std::to_string(ok) + ", |beta_bar + 1/2| = " + fmt("%.3e", err)};
}

Outcome asymptotes() {
    double worst = 0.0;
    for (int n = 3; n <= 5; ++n) {
        std::vector<double> foc;
        std::vector<double> def;
        std::vector<double> mix;
        for (int j = 0; j < n; ++j) {
            foc.push_back(1.0 + j);
            def.push_back(-static_cast<double>(n - j));
            mix.push_back(j == 0 ? -1.0 : static_cast<double>(j));
        }
        worst = std::max(worst, std::abs(f(CouplingConfig(foc), -1e6) - (3.0 - n) / (n - 1.0)));
        worst = std::max(worst, std::abs(f(CouplingConfig(def), -1e6) - (-1.0 + 2.0 / (n - 1.0))));
        worst = std::max(worst, std::abs(f(CouplingConfig(mix), -1e6) - (-1.0 + 2.0 / (n - 1.0))));
    }
    return {worst <= 1e-3, "max |f(-1e6) - asymptote| = " + fmt("%.3e", worst)};
}

Outcome gradient_oracle() {
    const Problem& p = interval_problem();
    const CouplingConfig c({1, 2, 3});
    const Eigen::Index m = p.disc.mesh.size();
    std::mt19937_64 rng(1011);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::uniform_real_distribution<double> u11(-1.0, 1.0);
    auto random_vec = [&](std::uniform_real_distribution<double>& d) {
        Eigen::VectorXd v(m);
        for (Eigen::Index i = 0; i < m; ++i) v[i] = d(rng);
        return v;
    };
    std::vector<Eigen::VectorXd> x;
    for (int j = 0; j < 3; ++j) x.push_back(random_vec(u01));
    const double beta = -1.3;
    const auto grad = full_weak_residual(p.disc, c, beta, x);
    double worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<Eigen::VectorXd> d;
        double directional = 0.0;
        for (int j = 0; j < 3; ++j) {
            d.push_back(random_vec(u11));
            directional += grad[static_cast<std::size_t>(j)].dot(d.back());
        }
        auto at = [&](double t) {
            std::vector<Eigen::VectorXd> y = x;
            for (int j = 0; j < 3; ++j) y[static_cast<std::size_t>(j)] += t * d[static_cast<std::size_t>(j)];
            return energy(p.disc, c, beta, y);
        };
        const double h = 1e-5;
        const double fd = (at(h) - at(-h)) / (2.0 * h);
        worst = std::max(worst, std::abs(fd - directional) / std::abs(directional));
    }
    return {worst <= 1e-5, "max relative FD gradient error over 10 directions = " + fmt("%.3e", worst)};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"weighted first eigenvalue", weighted_first_eigenvalue},
        {"linearization eigenstructure", linearization_eigenstructure},
        {"synchronized branch residual", branch_residual},
        {"Morse index jump", morse_jump},
        {"case window laws", case_windows},
        {"reduction identity", reduction_identity},
        {"continuation from first bifurcation point", continuation},
        {"bipartition branch distinctness", branch_distinctness},
        {"nonexistence and branch consistency", nonexistence_consistency},
        {"asymptote reproduction", asymptotes},
        {"energy gradient oracle", gradient_oracle},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.pass) ++failed;
        std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str());
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
