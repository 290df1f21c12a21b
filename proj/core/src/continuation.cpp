#include "bifkit/continuation.hpp"

#include "bifkit/error.hpp"

#include <Eigen/SparseLU>

#include <cmath>

namespace bifkit {

void ContinuationSettings::validate() const {
    if (!(ds_min > 0.0 && ds_min <= ds && ds <= ds_max)) {
        throw Error(ErrorCode::InvalidConfig, "continuation steps must satisfy 0 < ds_min <= ds <= ds_max");
    }
    if (!(corrector_tol > 0.0)) throw Error(ErrorCode::InvalidConfig, "corrector_tol must be positive");
    if (max_steps < 0 || max_corrector_iters < 1) {
        throw Error(ErrorCode::InvalidConfig, "step limits must be positive");
    }
    if (!(beta_lo < beta_hi)) throw Error(ErrorCode::InvalidConfig, "empty beta window");
}

const char* to_string(Termination t) {
    switch (t) {
        case Termination::MaxSteps: return "MaxSteps";
        case Termination::PositivityLost: return "PositivityLost";
        case Termination::LeftWindow: return "LeftWindow";
        case Termination::Fold: return "Fold";
        case Termination::CorrectorFailure: return "CorrectorFailure";
    }
    return "Unknown";
}

namespace {

void require_bipartition(const Partition& partition) {
    if (partition.size() != 2) throw Error(ErrorCode::InvalidConfig, "continuation needs a bipartition");
}

// Weak residual of the reduced system, stacked [F_A; F_B].
Eigen::VectorXd weak_reduced(const Discretization& disc, const ReducedConfig& red, const Eigen::VectorXd& va,
                             const Eigen::VectorXd& vb) {
    const Eigen::VectorXd& w = disc.mesh.weights();
    const Eigen::Index m = va.size();
    const double beta = red.beta;
    const Eigen::ArrayXd a = va.array();
    const Eigen::ArrayXd b = vb.array();
    Eigen::VectorXd out(2 * m);
    out.head(m) = disc.stiffness.apply(va) -
                  (w.array() * (a + red.mu_eff[0] * a.cube() + beta * b.square() * a)).matrix();
    out.tail(m) = disc.stiffness.apply(vb) -
                  (w.array() * (b + red.mu_eff[1] * b.cube() + beta * a.square() * b)).matrix();
    return out;
}

double strong_max(const Discretization& disc, const Eigen::VectorXd& weak) {
    const Eigen::Index m = disc.mesh.size();
    double r = 0.0;
    for (Eigen::Index i = 0; i < weak.size(); ++i) r = std::max(r, std::abs(weak[i] / disc.mesh.weights()[i % m]));
    return r;
}

void append_block_jacobian(std::vector<Eigen::Triplet<double>>& t, const Discretization& disc,
                           const ReducedConfig& red, const Eigen::VectorXd& va, const Eigen::VectorXd& vb) {
    const Eigen::Index m = va.size();
    const Eigen::VectorXd& w = disc.mesh.weights();
    const SymTridiag& k = disc.stiffness.matrix;
    const double beta = red.beta;
    for (int blk = 0; blk < 2; ++blk) {
        const Eigen::VectorXd& self = blk == 0 ? va : vb;
        const Eigen::VectorXd& other = blk == 0 ? vb : va;
        const Eigen::Index o = blk * m;
        for (Eigen::Index i = 0; i < m; ++i) {
            const double d = k.diag[i] -
                             w[i] * (1.0 + 3.0 * red.mu_eff[blk] * self[i] * self[i] + beta * other[i] * other[i]);
            t.emplace_back(o + i, o + i, d);
            if (i + 1 < m) {
                t.emplace_back(o + i, o + i + 1, k.off[i]);
                t.emplace_back(o + i + 1, o + i, k.off[i]);
            }
        }
    }
    for (Eigen::Index i = 0; i < m; ++i) {
        const double c = -w[i] * 2.0 * beta * va[i] * vb[i];
        t.emplace_back(i, m + i, c);
        t.emplace_back(m + i, i, c);
    }
}

// Reduced problem on (v_A, v_B, β) stacked as one vector of length 2m+1.
class AugmentedSystem {
public:
    AugmentedSystem(const Discretization& disc, const CouplingConfig& config, const Partition& partition)
        : disc_(disc), config_(config), partition_(partition), m_(disc.mesh.size()) {}

    Eigen::Index m() const { return m_; }

    // Throws InvalidBeta when β leaves the reduction domain.
    Eigen::VectorXd residual(const Eigen::VectorXd& x) const {
        const ReducedConfig red = reduce(config_, partition_, x[2 * m_]);
        return weak_reduced(disc_, red, x.head(m_), x.segment(m_, m_));
    }

    double strong_norm(const Eigen::VectorXd& weak) const { return strong_max(disc_, weak); }

    // Central difference in β; μ_eff(β) enters only through the reduction.
    Eigen::VectorXd d_beta(const Eigen::VectorXd& x) const {
        const double beta = x[2 * m_];
        const double delta = 1e-6 * std::max(1.0, std::abs(beta));
        Eigen::VectorXd xp = x;
        Eigen::VectorXd xm = x;
        xp[2 * m_] += delta;
        xm[2 * m_] -= delta;
        return (residual(xp) - residual(xm)) / (2.0 * delta);
    }

    // [F_v F_β; row] as a sparse matrix.
    Eigen::SparseMatrix<double> bordered(const Eigen::VectorXd& x, const Eigen::VectorXd& row) const {
        const ReducedConfig red = reduce(config_, partition_, x[2 * m_]);
        std::vector<Eigen::Triplet<double>> t;
        t.reserve(static_cast<std::size_t>(12 * m_ + 2));
        append_block_jacobian(t, disc_, red, x.head(m_), x.segment(m_, m_));
        const Eigen::VectorXd fb = d_beta(x);
        const Eigen::Index n = 2 * m_;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (fb[i] != 0.0) t.emplace_back(i, n, fb[i]);
        }
        for (Eigen::Index j = 0; j <= n; ++j) {
            if (row[j] != 0.0) t.emplace_back(n, j, row[j]);
        }
        Eigen::SparseMatrix<double> a(n + 1, n + 1);
        a.setFromTriplets(t.begin(), t.end());
        return a;
    }

    // Inner product diag(M, M, 1).
    double dot(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const {
        const Eigen::VectorXd& w = disc_.mesh.weights();
        return w.dot(x.head(m_).cwiseProduct(y.head(m_))) + w.dot(x.segment(m_, m_).cwiseProduct(y.segment(m_, m_))) +
               x[2 * m_] * y[2 * m_];
    }
    Eigen::VectorXd metric_row(const Eigen::VectorXd& tau) const {
        const Eigen::VectorXd& w = disc_.mesh.weights();
        Eigen::VectorXd r(2 * m_ + 1);
        r.head(m_) = w.cwiseProduct(tau.head(m_));
        r.segment(m_, m_) = w.cwiseProduct(tau.segment(m_, m_));
        r[2 * m_] = tau[2 * m_];
        return r;
    }

private:
    const Discretization& disc_;
    const CouplingConfig& config_;
    const Partition& partition_;
    Eigen::Index m_;
};

std::optional<Eigen::VectorXd> sparse_solve(const Eigen::SparseMatrix<double>& a, const Eigen::VectorXd& rhs) {
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    lu.analyzePattern(a);
    lu.factorize(a);
    if (lu.info() != Eigen::Success) return std::nullopt;
    Eigen::VectorXd x = lu.solve(rhs);
    if (lu.info() != Eigen::Success || !x.allFinite()) return std::nullopt;
    return x;
}

struct NewtonOutcome {
    bool converged = false;
    bool left_domain = false;
    int iterations = 0;
    double residual = 0.0;
    Eigen::VectorXd x;
};

// Newton on {F(x) = 0, rowᵀx = target}; at least one step is always taken.
NewtonOutcome newton(const AugmentedSystem& sys, Eigen::VectorXd x, const Eigen::VectorXd& row, double target,
                     double tol, int max_iters) {
    NewtonOutcome out;
    const Eigen::Index n = 2 * sys.m();
    double first = -1.0;
    try {
        for (int it = 0; it <= max_iters; ++it) {
            const Eigen::VectorXd f = sys.residual(x);
            const double norm = sys.strong_norm(f);
            if (!std::isfinite(norm)) break;
            if (first < 0.0) first = norm;
            out.residual = norm;
            if (it > 0 && norm <= tol) {
                out.converged = true;
                break;
            }
            if (it == max_iters || norm > 1e8 * std::max(first, tol)) break;
            Eigen::VectorXd rhs(n + 1);
            rhs.head(n) = -f;
            rhs[n] = target - row.dot(x);
            auto step = sparse_solve(sys.bordered(x, row), rhs);
            if (!step) break;
            x += *step;
            out.iterations = it + 1;
        }
    } catch (const Error& e) {
        if (e.code() != ErrorCode::InvalidBeta) throw;
        out.left_domain = true;
    }
    out.x = std::move(x);
    return out;
}

// Null direction of F_x completed by the normalization rowᵀτ = sign.
std::optional<Eigen::VectorXd> tangent(const AugmentedSystem& sys, const Eigen::VectorXd& x, const Eigen::VectorXd& row,
                                       double sign) {
    const Eigen::Index n = 2 * sys.m();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 1);
    rhs[n] = sign;
    auto tau = sparse_solve(sys.bordered(x, row), rhs);
    if (!tau) return std::nullopt;
    *tau /= std::sqrt(sys.dot(*tau, *tau));
    return tau;
}

ContinuationPoint make_point(const AugmentedSystem& sys, const Eigen::VectorXd& x, double residual, int iterations,
                             double arclength) {
    const Eigen::Index m = sys.m();
    ContinuationPoint p;
    p.beta = x[2 * m];
    p.v_a = x.head(m);
    p.v_b = x.segment(m, m);
    p.residual_norm = residual;
    p.min_values = {p.v_a.minCoeff(), p.v_b.minCoeff()};
    p.positive = p.min_values[0] > 0.0 && p.min_values[1] > 0.0;
    p.corrector_iterations = iterations;
    p.arclength = arclength;
    return p;
}

}  // namespace

std::array<Eigen::VectorXd, 2> discrete_residual(const Discretization& disc, const CouplingConfig& config,
                                                 const Partition& partition, double beta, const Eigen::VectorXd& v_a,
                                                 const Eigen::VectorXd& v_b) {
    require_bipartition(partition);
    const ReducedConfig red = reduce(config, partition, beta);
    const Eigen::VectorXd weak = weak_reduced(disc, red, v_a, v_b);
    const Eigen::Index m = v_a.size();
    const Eigen::VectorXd& w = disc.mesh.weights();
    return {weak.head(m).cwiseQuotient(w), weak.tail(m).cwiseQuotient(w)};
}

Eigen::SparseMatrix<double> reduced_jacobian(const Discretization& disc, const CouplingConfig& config,
                                             const Partition& partition, double beta, const Eigen::VectorXd& v_a,
                                             const Eigen::VectorXd& v_b) {
    require_bipartition(partition);
    const ReducedConfig red = reduce(config, partition, beta);
    std::vector<Eigen::Triplet<double>> t;
    append_block_jacobian(t, disc, red, v_a, v_b);
    const Eigen::Index n = 2 * v_a.size();
    Eigen::SparseMatrix<double> j(n, n);
    j.setFromTriplets(t.begin(), t.end());
    return j;
}

double energy(const Discretization& disc, const CouplingConfig& config, double beta,
              const std::vector<Eigen::VectorXd>& u) {
    const Eigen::VectorXd& w = disc.mesh.weights();
    const int n = config.n();
    double quadratic = 0.0;
    double quartic = 0.0;
    double coupling = 0.0;
    for (int k = 0; k < n; ++k) {
        const Eigen::VectorXd& uk = u[static_cast<std::size_t>(k)];
        quadratic += uk.dot(disc.stiffness.apply(uk)) - uk.dot(w.cwiseProduct(uk));
        quartic += config.mu(k) * w.dot(uk.array().pow(4).matrix());
        for (int i = 0; i < k; ++i) {
            coupling += w.dot((u[static_cast<std::size_t>(i)].array().square() * uk.array().square()).matrix());
        }
    }
    return 0.5 * quadratic - 0.25 * quartic - 0.5 * beta * coupling;
}

std::vector<Eigen::VectorXd> full_weak_residual(const Discretization& disc, const CouplingConfig& config, double beta,
                                                const std::vector<Eigen::VectorXd>& u) {
    const Eigen::VectorXd& w = disc.mesh.weights();
    const int n = config.n();
    Eigen::ArrayXd total = Eigen::ArrayXd::Zero(w.size());
    for (const auto& uk : u) total += uk.array().square();
    std::vector<Eigen::VectorXd> r;
    r.reserve(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        const Eigen::ArrayXd uj = u[static_cast<std::size_t>(j)].array();
        const Eigen::ArrayXd others = total - uj.square();
        r.push_back(disc.stiffness.apply(uj.matrix()) -
                    (w.array() * (uj + config.mu(j) * uj.cube() + beta * others * uj)).matrix());
    }
    return r;
}

double full_residual_norm(const Discretization& disc, const CouplingConfig& config, double beta,
                          const std::vector<Eigen::VectorXd>& u) {
    double r = 0.0;
    for (const auto& weak : full_weak_residual(disc, config, beta, u)) {
        r = std::max(r, weak.cwiseQuotient(disc.mesh.weights()).cwiseAbs().maxCoeff());
    }
    return r;
}

ContinuationEngine::ContinuationEngine(const Discretization& disc, const CouplingConfig& config,
                                       const GroundState& state, const WeightedSpectrum& spectrum)
    : disc_(disc), config_(config), state_(state), spectrum_(spectrum) {}

Predictor ContinuationEngine::branch_switch(const BifurcationPoint& origin, const Partition& partition,
                                            const ContinuationSettings& settings) const {
    require_bipartition(partition);
    if (origin.degenerate) throw Error(ErrorCode::DegenerateOrigin, "f'(beta_k) vanishes at the origin");
    if (origin.multiplicity != 1) {
        throw Error(ErrorCode::MultiplicityUnsupported, "branch switching needs a simple eigenvalue");
    }
    if (origin.k < 1 || origin.k > static_cast<int>(spectrum_.size())) {
        throw Error(ErrorCode::InvalidConfig, "origin refers to an eigenvalue outside the spectrum");
    }
    const ReducedConfig red = reduce(config_, partition, origin.beta);
    const Eigen::VectorXd a = reduced_synchronized_coefficients(red);
    const Eigen::Vector2d dir = Eigen::Vector2d(a[1], -a[0]).normalized();
    const Eigen::VectorXd& psi = spectrum_[static_cast<std::size_t>(origin.k - 1)].basis.front();
    const double s = settings.kick_amplitude.value_or(1e-3 * state_.omega.cwiseAbs().maxCoeff());

    Predictor p;
    p.beta = origin.beta;
    p.kernel_a = dir[0] * psi;
    p.kernel_b = dir[1] * psi;
    p.v_a = a[0] * state_.omega + s * p.kernel_a;
    p.v_b = a[1] * state_.omega + s * p.kernel_b;
    p.amplitude = s;
    return p;
}

std::vector<Eigen::VectorXd> ContinuationEngine::lift_point(const Partition& partition,
                                                            const ContinuationPoint& point) const {
    const ReducedConfig red = reduce(config_, partition, point.beta);
    return lift({point.v_a, point.v_b}, red);
}

BranchSegment ContinuationEngine::continue_branch(const BifurcationPoint& origin, const Partition& partition,
                                                  const Predictor& predictor,
                                                  const ContinuationSettings& settings) const {
    settings.validate();
    require_bipartition(partition);
    const AugmentedSystem sys(disc_, config_, partition);
    const Eigen::Index m = sys.m();
    const Eigen::Index n = 2 * m;

    BranchSegment seg;
    seg.origin = origin;
    seg.partition = partition;

    // Corrector at fixed ω²-weighted projection onto the kernel direction. The
    // synchronized branch has zero projection for every β (ψ_k ⟂ ω in that
    // inner product), so the constraint excludes it.
    const Eigen::VectorXd weight = disc_.mesh.weights().cwiseProduct(state_.omega.cwiseAbs2());
    Eigen::VectorXd kick_row = Eigen::VectorXd::Zero(n + 1);
    kick_row.head(m) = weight.cwiseProduct(predictor.kernel_a);
    kick_row.segment(m, m) = weight.cwiseProduct(predictor.kernel_b);

    Eigen::VectorXd x(n + 1);
    x << predictor.v_a, predictor.v_b, predictor.beta;
    const double target = kick_row.dot(x);

    NewtonOutcome first = newton(sys, x, kick_row, target, settings.corrector_tol, settings.max_corrector_iters);
    if (!first.converged) {
        seg.termination = first.left_domain ? Termination::LeftWindow : Termination::CorrectorFailure;
        return seg;
    }
    x = first.x;
    seg.points.push_back(make_point(sys, x, first.residual, first.iterations, 0.0));

    const double sign = predictor.amplitude >= 0.0 ? 1.0 : -1.0;
    auto tau0 = tangent(sys, x, kick_row, sign);
    if (!tau0) {
        seg.termination = Termination::CorrectorFailure;
        return seg;
    }
    Eigen::VectorXd tau = *tau0;

    double ds = settings.ds;
    double arclength = 0.0;
    bool previous_positive = seg.points.back().positive;
    if (!previous_positive && settings.stop_on_positivity_loss) {
        seg.termination = Termination::PositivityLost;
        return seg;
    }

    int accepted = 0;
    while (true) {
        if (accepted >= settings.max_steps) {
            seg.termination = Termination::MaxSteps;
            break;
        }
        const Eigen::VectorXd x_pred = x + ds * tau;
        const Eigen::VectorXd row = sys.metric_row(tau);
        NewtonOutcome step = newton(sys, x_pred, row, row.dot(x_pred), settings.corrector_tol,
                                    settings.max_corrector_iters);
        if (step.left_domain) {
            seg.termination = Termination::LeftWindow;
            break;
        }
        double distance = 0.0;
        if (step.converged) {
            const Eigen::VectorXd dx = step.x - x;
            distance = std::sqrt(sys.dot(dx, dx));
        }
        if (!step.converged || distance > settings.ds_max * (1.0 + 1e-12)) {
            ds = step.converged ? std::min(0.5 * ds, 0.9 * ds * settings.ds_max / distance) : 0.5 * ds;
            if (ds < settings.ds_min) {
                seg.termination = Termination::CorrectorFailure;
                break;
            }
            continue;
        }

        const double beta_new = step.x[n];
        if (beta_new < settings.beta_lo || beta_new > settings.beta_hi ||
            step.x.head(n).cwiseAbs().maxCoeff() > settings.max_norm) {
            seg.termination = Termination::LeftWindow;
            break;
        }

        auto tau_new = tangent(sys, step.x, row, 1.0);
        if (!tau_new) {
            seg.termination = Termination::CorrectorFailure;
            break;
        }
        if (tau[n] * (*tau_new)[n] < 0.0) ++seg.fold_count;

        x = step.x;
        tau = *tau_new;
        arclength += distance;
        ++accepted;
        seg.points.push_back(make_point(sys, x, step.residual, step.iterations, arclength));

        const bool positive = seg.points.back().positive;
        if (previous_positive && !positive && settings.stop_on_positivity_loss) {
            seg.termination = Termination::PositivityLost;
            break;
        }
        previous_positive = positive;
        if (settings.max_folds >= 0 && seg.fold_count > settings.max_folds) {
            seg.termination = Termination::Fold;
            break;
        }

        if (step.iterations <= 3) {
            ds = std::min(2.0 * ds, settings.ds_max);
        } else if (step.iterations >= 7) {
            ds = std::max(0.5 * ds, settings.ds_min);
        }
    }
    return seg;
}

}  // namespace bifkit
