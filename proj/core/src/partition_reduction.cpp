#include "bifkit/partition_reduction.hpp"

#include "bifkit/error.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

namespace bifkit {

Partition::Partition(int n, std::vector<std::vector<int>> blocks) : n_(n), blocks_(std::move(blocks)) {
    std::vector<int> seen(static_cast<std::size_t>(std::max(n, 0)), 0);
    for (auto& b : blocks_) {
        if (b.empty()) throw Error(ErrorCode::InvalidConfig, "partition block is empty");
        std::sort(b.begin(), b.end());
        for (int j : b) {
            if (j < 0 || j >= n) throw Error(ErrorCode::InvalidConfig, "partition element out of range");
            if (seen[static_cast<std::size_t>(j)]++) {
                throw Error(ErrorCode::InvalidConfig, "partition blocks overlap");
            }
        }
    }
    if (std::any_of(seen.begin(), seen.end(), [](int c) { return c == 0; })) {
        throw Error(ErrorCode::InvalidConfig, "partition does not cover every component");
    }
    std::sort(blocks_.begin(), blocks_.end(), [](const auto& a, const auto& b) { return a.front() < b.front(); });
}

Partition Partition::parse(int n, const std::string& text) {
    std::vector<std::vector<int>> blocks(1);
    const bool separated = text.find_first_of(",.") != std::string::npos;
    std::string number;
    auto flush = [&]() {
        if (!number.empty()) {
            blocks.back().push_back(std::stoi(number) - 1);
            number.clear();
        }
    };
    for (char ch : text) {
        if (std::isdigit(static_cast<unsigned char>(ch))) {
            if (separated) {
                number.push_back(ch);
            } else {
                blocks.back().push_back(ch - '1');
            }
        } else if (ch == ',' || ch == '.') {
            flush();
        } else if (ch == '|') {
            flush();
            blocks.emplace_back();
        } else if (!std::isspace(static_cast<unsigned char>(ch))) {
            throw Error(ErrorCode::InvalidConfig, "unexpected character in partition '" + text + "'");
        }
    }
    flush();
    return Partition(n, std::move(blocks));
}

Partition Partition::bipartition(int n, const std::vector<int>& a) {
    std::vector<int> rest;
    for (int j = 0; j < n; ++j) {
        if (std::find(a.begin(), a.end(), j) == a.end()) rest.push_back(j);
    }
    return Partition(n, {a, rest});
}

int Partition::block_of(int component) const {
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
        if (std::binary_search(blocks_[i].begin(), blocks_[i].end(), component)) return static_cast<int>(i);
    }
    throw Error(ErrorCode::InvalidConfig, "component not in partition");
}

std::string Partition::to_string() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
        if (i) os << '|';
        for (std::size_t k = 0; k < blocks_[i].size(); ++k) {
            if (k && n_ >= 10) os << '.';
            os << blocks_[i][k] + 1;
        }
    }
    return os.str();
}

ReducedConfig reduce(const CouplingConfig& config, const Partition& partition, double beta) {
    if (partition.n() != config.n()) throw Error(ErrorCode::InvalidConfig, "partition size mismatch");
    if (!(beta < config.mu().front())) {
        throw Error(ErrorCode::InvalidBeta, "reduction needs beta < mu_1");
    }
    ReducedConfig r;
    r.beta = beta;
    r.partition = partition;
    const int m = partition.size();
    r.h.resize(m);
    r.mu_eff.resize(m);
    r.t.resize(config.n());
    for (int i = 0; i < m; ++i) {
        double s = 0.0;
        for (int k : partition.block(i)) s += 1.0 / (config.mu(k) - beta);
        r.h[i] = 1.0 / s;
        r.mu_eff[i] = beta + r.h[i];
        for (int j : partition.block(i)) r.t[j] = std::sqrt(r.h[i] / (config.mu(j) - beta));
    }
    return r;
}

double g_reduced(const ReducedConfig& reduced) {
    // h_i is mu_eff_i - beta before rounding; Neumaier summation.
    double s = 1.0;
    double c = 0.0;
    for (Eigen::Index i = 0; i < reduced.h.size(); ++i) {
        const double x = reduced.beta / reduced.h[i];
        const double t = s + x;
        c += std::abs(s) >= std::abs(x) ? (s - t) + x : (x - t) + s;
        s = t;
    }
    return s + c;
}

Eigen::VectorXd reduced_synchronized_coefficients(const ReducedConfig& reduced) {
    const double gv = g_reduced(reduced);
    Eigen::VectorXd a(reduced.mu_eff.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        const double q = -reduced.h[i] * gv;
        if (!(q > 0.0)) throw Error(ErrorCode::OutsideBranchInterval, "no synchronized point at this beta");
        a[i] = 1.0 / std::sqrt(q);
    }
    return a;
}

std::vector<Eigen::VectorXd> lift(const std::vector<Eigen::VectorXd>& reduced_solution, const ReducedConfig& reduced) {
    const Partition& p = reduced.partition;
    if (static_cast<int>(reduced_solution.size()) != p.size()) {
        throw Error(ErrorCode::InvalidConfig, "reduced solution has the wrong number of components");
    }
    std::vector<Eigen::VectorXd> u(static_cast<std::size_t>(p.n()));
    for (int i = 0; i < p.size(); ++i) {
        for (int j : p.block(i)) u[static_cast<std::size_t>(j)] = reduced.t[j] * reduced_solution[static_cast<std::size_t>(i)];
    }
    return u;
}

std::vector<Partition> enumerate_bipartitions(int n) {
    if (n < 2) throw Error(ErrorCode::InvalidConfig, "bipartitions need n >= 2");
    std::vector<Partition> out;
    const unsigned full = (1u << n) - 1u;
    for (unsigned mask = 1; mask < full; mask += 2) {  // odd masks contain component 0
        std::vector<int> a;
        for (int j = 0; j < n; ++j) {
            if (mask & (1u << j)) a.push_back(j);
        }
        out.push_back(Partition::bipartition(n, a));
    }
    return out;
}

namespace {

bool proportional(const Eigen::VectorXd& x, const Eigen::VectorXd& ref, double tol) {
    const double xmax = x.cwiseAbs().maxCoeff();
    const double rmax = ref.cwiseAbs().maxCoeff();
    if (xmax == 0.0 || rmax == 0.0) return xmax == 0.0 && rmax == 0.0;
    const double cutoff = 1e-8 * rmax;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (std::abs(ref[i]) > cutoff) {
            const double r = x[i] / ref[i];
            lo = std::min(lo, r);
            hi = std::max(hi, r);
        }
    }
    const double mid = 0.5 * (lo + hi);
    return mid != 0.0 && (hi - lo) <= 2.0 * tol * std::abs(mid);
}

}  // namespace

Partition detect_synchrony(const std::vector<Eigen::VectorXd>& u, double tol) {
    const int n = static_cast<int>(u.size());
    std::vector<std::vector<int>> blocks;
    for (int j = 0; j < n; ++j) {
        bool placed = false;
        for (auto& b : blocks) {
            if (proportional(u[static_cast<std::size_t>(j)], u[static_cast<std::size_t>(b.front())], tol)) {
                b.push_back(j);
                placed = true;
                break;
            }
        }
        if (!placed) blocks.push_back({j});
    }
    return Partition(n, std::move(blocks));
}

}  // namespace bifkit
