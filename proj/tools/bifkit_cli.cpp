#include "bifkit/continuation.hpp"
#include "bifkit/error.hpp"
#include "bifkit/io.hpp"
#include "bifkit/nonexistence.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace bifkit;

constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;

struct Options {
    std::string config_path;
    std::optional<std::string> out;
    std::optional<std::string> format;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> sets;
    // Shorthands for single config keys.
    std::optional<std::string> mu, a, beta, lambda1, k_max, mesh, length, partition, origin, steps;
};

bool is_config_error(ErrorCode c) {
    switch (c) {
        case ErrorCode::InvalidConfig:
        case ErrorCode::InvalidDomain:
        case ErrorCode::InvalidMesh:
        case ErrorCode::DegenerateCoupling:
        case ErrorCode::NotApplicable:
        case ErrorCode::OutsideBranchInterval:
        case ErrorCode::InvalidBeta:
        case ErrorCode::PoleAtMu:
        case ErrorCode::PoleAtBetaBar:
            return true;
        default:
            return false;
    }
}

RunConfig build_config(const Options& o) {
    RunConfig c = o.config_path.empty() ? RunConfig{} : load_config(o.config_path);
    auto apply = [&c](const std::optional<std::string>& v, const char* key) {
        if (v) c.set(key, *v);
    };
    apply(o.mu, "system.mu");
    apply(o.a, "system.a");
    apply(o.beta, "system.beta");
    apply(o.lambda1, "system.lambda1");
    apply(o.k_max, "spectrum.k_max");
    apply(o.mesh, "mesh.points");
    apply(o.length, "domain.extent");
    apply(o.partition, "branch.partitions");
    apply(o.origin, "branch.origin");
    apply(o.steps, "continuation.max_steps");
    apply(o.out, "output.directory");
    apply(o.format, "output.formats");
    if (o.seed) c.set("run.seed", std::to_string(*o.seed));
    for (const auto& kv : o.sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw Error(ErrorCode::InvalidConfig, "--set expects key=value, got '" + kv + "'");
        c.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    c.validate();
    return c;
}

std::string g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct Pipeline {
    RunConfig cfg;
    Discretization disc;
    GroundState state;
    WeightedSpectrum spectrum;

    explicit Pipeline(RunConfig c)
        : cfg(std::move(c)), disc(make_discretization(cfg.domain, cfg.mesh_points)) {}

    void solve() { state = solve_omega(disc, cfg.ground_state_tol); }
    void spectral() {
        solve();
        spectrum = compute_spectrum(disc, state, cfg.spectrum.k_max, cfg.spectrum.cluster_tol);
    }
};

std::vector<Partition> partitions_for(const RunConfig& cfg) {
    const int n = static_cast<int>(cfg.mu.size());
    if (cfg.partitions.empty()) return enumerate_bipartitions(n);
    std::vector<Partition> out;
    for (const auto& p : cfg.partitions) out.push_back(Partition::parse(n, p));
    return out;
}

std::vector<ExclusionInterval> exclusions_for(const RunConfig& cfg, double lambda1) {
    if (!(lambda1 < 1.0)) return {};
    return exclusion_intervals(CouplingConfig(cfg.mu), lambda1);
}

int run_ground_state(const RunConfig& cfg) {
    Pipeline p(cfg);
    p.solve();
    const bool json = cfg.output.json && !cfg.output.csv;
    if (json) {
        std::cout << "{\"lambda1\": " << g17(p.state.lambda1) << ", \"residual\": " << g17(p.state.residual_norm)
                  << ", \"nondegeneracy_margin\": " << g17(p.state.nondegeneracy_margin)
                  << ", \"newton_iterations\": " << p.state.newton_iterations
                  << ", \"omega_max\": " << g17(p.state.omega.maxCoeff()) << "}\n";
    } else {
        std::cout << "lambda1 = " << g17(p.state.lambda1) << "\n"
                  << "residual = " << g17(p.state.residual_norm) << "\n"
                  << "nondegeneracy_margin = " << g17(p.state.nondegeneracy_margin) << "\n"
                  << "newton_iterations = " << p.state.newton_iterations << "\n"
                  << "omega_max = " << g17(p.state.omega.maxCoeff()) << "\n";
    }
    std::string table = "x,omega\n";
    for (Eigen::Index i = 0; i < p.disc.mesh.size(); ++i) {
        table += g17(p.disc.mesh.nodes()[i]) + "," + g17(p.state.omega[i]) + "\n";
    }
    std::filesystem::create_directories(cfg.output.directory);
    write_file((std::filesystem::path(cfg.output.directory) / "ground_state.csv").string(), table);
    write_meta(cfg, "ground-state", p.disc.mesh);
    return 0;
}

int run_spectrum(const RunConfig& cfg) {
    Pipeline p(cfg);
    p.spectral();
    const auto& cl = p.spectrum.clusters;
    if (cl.empty()) throw Error(ErrorCode::SolverFailure, "no eigenvalues computed");
    std::cout << "lambda_1 = " << g17(cl.front().lambda) << "\n";
    std::string table = "k,lambda,multiplicity\n";
    for (std::size_t k = 0; k < cl.size(); ++k) {
        std::cout << k + 1 << " " << g17(cl[k].lambda) << " " << cl[k].multiplicity << "\n";
        table += std::to_string(k + 1) + "," + g17(cl[k].lambda) + "," + std::to_string(cl[k].multiplicity) + "\n";
    }
    std::cout << "complete_below = " << g17(p.spectrum.complete_below) << "\n";
    std::filesystem::create_directories(cfg.output.directory);
    write_file((std::filesystem::path(cfg.output.directory) / "spectrum.csv").string(), table);
    write_meta(cfg, "spectrum", p.disc.mesh);
    return 0;
}

int run_branch(const RunConfig& cfg) {
    Pipeline p(cfg);
    p.solve();
    const CouplingConfig cc(cfg.mu);
    const BranchPoint bp = branch_point(cc, cfg.beta);
    std::vector<Eigen::VectorXd> u;
    for (Eigen::Index j = 0; j < bp.alphas.size(); ++j) u.push_back(bp.alphas[j] * p.state.omega);
    std::cout << "beta = " << g17(bp.beta) << "\n"
              << "g = " << g17(bp.g_value) << "\n"
              << "f = " << g17(bp.f_value) << "\n";
    for (Eigen::Index j = 0; j < bp.alphas.size(); ++j) {
        std::cout << "alpha_" << j + 1 << " = " << g17(bp.alphas[j]) << "\n";
    }
    std::cout << "identity_residual = " << g17(branch_identity_residual(cc, bp).cwiseAbs().maxCoeff()) << "\n"
              << "discrete_residual = " << g17(full_residual_norm(p.disc, cc, bp.beta, u)) << "\n";
    write_meta(cfg, "branch", p.disc.mesh);
    return 0;
}

BifurcationScan scan_for(const Pipeline& p) { return find_bifurcations(CouplingConfig(p.cfg.mu), p.spectrum); }

int run_bifurcations(const RunConfig& cfg) {
    Pipeline p(cfg);
    p.spectral();
    const BifurcationScan scan = scan_for(p);
    std::cout << points_to_json(scan.points) << "\n";
    DiagramData d;
    d.n = static_cast<int>(cfg.mu.size());
    d.points = scan.points;
    d.exclusions = exclusions_for(cfg, p.state.lambda1);
    if (!d.points.empty() || !d.exclusions.empty()) export_diagram(d, cfg.output);
    write_meta(cfg, "bifurcations", p.disc.mesh);
    return 0;
}

// Traces every configured partition from each origin; returns tabulated rows.
std::vector<BranchRecord> trace(const Pipeline& p, const std::vector<BifurcationPoint>& origins) {
    const CouplingConfig cc(p.cfg.mu);
    const ContinuationEngine engine(p.disc, cc, p.state, p.spectrum);
    std::vector<BranchRecord> rows;
    int id = 0;
    for (const auto& origin : origins) {
        for (const auto& part : partitions_for(p.cfg)) {
            ++id;
            const Predictor pred = engine.branch_switch(origin, part, p.cfg.continuation);
            const BranchSegment seg = engine.continue_branch(origin, part, pred, p.cfg.continuation);
            std::cout << "branch " << id << " k=" << origin.k << " beta_k=" << g17(origin.beta)
                      << " partition=" << part.to_string() << " points=" << seg.points.size()
                      << " folds=" << seg.fold_count << " termination=" << to_string(seg.termination) << "\n";
            auto t = tabulate_segment(engine, p.disc, cc, seg, id);
            rows.insert(rows.end(), t.begin(), t.end());
        }
    }
    return rows;
}

int run_continue(const RunConfig& cfg) {
    Pipeline p(cfg);
    p.spectral();
    const BifurcationScan scan = scan_for(p);
    if (cfg.origin > static_cast<int>(scan.points.size())) {
        throw Error(ErrorCode::InvalidConfig, "key 'branch.origin': only " + std::to_string(scan.points.size()) +
                                                  " bifurcation points were found");
    }
    const BifurcationPoint origin = scan.points[static_cast<std::size_t>(cfg.origin - 1)];
    DiagramData d;
    d.n = static_cast<int>(cfg.mu.size());
    d.points = {origin};
    d.branches = trace(p, {origin});
    export_diagram(d, cfg.output);
    write_meta(cfg, "continue", p.disc.mesh);
    return 0;
}

int run_diagram(const RunConfig& cfg) {
    Pipeline p(cfg);
    p.spectral();
    const BifurcationScan scan = scan_for(p);
    std::vector<BifurcationPoint> origins;
    for (const auto& pt : scan.points) {
        if (!pt.degenerate && pt.multiplicity == 1) origins.push_back(pt);
    }
    DiagramData d;
    d.n = static_cast<int>(cfg.mu.size());
    d.points = scan.points;
    d.exclusions = exclusions_for(cfg, p.state.lambda1);
    d.branches = trace(p, origins);
    if (!d.points.empty() || !d.branches.empty() || !d.exclusions.empty()) {
        for (const auto& path : export_diagram(d, cfg.output)) std::cout << "wrote " << path << "\n";
    }
    write_meta(cfg, "diagram", p.disc.mesh);
    return 0;
}

int run_nonexistence(const RunConfig& cfg) {
    const Mesh mesh = build_mesh(cfg.domain, cfg.mesh_points);
    double lambda1 = 0.0;
    if (cfg.lambda1) {
        lambda1 = *cfg.lambda1;
    } else {
        const Discretization disc = make_discretization(cfg.domain, cfg.mesh_points);
        lambda1 = principal_eigenpair(disc.stiffness, disc.mass).lambda1;
    }
    GeneralConfig g;
    g.a = cfg.effective_a();
    g.mu = cfg.mu;
    g.beta = cfg.beta;
    g.lambda1 = lambda1;
    const NonexistenceVerdict v = evaluate(g);
    std::cout << verdict_to_json(v) << "\n";
    std::filesystem::create_directories(cfg.output.directory);
    write_file((std::filesystem::path(cfg.output.directory) / "verdict.json").string(), verdict_to_json(v));
    write_meta(cfg, "nonexistence", mesh);
    return 0;
}

// `--mu -1,1,2` would otherwise be read as a short flag; glue values that
// start with '-' to their option.
std::vector<std::string> normalize_args(int argc, char** argv) {
    static const std::vector<std::string> valued = {"--mu", "--a", "--beta", "--lambda1", "--length"};
    std::vector<std::string> out;
    for (int i = 1; i < argc; ++i) {
        std::string arg = argv[i];
        if (i + 1 < argc && std::find(valued.begin(), valued.end(), arg) != valued.end() && argv[i + 1][0] == '-') {
            arg += "=";
            arg += argv[++i];
        }
        out.push_back(arg);
    }
    std::reverse(out.begin(), out.end());  // CLI11 consumes from the back
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bifurcation analysis of synchronized solutions of coupled cubic Schrodinger systems", "bifkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", bifkit::kVersion);

    Options o;
    const std::vector<std::pair<std::string, std::string>> commands = {
        {"ground-state", "Solve for the scalar ground state"},
        {"spectrum", "Weighted eigenvalues of the linearized scalar problem"},
        {"branch", "Synchronized solution at system.beta"},
        {"bifurcations", "Locate bifurcation points on the synchronized branch"},
        {"continue", "Trace bipartition branches from one bifurcation point"},
        {"nonexistence", "Evaluate the nonexistence criteria"},
        {"diagram", "Points, branches and exclusion intervals in one run"},
    };
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", o.config_path, "Configuration file (key = value)")->check(CLI::ExistingFile);
        sub->add_option("--out", o.out, "Output directory");
        sub->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--seed", o.seed, "Seed recorded in the metadata");
        sub->add_option("--set", o.sets, "Override a config key: key=value");
        sub->add_option("--mu", o.mu, "Self-couplings, comma-separated and sorted");
        sub->add_option("--a", o.a, "Linear coefficients a_j (nonexistence)");
        sub->add_option("--beta", o.beta, "Coupling beta");
        sub->add_option("--lambda1", o.lambda1, "Principal Dirichlet eigenvalue (nonexistence)");
        sub->add_option("--k-max", o.k_max, "Number of weighted eigenvalues");
        sub->add_option("--mesh", o.mesh, "Interior mesh points");
        sub->add_option("--length", o.length, "Domain extent");
        sub->add_option("--partition", o.partition, "Bipartitions, e.g. '1|23;2|13'");
        sub->add_option("--origin", o.origin, "1-based bifurcation point to continue from");
        sub->add_option("--steps", o.steps, "Continuation steps");
    }

    try {
        app.parse(normalize_args(argc, argv));
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    const std::string cmd = app.get_subcommands().front()->get_name();
    try {
        const RunConfig cfg = build_config(o);
        if (cmd == "ground-state") return run_ground_state(cfg);
        if (cmd == "spectrum") return run_spectrum(cfg);
        if (cmd == "branch") return run_branch(cfg);
        if (cmd == "bifurcations") return run_bifurcations(cfg);
        if (cmd == "continue") return run_continue(cfg);
        if (cmd == "nonexistence") return run_nonexistence(cfg);
        if (cmd == "diagram") return run_diagram(cfg);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return is_config_error(e.code()) ? kExitConfig : kExitSolver;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSolver;
    }
    return kExitConfig;
}
