#pragma once

#include "bifkit/bifurcation_detector.hpp"
#include "bifkit/continuation.hpp"
#include "bifkit/domain_mesh.hpp"
#include "bifkit/nonexistence.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace bifkit {

inline constexpr const char* kVersion = "0.1.0";

struct SpectrumOptions {
    int k_max = 20;
    double cluster_tol = 1e-7;
};

struct OutputOptions {
    std::string directory = "out";
    bool csv = true;
    bool json = true;
};

/// Everything a CLI run needs. Populated from `key = value` lines with dotted
/// section names; see `RunConfig::set` for the recognised keys.
struct RunConfig {
    DomainSpec domain = DomainSpec::interval(6.283185307179586);
    int mesh_points = 512;
    std::vector<double> mu{1.0, 2.0, 3.0};
    std::vector<double> a;  // empty: a ≡ -1
    double beta = 0.0;
    std::optional<double> lambda1;  // unset: taken from the mesh
    double ground_state_tol = 1e-10;
    SpectrumOptions spectrum;
    ContinuationSettings continuation;
    std::vector<std::string> partitions;  // empty: every bipartition
    int origin = 1;                       // 1-based index into the bifurcation points
    std::uint64_t seed = 0;
    OutputOptions output;
    /// Keys in the order they were set, for the metadata echo.
    std::vector<std::pair<std::string, std::string>> echo;

    /// Throws InvalidConfig naming `key` for unknown keys or malformed values.
    void set(const std::string& key, const std::string& value);
    /// Cross-field checks; throws InvalidConfig.
    void validate() const;

    std::vector<double> effective_a() const;
};

/// Blank lines and `#` comments are ignored; other lines must read `key = value`.
RunConfig parse_config(std::istream& in, const std::string& source = "<config>");
RunConfig load_config(const std::string& path);

/// Comma-separated reals; throws InvalidConfig naming `key`.
std::vector<double> parse_list(const std::string& key, const std::string& text);

/// One continuation point of a lifted branch.
struct BranchRecord {
    int branch_id = 0;
    std::string partition;
    int step = 0;
    double beta = 0.0;
    std::vector<double> norms;  // L² norm per component
    std::vector<double> mins;   // minimum nodal value per component
    double residual = 0.0;

    bool operator==(const BranchRecord&) const = default;
};

struct DiagramData {
    int n = 0;
    std::vector<BifurcationPoint> points;
    std::vector<BranchRecord> branches;
    std::vector<ExclusionInterval> exclusions;
};

/// Lifts a traced segment to n components and tabulates it.
std::vector<BranchRecord> tabulate_segment(const ContinuationEngine& engine, const Discretization& disc,
                                           const CouplingConfig& config, const BranchSegment& segment,
                                           int branch_id);

std::string branches_csv_header(int n);

std::string points_to_json(const std::vector<BifurcationPoint>& points);
std::string exclusions_to_json(const std::vector<ExclusionInterval>& exclusions);
std::string verdict_to_json(const NonexistenceVerdict& verdict);
std::string branches_to_csv(const std::vector<BranchRecord>& records, int n);
std::string branches_to_json(const std::vector<BranchRecord>& records, int n);

std::vector<BifurcationPoint> points_from_json(const std::string& text);
std::vector<ExclusionInterval> exclusions_from_json(const std::string& text);
std::vector<BranchRecord> branches_from_csv(const std::string& text);
std::vector<BranchRecord> branches_from_json(const std::string& text);

/// Writes points.json, branches.{csv,json} and exclusions.json for the
/// non-empty parts of `data`; returns the paths written. Throws IoError.
std::vector<std::string> export_diagram(const DiagramData& data, const OutputOptions& output);

/// meta.json: version, command, seed, mesh, tolerances and the config echo.
std::string write_meta(const RunConfig& config, const std::string& command, const Mesh& mesh);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

}  // namespace bifkit
