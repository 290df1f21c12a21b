#include "bifkit/io.hpp"

#include "bifkit/error.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <istream>
#include <limits>
#include <map>
#include <sstream>

namespace bifkit {

namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const std::string& expected) {
    throw Error(ErrorCode::InvalidConfig, "key '" + key + "': expected " + expected + ", got '" + value + "'");
}

double to_double(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    double v = 0.0;
    const char* first = t.data();
    const char* last = t.data() + t.size();
    if (!t.empty() && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (t.empty() || ec != std::errc() || ptr != last || std::isnan(v)) bad_value(key, text, "a real number");
    return v;
}

double to_finite(const std::string& key, const std::string& text) {
    const double v = to_double(key, text);
    if (!std::isfinite(v)) bad_value(key, text, "a finite real number");
    return v;
}

long long to_integer(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    long long v = 0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) bad_value(key, text, "an integer");
    return v;
}

int to_int(const std::string& key, const std::string& text, long long lo, long long hi) {
    const long long v = to_integer(key, text);
    if (v < lo || v > hi) {
        bad_value(key, text, "an integer in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
    return static_cast<int>(v);
}

bool to_bool(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    if (t == "true" || t == "1" || t == "yes") return true;
    if (t == "false" || t == "0" || t == "no") return false;
    bad_value(key, text, "true or false");
}

double positive(const std::string& key, const std::string& text) {
    const double v = to_finite(key, text);
    if (!(v > 0.0)) bad_value(key, text, "a positive number");
    return v;
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"domain.kind",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             const std::string t = trim(v);
             if (t == "interval") {
                 c.domain.kind = DomainSpec::Kind::Interval;
                 c.domain.dimension = 1;
             } else if (t == "ball") {
                 c.domain.kind = DomainSpec::Kind::Ball;
             } else {
                 bad_value(k, v, "interval or ball");
             }
         }},
        {"domain.extent", [](RunConfig& c, const std::string& k, const std::string& v) { c.domain.extent = positive(k, v); }},
        {"domain.dimension",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.domain.dimension = to_int(k, v, 1, 3); }},
        {"mesh.points",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.mesh_points = to_int(k, v, 4, 1 << 22); }},
        {"system.mu", [](RunConfig& c, const std::string& k, const std::string& v) { c.mu = parse_list(k, v); }},
        {"system.a", [](RunConfig& c, const std::string& k, const std::string& v) { c.a = parse_list(k, v); }},
        {"system.beta", [](RunConfig& c, const std::string& k, const std::string& v) { c.beta = to_finite(k, v); }},
        {"system.lambda1", [](RunConfig& c, const std::string& k, const std::string& v) { c.lambda1 = positive(k, v); }},
        {"ground_state.tol",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.ground_state_tol = positive(k, v); }},
        {"spectrum.k_max",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.spectrum.k_max = to_int(k, v, 1, 100000); }},
        {"spectrum.cluster_tol",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.spectrum.cluster_tol = positive(k, v); }},
        {"continuation.ds", [](RunConfig& c, const std::string& k, const std::string& v) { c.continuation.ds = positive(k, v); }},
        {"continuation.ds_min",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.continuation.ds_min = positive(k, v); }},
        {"continuation.ds_max",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.continuation.ds_max = positive(k, v); }},
        {"continuation.corrector_tol",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.continuation.corrector_tol = positive(k, v); }},
        {"continuation.max_steps",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             c.continuation.max_steps = to_int(k, v, 0, 1000000);
         }},
        {"continuation.max_corrector_iters",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             c.continuation.max_corrector_iters = to_int(k, v, 1, 1000);
         }},
        {"continuation.kick_amplitude",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.continuation.kick_amplitude = to_finite(k, v); }},
        {"continuation.stop_on_positivity_loss",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             c.continuation.stop_on_positivity_loss = to_bool(k, v);
         }},
        {"continuation.beta_lo",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.continuation.beta_lo = to_double(k, v); }},
        {"continuation.beta_hi",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.continuation.beta_hi = to_double(k, v); }},
        {"continuation.max_norm",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.continuation.max_norm = positive(k, v); }},
        {"continuation.max_folds",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             c.continuation.max_folds = to_int(k, v, -1, 1000000);
         }},
        {"branch.partitions",
         [](RunConfig& c, const std::string&, const std::string& v) {
             c.partitions.clear();
             std::stringstream ss(v);
             std::string item;
             while (std::getline(ss, item, ';')) {
                 if (!trim(item).empty()) c.partitions.push_back(trim(item));
             }
         }},
        {"branch.origin",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.origin = to_int(k, v, 1, 1000000); }},
        {"run.seed",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             const long long s = to_integer(k, v);
             if (s < 0) bad_value(k, v, "a non-negative integer");
             c.seed = static_cast<std::uint64_t>(s);
         }},
        {"output.directory",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             if (trim(v).empty()) bad_value(k, v, "a path");
             c.output.directory = trim(v);
         }},
        {"output.formats",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             bool csv = false;
             bool js = false;
             std::stringstream ss(v);
             std::string item;
             while (std::getline(ss, item, ',')) {
                 const std::string t = trim(item);
                 if (t == "csv") {
                     csv = true;
                 } else if (t == "json") {
                     js = true;
                 } else {
                     bad_value(k, v, "a list drawn from csv, json");
                 }
             }
             if (!csv && !js) bad_value(k, v, "at least one of csv, json");
             c.output.csv = csv;
             c.output.json = js;
         }},
    };
    return table;
}

json opt_int(const std::optional<int>& v) { return v ? json(*v) : json(nullptr); }

std::optional<int> int_or_null(const json& j) {
    if (j.is_null()) return std::nullopt;
    return j.get<int>();
}

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_csv_double(const std::string& cell) {
    return to_double("csv", cell);
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(item);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

json branch_to_json(const BranchRecord& r, int n) {
    json j;
    j["branch_id"] = r.branch_id;
    j["partition"] = r.partition;
    j["step"] = r.step;
    j["beta"] = r.beta;
    for (int k = 0; k < n; ++k) j["norm_" + std::to_string(k + 1)] = r.norms[static_cast<std::size_t>(k)];
    for (int k = 0; k < n; ++k) j["min_" + std::to_string(k + 1)] = r.mins[static_cast<std::size_t>(k)];
    j["residual"] = r.residual;
    return j;
}

json parse_json(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::IoError, std::string("malformed JSON: ") + e.what());
    }
}

}  // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
    const auto& table = setters();
    const auto it = table.find(key);
    if (it == table.end()) throw Error(ErrorCode::InvalidConfig, "unknown key '" + key + "'");
    it->second(*this, key, value);
    echo.emplace_back(key, trim(value));
}

void RunConfig::validate() const {
    if (mu.size() < 3) throw Error(ErrorCode::InvalidConfig, "key 'system.mu': need at least three couplings");
    if (!std::is_sorted(mu.begin(), mu.end())) {
        throw Error(ErrorCode::InvalidConfig, "key 'system.mu': couplings must be sorted ascending");
    }
    for (double m : mu) {
        if (!std::isfinite(m)) throw Error(ErrorCode::InvalidConfig, "key 'system.mu': couplings must be finite");
    }
    if (!a.empty() && a.size() != mu.size()) {
        throw Error(ErrorCode::InvalidConfig, "key 'system.a': length differs from system.mu");
    }
    if (domain.kind == DomainSpec::Kind::Interval && domain.dimension != 1) {
        throw Error(ErrorCode::InvalidConfig, "key 'domain.dimension': an interval is one-dimensional");
    }
    try {
        continuation.validate();
    } catch (const Error& e) {
        throw Error(ErrorCode::InvalidConfig, std::string("continuation.*: ") + e.what());
    }
    for (const auto& p : partitions) {
        try {
            const Partition part = Partition::parse(static_cast<int>(mu.size()), p);
            if (part.size() != 2) throw Error(ErrorCode::InvalidConfig, "not a bipartition");
        } catch (const Error& e) {
            throw Error(ErrorCode::InvalidConfig, "key 'branch.partitions': '" + p + "': " + e.what());
        } catch (const std::exception&) {
            throw Error(ErrorCode::InvalidConfig, "key 'branch.partitions': cannot parse '" + p + "'");
        }
    }
}

std::vector<double> RunConfig::effective_a() const {
    return a.empty() ? std::vector<double>(mu.size(), -1.0) : a;
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
    std::vector<double> out;
    for (const auto& item : split(text, ',')) out.push_back(to_finite(key, item));
    if (out.empty()) bad_value(key, text, "a comma-separated list");
    return out;
}

RunConfig parse_config(std::istream& in, const std::string& source) {
    RunConfig c;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw Error(ErrorCode::InvalidConfig,
                        source + ":" + std::to_string(lineno) + ": expected 'key = value', got '" + line + "'");
        }
        const std::string key = trim(line.substr(0, eq));
        try {
            c.set(key, line.substr(eq + 1));
        } catch (const Error& e) {
            throw Error(ErrorCode::InvalidConfig, source + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::InvalidConfig, "cannot open config '" + path + "'");
    return parse_config(in, path);
}

std::vector<BranchRecord> tabulate_segment(const ContinuationEngine& engine, const Discretization& disc,
                                           const CouplingConfig& config, const BranchSegment& segment,
                                           int branch_id) {
    std::vector<BranchRecord> out;
    out.reserve(segment.points.size());
    const std::string label = segment.partition.to_string();
    for (std::size_t s = 0; s < segment.points.size(); ++s) {
        const ContinuationPoint& p = segment.points[s];
        const auto u = engine.lift_point(segment.partition, p);
        BranchRecord r;
        r.branch_id = branch_id;
        r.partition = label;
        r.step = static_cast<int>(s);
        r.beta = p.beta;
        for (const auto& uj : u) {
            r.norms.push_back(disc.mesh.l2_norm(uj));
            r.mins.push_back(uj.minCoeff());
        }
        r.residual = full_residual_norm(disc, config, p.beta, u);
        out.push_back(std::move(r));
    }
    return out;
}

std::string branches_csv_header(int n) {
    std::string h = "branch_id,partition,step,beta";
    for (int k = 1; k <= n; ++k) h += ",norm_" + std::to_string(k);
    for (int k = 1; k <= n; ++k) h += ",min_" + std::to_string(k);
    return h + ",residual";
}

std::string points_to_json(const std::vector<BifurcationPoint>& points) {
    json arr = json::array();
    for (const auto& p : points) {
        arr.push_back({{"beta_k", p.beta},
                       {"lambda_k", p.lambda},
                       {"k", p.k},
                       {"n_k", p.multiplicity},
                       {"kernel_dim", p.kernel_dim},
                       {"f_prime", p.f_prime},
                       {"degenerate", p.degenerate},
                       {"global_full", p.global_full},
                       {"morse_left", opt_int(p.morse_left)},
                       {"morse_right", opt_int(p.morse_right)}});
    }
    return arr.dump(2);
}

std::vector<BifurcationPoint> points_from_json(const std::string& text) {
    const json arr = parse_json(text);
    std::vector<BifurcationPoint> out;
    try {
        for (const auto& j : arr) {
            BifurcationPoint p;
            p.beta = j.at("beta_k").get<double>();
            p.lambda = j.at("lambda_k").get<double>();
            p.k = j.at("k").get<int>();
            p.multiplicity = j.at("n_k").get<int>();
            p.kernel_dim = j.at("kernel_dim").get<int>();
            p.f_prime = j.at("f_prime").get<double>();
            p.degenerate = j.at("degenerate").get<bool>();
            p.global_full = j.at("global_full").get<bool>();
            p.morse_left = int_or_null(j.at("morse_left"));
            p.morse_right = int_or_null(j.at("morse_right"));
            out.push_back(p);
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::IoError, std::string("bad points record: ") + e.what());
    }
    return out;
}

std::string exclusions_to_json(const std::vector<ExclusionInterval>& exclusions) {
    json arr = json::array();
    for (const auto& e : exclusions) {
        // JSON has no infinity; an unbounded end is written as null.
        arr.push_back({{"criterion", to_string(e.criterion)},
                       {"beta_lo", std::isfinite(e.beta_lo) ? json(e.beta_lo) : json(nullptr)},
                       {"beta_hi", std::isfinite(e.beta_hi) ? json(e.beta_hi) : json(nullptr)}});
    }
    return arr.dump(2);
}

std::vector<ExclusionInterval> exclusions_from_json(const std::string& text) {
    const json arr = parse_json(text);
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<ExclusionInterval> out;
    try {
        for (const auto& j : arr) {
            const std::string c = j.at("criterion").get<std::string>();
            Criterion crit;
            if (c == "i") {
                crit = Criterion::I;
            } else if (c == "ii") {
                crit = Criterion::II;
            } else if (c == "iii") {
                crit = Criterion::III;
            } else if (c == "iv") {
                crit = Criterion::IV;
            } else {
                throw Error(ErrorCode::IoError, "unknown criterion '" + c + "'");
            }
            const json& lo = j.at("beta_lo");
            const json& hi = j.at("beta_hi");
            out.push_back({crit, lo.is_null() ? -inf : lo.get<double>(), hi.is_null() ? inf : hi.get<double>()});
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::IoError, std::string("bad exclusion record: ") + e.what());
    }
    return out;
}

std::string verdict_to_json(const NonexistenceVerdict& verdict) {
    json j;
    json fired = json::array();
    for (const auto& f : verdict.fired) {
        json w;
        w["criterion"] = to_string(f.criterion);
        w["i"] = f.i ? json(*f.i + 1) : json(nullptr);
        w["j"] = f.j ? json(*f.j + 1) : json(nullptr);
        w["boundary_marginal"] = f.boundary_marginal;
        if (!f.note.empty()) w["note"] = f.note;
        fired.push_back(w);
    }
    j["fired"] = fired;
    j["positive_solutions_excluded"] = verdict.any();
    j["beta_bar"] = verdict.beta_bar ? json(*verdict.beta_bar) : json(nullptr);
    return j.dump(2);
}

std::string branches_to_csv(const std::vector<BranchRecord>& records, int n) {
    std::string out = branches_csv_header(n) + "\n";
    for (const auto& r : records) {
        out += std::to_string(r.branch_id) + "," + r.partition + "," + std::to_string(r.step) + "," + fmt17(r.beta);
        for (double v : r.norms) out += "," + fmt17(v);
        for (double v : r.mins) out += "," + fmt17(v);
        out += "," + fmt17(r.residual) + "\n";
    }
    return out;
}

std::vector<BranchRecord> branches_from_csv(const std::string& text) {
    std::stringstream ss(text);
    std::string line;
    if (!std::getline(ss, line)) throw Error(ErrorCode::IoError, "empty branches file");
    const auto header = split(trim(line), ',');
    const int cols = static_cast<int>(header.size());
    if (cols < 7 || (cols - 5) % 2 != 0) throw Error(ErrorCode::IoError, "malformed branches header");
    const int n = (cols - 5) / 2;
    if (trim(line) != branches_csv_header(n)) throw Error(ErrorCode::IoError, "unexpected branches header");
    std::vector<BranchRecord> out;
    while (std::getline(ss, line)) {
        line = trim(line);
        if (line.empty()) continue;
        const auto cells = split(line, ',');
        if (static_cast<int>(cells.size()) != cols) throw Error(ErrorCode::IoError, "wrong column count: " + line);
        try {
            BranchRecord r;
            r.branch_id = static_cast<int>(to_integer("branch_id", cells[0]));
            r.partition = cells[1];
            r.step = static_cast<int>(to_integer("step", cells[2]));
            r.beta = parse_csv_double(cells[3]);
            for (int k = 0; k < n; ++k) r.norms.push_back(parse_csv_double(cells[static_cast<std::size_t>(4 + k)]));
            for (int k = 0; k < n; ++k) r.mins.push_back(parse_csv_double(cells[static_cast<std::size_t>(4 + n + k)]));
            r.residual = parse_csv_double(cells.back());
            out.push_back(std::move(r));
        } catch (const Error& e) {
            throw Error(ErrorCode::IoError, std::string("bad branches row: ") + e.what());
        }
    }
    return out;
}

std::string branches_to_json(const std::vector<BranchRecord>& records, int n) {
    json arr = json::array();
    for (const auto& r : records) arr.push_back(branch_to_json(r, n));
    return arr.dump(2);
}

std::vector<BranchRecord> branches_from_json(const std::string& text) {
    const json arr = parse_json(text);
    std::vector<BranchRecord> out;
    try {
        for (const auto& j : arr) {
            BranchRecord r;
            r.branch_id = j.at("branch_id").get<int>();
            r.partition = j.at("partition").get<std::string>();
            r.step = j.at("step").get<int>();
            r.beta = j.at("beta").get<double>();
            for (int k = 1; j.contains("norm_" + std::to_string(k)); ++k) {
                r.norms.push_back(j.at("norm_" + std::to_string(k)).get<double>());
                r.mins.push_back(j.at("min_" + std::to_string(k)).get<double>());
            }
            r.residual = j.at("residual").get<double>();
            out.push_back(std::move(r));
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::IoError, std::string("bad branch record: ") + e.what());
    }
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot read '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path + "'");
    out << contents;
    if (!contents.empty() && contents.back() != '\n') out << '\n';
    if (!out) throw Error(ErrorCode::IoError, "write failed for '" + path + "'");
}

std::vector<std::string> export_diagram(const DiagramData& data, const OutputOptions& output) {
    if (data.points.empty() && data.branches.empty() && data.exclusions.empty()) {
        throw Error(ErrorCode::IoError, "nothing to export");
    }
    std::error_code ec;
    std::filesystem::create_directories(output.directory, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create '" + output.directory + "': " + ec.message());
    const std::filesystem::path dir(output.directory);
    std::vector<std::string> written;
    auto emit = [&](const std::string& name, const std::string& body) {
        const std::string path = (dir / name).string();
        write_file(path, body);
        written.push_back(path);
    };
    if (!data.points.empty()) emit("points.json", points_to_json(data.points));
    if (!data.branches.empty()) {
        if (output.csv) emit("branches.csv", branches_to_csv(data.branches, data.n));
        if (output.json) emit("branches.json", branches_to_json(data.branches, data.n));
    }
    if (!data.exclusions.empty()) emit("exclusions.json", exclusions_to_json(data.exclusions));
    return written;
}

std::string write_meta(const RunConfig& config, const std::string& command, const Mesh& mesh) {
    json j;
    j["tool"] = "bifkit";
    j["version"] = kVersion;
    j["command"] = command;
    j["seed"] = config.seed;
    j["mesh"] = {{"domain", mesh.domain().describe()},
                 {"points", mesh.size()},
                 {"spacing", mesh.spacing()}};
    j["tolerances"] = {{"ground_state", config.ground_state_tol},
                       {"cluster", config.spectrum.cluster_tol},
                       {"corrector", config.continuation.corrector_tol}};
    json echo = json::object();
    for (const auto& [k, v] : config.echo) echo[k] = v;
    j["config"] = echo;
    j["effective"] = {{"mu", config.mu},
                      {"a", config.effective_a()},
                      {"beta", config.beta},
                      {"k_max", config.spectrum.k_max},
                      {"origin", config.origin},
                      {"partitions", config.partitions}};

    std::error_code ec;
    std::filesystem::create_directories(config.output.directory, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create '" + config.output.directory + "': " + ec.message());
    const std::string path = (std::filesystem::path(config.output.directory) / "meta.json").string();
    write_file(path, j.dump(2));
    return path;
}

}  // namespace bifkit
