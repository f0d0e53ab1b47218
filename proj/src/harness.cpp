#include "nsbidico/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

namespace nsbidico::harness {

namespace fs = std::filesystem;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const std::set<std::string> kTopLevelKeys{"output_dir", "runs",     "base_seed",
                                          "workers",    "reference_cache", "defaults",
                                          "problems",   "cells",    "comparisons"};
const std::set<std::string> kRunKeys{"population_size", "budget",       "F",
                                     "CR",              "p_m",          "eta_m",
                                     "epsilon",         "force_inherit", "archive_normalization",
                                     "archive_after_selection"};

// ---------------------------------------------------------------------------
// Scalars

std::string number(double v) {
    if (std::isnan(v)) return ".nan";
    if (std::isinf(v)) return v > 0 ? ".inf" : "-.inf";
    return fmt::format("{:.17g}", v);
}

std::string flow(const Vector& values) {
    std::string out = "[";
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ", ";
        out += number(values[i]);
    }
    return out + "]";
}

std::string boolean(bool v) { return v ? "true" : "false"; }

std::string normalization_name(ArchiveNormalization mode) {
    return mode == ArchiveNormalization::Reversed ? "reversed" : "standard";
}

double to_double(const YAML::Node& node) {
    const auto text = node.Scalar();
    if (text == ".nan" || text == ".NaN" || text == ".NAN") return kNaN;
    if (text == ".inf" || text == ".Inf" || text == "+.inf") return std::numeric_limits<double>::infinity();
    if (text == "-.inf" || text == "-.Inf") return -std::numeric_limits<double>::infinity();
    return node.as<double>();
}

Vector to_vector(const YAML::Node& node) {
    Vector out;
    for (const auto& item : node) out.push_back(to_double(item));
    return out;
}

PointSet to_points(const YAML::Node& node) {
    PointSet out;
    for (const auto& item : node) out.push_back(to_vector(item));
    return out;
}

// ---------------------------------------------------------------------------
// Config parsing

class Parser {
public:
    explicit Parser(std::string origin) : origin_(std::move(origin)) {}

    [[noreturn]] void fail(const YAML::Node& node, const std::string& message) const {
        const auto mark = node.Mark();
        if (mark.line >= 0)
            throw ConfigError(fmt::format("{}:{}: {}", origin_, mark.line + 1, message));
        throw ConfigError(fmt::format("{}: {}", origin_, message));
    }

    template <typename T>
    T scalar(const YAML::Node& node, const std::string& key) const {
        if (!node.IsScalar()) fail(node, fmt::format("'{}' must be a scalar", key));
        try {
            return node.as<T>();
        } catch (const YAML::Exception&) {
            fail(node, fmt::format("'{}' has an invalid value '{}'", key, node.Scalar()));
        }
    }

    std::size_t count(const YAML::Node& node, const std::string& key) const {
        const auto v = scalar<long long>(node, key);
        if (v < 0) fail(node, fmt::format("'{}' must be non-negative", key));
        return static_cast<std::size_t>(v);
    }

    double unit(const YAML::Node& node, const std::string& key) const {
        const auto v = scalar<double>(node, key);
        if (!(v >= 0.0 && v <= 1.0)) fail(node, fmt::format("'{}' = {} is outside [0, 1]", key, v));
        return v;
    }

    RunOverrides overrides(const YAML::Node& node, const std::set<std::string>& extra = {}) const {
        RunOverrides out;
        if (!node || node.IsNull()) return out;
        if (!node.IsMap()) fail(node, "parameter section must be a mapping");
        std::set<std::string> seen;
        for (const auto& kv : node) {
            const auto key = kv.first.as<std::string>();
            const auto& value = kv.second;
            if (!seen.insert(key).second) fail(kv.first, fmt::format("duplicate key '{}'", key));
            if (extra.count(key)) continue;
            if (!kRunKeys.count(key)) fail(kv.first, fmt::format("unknown key '{}'", key));
            if (key == "population_size") {
                out.population_size = count(value, key);
                if (*out.population_size < 4) fail(value, "'population_size' must be >= 4");
            } else if (key == "budget") {
                out.budget = count(value, key);
            } else if (key == "F") {
                out.F = unit(value, key);
            } else if (key == "CR") {
                out.CR = unit(value, key);
            } else if (key == "p_m") {
                out.p_m = unit(value, key);
            } else if (key == "eta_m") {
                out.eta_m = scalar<double>(value, key);
                if (!(*out.eta_m >= 0.0)) fail(value, "'eta_m' must be >= 0");
            } else if (key == "epsilon") {
                out.epsilon = scalar<double>(value, key);
                if (!(*out.epsilon >= 0.0)) fail(value, "'epsilon' must be >= 0");
            } else if (key == "force_inherit") {
                out.force_inherit = scalar<bool>(value, key);
            } else if (key == "archive_normalization") {
                const auto mode = scalar<std::string>(value, key);
                if (mode == "reversed") out.archive_normalization = ArchiveNormalization::Reversed;
                else if (mode == "standard") out.archive_normalization = ArchiveNormalization::Standard;
                else fail(value, "'archive_normalization' must be 'reversed' or 'standard'");
            } else if (key == "archive_after_selection") {
                out.archive_after_selection = scalar<bool>(value, key);
            }
        }
        return out;
    }

private:
    std::string origin_;
};

bool valid_cell_name(const std::string& name) {
    return !name.empty() && std::all_of(name.begin(), name.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
    }) && name != "." && name != "..";
}

fs::path default_output_dir(const std::string& origin) {
    const char* root = std::getenv(kOutputRootEnv);
    const fs::path base = root && *root ? fs::path(root) : fs::path("results");
    return base / fs::path(origin).stem();
}

// ---------------------------------------------------------------------------
// Statistics

std::string summary_block(const std::string& key, const SampleSummary& s) {
    return fmt::format("{}:\n  mean: {}\n  std: {}\n  values: {}\n", key, number(s.mean),
                       number(s.std), flow(s.values));
}

SampleSummary parse_summary(const YAML::Node& node) {
    SampleSummary s{to_double(node["mean"]), to_double(node["std"]), to_vector(node["values"])};
    return s;
}

std::string run_file_stem(std::size_t run_index) { return fmt::format("run_{:03d}", run_index); }

}  // namespace

// ---------------------------------------------------------------------------

void RunOverrides::apply_to(RunConfig& config) const {
    if (population_size) config.population_size = *population_size;
    if (budget) config.budget = *budget;
    if (F) config.F = *F;
    if (CR) config.CR = *CR;
    if (p_m) config.p_m = *p_m;
    if (eta_m) config.eta_m = *eta_m;
    if (epsilon) config.epsilon = *epsilon;
    if (force_inherit) config.force_inherit = *force_inherit;
    if (archive_normalization) config.archive_normalization = *archive_normalization;
    if (archive_after_selection) config.archive_after_selection = *archive_after_selection;
}

RunConfig ExperimentConfig::resolve(const CellEntry& cell, const ProblemEntry& problem) const {
    RunConfig config;
    config.problem = problem.name;
    config.seed = base_seed;
    defaults.apply_to(config);
    problem.overrides.apply_to(config);
    cell.overrides.apply_to(config);
    return config;
}

ExperimentConfig parse_config(const fs::path& path, const ProblemRegistry& registry) {
    std::ifstream in(path);
    if (!in) throw ConfigError(fmt::format("cannot open config '{}'", path.string()));
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str(), path.string(), registry);
}

ExperimentConfig parse_config_text(const std::string& text, const std::string& origin,
                                   const ProblemRegistry& registry) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ConfigError(fmt::format("{}:{}: malformed file: {}", origin, e.mark.line + 1, e.msg));
    }
    Parser parser(origin);
    if (!root.IsMap()) parser.fail(root, "top level must be a mapping");

    ExperimentConfig config;
    std::set<std::string> seen;
    for (const auto& kv : root) {
        const auto key = kv.first.as<std::string>();
        if (!seen.insert(key).second) parser.fail(kv.first, fmt::format("duplicate key '{}'", key));
        if (!kTopLevelKeys.count(key)) parser.fail(kv.first, fmt::format("unknown key '{}'", key));
    }

    if (root["output_dir"]) config.output_dir = parser.scalar<std::string>(root["output_dir"], "output_dir");
    else config.output_dir = default_output_dir(origin);
    if (root["runs"]) {
        config.runs = parser.count(root["runs"], "runs");
        if (config.runs < 1) parser.fail(root["runs"], "'runs' must be >= 1");
    }
    if (root["base_seed"]) config.base_seed = parser.scalar<std::uint64_t>(root["base_seed"], "base_seed");
    if (root["workers"]) {
        config.workers = parser.count(root["workers"], "workers");
        if (config.workers < 1) parser.fail(root["workers"], "'workers' must be >= 1");
    }
    if (root["reference_cache"])
        config.reference_cache = parser.scalar<std::string>(root["reference_cache"], "reference_cache");
    config.defaults = parser.overrides(root["defaults"]);

    const auto problems = root["problems"];
    if (!problems || !problems.IsSequence() || problems.size() == 0)
        parser.fail(problems ? problems : root, "'problems' must be a non-empty list");
    std::set<std::string> problem_names;
    for (const auto& item : problems) {
        ProblemEntry entry;
        if (item.IsScalar()) {
            entry.name = item.as<std::string>();
        } else if (item.IsMap() && item["name"]) {
            entry.name = parser.scalar<std::string>(item["name"], "name");
            entry.overrides = parser.overrides(item, {"name"});
        } else {
            parser.fail(item, "problem entries must be a name or a mapping with 'name'");
        }
        if (!registry.contains(entry.name))
            parser.fail(item, fmt::format("unknown problem '{}'", entry.name));
        if (!problem_names.insert(entry.name).second)
            parser.fail(item, fmt::format("duplicate problem entry '{}'", entry.name));
        config.problems.push_back(std::move(entry));
    }

    if (const auto cells = root["cells"]; cells && !cells.IsNull()) {
        if (!cells.IsMap() || cells.size() == 0) parser.fail(cells, "'cells' must be a non-empty mapping");
        std::set<std::string> cell_names;
        for (const auto& kv : cells) {
            CellEntry cell;
            cell.name = kv.first.as<std::string>();
            if (!valid_cell_name(cell.name))
                parser.fail(kv.first, fmt::format("invalid cell name '{}'", cell.name));
            if (!cell_names.insert(cell.name).second)
                parser.fail(kv.first, fmt::format("duplicate cell '{}'", cell.name));
            cell.overrides = parser.overrides(kv.second);
            config.cells.push_back(std::move(cell));
        }
    } else {
        config.cells.push_back(CellEntry{"default", {}});
    }

    if (const auto comparisons = root["comparisons"]; comparisons && !comparisons.IsNull()) {
        if (!comparisons.IsSequence()) parser.fail(comparisons, "'comparisons' must be a list");
        for (const auto& item : comparisons) {
            if (!item.IsMap() || !item["a"] || !item["b"])
                parser.fail(item, "comparison entries need 'a' and 'b'");
            for (const auto& kv : item) {
                const auto key = kv.first.as<std::string>();
                if (key != "a" && key != "b" && key != "metric")
                    parser.fail(kv.first, fmt::format("unknown key '{}'", key));
            }
            ComparisonSpec spec{parser.scalar<std::string>(item["a"], "a"),
                                parser.scalar<std::string>(item["b"], "b"), "igd"};
            if (item["metric"]) spec.metric = parser.scalar<std::string>(item["metric"], "metric");
            if (spec.metric != "igd" && spec.metric != "hv")
                parser.fail(item, fmt::format("metric must be 'igd' or 'hv', got '{}'", spec.metric));
            for (const auto& name : {spec.cell_a, spec.cell_b}) {
                const bool known = std::any_of(config.cells.begin(), config.cells.end(),
                                               [&](const CellEntry& c) { return c.name == name; });
                if (!known) parser.fail(item, fmt::format("comparison names unknown cell '{}'", name));
            }
            config.comparisons.push_back(std::move(spec));
        }
    }

    // Cross-field checks on every resolved combination.
    for (const auto& cell : config.cells) {
        for (const auto& problem : config.problems) {
            const auto resolved = config.resolve(cell, problem);
            try {
                resolved.validate();
            } catch (const ContractViolation& e) {
                throw ConfigError(fmt::format("{}: cell '{}', problem '{}': {}", origin, cell.name,
                                              problem.name, e.what()));
            }
        }
    }
    return config;
}

std::string canonical_run_config(const RunConfig& config, std::size_t n) {
    const double p_m = config.p_m.value_or(1.0 / static_cast<double>(n));
    return fmt::format(
        "problem: {}\npopulation_size: {}\nbudget: {}\nF: {}\nCR: {}\np_m: {}\neta_m: {}\n"
        "epsilon: {}\nforce_inherit: {}\narchive_normalization: {}\narchive_after_selection: {}\n",
        config.problem, config.population_size, config.budget, number(config.F), number(config.CR),
        number(p_m), number(config.eta_m), number(config.epsilon), boolean(config.force_inherit),
        normalization_name(config.archive_normalization), boolean(config.archive_after_selection));
}

std::string render_resolved_config(const ExperimentConfig& config, const ProblemRegistry& registry) {
    std::string out;
    out += fmt::format("output_dir: {}\nruns: {}\nbase_seed: {}\nworkers: {}\n",
                       config.output_dir.string(), config.runs, config.base_seed, config.workers);
    if (config.reference_cache) out += fmt::format("reference_cache: {}\n", config.reference_cache->string());
    out += "resolved:\n";
    for (const auto& cell : config.cells) {
        for (const auto& problem : config.problems) {
            const auto rc = config.resolve(cell, problem);
            const auto canonical = canonical_run_config(rc, registry.get(problem.name).n);
            out += fmt::format("  - cell: {}\n    digest: {}\n", cell.name, digest(canonical));
            std::istringstream lines(canonical);
            std::string line;
            while (std::getline(lines, line)) out += "    " + line + "\n";
        }
    }
    out += config.comparisons.empty() ? "comparisons: []\n" : "comparisons:\n";
    for (const auto& c : config.comparisons)
        out += fmt::format("  - {{a: {}, b: {}, metric: {}}}\n", c.cell_a, c.cell_b, c.metric);
    return out;
}

// ---------------------------------------------------------------------------
// Records

std::string render_record(const RunRecord& r) {
    std::string out = fmt::format(
        "problem: {}\ncell: {}\nconfig_digest: {}\nrun_index: {}\nseed: {}\nn: {}\nm: {}\n"
        "fe_used: {}\ngenerations: {}\nwall_time_seconds: {}\nigd: {}\nhv: {}\n"
        "hv_available: {}\nfeasible_ratio: {}\nn_feasible: {}\nn_nondominated: {}\n",
        r.problem, r.cell, r.config_digest, r.run_index, r.seed, r.n, r.m, r.fe_used, r.generations,
        number(r.wall_time_seconds), number(r.igd), number(r.hv), boolean(r.hv_available),
        number(r.feasible_ratio), r.n_feasible, r.n_nondominated);
    const auto points = [&](const std::string& key, const PointSet& set) {
        if (set.empty()) {
            out += key + ": []\n";
            return;
        }
        out += key + ":\n";
        for (const auto& pt : set) out += "  - " + flow(pt) + "\n";
    };
    points("front", r.front);
    points("decision_vectors", r.decision_vectors);
    return out;
}

RunRecord parse_record(const std::string& text) {
    const auto node = YAML::Load(text);
    RunRecord r;
    r.problem = node["problem"].as<std::string>();
    r.cell = node["cell"].as<std::string>();
    r.config_digest = node["config_digest"].as<std::string>();
    r.run_index = node["run_index"].as<std::size_t>();
    r.seed = node["seed"].as<std::uint64_t>();
    r.n = node["n"].as<std::size_t>();
    r.m = node["m"].as<std::size_t>();
    r.fe_used = node["fe_used"].as<std::size_t>();
    r.generations = node["generations"].as<std::size_t>();
    r.wall_time_seconds = to_double(node["wall_time_seconds"]);
    r.igd = to_double(node["igd"]);
    r.hv = to_double(node["hv"]);
    r.hv_available = node["hv_available"].as<bool>();
    r.feasible_ratio = to_double(node["feasible_ratio"]);
    r.n_feasible = node["n_feasible"].as<std::size_t>();
    r.n_nondominated = node["n_nondominated"].as<std::size_t>();
    r.front = to_points(node["front"]);
    r.decision_vectors = to_points(node["decision_vectors"]);
    return r;
}

RunRecord read_record(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(fmt::format("cannot read record '{}'", path.string()));
    std::stringstream buffer;
    buffer << in.rdbuf();
    try {
        return parse_record(buffer.str());
    } catch (const YAML::Exception& e) {
        throw std::runtime_error(fmt::format("malformed record '{}': {}", path.string(), e.what()));
    }
}

SampleSummary summarize(std::vector<double> values) {
    std::vector<double> finite;
    for (double v : values)
        if (!std::isnan(v)) finite.push_back(v);
    SampleSummary s{kNaN, kNaN, std::move(values)};
    if (finite.empty()) return s;
    double sum = 0.0;
    for (double v : finite) sum += v;
    s.mean = sum / static_cast<double>(finite.size());
    double squares = 0.0;
    for (double v : finite) squares += (v - s.mean) * (v - s.mean);
    s.std = finite.size() > 1 ? std::sqrt(squares / static_cast<double>(finite.size() - 1)) : 0.0;
    return s;
}

std::string render_aggregate(const CellAggregate& a) {
    std::string failed = "[";
    for (std::size_t i = 0; i < a.failed_runs.size(); ++i)
        failed += (i ? ", " : "") + std::to_string(a.failed_runs[i]);
    failed += "]";
    std::string out = fmt::format(
        "problem: {}\ncell: {}\nn: {}\nm: {}\nruns_expected: {}\nruns_completed: {}\n"
        "failed_runs: {}\ncomplete: {}\nhv_available: {}\n",
        a.problem, a.cell, a.n, a.m, a.runs_expected, a.runs_completed, failed,
        boolean(a.complete()), boolean(a.hv_available));
    out += summary_block("igd", a.igd);
    out += summary_block("hv", a.hv);
    out += summary_block("feasible_ratio", a.feasible_ratio);
    return out;
}

CellAggregate parse_aggregate(const std::string& text) {
    const auto node = YAML::Load(text);
    CellAggregate a;
    a.problem = node["problem"].as<std::string>();
    a.cell = node["cell"].as<std::string>();
    a.n = node["n"].as<std::size_t>();
    a.m = node["m"].as<std::size_t>();
    a.runs_expected = node["runs_expected"].as<std::size_t>();
    a.runs_completed = node["runs_completed"].as<std::size_t>();
    for (const auto& item : node["failed_runs"]) a.failed_runs.push_back(item.as<std::size_t>());
    a.hv_available = node["hv_available"].as<bool>();
    a.igd = parse_summary(node["igd"]);
    a.hv = parse_summary(node["hv"]);
    a.feasible_ratio = parse_summary(node["feasible_ratio"]);
    return a;
}

CellAggregate read_aggregate(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IncompleteCell(fmt::format("missing aggregate '{}'", path.string()));
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_aggregate(buffer.str());
}

void write_atomically(const fs::path& path, const std::string& contents) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", tmp.string()));
        out << contents;
        if (!out.flush()) throw std::runtime_error(fmt::format("write to '{}' failed", tmp.string()));
    }
    fs::rename(tmp, path);
}

// ---------------------------------------------------------------------------
// Experiment

ExperimentResult run_experiment(const ExperimentConfig& config, const ProblemRegistry& registry) {
    fs::create_directories(config.output_dir);
    write_atomically(config.output_dir / "resolved_config.yaml",
                     render_resolved_config(config, registry));

    ReferenceFrontCache cache(config.reference_cache.value_or(config.output_dir / "reference_fronts"));
    std::map<std::string, ProblemDefinition> definitions;
    std::map<std::string, PointSet> references;
    for (const auto& entry : config.problems) {
        auto problem = registry.get(entry.name);
        references[entry.name] = cache.get(problem, problem.default_reference_count);
        if (references[entry.name].empty())
            throw UnsupportedMetric(fmt::format("problem '{}' has an empty reference front", entry.name));
        definitions.emplace(entry.name, std::move(problem));
    }

    struct Task {
        const CellEntry* cell;
        const ProblemEntry* problem;
        std::size_t run_index;
    };
    std::vector<Task> tasks;
    for (const auto& cell : config.cells)
        for (const auto& problem : config.problems)
            for (std::size_t run = 0; run < config.runs; ++run) tasks.push_back({&cell, &problem, run});

    std::vector<std::optional<RunRecord>> slots(tasks.size());
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t t = next++; t < tasks.size(); t = next++) {
            const auto& task = tasks[t];
            const auto& problem = definitions.at(task.problem->name);
            const auto dir = config.output_dir / task.cell->name / problem.name;
            const auto stem = run_file_stem(task.run_index);
            try {
                auto rc = config.resolve(*task.cell, *task.problem);
                rc.seed = config.base_seed + task.run_index;
                const auto result = run(rc, problem, references.at(problem.name));

                RunRecord record;
                record.problem = problem.name;
                record.cell = task.cell->name;
                record.config_digest = digest(canonical_run_config(rc, problem.n));
                record.run_index = task.run_index;
                record.seed = rc.seed;
                record.n = problem.n;
                record.m = problem.m;
                record.fe_used = result.fe_used;
                record.generations = result.generations;
                record.wall_time_seconds = result.wall_time_seconds;
                record.igd = result.igd.value;
                record.hv = result.hv.value;
                record.hv_available = problem.m <= 3;
                record.feasible_ratio = result.feasible_ratio;
                record.n_feasible = result.igd.n_feasible;
                record.n_nondominated = result.igd.n_nondominated;
                record.front = objective_vectors(result.front);
                for (const auto& ind : result.population) record.decision_vectors.push_back(ind.x);

                write_atomically(dir / (stem + ".yaml"), render_record(record));
                write_atomically(dir / (stem + "_front.csv"), render_front_csv(record));
                slots[t] = std::move(record);
            } catch (const std::exception& e) {
                try {
                    write_atomically(dir / (stem + ".error"), std::string(e.what()) + "\n");
                } catch (const std::exception&) {
                }
            }
        }
    };

    const std::size_t workers = std::min(config.workers, std::max<std::size_t>(tasks.size(), 1));
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t i = 0; i < workers; ++i) pool.emplace_back(worker);
    }

    ExperimentResult result;
    std::size_t t = 0;
    for (const auto& cell : config.cells) {
        for (const auto& entry : config.problems) {
            const auto& problem = definitions.at(entry.name);
            CellAggregate aggregate;
            aggregate.problem = problem.name;
            aggregate.cell = cell.name;
            aggregate.n = problem.n;
            aggregate.m = problem.m;
            aggregate.runs_expected = config.runs;
            aggregate.hv_available = problem.m <= 3;
            std::vector<double> igd_values, hv_values, ratio_values;
            for (std::size_t run = 0; run < config.runs; ++run, ++t) {
                if (!slots[t]) {
                    aggregate.failed_runs.push_back(run);
                    continue;
                }
                const auto& record = *slots[t];
                ++aggregate.runs_completed;
                igd_values.push_back(record.igd);
                hv_values.push_back(record.hv);
                ratio_values.push_back(record.feasible_ratio);
                result.records.push_back(record);
            }
            aggregate.igd = summarize(std::move(igd_values));
            aggregate.hv = summarize(std::move(hv_values));
            aggregate.feasible_ratio = summarize(std::move(ratio_values));
            result.all_complete = result.all_complete && aggregate.complete();
            write_atomically(config.output_dir / cell.name / problem.name / "aggregate.yaml",
                             render_aggregate(aggregate));
            result.aggregates.push_back(std::move(aggregate));
        }
    }

    for (const auto& spec : config.comparisons) {
        std::vector<CellAggregate> a, b;
        for (const auto& agg : result.aggregates) {
            if (agg.cell == spec.cell_a) a.push_back(agg);
            if (agg.cell == spec.cell_b) b.push_back(agg);
        }
        const auto path = config.output_dir /
                          fmt::format("comparison_{}_vs_{}_{}.txt", spec.cell_a, spec.cell_b, spec.metric);
        try {
            write_atomically(path, format_table(compare(a, b, spec.metric)));
        } catch (const IncompleteCell& e) {
            write_atomically(path, fmt::format("incomplete: {}\n", e.what()));
        }
    }
    return result;
}

// ---------------------------------------------------------------------------
// Comparison

Orientation metric_orientation(const std::string& metric) {
    if (metric == "igd") return Orientation::SmallerIsBetter;
    if (metric == "hv") return Orientation::LargerIsBetter;
    throw std::invalid_argument(fmt::format("unknown metric '{}'", metric));
}

ComparisonTable compare(const std::vector<CellAggregate>& cell_a,
                        const std::vector<CellAggregate>& cell_b, const std::string& metric) {
    const auto orientation = metric_orientation(metric);
    ComparisonTable table;
    table.metric = metric;
    if (!cell_a.empty()) table.cell_a = cell_a.front().cell;
    if (!cell_b.empty()) table.cell_b = cell_b.front().cell;

    std::map<std::string, const CellAggregate*> by_a, by_b;
    for (const auto& agg : cell_a) by_a[agg.problem] = &agg;
    for (const auto& agg : cell_b) by_b[agg.problem] = &agg;
    std::set<std::string> problems;
    for (const auto& [name, agg] : by_a) problems.insert(name);
    for (const auto& [name, agg] : by_b) problems.insert(name);
    if (problems.empty()) throw IncompleteCell("no problems to compare");

    for (const auto& name : problems) {
        const auto ia = by_a.find(name);
        const auto ib = by_b.find(name);
        if (ia == by_a.end() || ib == by_b.end())
            throw IncompleteCell(fmt::format("problem '{}' is missing from one cell", name));
        const auto& a = *ia->second;
        const auto& b = *ib->second;
        if (!a.complete() || !b.complete())
            throw IncompleteCell(fmt::format("problem '{}' has incomplete runs", name));

        ComparisonRow row;
        row.problem = name;
        row.m = a.m;
        row.n = a.n;
        const auto& sa = metric == "igd" ? a.igd : a.hv;
        const auto& sb = metric == "igd" ? b.igd : b.hv;
        row.available = metric == "igd" || (a.hv_available && b.hv_available);
        row.mean_a = sa.mean;
        row.std_a = sa.std;
        row.mean_b = sb.mean;
        row.std_b = sb.std;
        if (row.available) {
            row.verdict = wilcoxon_rank_sum(sa.values, sb.values, orientation);
            switch (row.verdict.symbol) {
                case Verdict::Better: ++table.better; break;
                case Verdict::Worse: ++table.worse; break;
                case Verdict::Equivalent: ++table.equivalent; break;
            }
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

ComparisonTable compare_directories(const fs::path& cell_a, const fs::path& cell_b,
                                    const std::string& metric) {
    const auto load = [](const fs::path& dir) {
        if (!fs::is_directory(dir)) throw IncompleteCell(fmt::format("no cell directory '{}'", dir.string()));
        std::vector<fs::path> problems;
        for (const auto& entry : fs::directory_iterator(dir))
            if (entry.is_directory()) problems.push_back(entry.path());
        std::sort(problems.begin(), problems.end());
        std::vector<CellAggregate> out;
        for (const auto& p : problems) out.push_back(read_aggregate(p / "aggregate.yaml"));
        return out;
    };
    return compare(load(cell_a), load(cell_b), metric);
}

namespace {

std::string tidy_exponent(const std::string& text) {
    const auto e = text.find('e');
    if (e == std::string::npos) return text;
    std::string mantissa = text.substr(0, e);
    const char sign = text[e + 1];
    std::string digits = text.substr(e + 2);
    digits.erase(0, std::min(digits.find_first_not_of('0'), digits.size() - 1));
    return mantissa + "e" + (sign == '-' ? "-" : "") + digits;
}

}  // namespace

std::string format_mean(double value) {
    if (std::isnan(value)) return "NaN";
    return tidy_exponent(fmt::format("{:.4e}", value));
}

std::string format_std(double value) {
    if (std::isnan(value)) return "NaN";
    return tidy_exponent(fmt::format("{:.2e}", value));
}

std::string format_table(const ComparisonTable& table) {
    std::string out = fmt::format("{} comparison: {} vs {} (symbol: {} relative to {})\n",
                                  table.metric == "igd" ? "IGD" : "HV", table.cell_a, table.cell_b,
                                  table.cell_a, table.cell_b);
    out += fmt::format("{:<12} {:>2} {:>3}  {:<24} {:<24}\n", "Problem", "M", "D", table.cell_a,
                       table.cell_b);
    for (const auto& row : table.rows) {
        const auto a = fmt::format("{} ({})", format_mean(row.mean_a), format_std(row.std_a));
        const auto b = fmt::format("{} ({})", format_mean(row.mean_b), format_std(row.std_b));
        const auto symbol = row.available ? to_string(row.verdict.symbol) : std::string("n/a");
        out += fmt::format("{:<12} {:>2} {:>3}  {:<22} {} {:<24}\n", row.problem, row.m, row.n, a,
                           symbol, b);
    }
    out += fmt::format("+/−/≈ : {}/{}/{}\n", table.better, table.worse, table.equivalent);
    return out;
}

std::string render_front_csv(const RunRecord& record) {
    std::string out;
    for (std::size_t i = 0; i < record.m; ++i) out += fmt::format("{}f{}", i ? "," : "", i + 1);
    out += "\n";
    for (const auto& pt : record.front) {
        for (std::size_t i = 0; i < pt.size(); ++i) out += fmt::format("{}{:.17g}", i ? "," : "", pt[i]);
        out += "\n";
    }
    return out;
}

void export_front(const RunRecord& record, const fs::path& path) {
    write_atomically(path, render_front_csv(record));
}

std::string digest(const std::string& text) {
    std::uint64_t hash = 14695981039346656037ull;
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 1099511628211ull;
    }
    return fmt::format("{:016x}", hash);
}

}  // namespace nsbidico::harness
