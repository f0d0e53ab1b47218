#ifndef NSBIDICO_HARNESS_HPP
#define NSBIDICO_HARNESS_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nsbidico/algorithm.hpp"
#include "nsbidico/metrics.hpp"
#include "nsbidico/problems.hpp"

namespace nsbidico::harness {

/// Malformed or out-of-range experiment configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A comparison needs a cell that is missing runs or problems.
class IncompleteCell : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Partial RunConfig: only the fields a config section sets.
struct RunOverrides {
    std::optional<std::size_t> population_size;
    std::optional<std::size_t> budget;
    std::optional<double> F;
    std::optional<double> CR;
    std::optional<double> p_m;
    std::optional<double> eta_m;
    std::optional<double> epsilon;
    std::optional<bool> force_inherit;
    std::optional<ArchiveNormalization> archive_normalization;
    std::optional<bool> archive_after_selection;

    void apply_to(RunConfig& config) const;
};

struct ProblemEntry {
    std::string name;
    RunOverrides overrides;
};

struct CellEntry {
    std::string name;
    RunOverrides overrides;
};

struct ComparisonSpec {
    std::string cell_a;
    std::string cell_b;
    std::string metric;  ///< "igd" or "hv"
};

struct ExperimentConfig {
    std::filesystem::path output_dir;
    std::size_t runs = 30;
    std::uint64_t base_seed = 1;
    std::size_t workers = 1;
    std::optional<std::filesystem::path> reference_cache;
    RunOverrides defaults;
    std::vector<ProblemEntry> problems;
    std::vector<CellEntry> cells;  ///< a single "default" cell when the file names none
    std::vector<ComparisonSpec> comparisons;

    /// Fully resolved parameters for one (cell, problem); the seed is left at
    /// base_seed.
    RunConfig resolve(const CellEntry& cell, const ProblemEntry& problem) const;
};

/// Environment variable naming the default output root.
inline constexpr const char* kOutputRootEnv = "NSBIDICO_OUTPUT_ROOT";

/// Parses a YAML experiment file. Unknown keys, unknown problems, duplicate
/// entries and out-of-range values raise ConfigError naming the line.
ExperimentConfig parse_config(const std::filesystem::path& path,
                              const ProblemRegistry& registry = builtin_problems());

/// Parses configuration text; `origin` is used in messages and to name the
/// default output directory.
ExperimentConfig parse_config_text(const std::string& text, const std::string& origin,
                                   const ProblemRegistry& registry = builtin_problems());

/// Fully expanded configuration in the same dialect, for provenance.
std::string render_resolved_config(const ExperimentConfig& config,
                                   const ProblemRegistry& registry = builtin_problems());

/// Canonical text of one resolved run configuration (seed excluded); its
/// digest identifies the configuration in run records.
std::string canonical_run_config(const RunConfig& config, std::size_t n);

struct RunRecord {
    std::string problem;
    std::string cell;
    std::string config_digest;
    std::size_t run_index = 0;
    std::uint64_t seed = 0;
    std::size_t n = 0;
    std::size_t m = 0;
    std::size_t fe_used = 0;
    std::size_t generations = 0;
    double wall_time_seconds = 0.0;
    double igd = 0.0;
    double hv = 0.0;
    bool hv_available = true;
    double feasible_ratio = 0.0;
    std::size_t n_feasible = 0;
    std::size_t n_nondominated = 0;
    PointSet front;             ///< feasible non-dominated objective vectors
    PointSet decision_vectors;  ///< final population
};

std::string render_record(const RunRecord& record);
RunRecord parse_record(const std::string& text);
RunRecord read_record(const std::filesystem::path& path);

struct SampleSummary {
    double mean;
    double std;
    std::vector<double> values;
};

/// Mean and sample standard deviation over the non-NaN values.
SampleSummary summarize(std::vector<double> values);

struct CellAggregate {
    std::string problem;
    std::string cell;
    std::size_t n = 0;
    std::size_t m = 0;
    std::size_t runs_expected = 0;
    std::size_t runs_completed = 0;
    std::vector<std::size_t> failed_runs;
    bool hv_available = true;
    SampleSummary igd;
    SampleSummary hv;
    SampleSummary feasible_ratio;

    bool complete() const { return runs_completed == runs_expected && failed_runs.empty(); }
};

std::string render_aggregate(const CellAggregate& aggregate);
CellAggregate parse_aggregate(const std::string& text);
CellAggregate read_aggregate(const std::filesystem::path& path);

/// Text written through a sibling temporary file and renamed into place.
void write_atomically(const std::filesystem::path& path, const std::string& contents);

struct ExperimentResult {
    std::vector<RunRecord> records;
    std::vector<CellAggregate> aggregates;
    bool all_complete = true;
};

/// Runs every (cell, problem, run) with seeds base_seed + run. Writes
/// `<output>/<cell>/<problem>/run_NNN.yaml`, `run_NNN_front.csv` and
/// `aggregate.yaml`, plus `resolved_config.yaml` and one report per
/// configured comparison.
ExperimentResult run_experiment(const ExperimentConfig& config,
                                const ProblemRegistry& registry = builtin_problems());

struct ComparisonRow {
    std::string problem;
    std::size_t m = 0;
    std::size_t n = 0;
    bool available = true;
    double mean_a = 0.0;
    double std_a = 0.0;
    double mean_b = 0.0;
    double std_b = 0.0;
    ComparisonVerdict verdict;
};

struct ComparisonTable {
    std::string metric;
    std::string cell_a;
    std::string cell_b;
    std::vector<ComparisonRow> rows;
    std::size_t better = 0;
    std::size_t worse = 0;
    std::size_t equivalent = 0;
};

Orientation metric_orientation(const std::string& metric);

/// Compares two cells problem by problem from their aggregates.
ComparisonTable compare(const std::vector<CellAggregate>& cell_a,
                        const std::vector<CellAggregate>& cell_b, const std::string& metric);

/// Loads every `<cell_dir>/<problem>/aggregate.yaml` and compares. Throws
/// IncompleteCell when either side is missing runs or problems.
ComparisonTable compare_directories(const std::filesystem::path& cell_a,
                                    const std::filesystem::path& cell_b,
                                    const std::string& metric);

/// "7.2377e-3" style: five significant digits, unpadded exponent.
std::string format_mean(double value);
/// "9.26e-4" style: three significant digits.
std::string format_std(double value);

/// Table with one row per problem and a closing "+/−/≈ : a/b/c" tally.
std::string format_table(const ComparisonTable& table);

/// CSV with header f1..fm and one front point per row.
std::string render_front_csv(const RunRecord& record);
void export_front(const RunRecord& record, const std::filesystem::path& path);

/// 64-bit FNV-1a digest as 16 hex digits.
std::string digest(const std::string& text);

}  // namespace nsbidico::harness

#endif
