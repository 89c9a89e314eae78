#pragma once

#include "oppsim/engine.hpp"
#include "oppsim/metrics.hpp"
#include "oppsim/scenario.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace oppsim {

enum class ScenarioKind
{
  kSynthetic,
  kTrace,
  kTraceLike,
};

std::string_view to_string(ScenarioKind kind);

struct SyntheticConfig
{
  std::size_t group_size = 50;
  std::size_t grid_rows = 10;
  std::size_t grid_cols = 10;
  double grid_spacing_m = 100.0;
  double speed_min = 0.5;
  double speed_max = 1.4;
  double pause_s = 100.0;
  double radio_range_m = 10.0;
  SimTime tick{1000};
};

/// Parsed experiment description. See README for the key table.
struct ExperimentConfig
{
  ScenarioKind kind = ScenarioKind::kSynthetic;
  std::string name;
  std::filesystem::path trace_path;
  /// Unset: 4 days (synthetic), trace_like.days, or the trace's last contact
  /// rounded up to a whole day.
  std::optional<SimTime> duration;
  std::size_t num_destinations = 35;
  int msg_int = 1;

  SyntheticConfig synthetic;
  TraceLikeParams trace_like;

  std::int64_t bandwidth_bps = 250'000;
  std::uint64_t buffer_bytes = 2'000'000;
  SocialParams social;

  std::vector<std::string> strategies = {"bubble", "dlife", "scorp"};
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  /// `pause_s` (synthetic) or `msg_int` (trace kinds).
  std::string sweep_name;
  std::vector<double> sweep_values;
  std::filesystem::path out_dir;

  /// Throws ValidationError.
  void validate() const;
};

/// `section.key = value` lines; `#` starts a comment. Throws ParseError
/// naming the line and key. Relative trace paths resolve against `base_dir`.
ExperimentConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = {});
ExperimentConfig parse_config_file(const std::filesystem::path& path);

struct RunSpec
{
  std::size_t index = 0;
  std::string strategy;
  double param = 0.0;
  std::uint64_t seed = 0;
};

/// strategies x sweep values x seeds, in that nesting order.
std::vector<RunSpec> run_matrix(const ExperimentConfig& config);

/// Builds the scenario of one run. Contacts depend on (param, seed) for
/// synthetic sweeps and on the seed alone otherwise.
Scenario build_scenario(const ExperimentConfig& config, const RunSpec& spec,
                        const std::vector<ContactEvent>& contacts);
std::vector<ContactEvent> build_contacts(const ExperimentConfig& config, double param,
                                         std::uint64_t seed);

struct ExperimentOptions
{
  std::filesystem::path out_dir;
  bool log_events = false;
  bool dry_run = false;
  int jobs = 1;
};

struct RunOutcome
{
  RunSpec spec;
  bool ok = false;
  std::string error;
  RunRow row;
};

struct ExperimentResult
{
  std::vector<RunOutcome> runs;
  std::vector<AggregateRow> aggregate;
  bool ok() const;
};

/// Executes every run (up to `jobs` at once) and, unless dry_run, writes
/// runs.csv, aggregate.csv, manifest.txt and optionally events/*.log into
/// out_dir. Files are written to a temporary name and renamed into place.
ExperimentResult run_experiment(const ExperimentConfig& config, const ExperimentOptions& options,
                                std::ostream& progress);

/// Writes `content` to `path` via a temporary file in the same directory.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

} // namespace oppsim
