#include "oppsim/experiment.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

namespace oppsim {

namespace {

SimTime effective_duration(const ExperimentConfig& c, const std::vector<ContactEvent>& contacts)
{
  if (c.duration)
    return *c.duration;
  switch (c.kind)
  {
  case ScenarioKind::kSynthetic:
    return 4 * kDay;
  case ScenarioKind::kTraceLike:
    return kDay * static_cast<std::int64_t>(c.trace_like.days);
  case ScenarioKind::kTrace:
    break;
  }
  SimTime last{0};
  for (const auto& e : contacts)
    last = std::max(last, e.end);
  const auto days = std::max<std::int64_t>(1, (last.count() + kDay.count() - 1) / kDay.count());
  return kDay * days;
}

std::vector<ContactEvent> load_trace(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in)
    throw Error("cannot read trace " + path.string());
  return parse_trace(in);
}

std::size_t population(const ExperimentConfig& c, const std::vector<ContactEvent>& contacts)
{
  switch (c.kind)
  {
  case ScenarioKind::kSynthetic:
    return 3 * c.synthetic.group_size;
  case ScenarioKind::kTraceLike:
    return c.trace_like.nodes;
  case ScenarioKind::kTrace:
    break;
  }
  std::size_t n = c.num_destinations + 1;
  for (const auto& e : contacts)
    n = std::max<std::size_t>(n, std::max(e.node_a, e.node_b) + 1);
  return n;
}

} // namespace

std::vector<RunSpec> run_matrix(const ExperimentConfig& config)
{
  std::vector<RunSpec> specs;
  for (const auto& strategy : config.strategies)
    for (double param : config.sweep_values)
      for (auto seed : config.seeds)
        specs.push_back({specs.size(), strategy, param, seed});
  if (specs.size() != config.strategies.size() * config.sweep_values.size() * config.seeds.size())
    throw Error("run matrix cardinality mismatch");
  return specs;
}

std::vector<ContactEvent> build_contacts(const ExperimentConfig& config, double param,
                                         std::uint64_t seed)
{
  switch (config.kind)
  {
  case ScenarioKind::kSynthetic:
  {
    const auto& s = config.synthetic;
    auto p = SyntheticParams::defaults(s.group_size, s.grid_rows, s.grid_cols, s.grid_spacing_m);
    p.speed_min = s.speed_min;
    p.speed_max = s.speed_max;
    p.pause_time_s = param;
    p.radio_range_m = s.radio_range_m;
    p.tick = s.tick;
    p.duration = effective_duration(config, {});
    return generate_synthetic(p, seed).contacts;
  }
  case ScenarioKind::kTraceLike:
  {
    auto contacts = generate_trace_like(config.trace_like, seed);
    const SimTime end = effective_duration(config, contacts);
    std::erase_if(contacts, [&](const ContactEvent& e) { return e.start >= end; });
    for (auto& e : contacts)
      e.end = std::min(e.end, end);
    return contacts;
  }
  case ScenarioKind::kTrace:
  {
    auto contacts = load_trace(config.trace_path);
    const SimTime end = effective_duration(config, contacts);
    std::erase_if(contacts, [&](const ContactEvent& e) { return e.start >= end; });
    for (auto& e : contacts)
      e.end = std::min(e.end, end);
    return contacts;
  }
  }
  return {};
}

Scenario build_scenario(const ExperimentConfig& config, const RunSpec& spec,
                        const std::vector<ContactEvent>& contacts)
{
  const auto strategy = make_strategy(spec.strategy);
  const auto variant =
      strategy->content_oriented() ? WorkloadVariant::kContent : WorkloadVariant::kDestination;

  Scenario s;
  s.name = config.name;
  s.node_count = population(config, contacts);
  s.duration = effective_duration(config, contacts);
  s.contacts = contacts;
  s.bandwidth_bps = config.bandwidth_bps;
  s.buffer_bytes = config.buffer_bytes;
  s.social = config.social;
  if (config.kind == ScenarioKind::kSynthetic)
  {
    s.workload =
        build_synthetic_workload(variant, config.synthetic.group_size, s.duration, spec.seed);
    s.protect_source_messages = true;
  }
  else
  {
    s.workload = build_trace_workload(static_cast<int>(spec.param), variant, s.duration, spec.seed,
                                      config.num_destinations);
    // The source stores every message it generates.
    s.unlimited_buffer_nodes = {0};
  }
  s.workload.interests.resize(s.node_count);
  return s;
}

bool ExperimentResult::ok() const
{
  return std::all_of(runs.begin(), runs.end(), [](const RunOutcome& r) { return r.ok; });
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content)
{
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out)
      throw Error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out)
      throw Error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

ExperimentResult run_experiment(const ExperimentConfig& config, const ExperimentOptions& options,
                                std::ostream& progress)
{
  const auto specs = run_matrix(config);
  ExperimentResult result;

  if (options.dry_run)
  {
    progress << specs.size() << " runs (" << config.strategies.size() << " strategies x "
             << config.sweep_values.size() << " " << config.sweep_name << " x "
             << config.seeds.size() << " seeds)\n";
    for (const auto& s : specs)
      progress << s.index << ' ' << s.strategy << ' ' << config.sweep_name << '='
               << format_number(s.param) << " seed=" << s.seed << '\n';
    for (const auto& s : specs)
      result.runs.push_back({s, true, {}, {}});
    return result;
  }

  const auto& out_dir = options.out_dir;
  std::filesystem::create_directories(out_dir);
  if (options.log_events)
    std::filesystem::create_directories(out_dir / "events");

  // Contact schedules are shared by every strategy of the same (param, seed).
  const bool per_param = config.kind == ScenarioKind::kSynthetic;
  const bool per_seed = config.kind != ScenarioKind::kTrace;
  using Key = std::pair<double, std::uint64_t>;
  auto key_of = [&](const RunSpec& s) {
    return Key{per_param ? s.param : 0.0, per_seed ? s.seed : 0};
  };
  std::map<Key, std::vector<ContactEvent>> schedules;
  for (const auto& s : specs)
    schedules[key_of(s)];
  std::vector<Key> keys;
  for (const auto& [k, v] : schedules)
    keys.push_back(k);
  std::map<Key, std::string> schedule_errors;

  const int jobs = std::max(1, options.jobs);
#pragma omp parallel for schedule(dynamic) num_threads(jobs)
  for (std::size_t i = 0; i < keys.size(); ++i)
  {
    try
    {
      auto contacts = build_contacts(config, keys[i].first, keys[i].second);
#pragma omp critical(oppsim_schedules)
      schedules[keys[i]] = std::move(contacts);
    }
    catch (const std::exception& e)
    {
#pragma omp critical(oppsim_schedules)
      schedule_errors[keys[i]] = e.what();
    }
  }

  result.runs.resize(specs.size());
#pragma omp parallel for schedule(dynamic) num_threads(jobs)
  for (std::size_t i = 0; i < specs.size(); ++i)
  {
    const auto& spec = specs[i];
    RunOutcome outcome{spec, false, {}, {}};
    try
    {
      const auto key = key_of(spec);
      if (auto it = schedule_errors.find(key); it != schedule_errors.end())
        throw Error("contact generation failed: " + it->second);
      const Scenario scenario = build_scenario(config, spec, schedules.at(key));
      const auto strategy = make_strategy(spec.strategy);
      auto r = run(scenario, *strategy, spec.seed, options.log_events);
      outcome.row = make_row(config.name, spec.strategy, spec.param, r.stats);
      if (options.log_events)
        write_file_atomic(out_dir / "events" /
                              (spec.strategy + "_" + config.sweep_name + "-" +
                               format_number(spec.param) + "_seed" + std::to_string(spec.seed) +
                               ".log"),
                          r.log.to_text());
      outcome.ok = true;
    }
    catch (const std::exception& e)
    {
      outcome.error = e.what();
      std::replace(outcome.error.begin(), outcome.error.end(), '\n', ' ');
    }
#pragma omp critical(oppsim_progress)
    progress << "[" << spec.index + 1 << "/" << specs.size() << "] " << spec.strategy << ' '
             << config.sweep_name << '=' << format_number(spec.param) << " seed=" << spec.seed
             << (outcome.ok ? " ok" : " FAILED: " + outcome.error) << '\n';
    result.runs[i] = std::move(outcome);
  }

  std::vector<RunRow> rows;
  for (const auto& r : result.runs)
    if (r.ok)
      rows.push_back(r.row);
  result.aggregate = aggregate(rows);

  std::ostringstream runs_csv;
  write_runs_csv(runs_csv, config.sweep_name, rows);
  write_file_atomic(out_dir / "runs.csv", runs_csv.str());
  std::ostringstream agg_csv;
  write_aggregate_csv(agg_csv, config.sweep_name, result.aggregate);
  write_file_atomic(out_dir / "aggregate.csv", agg_csv.str());

  std::ostringstream manifest;
  const auto failed = static_cast<std::size_t>(
      std::count_if(result.runs.begin(), result.runs.end(), [](const RunOutcome& r) { return !r.ok; }));
  manifest << "scenario " << config.name << " kind " << to_string(config.kind) << '\n'
           << "runs " << specs.size() << " ok " << specs.size() - failed << " failed " << failed
           << '\n'
           << "complete " << (failed == 0 ? "yes" : "no (partial results)") << '\n'
           << "index,strategy," << config.sweep_name << ",seed,status\n";
  for (const auto& r : result.runs)
    manifest << r.spec.index << ',' << r.spec.strategy << ',' << format_number(r.spec.param) << ','
             << r.spec.seed << ',' << (r.ok ? "ok" : "failed: " + r.error) << '\n';
  write_file_atomic(out_dir / "manifest.txt", manifest.str());
  return result;
}

} // namespace oppsim
