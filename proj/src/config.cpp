#include "oppsim/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>

namespace oppsim {

std::string_view to_string(ScenarioKind kind)
{
  switch (kind)
  {
  case ScenarioKind::kSynthetic:
    return "synthetic";
  case ScenarioKind::kTrace:
    return "trace";
  case ScenarioKind::kTraceLike:
    return "trace_like";
  }
  return "?";
}

namespace {

std::string trim(std::string_view s)
{
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos)
    return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

struct Field
{
  std::string key;
  std::string value;
  std::size_t line;

  [[noreturn]] void fail(const std::string& what) const
  {
    throw ParseError(line, "`" + key + "`: " + what);
  }

  double real() const
  {
    double v = 0.0;
    const auto* end = value.data() + value.size();
    const auto [p, ec] = std::from_chars(value.data(), end, v);
    if (ec != std::errc{} || p != end)
      fail("expected a number, got `" + value + "`");
    return v;
  }

  std::uint64_t count() const
  {
    std::uint64_t v = 0;
    const auto* end = value.data() + value.size();
    const auto [p, ec] = std::from_chars(value.data(), end, v);
    if (ec != std::errc{} || p != end)
      fail("expected a non-negative integer, got `" + value + "`");
    return v;
  }

  std::vector<std::string> list() const
  {
    std::string body = value;
    if (!body.empty() && body.front() == '[')
    {
      if (body.back() != ']')
        fail("unterminated list");
      body = body.substr(1, body.size() - 2);
    }
    std::vector<std::string> items;
    std::size_t pos = 0;
    while (pos <= body.size())
    {
      const auto comma = body.find(',', pos);
      const auto item = trim(body.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos));
      if (item.empty())
        fail("empty list item");
      items.push_back(item);
      if (comma == std::string::npos)
        break;
      pos = comma + 1;
    }
    return items;
  }

  std::vector<double> reals() const
  {
    std::vector<double> out;
    for (const auto& item : list())
      out.push_back(Field{key, item, line}.real());
    return out;
  }
};

using Setter = std::function<void(ExperimentConfig&, const Field&)>;

SimTime seconds(const Field& f)
{
  const double s = f.real();
  if (s <= 0.0)
    f.fail("must be positive");
  return from_seconds(s);
}

const std::map<std::string, Setter, std::less<>>& setters()
{
  static const std::map<std::string, Setter, std::less<>> table = {
      {"scenario.kind",
       [](ExperimentConfig& c, const Field& f) {
         if (f.value == "synthetic")
           c.kind = ScenarioKind::kSynthetic;
         else if (f.value == "trace")
           c.kind = ScenarioKind::kTrace;
         else if (f.value == "trace_like")
           c.kind = ScenarioKind::kTraceLike;
         else
           f.fail("expected synthetic, trace or trace_like");
       }},
      {"scenario.name", [](ExperimentConfig& c, const Field& f) { c.name = f.value; }},
      {"scenario.trace_path", [](ExperimentConfig& c, const Field& f) { c.trace_path = f.value; }},
      {"scenario.duration_s", [](ExperimentConfig& c, const Field& f) { c.duration = seconds(f); }},
      {"scenario.num_destinations",
       [](ExperimentConfig& c, const Field& f) { c.num_destinations = f.count(); }},
      {"workload.msg_int",
       [](ExperimentConfig& c, const Field& f) { c.msg_int = static_cast<int>(f.count()); }},

      {"synthetic.group_size",
       [](ExperimentConfig& c, const Field& f) { c.synthetic.group_size = f.count(); }},
      {"synthetic.grid_rows",
       [](ExperimentConfig& c, const Field& f) { c.synthetic.grid_rows = f.count(); }},
      {"synthetic.grid_cols",
       [](ExperimentConfig& c, const Field& f) { c.synthetic.grid_cols = f.count(); }},
      {"synthetic.grid_spacing_m",
       [](ExperimentConfig& c, const Field& f) { c.synthetic.grid_spacing_m = f.real(); }},
      {"synthetic.speed_min",
       [](ExperimentConfig& c, const Field& f) { c.synthetic.speed_min = f.real(); }},
      {"synthetic.speed_max",
       [](ExperimentConfig& c, const Field& f) { c.synthetic.speed_max = f.real(); }},
      {"synthetic.pause_s",
       [](ExperimentConfig& c, const Field& f) { c.synthetic.pause_s = f.real(); }},
      {"synthetic.radio_range_m",
       [](ExperimentConfig& c, const Field& f) { c.synthetic.radio_range_m = f.real(); }},
      {"synthetic.tick_ms",
       [](ExperimentConfig& c, const Field& f) {
         c.synthetic.tick = SimTime(static_cast<std::int64_t>(f.count()));
       }},

      {"trace_like.nodes", [](ExperimentConfig& c, const Field& f) { c.trace_like.nodes = f.count(); }},
      {"trace_like.days", [](ExperimentConfig& c, const Field& f) { c.trace_like.days = f.count(); }},
      {"trace_like.communities",
       [](ExperimentConfig& c, const Field& f) { c.trace_like.communities = f.count(); }},
      {"trace_like.active_from_hour",
       [](ExperimentConfig& c, const Field& f) {
         c.trace_like.active_from_hour = static_cast<int>(f.count());
       }},
      {"trace_like.active_to_hour",
       [](ExperimentConfig& c, const Field& f) {
         c.trace_like.active_to_hour = static_cast<int>(f.count());
       }},
      {"trace_like.weekend_activity",
       [](ExperimentConfig& c, const Field& f) { c.trace_like.weekend_activity = f.real(); }},
      {"trace_like.intra_contacts_per_hour",
       [](ExperimentConfig& c, const Field& f) { c.trace_like.intra_contacts_per_hour = f.real(); }},
      {"trace_like.inter_contacts_per_hour",
       [](ExperimentConfig& c, const Field& f) { c.trace_like.inter_contacts_per_hour = f.real(); }},
      {"trace_like.mean_duration_s",
       [](ExperimentConfig& c, const Field& f) { c.trace_like.mean_duration_s = f.real(); }},
      {"trace_like.min_duration_s",
       [](ExperimentConfig& c, const Field& f) { c.trace_like.min_duration_s = f.real(); }},

      {"network.bandwidth_bps",
       [](ExperimentConfig& c, const Field& f) {
         if (f.value == "infinite")
           c.bandwidth_bps = kInfiniteBandwidth;
         else
         {
           const auto v = f.count();
           if (v == 0 || v > static_cast<std::uint64_t>(kInfiniteBandwidth))
             f.fail("must be positive");
           c.bandwidth_bps = static_cast<std::int64_t>(v);
         }
       }},
      {"network.buffer_bytes",
       [](ExperimentConfig& c, const Field& f) {
         c.buffer_bytes = f.value == "unlimited" ? kUnlimitedBuffer : f.count();
       }},

      {"social.k", [](ExperimentConfig& c, const Field& f) { c.social.k = f.count(); }},
      {"social.familiar_threshold_s",
       [](ExperimentConfig& c, const Field& f) { c.social.familiar_threshold_s = f.real(); }},
      {"social.window_s", [](ExperimentConfig& c, const Field& f) { c.social.window_len = seconds(f); }},

      {"experiment.strategies",
       [](ExperimentConfig& c, const Field& f) {
         c.strategies = f.list();
         for (const auto& s : c.strategies)
           if (s != "epidemic" && s != "bubble" && s != "dlife" && s != "scorp")
             f.fail("unknown strategy `" + s + "`");
       }},
      {"experiment.seeds",
       [](ExperimentConfig& c, const Field& f) {
         c.seeds.clear();
         if (f.value.front() == '[')
           for (const auto& item : f.list())
             c.seeds.push_back(Field{f.key, item, f.line}.count());
         else
           for (std::uint64_t s = 1; s <= f.count(); ++s)
             c.seeds.push_back(s);
       }},
      {"experiment.out_dir", [](ExperimentConfig& c, const Field& f) { c.out_dir = f.value; }},

      {"sweep.pause_s",
       [](ExperimentConfig& c, const Field& f) {
         if (!c.sweep_name.empty())
           f.fail("only one sweep may be given");
         c.sweep_name = "pause_s";
         c.sweep_values = f.reals();
       }},
      {"sweep.msg_int",
       [](ExperimentConfig& c, const Field& f) {
         if (!c.sweep_name.empty())
           f.fail("only one sweep may be given");
         c.sweep_name = "msg_int";
         c.sweep_values = f.reals();
       }},
  };
  return table;
}

} // namespace

void ExperimentConfig::validate() const
{
  std::vector<std::string> issues;
  const bool is_synthetic = kind == ScenarioKind::kSynthetic;
  if (kind == ScenarioKind::kTrace)
  {
    if (trace_path.empty())
      issues.push_back("scenario.trace_path is required for scenario.kind = trace");
    else if (!std::filesystem::exists(trace_path))
      issues.push_back("scenario.trace_path: " + trace_path.string() + " does not exist");
  }
  if (strategies.empty())
    issues.push_back("experiment.strategies must not be empty");
  if (seeds.empty())
    issues.push_back("experiment.seeds must not be empty");
  if (std::set(seeds.begin(), seeds.end()).size() != seeds.size())
    issues.push_back("experiment.seeds must be distinct");
  if (sweep_values.empty())
    issues.push_back("sweep values must not be empty");
  if (is_synthetic && sweep_name != "pause_s")
    issues.push_back("synthetic scenarios sweep pause_s");
  if (!is_synthetic && sweep_name != "msg_int")
    issues.push_back("trace scenarios sweep msg_int");
  if (sweep_name == "pause_s")
    for (double p : sweep_values)
      if (p < 0.0)
        issues.push_back("sweep.pause_s values must be non-negative");
  if (sweep_name == "msg_int")
    for (double v : sweep_values)
    {
      if (v != static_cast<int>(v))
      {
        issues.push_back("sweep.msg_int values must be integers");
        continue;
      }
      try
      {
        trace_creation_rate(static_cast<int>(v));
      }
      catch (const ValidationError& e)
      {
        issues.insert(issues.end(), e.issues().begin(), e.issues().end());
      }
    }
  if (!is_synthetic && num_destinations == 0)
    issues.push_back("scenario.num_destinations must be positive");
  if (kind == ScenarioKind::kTraceLike && trace_like.nodes < num_destinations + 1)
    issues.push_back("trace_like.nodes must exceed scenario.num_destinations");
  if (is_synthetic)
  {
    if (synthetic.group_size < 2)
      issues.push_back("synthetic.group_size must be at least 2");
    if (synthetic.grid_rows * synthetic.grid_cols < 3)
      issues.push_back("synthetic grid needs at least 3 vertices");
    if (synthetic.grid_spacing_m <= 0.0)
      issues.push_back("synthetic.grid_spacing_m must be positive");
    if (synthetic.tick.count() <= 0)
      issues.push_back("synthetic.tick_ms must be positive");
  }
  if (social.k < 2)
    issues.push_back("social.k must be at least 2");
  if (buffer_bytes == 0)
    issues.push_back("network.buffer_bytes must be positive");
  if (!issues.empty())
    throw ValidationError(std::move(issues));
}

ExperimentConfig parse_config(std::istream& in, const std::filesystem::path& base_dir)
{
  ExperimentConfig c;
  std::set<std::string, std::less<>> seen;
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw))
  {
    ++lineno;
    const auto hash = raw.find('#');
    const std::string line = trim(std::string_view(raw).substr(0, hash));
    if (line.empty())
      continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError(lineno, "expected `section.key = value`");
    Field f{trim(line.substr(0, eq)), trim(line.substr(eq + 1)), lineno};
    if (f.value.empty())
      f.fail("missing value");
    const auto& table = setters();
    auto it = table.find(f.key);
    if (it == table.end())
      f.fail("unknown key");
    if (!seen.insert(f.key).second)
      f.fail("duplicate key");
    it->second(c, f);
  }

  if (c.sweep_name.empty())
  {
    if (c.kind == ScenarioKind::kSynthetic)
    {
      c.sweep_name = "pause_s";
      c.sweep_values = {c.synthetic.pause_s};
    }
    else
    {
      c.sweep_name = "msg_int";
      c.sweep_values = {static_cast<double>(c.msg_int)};
    }
  }
  if (c.name.empty())
    c.name = std::string(to_string(c.kind));
  if (!c.trace_path.empty() && c.trace_path.is_relative() && !base_dir.empty())
    c.trace_path = base_dir / c.trace_path;
  c.validate();
  return c;
}

ExperimentConfig parse_config_file(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in)
    throw Error("cannot read config " + path.string());
  return parse_config(in, path.parent_path());
}

} // namespace oppsim
