#include "oppsim/metrics.hpp"

#include "oppsim/engine.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>
#include <tuple>

namespace oppsim {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

double delivery_probability(const RunStats& stats)
{
  if (stats.expected == 0)
    throw ValidationError({"delivery probability needs at least one expected delivery"});
  return static_cast<double>(stats.delivered) / static_cast<double>(stats.expected);
}

double cost(const RunStats& stats)
{
  if (stats.delivered == 0)
    return kNaN;
  return static_cast<double>(stats.replicas) / static_cast<double>(stats.delivered);
}

std::optional<LatencySummary> latency_stats(const RunStats& stats)
{
  if (stats.latencies.empty())
    return std::nullopt;
  std::vector<SimTime> v = stats.latencies;
  std::sort(v.begin(), v.end());
  LatencySummary s;
  double sum = 0.0;
  for (auto l : v)
    sum += static_cast<double>(l.count());
  s.mean_ms = sum / static_cast<double>(v.size());
  s.min = v.front();
  s.max = v.back();
  const auto n = v.size();
  s.median_ms = n % 2 ? static_cast<double>(v[n / 2].count())
                      : (static_cast<double>(v[n / 2 - 1].count()) + v[n / 2].count()) / 2.0;
  return s;
}

Interval confidence_interval(std::span<const double> samples, double level)
{
  if (samples.size() < 2)
    throw ValidationError({"confidence interval needs at least two samples"});
  if (!(level > 0.0 && level < 1.0))
    throw std::invalid_argument("confidence level must lie in (0, 1)");
  const double n = static_cast<double>(samples.size());
  const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : samples)
    ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  const boost::math::students_t dist(n - 1.0);
  const double t = boost::math::quantile(boost::math::complement(dist, (1.0 - level) / 2.0));
  return {mean, t * sd / std::sqrt(n)};
}

double estimate_buffer_occupancy(double total_forwardings, double days, double nodes,
                                 double avg_msg_kB)
{
  if (days <= 0.0 || nodes <= 0.0)
    throw std::invalid_argument("days and nodes must be positive");
  return total_forwardings / days / nodes * avg_msg_kB / 1000.0;
}

RunStats tally_event_log(const EventLog& log, std::size_t expected)
{
  RunStats s;
  s.expected = expected;
  for (const auto& r : log.records())
  {
    switch (r.kind)
    {
    case EventKind::kXferDone:
      ++s.replicas;
      break;
    case EventKind::kDeliver:
      ++s.delivered;
      s.latencies.emplace_back(r.value);
      break;
    case EventKind::kDrop:
      ++s.drops;
      break;
    default:
      break;
    }
  }
  return s;
}

// Reporting --------------------------------------------------------------------

RunRow make_row(const std::string& scenario, const std::string& strategy, double param,
                const RunStats& stats)
{
  RunRow row;
  row.scenario = scenario;
  row.strategy = strategy;
  row.param = param;
  row.seed = stats.seed;
  row.delivery = stats.expected ? delivery_probability(stats) : kNaN;
  row.cost = cost(stats);
  const auto lat = latency_stats(stats);
  row.latency_mean_s = lat ? lat->mean_ms / 1000.0 : kNaN;
  row.replicas = stats.replicas;
  row.delivered = stats.delivered;
  row.expected = stats.expected;
  return row;
}

namespace {

MetricSummary summarize(std::vector<double> values)
{
  values.erase(std::remove_if(values.begin(), values.end(), [](double v) { return std::isnan(v); }),
               values.end());
  // Sorting makes the floating-point sums independent of the input order.
  std::sort(values.begin(), values.end());
  MetricSummary s;
  s.n = values.size();
  if (values.empty())
  {
    s.mean = s.ci95 = kNaN;
    return s;
  }
  if (values.size() == 1)
  {
    s.mean = values.front();
    s.ci95 = kNaN;
    return s;
  }
  const auto ci = confidence_interval(values);
  s.mean = ci.mean;
  s.ci95 = ci.halfwidth;
  return s;
}

} // namespace

std::vector<AggregateRow> aggregate(std::span<const RunRow> rows)
{
  std::map<std::tuple<std::string, std::string, double>, std::vector<const RunRow*>> groups;
  for (const auto& r : rows)
    groups[{r.scenario, r.strategy, r.param}].push_back(&r);

  std::vector<AggregateRow> out;
  out.reserve(groups.size());
  for (const auto& [key, members] : groups)
  {
    AggregateRow a;
    std::tie(a.scenario, a.strategy, a.param) = key;
    a.n_runs = members.size();
    std::vector<double> d, c, l;
    for (const auto* r : members)
    {
      d.push_back(r->delivery);
      c.push_back(r->cost);
      l.push_back(r->latency_mean_s);
    }
    a.delivery = summarize(std::move(d));
    a.cost = summarize(std::move(c));
    a.latency_s = summarize(std::move(l));
    out.push_back(std::move(a));
  }
  return out;
}

std::string format_number(double v)
{
  if (std::isnan(v))
    return {};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

void write_runs_csv(std::ostream& out, const std::string& param_name, std::span<const RunRow> rows)
{
  out << "scenario,strategy," << param_name
      << ",seed,delivery,cost,latency_mean_s,replicas,delivered,expected\n";
  for (const auto& r : rows)
    out << r.scenario << ',' << r.strategy << ',' << format_number(r.param) << ',' << r.seed << ','
        << format_number(r.delivery) << ',' << format_number(r.cost) << ','
        << format_number(r.latency_mean_s) << ',' << r.replicas << ',' << r.delivered << ','
        << r.expected << '\n';
}

void write_aggregate_csv(std::ostream& out, const std::string& param_name,
                         std::span<const AggregateRow> rows)
{
  out << "scenario,strategy," << param_name
      << ",n_runs,delivery_mean,delivery_ci95,cost_mean,cost_ci95,cost_n,latency_mean_s,"
         "latency_ci95\n";
  for (const auto& r : rows)
    out << r.scenario << ',' << r.strategy << ',' << format_number(r.param) << ',' << r.n_runs
        << ',' << format_number(r.delivery.mean) << ',' << format_number(r.delivery.ci95) << ','
        << format_number(r.cost.mean) << ',' << format_number(r.cost.ci95) << ',' << r.cost.n
        << ',' << format_number(r.latency_s.mean) << ',' << format_number(r.latency_s.ci95)
        << '\n';
}

namespace {

std::vector<std::string> split_csv(const std::string& line)
{
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ','))
    cells.push_back(cell);
  if (!line.empty() && line.back() == ',')
    cells.emplace_back();
  return cells;
}

double parse_double(const std::string& s, std::size_t line)
{
  if (s.empty())
    return kNaN;
  try
  {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size())
      throw ParseError(line, "trailing characters in `" + s + "`");
    return v;
  }
  catch (const std::logic_error&)
  {
    throw ParseError(line, "not a number: `" + s + "`");
  }
}

std::uint64_t parse_uint(const std::string& s, std::size_t line)
{
  try
  {
    std::size_t pos = 0;
    const auto v = std::stoull(s, &pos);
    if (pos != s.size())
      throw ParseError(line, "trailing characters in `" + s + "`");
    return v;
  }
  catch (const std::logic_error&)
  {
    throw ParseError(line, "not an integer: `" + s + "`");
  }
}

} // namespace

std::vector<RunRow> read_runs_csv(std::istream& in)
{
  std::vector<RunRow> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line))
  {
    ++lineno;
    if (lineno == 1 || line.empty())
      continue;
    const auto c = split_csv(line);
    if (c.size() != 10)
      throw ParseError(lineno, "expected 10 fields, got " + std::to_string(c.size()));
    RunRow r;
    r.scenario = c[0];
    r.strategy = c[1];
    r.param = parse_double(c[2], lineno);
    r.seed = parse_uint(c[3], lineno);
    r.delivery = parse_double(c[4], lineno);
    r.cost = parse_double(c[5], lineno);
    r.latency_mean_s = parse_double(c[6], lineno);
    r.replicas = parse_uint(c[7], lineno);
    r.delivered = parse_uint(c[8], lineno);
    r.expected = parse_uint(c[9], lineno);
    rows.push_back(std::move(r));
  }
  return rows;
}

} // namespace oppsim
