#pragma once

#include "oppsim/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace oppsim {

class EventLog;

struct RunStats
{
  std::uint64_t seed = 0;
  std::size_t delivered = 0;
  std::size_t expected = 0;
  /// Copies created by completed REPLICATE or DELIVER transfers.
  std::size_t replicas = 0;
  /// Creation to first delivery, one per delivered (message, target).
  std::vector<SimTime> latencies;
  std::size_t drops = 0;
};

/// delivered / expected. Throws ValidationError when nothing was expected.
double delivery_probability(const RunStats& stats);

/// Replicas per delivered message; NaN when nothing was delivered.
double cost(const RunStats& stats);

struct LatencySummary
{
  double mean_ms = 0.0;
  SimTime min{0};
  double median_ms = 0.0;
  SimTime max{0};
};

/// Empty when nothing was delivered.
std::optional<LatencySummary> latency_stats(const RunStats& stats);

struct Interval
{
  double mean = 0.0;
  double halfwidth = 0.0;
};

/// Student-t interval of the mean. Needs at least two samples.
Interval confidence_interval(std::span<const double> samples, double level = 0.95);

/// Worst-case per-node buffer use (decimal MB) if every forwarding of a run
/// stayed resident: forwardings / days / nodes * average kB / 1000.
double estimate_buffer_occupancy(double total_forwardings, double days, double nodes,
                                 double avg_msg_kB);

/// Recounts delivered (message, target) pairs, replicas, latencies and drops
/// from an event log.
RunStats tally_event_log(const EventLog& log, std::size_t expected);

// Reporting --------------------------------------------------------------------

/// One row of the per-run CSV.
struct RunRow
{
  std::string scenario;
  std::string strategy;
  double param = 0.0;
  std::uint64_t seed = 0;
  double delivery = 0.0;
  double cost = 0.0;
  double latency_mean_s = 0.0;
  std::size_t replicas = 0;
  std::size_t delivered = 0;
  std::size_t expected = 0;
};

RunRow make_row(const std::string& scenario, const std::string& strategy, double param,
                const RunStats& stats);

struct MetricSummary
{
  double mean = 0.0;
  double ci95 = 0.0;
  std::size_t n = 0;
};

struct AggregateRow
{
  std::string scenario;
  std::string strategy;
  double param = 0.0;
  std::size_t n_runs = 0;
  MetricSummary delivery;
  MetricSummary cost;
  MetricSummary latency_s;
};

/// Groups rows by (scenario, strategy, param); NaN metrics are left out of
/// their own summary. The result does not depend on the input order.
std::vector<AggregateRow> aggregate(std::span<const RunRow> rows);

/// Four significant digits; NaN prints as an empty field.
std::string format_number(double v);

void write_runs_csv(std::ostream& out, const std::string& param_name, std::span<const RunRow> rows);
void write_aggregate_csv(std::ostream& out, const std::string& param_name,
                         std::span<const AggregateRow> rows);
/// Parses what write_runs_csv produced; empty cells come back as NaN.
std::vector<RunRow> read_runs_csv(std::istream& in);

} // namespace oppsim
