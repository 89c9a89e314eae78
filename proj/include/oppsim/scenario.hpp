#pragma once

#include "oppsim/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace oppsim {

// Map ------------------------------------------------------------------------

using VertexId = std::uint32_t;

struct Point
{
  double x = 0.0;
  double y = 0.0;
};

struct MapEdge
{
  VertexId to = 0;
  double length_m = 0.0;
};

/// Undirected waypoint graph. Edge weights are meters.
class Map
{
public:
  VertexId add_vertex(Point p);
  /// Adds an undirected edge. A negative length means "Euclidean distance".
  void add_edge(VertexId a, VertexId b, double length_m = -1.0);

  std::size_t vertex_count() const { return m_points.size(); }
  const Point& point(VertexId v) const { return m_points.at(v); }
  const std::vector<MapEdge>& neighbors(VertexId v) const { return m_adjacency.at(v); }
  bool connected() const;

  /// rows x cols lattice, row-major vertex ids, `spacing_m` between neighbors.
  static Map grid(std::size_t rows, std::size_t cols, double spacing_m);

private:
  std::vector<Point> m_points;
  std::vector<std::vector<MapEdge>> m_adjacency;
};

struct Path
{
  std::vector<VertexId> vertices;
  double length_m = 0.0;
};

/// Minimal-weight path; among equal-weight paths the lexicographically
/// smallest vertex sequence. Throws NoPathError when unreachable.
Path shortest_path(const Map& map, VertexId from, VertexId to);

// Synthetic mobility ---------------------------------------------------------

struct GroupSpec
{
  std::string name;
  std::size_t node_count = 0;
  std::vector<VertexId> home_zone;
};

struct SyntheticParams
{
  std::vector<GroupSpec> groups;
  Map map;
  double speed_min = 0.5;
  double speed_max = 1.4;
  double pause_time_s = 100.0;
  double radio_range_m = 10.0;
  SimTime duration = 4 * kDay;
  SimTime tick{1000};

  std::size_t node_count() const;
  void validate() const;

  /// 3 groups (A, M, B) of `group_size` on a rows x cols grid; home zones are
  /// the left, middle and right column thirds.
  static SyntheticParams defaults(std::size_t group_size = 50, std::size_t rows = 10,
                                  std::size_t cols = 10, double spacing_m = 100.0);
};

/// Piecewise-linear movement: during [start, end] the node goes from `from`
/// to `to` at constant speed. Pauses have from == to.
struct Leg
{
  SimTime start{0};
  SimTime end{0};
  Point from;
  Point to;
};

struct Trajectory
{
  std::vector<Leg> legs;
  std::size_t movements = 0;

  Point position_at(SimTime t) const;
};

/// One trajectory per node, node ids assigned group by group.
std::vector<Trajectory> simulate_mobility(const SyntheticParams& params, std::uint64_t seed);

struct ContactDetectParams
{
  double radio_range_m = 10.0;
  SimTime tick{1000};
  SimTime duration{0};
};

enum class Execution
{
  kSerial,
  kParallel,
};

/// Samples positions every tick; a contact opens on the first tick with
/// distance <= range and closes on the first tick beyond it (or at the end of
/// the run). The serial path is the plain all-pairs reference; the parallel
/// path blocks time, prunes far pairs by bounding box and spreads pairs over
/// OpenMP threads. Both return identical, start-sorted schedules.
std::vector<ContactEvent> detect_contacts(std::span<const Trajectory> trajectories,
                                          const ContactDetectParams& params, Execution exec);

struct SyntheticResult
{
  std::vector<ContactEvent> contacts;
  std::vector<std::size_t> movement_counts;
};

SyntheticResult generate_synthetic(const SyntheticParams& params, std::uint64_t seed,
                                   Execution exec = Execution::kParallel);

// Contact schedules ----------------------------------------------------------

/// Orients pairs (a < b), coalesces overlapping or touching intervals of the
/// same pair and sorts by (start, a, b).
std::vector<ContactEvent> normalize_contacts(std::vector<ContactEvent> events);

/// Line format `node_a node_b start_s end_s`; `#` comments and blank lines
/// are skipped. Throws ParseError with the 1-based line number.
std::vector<ContactEvent> parse_trace(std::istream& in);

/// Synthetic stand-in for a campus Bluetooth trace: community structure,
/// diurnal activity and quiet weekends.
struct TraceLikeParams
{
  std::size_t nodes = 36;
  std::size_t days = 14;
  std::size_t communities = 4;
  int active_from_hour = 8;
  int active_to_hour = 22;
  double weekend_activity = 0.15;
  double intra_contacts_per_hour = 0.15;
  double inter_contacts_per_hour = 0.015;
  double mean_duration_s = 120.0;
  double min_duration_s = 60.0;
};

std::vector<ContactEvent> generate_trace_like(const TraceLikeParams& params, std::uint64_t seed);

// Workloads ------------------------------------------------------------------

enum class WorkloadVariant
{
  kDestination,
  kContent,
};

using InterestSet = std::set<ContentType>;

struct Workload
{
  std::vector<Message> messages;
  /// Indexed by node id.
  std::vector<InterestSet> interests;
  std::vector<std::string> type_names;
  std::size_t expected_deliveries = 0;
};

/// (#destination-addressed messages) + sum over content-typed messages of the
/// interested nodes other than the source.
std::size_t count_expected_deliveries(std::span<const Message> messages,
                                      std::span<const InterestSet> interests);

inline constexpr int kTraceLoads[] = {1, 5, 10, 20, 35};

/// Messages per day for a trace-scenario load value.
int trace_creation_rate(int msg_per_dst);

/// Node 0 is the source for `num_destinations` receivers (nodes 1..N).
Workload build_trace_workload(int msg_per_dst, WorkloadVariant variant, SimTime ttl,
                              std::uint64_t seed, std::size_t num_destinations = 35);

/// Groups A = [0, g), M = [g, 2g), B = [2g, 3g); sources are nodes 0 and 2g.
/// Destination messages are released in four equal batches spaced
/// duration / 8 apart (25 every 12 h for the 4-day, 50-per-group setup).
Workload build_synthetic_workload(WorkloadVariant variant, std::size_t group_size,
                                  SimTime duration, std::uint64_t seed);

} // namespace oppsim
