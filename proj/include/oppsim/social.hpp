#pragma once

#include "oppsim/node_set.hpp"
#include "oppsim/scenario.hpp"
#include "oppsim/types.hpp"

#include <array>
#include <iosfwd>
#include <map>
#include <vector>

namespace oppsim {

/// Hourly slots of the day over which contact durations are averaged.
inline constexpr int kDailySamples = 24;

struct SocialParams
{
  /// Clique size for community detection.
  std::size_t k = 5;
  /// Lifetime contact time after which a peer becomes familiar.
  double familiar_threshold_s = 700.0;
  /// Cumulative-window length for centrality.
  SimTime window_len = std::chrono::hours(6);
};

enum class CentralityScope
{
  kGlobal,
  kCommunity,
};

/// Content interests a node has learned from the peers it met, plus its own.
class InterestRegistry
{
public:
  InterestRegistry() = default;
  InterestRegistry(NodeId owner, InterestSet own);

  NodeId owner() const { return m_owner; }
  const InterestSet& own() const;
  void learn(NodeId node, const InterestSet& interests);
  bool interested(NodeId node, ContentType type) const;
  const std::map<NodeId, InterestSet>& entries() const { return m_entries; }

private:
  NodeId m_owner = 0;
  std::map<NodeId, InterestSet> m_entries;
};

/// Per-node social state built from observed contacts.
///
/// Contact durations are kept per (peer, hourly sample) as a running total
/// plus the first day the sample was observed; the daily average AD is the
/// total divided by the number of days elapsed for that sample, which equals
/// the incremental mean AD_j = (CD_j + (j - 1) AD_{j-1}) / j.
///
/// The community is derived from a locally known familiarity graph that grows
/// as nodes become familiar and as neighbours exchange what they know; it is
/// the owner, its familiar set, and every k-clique-percolation community of
/// the known graph that contains the owner.
class SocialProfile
{
public:
  SocialProfile(NodeId owner, std::size_t universe, SocialParams params = {});

  NodeId owner() const { return m_owner; }
  std::size_t universe() const { return m_universe; }
  const SocialParams& params() const { return m_params; }

  /// Splits [start, end) across hourly samples and rolls the centrality
  /// window to `end`. Throws BookkeepingError for an interval overlapping the
  /// previous contact with the same peer.
  void record_contact(NodeId peer, SimTime start, SimTime end);

  double average_duration(NodeId peer, int sample, SimTime now) const;
  int day_count(NodeId peer, int sample, SimTime now) const;
  double cumulative_contact_s(NodeId peer) const { return m_cumulative_s[peer]; }

  /// Marks `peer` as encountered (degree bookkeeping, done at link-up).
  void note_encounter(NodeId peer);
  /// Distinct nodes ever encountered.
  std::size_t degree() const { return m_encountered.count(); }
  const NodeSet& encountered() const { return m_encountered; }
  void learn_degree(NodeId peer, std::size_t degree) { m_known_degree[peer] = degree; }
  std::size_t known_degree(NodeId peer) const { return m_known_degree[peer]; }

  void roll_windows(SimTime now);
  const std::vector<NodeSet>& window_history() const { return m_windows; }
  const NodeSet& current_window() const { return m_current_window; }

  const NodeSet& familiar_set() const { return m_known_graph[m_owner]; }
  const std::vector<NodeSet>& known_graph() const { return m_known_graph; }
  const NodeSet& community() const;

  /// Cached social weights towards every node at `now`.
  const std::vector<double>& weights_at(SimTime now) const;

private:
  friend void update_community(SocialProfile&, SocialProfile&, double, const SocialParams&);

  struct SampleStat
  {
    double total_s = 0.0;
    std::int64_t first_day = -1;
  };

  void add_familiar(NodeId peer);
  bool absorb_knowledge(const std::vector<NodeSet>& graph);

  NodeId m_owner;
  std::size_t m_universe;
  SocialParams m_params;

  std::vector<std::array<SampleStat, kDailySamples>> m_samples;
  std::vector<double> m_cumulative_s;
  std::vector<SimTime> m_last_end;
  NodeSet m_encountered;
  std::vector<std::size_t> m_known_degree;

  std::int64_t m_window_index = 0;
  NodeSet m_current_window;
  std::vector<NodeSet> m_windows;

  std::vector<NodeSet> m_known_graph;
  mutable NodeSet m_community;
  mutable bool m_community_dirty = true;

  std::uint64_t m_version = 0;
  mutable std::uint64_t m_weights_version = ~std::uint64_t{0};
  mutable SimTime m_weights_time{-1};
  mutable std::vector<double> m_weights;
};

/// Hourly sample index of a time of day.
int daily_sample(SimTime t);

/// Linear-decay combination of the 24 daily samples starting at the sample
/// of `now`: sum_j AD((i + j) mod 24) * (24 - j) / 300.
double social_weight(const SocialProfile& profile, NodeId peer, SimTime now);

/// Sum over encountered peers of social_weight * the peer's learned degree.
double node_importance(const SocialProfile& profile, SimTime now);

/// Mean unique encounters over completed windows; kCommunity counts only
/// current community members. Zero without a completed window.
double centrality(const SocialProfile& profile, CentralityScope scope);

/// Called when a contact closes, with the pair's lifetime contact time.
/// Crossing the familiarity threshold makes the pair mutually familiar; the
/// two nodes then merge their known familiarity graphs, which re-derives
/// their k-clique communities.
void update_community(SocialProfile& a, SocialProfile& b, double cumulative_s,
                      const SocialParams& params);

/// Sum of the owner's social weights towards peers known to be interested in
/// `type`. The owner itself never counts.
double weight_to_interested(const SocialProfile& profile, ContentType type,
                            const InterestRegistry& registry, SimTime now);

/// Members of every k-clique-percolation community containing `node` in the
/// undirected graph `adjacency` (empty if `node` is in no k-clique).
NodeSet percolation_community(const std::vector<NodeSet>& adjacency, NodeId node, std::size_t k);

/// Rows `node,peer,sample,AD,days` for every recorded sample.
void dump_profile(std::ostream& out, const SocialProfile& profile, SimTime now);

} // namespace oppsim
