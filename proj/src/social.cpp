#include "oppsim/social.hpp"

#include <algorithm>
#include <ostream>

namespace oppsim {

InterestRegistry::InterestRegistry(NodeId owner, InterestSet own) : m_owner(owner)
{
  m_entries[owner] = std::move(own);
}

const InterestSet& InterestRegistry::own() const
{
  static const InterestSet empty;
  auto it = m_entries.find(m_owner);
  return it == m_entries.end() ? empty : it->second;
}

void InterestRegistry::learn(NodeId node, const InterestSet& interests)
{
  m_entries[node].insert(interests.begin(), interests.end());
}

bool InterestRegistry::interested(NodeId node, ContentType type) const
{
  auto it = m_entries.find(node);
  return it != m_entries.end() && it->second.contains(type);
}

SocialProfile::SocialProfile(NodeId owner, std::size_t universe, SocialParams params)
    : m_owner(owner),
      m_universe(universe),
      m_params(params),
      m_samples(universe),
      m_cumulative_s(universe, 0.0),
      m_last_end(universe, SimTime{-1}),
      m_encountered(universe),
      m_known_degree(universe, 0),
      m_current_window(universe),
      m_known_graph(universe, NodeSet(universe)),
      m_community(universe)
{
  if (owner >= universe)
    throw std::invalid_argument("profile owner outside the node universe");
  if (params.window_len.count() <= 0)
    throw std::invalid_argument("centrality window must be positive");
  m_community.insert(owner);
}

int daily_sample(SimTime t)
{
  return static_cast<int>((t.count() / kHour.count()) % kDailySamples);
}

void SocialProfile::record_contact(NodeId peer, SimTime start, SimTime end)
{
  if (peer >= m_universe || peer == m_owner)
    throw std::invalid_argument("record_contact: invalid peer");
  if (start >= end)
    throw std::invalid_argument("record_contact: start must precede end");
  if (start < m_last_end[peer])
    throw BookkeepingError("overlapping contact between " + std::to_string(m_owner) + " and " +
                           std::to_string(peer));
  m_last_end[peer] = end;

  for (SimTime t = start; t < end;)
  {
    const SimTime slot_end = kHour * (t.count() / kHour.count() + 1);
    const SimTime seg_end = std::min(end, slot_end);
    auto& stat = m_samples[peer][static_cast<std::size_t>(daily_sample(t))];
    if (stat.first_day < 0)
      stat.first_day = t.count() / kDay.count();
    stat.total_s += to_seconds(seg_end - t);
    t = seg_end;
  }
  m_cumulative_s[peer] += to_seconds(end - start);
  note_encounter(peer);

  roll_windows(end);
  m_current_window.insert(peer);
  ++m_version;
}

int SocialProfile::day_count(NodeId peer, int sample, SimTime now) const
{
  const auto& stat = m_samples[peer][static_cast<std::size_t>(sample)];
  if (stat.first_day < 0)
    return 0;
  const std::int64_t today = now.count() / kDay.count();
  const bool started_today = now - kDay * today >= kHour * sample;
  const auto days = today - stat.first_day + (started_today ? 1 : 0);
  return static_cast<int>(std::max<std::int64_t>(days, 1));
}

double SocialProfile::average_duration(NodeId peer, int sample, SimTime now) const
{
  const int days = day_count(peer, sample, now);
  if (days == 0)
    return 0.0;
  return m_samples[peer][static_cast<std::size_t>(sample)].total_s / days;
}

void SocialProfile::note_encounter(NodeId peer)
{
  if (peer != m_owner)
    m_encountered.insert(peer);
}

void SocialProfile::roll_windows(SimTime now)
{
  const std::int64_t target = now.count() / m_params.window_len.count();
  while (m_window_index < target)
  {
    m_windows.push_back(m_current_window);
    m_current_window.clear();
    ++m_window_index;
  }
}

const std::vector<double>& SocialProfile::weights_at(SimTime now) const
{
  if (m_weights_version != m_version || m_weights_time != now)
  {
    m_weights.assign(m_universe, 0.0);
    m_encountered.for_each([&](NodeId p) { m_weights[p] = social_weight(*this, p, now); });
    m_weights_version = m_version;
    m_weights_time = now;
  }
  return m_weights;
}

double social_weight(const SocialProfile& profile, NodeId peer, SimTime now)
{
  constexpr double norm = kDailySamples * (kDailySamples + 1) / 2.0;
  const int i = daily_sample(now);
  double w = 0.0;
  for (int j = 0; j < kDailySamples; ++j)
  {
    const double ad = profile.average_duration(peer, (i + j) % kDailySamples, now);
    w += ad * static_cast<double>(kDailySamples - j);
  }
  return w / norm;
}

double node_importance(const SocialProfile& profile, SimTime now)
{
  const auto& weights = profile.weights_at(now);
  double total = 0.0;
  profile.encountered().for_each([&](NodeId b) {
    total += weights[b] * static_cast<double>(profile.known_degree(b));
  });
  return total;
}

double centrality(const SocialProfile& profile, CentralityScope scope)
{
  const auto& windows = profile.window_history();
  if (windows.empty())
    return 0.0;
  double sum = 0.0;
  if (scope == CentralityScope::kGlobal)
  {
    for (const auto& w : windows)
      sum += static_cast<double>(w.count());
  }
  else
  {
    const auto& community = profile.community();
    for (const auto& w : windows)
      sum += static_cast<double>(w.intersection_count(community));
  }
  return sum / static_cast<double>(windows.size());
}

double weight_to_interested(const SocialProfile& profile, ContentType type,
                            const InterestRegistry& registry, SimTime now)
{
  const auto& weights = profile.weights_at(now);
  double total = 0.0;
  for (const auto& [node, interests] : registry.entries())
    if (node != profile.owner() && node < weights.size() && interests.contains(type))
      total += weights[node];
  return total;
}

void dump_profile(std::ostream& out, const SocialProfile& profile, SimTime now)
{
  for (NodeId peer = 0; peer < profile.universe(); ++peer)
    for (int s = 0; s < kDailySamples; ++s)
    {
      const int days = profile.day_count(peer, s, now);
      if (days == 0)
        continue;
      out << profile.owner() << ',' << peer << ',' << s << ','
          << profile.average_duration(peer, s, now) << ',' << days << '\n';
    }
}

} // namespace oppsim
