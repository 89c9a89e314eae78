#include "oppsim/social.hpp"

#include <algorithm>
#include <deque>

namespace oppsim {

namespace {

/// Bron-Kerbosch with Tomita pivoting; reports maximal cliques of at least
/// `min_size` vertices.
class CliqueCollector
{
public:
  CliqueCollector(const std::vector<NodeSet>& adj, std::size_t min_size)
      : m_adj(adj), m_min(min_size)
  {
  }

  void run(NodeSet candidates)
  {
    NodeSet r(candidates.universe());
    NodeSet x(candidates.universe());
    expand(r, std::move(candidates), std::move(x), 0);
  }

  std::vector<NodeSet> cliques;

private:
  void expand(NodeSet& r, NodeSet p, NodeSet x, std::size_t r_size)
  {
    if (p.empty())
    {
      if (x.empty() && r_size >= m_min)
        cliques.push_back(r);
      return;
    }
    if (r_size + p.count() < m_min)
      return;

    NodeId pivot = 0;
    std::size_t best = 0;
    bool have_pivot = false;
    auto consider = [&](NodeId u) {
      const auto c = p.intersection_count(m_adj[u]);
      if (!have_pivot || c > best)
      {
        pivot = u;
        best = c;
        have_pivot = true;
      }
    };
    p.for_each(consider);
    x.for_each(consider);

    const NodeSet branch = p - m_adj[pivot];
    branch.for_each([&](NodeId v) {
      r.insert(v);
      expand(r, p & m_adj[v], x & m_adj[v], r_size + 1);
      r.erase(v);
      p.erase(v);
      x.insert(v);
    });
  }

  const std::vector<NodeSet>& m_adj;
  std::size_t m_min;
};

/// Community of every node: union of the maximal cliques (size >= k) that
/// percolate into each other through k - 1 shared vertices.
std::vector<NodeSet> all_communities(const std::vector<NodeSet>& adjacency, std::size_t k)
{
  const std::size_t n = adjacency.size();
  NodeSet everyone(n);
  for (NodeId v = 0; v < n; ++v)
    if (adjacency[v].count() + 1 >= k)
      everyone.insert(v);

  CliqueCollector all(adjacency, k);
  all.run(everyone);
  const auto& cliques = all.cliques;

  std::vector<std::vector<std::size_t>> cliques_of(n);
  for (std::size_t c = 0; c < cliques.size(); ++c)
    cliques[c].for_each([&](NodeId v) { cliques_of[v].push_back(c); });

  std::vector<std::size_t> parent(cliques.size());
  for (std::size_t c = 0; c < parent.size(); ++c)
    parent[c] = c;
  auto find = [&](std::size_t x) {
    while (parent[x] != x)
      x = parent[x] = parent[parent[x]];
    return x;
  };

  // Shared-vertex counts via the vertex index instead of all clique pairs.
  std::vector<std::size_t> shared(cliques.size(), 0);
  std::vector<std::size_t> touched;
  for (std::size_t c = 0; c < cliques.size(); ++c)
  {
    touched.clear();
    cliques[c].for_each([&](NodeId v) {
      for (auto d : cliques_of[v])
        if (d > c && shared[d]++ == 0)
          touched.push_back(d);
    });
    for (auto d : touched)
    {
      if (shared[d] + 1 >= k)
        parent[find(d)] = find(c);
      shared[d] = 0;
    }
  }

  std::vector<NodeSet> merged(cliques.size(), NodeSet(n));
  for (std::size_t c = 0; c < cliques.size(); ++c)
    merged[find(c)].unite(cliques[c]);
  std::vector<NodeSet> out(n, NodeSet(n));
  for (NodeId v = 0; v < n; ++v)
    for (auto c : cliques_of[v])
      out[v].unite(merged[find(c)]);
  return out;
}

struct CacheEntry
{
  std::size_t k;
  std::uint64_t hash;
  std::vector<NodeSet> adjacency;
  std::vector<NodeSet> communities;
};

} // namespace

NodeSet percolation_community(const std::vector<NodeSet>& adjacency, NodeId node, std::size_t k)
{
  k = std::max<std::size_t>(k, 2);
  if (adjacency[node].count() + 1 < k)
    return NodeSet(adjacency.size());

  // Gossip drives many profiles to the same known graph, so results are
  // memoized per graph. Per thread, so parallel runs share nothing.
  thread_local std::deque<CacheEntry> cache;
  std::uint64_t h = 0;
  for (const auto& row : adjacency)
    h = h * 0x9e3779b97f4a7c15ULL + row.hash();
  for (const auto& e : cache)
    if (e.k == k && e.hash == h && e.adjacency == adjacency)
      return e.communities[node];

  if (cache.size() >= 64)
    cache.pop_front();
  cache.push_back({k, h, adjacency, all_communities(adjacency, k)});
  return cache.back().communities[node];
}

const NodeSet& SocialProfile::community() const
{
  if (m_community_dirty)
  {
    m_community.insert(m_owner);
    m_community.unite(m_known_graph[m_owner]);
    m_community.unite(percolation_community(m_known_graph, m_owner, m_params.k));
    m_community_dirty = false;
  }
  return m_community;
}

void SocialProfile::add_familiar(NodeId peer)
{
  if (!m_known_graph[m_owner].contains(peer))
  {
    m_known_graph[m_owner].insert(peer);
    m_known_graph[peer].insert(m_owner);
    m_community_dirty = true;
  }
}

bool SocialProfile::absorb_knowledge(const std::vector<NodeSet>& graph)
{
  bool changed = false;
  for (std::size_t v = 0; v < m_known_graph.size(); ++v)
    changed |= m_known_graph[v].unite(graph[v]);
  m_community_dirty |= changed;
  return changed;
}

void update_community(SocialProfile& a, SocialProfile& b, double cumulative_s,
                      const SocialParams& params)
{
  if (cumulative_s >= params.familiar_threshold_s)
  {
    a.add_familiar(b.owner());
    b.add_familiar(a.owner());
  }
  a.absorb_knowledge(b.m_known_graph);
  b.absorb_knowledge(a.m_known_graph);
}

} // namespace oppsim
