#include "oppsim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace oppsim {

VertexId Map::add_vertex(Point p)
{
  m_points.push_back(p);
  m_adjacency.emplace_back();
  return static_cast<VertexId>(m_points.size() - 1);
}

void Map::add_edge(VertexId a, VertexId b, double length_m)
{
  if (a >= vertex_count() || b >= vertex_count())
    throw std::invalid_argument("map edge references unknown vertex");
  if (a == b)
    throw std::invalid_argument("map edge must join distinct vertices");
  if (length_m < 0.0)
    length_m = std::hypot(m_points[a].x - m_points[b].x, m_points[a].y - m_points[b].y);
  if (!(length_m > 0.0))
    throw std::invalid_argument("map edge length must be positive");
  m_adjacency[a].push_back({b, length_m});
  m_adjacency[b].push_back({a, length_m});
  for (auto v : {a, b})
    std::sort(m_adjacency[v].begin(), m_adjacency[v].end(),
              [](const MapEdge& l, const MapEdge& r) { return l.to < r.to; });
}

bool Map::connected() const
{
  if (m_points.empty())
    return false;
  std::vector<char> seen(vertex_count(), 0);
  std::vector<VertexId> stack{0};
  seen[0] = 1;
  std::size_t reached = 1;
  while (!stack.empty())
  {
    const auto v = stack.back();
    stack.pop_back();
    for (const auto& e : m_adjacency[v])
      if (!seen[e.to])
      {
        seen[e.to] = 1;
        ++reached;
        stack.push_back(e.to);
      }
  }
  return reached == vertex_count();
}

Map Map::grid(std::size_t rows, std::size_t cols, double spacing_m)
{
  Map m;
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c)
      m.add_vertex({static_cast<double>(c) * spacing_m, static_cast<double>(r) * spacing_m});
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c)
    {
      const auto v = static_cast<VertexId>(r * cols + c);
      if (c + 1 < cols)
        m.add_edge(v, v + 1, spacing_m);
      if (r + 1 < rows)
        m.add_edge(v, static_cast<VertexId>(v + cols), spacing_m);
    }
  return m;
}

namespace {

std::vector<double> dijkstra(const Map& map, VertexId source)
{
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(map.vertex_count(), inf);
  using Item = std::pair<double, VertexId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
  dist[source] = 0.0;
  open.push({0.0, source});
  while (!open.empty())
  {
    const auto [d, v] = open.top();
    open.pop();
    if (d > dist[v])
      continue;
    for (const auto& e : map.neighbors(v))
    {
      const double nd = d + e.length_m;
      if (nd < dist[e.to])
      {
        dist[e.to] = nd;
        open.push({nd, e.to});
      }
    }
  }
  return dist;
}

} // namespace

Path shortest_path(const Map& map, VertexId from, VertexId to)
{
  if (from >= map.vertex_count() || to >= map.vertex_count())
    throw std::invalid_argument("shortest_path: unknown vertex");
  if (from == to)
    return Path{{from}, 0.0};

  const auto to_target = dijkstra(map, to);
  const double total = to_target[from];
  if (!std::isfinite(total))
    throw NoPathError("no path between vertices " + std::to_string(from) + " and " +
                      std::to_string(to));

  // Walk forward taking the smallest-id neighbour that stays on some shortest
  // path; this yields the lexicographically smallest optimal sequence.
  const double eps = 1e-9 * std::max(1.0, total);
  Path path{{from}, 0.0};
  VertexId cur = from;
  while (cur != to)
  {
    bool advanced = false;
    for (const auto& e : map.neighbors(cur))
    {
      if (std::abs(path.length_m + e.length_m + to_target[e.to] - total) <= eps)
      {
        path.length_m += e.length_m;
        path.vertices.push_back(e.to);
        cur = e.to;
        advanced = true;
        break;
      }
    }
    if (!advanced)
      throw NoPathError("shortest_path: numeric inconsistency while tracing path");
  }
  return path;
}

} // namespace oppsim
