#include "oppsim/rng.hpp"
#include "oppsim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace oppsim {

std::size_t SyntheticParams::node_count() const
{
  std::size_t n = 0;
  for (const auto& g : groups)
    n += g.node_count;
  return n;
}

void SyntheticParams::validate() const
{
  std::vector<std::string> issues;
  if (!(speed_max > 0.0))
    issues.push_back("speed_max must be > 0");
  if (!(speed_min > 0.0) || speed_min > speed_max)
    issues.push_back("speed_min must be in (0, speed_max]");
  if (!(pause_time_s >= 0.0))
    issues.push_back("pause_time_s must be >= 0");
  if (!(radio_range_m > 0.0))
    issues.push_back("radio_range_m must be > 0");
  if (tick.count() <= 0)
    issues.push_back("tick must be > 0");
  if (duration.count() <= 0)
    issues.push_back("duration must be > 0");
  if (!map.connected())
    issues.push_back("map is empty or disconnected");
  if (node_count() == 0)
    issues.push_back("no nodes in any group");
  for (const auto& g : groups)
  {
    if (g.home_zone.empty())
      issues.push_back("group " + g.name + " has an empty home zone");
    for (auto v : g.home_zone)
      if (v >= map.vertex_count())
        issues.push_back("group " + g.name + " home vertex " + std::to_string(v) +
                         " is not on the map");
  }
  if (!issues.empty())
    throw ValidationError(std::move(issues));
}

SyntheticParams SyntheticParams::defaults(std::size_t group_size, std::size_t rows,
                                          std::size_t cols, double spacing_m)
{
  SyntheticParams p;
  p.map = Map::grid(rows, cols, spacing_m);
  const char* names[] = {"A", "M", "B"};
  for (std::size_t g = 0; g < 3; ++g)
  {
    GroupSpec spec{names[g], group_size, {}};
    const std::size_t c0 = g * cols / 3;
    const std::size_t c1 = std::max(c0 + 1, (g + 1) * cols / 3);
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = c0; c < c1 && c < cols; ++c)
        spec.home_zone.push_back(static_cast<VertexId>(r * cols + c));
    p.groups.push_back(std::move(spec));
  }
  return p;
}

namespace {

Point leg_position(const Leg& leg, SimTime t)
{
  const auto span = (leg.end - leg.start).count();
  if (span <= 0)
    return leg.to;
  double f = static_cast<double>((t - leg.start).count()) / static_cast<double>(span);
  f = std::clamp(f, 0.0, 1.0);
  return {leg.from.x + f * (leg.to.x - leg.from.x), leg.from.y + f * (leg.to.y - leg.from.y)};
}

} // namespace

Point Trajectory::position_at(SimTime t) const
{
  if (legs.empty())
    return {};
  // The active leg is the first one whose end lies strictly after t.
  auto it = std::upper_bound(legs.begin(), legs.end(), t,
                             [](SimTime v, const Leg& l) { return v < l.end; });
  if (it == legs.end())
    return legs.back().to;
  return leg_position(*it, t);
}

std::vector<Trajectory> simulate_mobility(const SyntheticParams& params, std::uint64_t seed)
{
  params.validate();
  const auto& map = params.map;
  const auto vcount = map.vertex_count();
  std::vector<std::optional<Path>> path_cache(vcount * vcount);
  auto path_between = [&](VertexId a, VertexId b) -> const Path& {
    auto& slot = path_cache[static_cast<std::size_t>(a) * vcount + b];
    if (!slot)
      slot = shortest_path(map, a, b);
    return *slot;
  };

  const double duration_ms = static_cast<double>(params.duration.count());
  const double pause_ms = params.pause_time_s * 1000.0;

  std::vector<Trajectory> out;
  out.reserve(params.node_count());
  NodeId node = 0;
  for (const auto& group : params.groups)
  {
    for (std::size_t i = 0; i < group.node_count; ++i, ++node)
    {
      Rng rng = Rng::derive(seed, node);
      Trajectory traj;
      VertexId cur = group.home_zone[rng.uniform_int(0, group.home_zone.size() - 1)];
      double t = 0.0;
      auto push_leg = [&](double t0, double t1, Point a, Point b) {
        const auto s = SimTime(static_cast<std::int64_t>(std::llround(t0)));
        const auto e = SimTime(static_cast<std::int64_t>(std::llround(std::min(t1, duration_ms))));
        if (e > s)
          traj.legs.push_back({s, e, a, b});
      };

      while (t < duration_ms)
      {
        if (pause_ms > 0.0)
        {
          push_leg(t, t + pause_ms, map.point(cur), map.point(cur));
          t += pause_ms;
        }
        if (t >= duration_ms)
          break;

        VertexId dest = cur;
        if (vcount > 1)
        {
          dest = static_cast<VertexId>(rng.uniform_int(0, vcount - 2));
          if (dest >= cur)
            ++dest;
        }
        const double speed = params.speed_min == params.speed_max
                                 ? params.speed_max
                                 : rng.uniform(params.speed_min, params.speed_max);
        ++traj.movements;

        const auto& path = path_between(cur, dest);
        for (std::size_t k = 0; k + 1 < path.vertices.size() && t < duration_ms; ++k)
        {
          const auto a = path.vertices[k];
          const auto b = path.vertices[k + 1];
          double len = 0.0;
          for (const auto& e : map.neighbors(a))
            if (e.to == b)
            {
              len = e.length_m;
              break;
            }
          const double dt = len / speed * 1000.0;
          push_leg(t, t + dt, map.point(a), map.point(b));
          t += dt;
        }
        cur = dest;
        if (pause_ms <= 0.0 && path.vertices.size() <= 1)
          break; // single-vertex map with no pause: nothing ever changes
      }
      if (traj.legs.empty())
        traj.legs.push_back({SimTime{0}, params.duration, map.point(cur), map.point(cur)});
      out.push_back(std::move(traj));
    }
  }
  return out;
}

SyntheticResult generate_synthetic(const SyntheticParams& params, std::uint64_t seed, Execution exec)
{
  auto trajectories = simulate_mobility(params, seed);
  SyntheticResult result;
  result.contacts = detect_contacts(trajectories,
                                    {params.radio_range_m, params.tick, params.duration}, exec);
  result.movement_counts.reserve(trajectories.size());
  for (const auto& t : trajectories)
    result.movement_counts.push_back(t.movements);
  return result;
}

} // namespace oppsim
