#include "oppsim/scenario.hpp"

#include <algorithm>
#include <cstdint>
#include <utility>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace oppsim {

namespace {

bool in_range(Point p, Point q, double range2)
{
  const double dx = p.x - q.x;
  const double dy = p.y - q.y;
  return dx * dx + dy * dy <= range2;
}

void sort_schedule(std::vector<ContactEvent>& events)
{
  std::sort(events.begin(), events.end(), [](const ContactEvent& l, const ContactEvent& r) {
    return std::tie(l.start, l.node_a, l.node_b) < std::tie(r.start, r.node_a, r.node_b);
  });
}

std::vector<ContactEvent> detect_serial(std::span<const Trajectory> traj,
                                        const ContactDetectParams& p)
{
  const auto n = traj.size();
  const double range2 = p.radio_range_m * p.radio_range_m;
  std::vector<std::int64_t> open(n * n, -1);
  std::vector<Point> pos(n);
  std::vector<ContactEvent> out;

  for (SimTime t{0}; t < p.duration; t += p.tick)
  {
    for (std::size_t i = 0; i < n; ++i)
      pos[i] = traj[i].position_at(t);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
      {
        auto& since = open[i * n + j];
        const bool near = in_range(pos[i], pos[j], range2);
        if (near && since < 0)
          since = t.count();
        else if (!near && since >= 0)
        {
          out.push_back({static_cast<NodeId>(i), static_cast<NodeId>(j), SimTime(since), t});
          since = -1;
        }
      }
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (open[i * n + j] >= 0)
        out.push_back(
            {static_cast<NodeId>(i), static_cast<NodeId>(j), SimTime(open[i * n + j]), p.duration});
  sort_schedule(out);
  return out;
}

struct Box
{
  double min_x, max_x, min_y, max_y;
};

std::vector<ContactEvent> detect_parallel(std::span<const Trajectory> traj,
                                          const ContactDetectParams& p)
{
  constexpr std::int64_t kBlockTicks = 2048;
  const auto n = static_cast<std::int64_t>(traj.size());
  const double range = p.radio_range_m;
  const double range2 = range * range;
  // Pruning margin keeps the bounding-box test strictly conservative with
  // respect to the per-tick distance comparison.
  const double prune = range * (1.0 + 1e-9) + 1e-9;
  const std::int64_t ticks = (p.duration.count() + p.tick.count() - 1) / p.tick.count();

  std::vector<std::pair<NodeId, NodeId>> pairs;
  pairs.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (NodeId i = 0; i < n; ++i)
    for (NodeId j = i + 1; j < n; ++j)
      pairs.emplace_back(i, j);
  const auto npairs = static_cast<std::int64_t>(pairs.size());

  std::vector<std::int64_t> open(pairs.size(), -1);
  std::vector<Point> block(static_cast<std::size_t>(n * kBlockTicks));
  std::vector<Box> boxes(static_cast<std::size_t>(n));
  std::vector<std::vector<ContactEvent>> found(pairs.size());

  for (std::int64_t b0 = 0; b0 < ticks; b0 += kBlockTicks)
  {
    const std::int64_t len = std::min(kBlockTicks, ticks - b0);

#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i)
    {
      Box box{1e300, -1e300, 1e300, -1e300};
      Point* row = &block[static_cast<std::size_t>(i * kBlockTicks)];
      for (std::int64_t k = 0; k < len; ++k)
      {
        const Point q = traj[static_cast<std::size_t>(i)].position_at(SimTime((b0 + k) * p.tick.count()));
        row[k] = q;
        box.min_x = std::min(box.min_x, q.x);
        box.max_x = std::max(box.max_x, q.x);
        box.min_y = std::min(box.min_y, q.y);
        box.max_y = std::max(box.max_y, q.y);
      }
      boxes[static_cast<std::size_t>(i)] = box;
    }

#pragma omp parallel for schedule(dynamic, 256)
    for (std::int64_t pi = 0; pi < npairs; ++pi)
    {
      const auto [i, j] = pairs[static_cast<std::size_t>(pi)];
      auto& since = open[static_cast<std::size_t>(pi)];
      const Box& bi = boxes[i];
      const Box& bj = boxes[j];
      const double gap_x = std::max(bi.min_x - bj.max_x, bj.min_x - bi.max_x);
      const double gap_y = std::max(bi.min_y - bj.max_y, bj.min_y - bi.max_y);
      if (gap_x > prune || gap_y > prune)
      {
        if (since >= 0)
        {
          found[static_cast<std::size_t>(pi)].push_back(
              {i, j, SimTime(since), SimTime(b0 * p.tick.count())});
          since = -1;
        }
        continue;
      }
      const Point* ri = &block[static_cast<std::size_t>(i) * kBlockTicks];
      const Point* rj = &block[static_cast<std::size_t>(j) * kBlockTicks];
      for (std::int64_t k = 0; k < len; ++k)
      {
        const bool near = in_range(ri[k], rj[k], range2);
        if (near && since < 0)
          since = (b0 + k) * p.tick.count();
        else if (!near && since >= 0)
        {
          found[static_cast<std::size_t>(pi)].push_back(
              {i, j, SimTime(since), SimTime((b0 + k) * p.tick.count())});
          since = -1;
        }
      }
    }
  }

  std::vector<ContactEvent> out;
  for (std::size_t pi = 0; pi < pairs.size(); ++pi)
  {
    out.insert(out.end(), found[pi].begin(), found[pi].end());
    if (open[pi] >= 0)
      out.push_back({pairs[pi].first, pairs[pi].second, SimTime(open[pi]), p.duration});
  }
  sort_schedule(out);
  return out;
}

} // namespace

std::vector<ContactEvent> detect_contacts(std::span<const Trajectory> trajectories,
                                          const ContactDetectParams& params, Execution exec)
{
  if (!(params.radio_range_m > 0.0) || params.tick.count() <= 0 || params.duration.count() <= 0)
    throw std::invalid_argument("detect_contacts: range, tick and duration must be positive");
  return exec == Execution::kSerial ? detect_serial(trajectories, params)
                                    : detect_parallel(trajectories, params);
}

} // namespace oppsim
