#include "oppsim/rng.hpp"
#include "oppsim/scenario.hpp"

#include <algorithm>
#include <numeric>

namespace oppsim {

std::size_t count_expected_deliveries(std::span<const Message> messages,
                                      std::span<const InterestSet> interests)
{
  std::size_t total = 0;
  for (const auto& m : messages)
  {
    if (m.destination)
    {
      ++total;
      continue;
    }
    for (std::size_t n = 0; n < interests.size(); ++n)
      if (n != m.source && interests[n].contains(*m.content_type))
        ++total;
  }
  return total;
}

int trace_creation_rate(int msg_per_dst)
{
  switch (msg_per_dst)
  {
  case 1:
  case 5:
  case 10:
    return 35;
  case 20:
    return 70;
  case 35:
    return 140;
  default:
    throw ValidationError({"msg_per_dst must be one of 1, 5, 10, 20, 35 (got " +
                           std::to_string(msg_per_dst) + ")"});
  }
}

namespace {

std::uint32_t draw_size(Rng& rng)
{
  return static_cast<std::uint32_t>(rng.uniform_int(1000, 100000));
}

SimTime evenly_spaced(std::size_t k, int per_day)
{
  const auto day = static_cast<std::int64_t>(k) / per_day;
  const auto slot = static_cast<std::int64_t>(k) % per_day;
  return kDay * day + SimTime(slot * kDay.count() / per_day);
}

} // namespace

Workload build_trace_workload(int msg_per_dst, WorkloadVariant variant, SimTime ttl,
                              std::uint64_t seed, std::size_t num_destinations)
{
  const int rate = trace_creation_rate(msg_per_dst);
  if (num_destinations == 0)
    throw ValidationError({"num_destinations must be positive"});

  Rng rng = Rng::derive(seed, 0x7472616365ULL);
  Workload w;
  w.interests.resize(num_destinations + 1);

  if (variant == WorkloadVariant::kDestination)
  {
    const std::size_t total = static_cast<std::size_t>(msg_per_dst) * num_destinations;
    for (std::size_t k = 0; k < total; ++k)
    {
      Message m;
      m.id = static_cast<MessageId>(k);
      m.source = 0;
      m.destination = static_cast<NodeId>(1 + k % num_destinations);
      m.size_bytes = draw_size(rng);
      m.created_at = evenly_spaced(k, rate);
      m.ttl = ttl;
      w.messages.push_back(m);
    }
  }
  else
  {
    if (static_cast<std::size_t>(msg_per_dst) > num_destinations)
      throw ValidationError({"more interests per receiver than content types"});
    for (std::size_t k = 0; k < num_destinations; ++k)
    {
      w.type_names.push_back("c" + std::to_string(k));
      Message m;
      m.id = static_cast<MessageId>(k);
      m.source = 0;
      m.content_type = static_cast<ContentType>(k);
      m.size_bytes = draw_size(rng);
      m.created_at = evenly_spaced(k, rate);
      m.ttl = ttl;
      w.messages.push_back(m);
    }
    std::vector<ContentType> types(num_destinations);
    std::iota(types.begin(), types.end(), ContentType{0});
    for (std::size_t n = 1; n <= num_destinations; ++n)
    {
      // Partial Fisher-Yates: msg_per_dst distinct types.
      for (int i = 0; i < msg_per_dst; ++i)
      {
        const auto j = rng.uniform_int(static_cast<std::uint64_t>(i), num_destinations - 1);
        std::swap(types[static_cast<std::size_t>(i)], types[j]);
        w.interests[n].insert(types[static_cast<std::size_t>(i)]);
      }
    }
  }
  w.expected_deliveries = count_expected_deliveries(w.messages, w.interests);
  return w;
}

Workload build_synthetic_workload(WorkloadVariant variant, std::size_t group_size, SimTime duration,
                                  std::uint64_t seed)
{
  if (group_size < 2)
    throw ValidationError({"synthetic population needs at least 2 nodes per group"});
  const std::size_t g = group_size;
  const auto src_a = NodeId{0};
  const auto src_b = static_cast<NodeId>(2 * g);

  Rng rng = Rng::derive(seed, 0x73796e7468ULL);
  Workload w;
  w.interests.resize(3 * g);

  if (variant == WorkloadVariant::kDestination)
  {
    // Node 0 (A) targets M and B; node 2g (B) targets A and M.
    std::vector<NodeId> targets_a;
    std::vector<NodeId> targets_b;
    for (std::size_t n = g; n < 3 * g; ++n)
      targets_a.push_back(static_cast<NodeId>(n));
    for (std::size_t n = 0; n < 2 * g; ++n)
      targets_b.push_back(static_cast<NodeId>(n));

    constexpr std::size_t kBatches = 4;
    const std::size_t per_batch = (targets_a.size() + kBatches - 1) / kBatches;
    const SimTime spacing = duration / 8;
    MessageId next_id = 0;
    for (std::size_t b = 0; b < kBatches; ++b)
    {
      for (const auto& [src, targets] :
           {std::pair{src_a, &targets_a}, std::pair{src_b, &targets_b}})
      {
        for (std::size_t k = b * per_batch; k < std::min(targets->size(), (b + 1) * per_batch); ++k)
        {
          Message m;
          m.id = next_id++;
          m.source = src;
          m.destination = (*targets)[k];
          m.size_bytes = draw_size(rng);
          m.created_at = spacing * static_cast<std::int64_t>(b);
          m.ttl = duration;
          w.messages.push_back(m);
        }
      }
    }
  }
  else
  {
    constexpr ContentType kReading = 0;
    constexpr ContentType kGames = 1;
    w.type_names = {"reading", "games"};
    for (std::size_t n = 0; n < g; ++n)
      w.interests[n] = {kReading};
    for (std::size_t n = g; n < 2 * g; ++n)
      w.interests[n] = {kReading, kGames};
    for (std::size_t n = 2 * g; n < 3 * g; ++n)
      w.interests[n] = {kGames};

    // One message per content type: node 0 publishes games (consumed by M and
    // B), node 2g publishes reading (consumed by A and M).
    for (const auto& [src, type] : {std::pair{src_a, kGames}, std::pair{src_b, kReading}})
    {
      Message m;
      m.id = static_cast<MessageId>(w.messages.size());
      m.source = src;
      m.content_type = type;
      m.size_bytes = draw_size(rng);
      m.created_at = SimTime{0};
      m.ttl = duration;
      w.messages.push_back(m);
    }
  }
  w.expected_deliveries = count_expected_deliveries(w.messages, w.interests);
  return w;
}

} // namespace oppsim
