#include "oppsim/routing.hpp"

#include <algorithm>

namespace oppsim {

std::string_view to_string(Decision d)
{
  switch (d)
  {
  case Decision::kDeliver:
    return "DELIVER";
  case Decision::kReplicate:
    return "REPLICATE";
  case Decision::kHold:
    return "HOLD";
  }
  return "?";
}

bool is_target(const Message& msg, NodeId peer, const InterestRegistry& peer_registry)
{
  if (msg.destination)
    return *msg.destination == peer;
  return peer != msg.source && peer_registry.own().contains(*msg.content_type);
}

Decision epidemic_decide(NodeId /*peer*/, bool peer_is_target, bool peer_has_message)
{
  if (peer_has_message)
    return Decision::kHold;
  return peer_is_target ? Decision::kDeliver : Decision::kReplicate;
}

namespace {

void require_destination(const Message& msg, std::string_view who)
{
  if (!msg.destination)
    throw StrategyMismatch(std::string(who) + " only forwards destination-addressed messages");
}

} // namespace

Decision bubble_decide(const SocialProfile& carrier, const SocialProfile& peer, const Message& msg)
{
  require_destination(msg, "bubble");
  const NodeId dest = *msg.destination;
  if (peer.owner() == dest)
    return Decision::kDeliver;

  const bool peer_in = peer.community().contains(dest);
  const bool carrier_in = carrier.community().contains(dest);
  if (peer_in)
  {
    if (!carrier_in)
      return Decision::kReplicate;
    return centrality(peer, CentralityScope::kCommunity) >
                   centrality(carrier, CentralityScope::kCommunity)
               ? Decision::kReplicate
               : Decision::kHold;
  }
  if (!carrier_in &&
      centrality(peer, CentralityScope::kGlobal) > centrality(carrier, CentralityScope::kGlobal))
    return Decision::kReplicate;
  return Decision::kHold;
}

Decision dlife_decide(const SocialProfile& carrier, const SocialProfile& peer, const Message& msg,
                      SimTime now)
{
  require_destination(msg, "dlife");
  const NodeId dest = *msg.destination;
  if (peer.owner() == dest)
    return Decision::kDeliver;

  const double peer_w = peer.weights_at(now)[dest];
  const double carrier_w = carrier.weights_at(now)[dest];
  if (peer_w > carrier_w)
    return Decision::kReplicate;
  if (peer_w == 0.0 && carrier_w == 0.0 && node_importance(peer, now) > node_importance(carrier, now))
    return Decision::kReplicate;
  return Decision::kHold;
}

Decision scorp_decide(const SocialProfile& carrier, const SocialProfile& peer,
                      const InterestSet& peer_interests, const Message& msg,
                      const InterestRegistry& carrier_registry,
                      const InterestRegistry& peer_registry, SimTime now)
{
  if (!msg.content_type)
    throw StrategyMismatch("scorp only forwards content-typed messages");
  const ContentType type = *msg.content_type;
  if (peer_interests.contains(type) && peer.owner() != msg.source)
    return Decision::kDeliver;
  return weight_to_interested(peer, type, peer_registry, now) >
                 weight_to_interested(carrier, type, carrier_registry, now)
             ? Decision::kReplicate
             : Decision::kHold;
}

namespace {

class Epidemic final : public ForwardingStrategy
{
public:
  std::string_view name() const override { return "epidemic"; }
  bool content_oriented() const override { return false; }
  Decision decide(const DecisionContext& c) const override
  {
    return epidemic_decide(c.peer.id, is_target(*c.message, c.peer.id, *c.peer.registry),
                           c.peer_has_message);
  }
};

class BubbleRap final : public ForwardingStrategy
{
public:
  std::string_view name() const override { return "bubble"; }
  bool uses_communities() const override { return true; }
  Decision decide(const DecisionContext& c) const override
  {
    if (c.peer_has_message)
      return Decision::kHold;
    return bubble_decide(*c.carrier.profile, *c.peer.profile, *c.message);
  }
};

class DLife final : public ForwardingStrategy
{
public:
  std::string_view name() const override { return "dlife"; }
  Decision decide(const DecisionContext& c) const override
  {
    if (c.peer_has_message)
      return Decision::kHold;
    return dlife_decide(*c.carrier.profile, *c.peer.profile, *c.message, c.now);
  }
};

class Scorp final : public ForwardingStrategy
{
public:
  std::string_view name() const override { return "scorp"; }
  bool content_oriented() const override { return true; }
  Decision decide(const DecisionContext& c) const override
  {
    if (c.peer_has_message)
      return Decision::kHold;
    return scorp_decide(*c.carrier.profile, *c.peer.profile, c.peer.registry->own(), *c.message,
                        *c.carrier.registry, *c.peer.registry, c.now);
  }
};

} // namespace

std::unique_ptr<ForwardingStrategy> make_strategy(std::string_view name)
{
  if (name == "epidemic")
    return std::make_unique<Epidemic>();
  if (name == "bubble")
    return std::make_unique<BubbleRap>();
  if (name == "dlife")
    return std::make_unique<DLife>();
  if (name == "scorp")
    return std::make_unique<Scorp>();
  throw std::invalid_argument("unknown strategy `" + std::string(name) +
                              "` (expected epidemic, bubble, dlife or scorp)");
}

// Buffers ----------------------------------------------------------------------

bool BufferState::contains(MessageId id) const
{
  return std::any_of(m_resident.begin(), m_resident.end(),
                     [&](const Resident& r) { return r.id == id; });
}

void BufferState::insert(Resident r)
{
  if (contains(r.id))
    throw BookkeepingError("message " + std::to_string(r.id) + " already resident");
  m_resident.push_back(r);
  m_occupancy += r.size_bytes;
}

void BufferState::remove(MessageId id)
{
  auto it = std::find_if(m_resident.begin(), m_resident.end(),
                         [&](const Resident& r) { return r.id == id; });
  if (it == m_resident.end())
    throw BookkeepingError("message " + std::to_string(id) + " not resident");
  m_occupancy -= it->size_bytes;
  m_resident.erase(it);
}

AdmitResult buffer_admit(BufferState& buffer, Resident msg,
                         const std::function<bool(MessageId)>& is_protected)
{
  if (buffer.contains(msg.id))
    throw BookkeepingError("duplicate insert of message " + std::to_string(msg.id));
  AdmitResult result;
  if (buffer.unlimited())
  {
    buffer.insert(msg);
    result.accepted = true;
    return result;
  }
  if (msg.size_bytes > buffer.capacity())
    return result;

  std::uint64_t occupancy = buffer.occupancy();
  std::vector<MessageId> victims;
  for (const auto& r : buffer.resident())
  {
    if (occupancy + msg.size_bytes <= buffer.capacity())
      break;
    if (is_protected && is_protected(r.id))
      continue;
    victims.push_back(r.id);
    occupancy -= r.size_bytes;
  }
  if (occupancy + msg.size_bytes > buffer.capacity())
    return result;

  for (auto id : victims)
    buffer.remove(id);
  buffer.insert(msg);
  result.accepted = true;
  result.evicted = std::move(victims);
  return result;
}

TtlStatus ttl_check(const Message& msg, SimTime now)
{
  return now - msg.created_at > msg.ttl ? TtlStatus::kExpire : TtlStatus::kKeep;
}

} // namespace oppsim
