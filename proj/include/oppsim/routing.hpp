#pragma once

#include "oppsim/social.hpp"
#include "oppsim/types.hpp"

#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace oppsim {

enum class Decision
{
  kDeliver,
  kReplicate,
  kHold,
};

std::string_view to_string(Decision d);

/// What a strategy may look at for one side of an encounter.
struct NodeView
{
  NodeId id = 0;
  const SocialProfile* profile = nullptr;
  const InterestRegistry* registry = nullptr;
};

struct DecisionContext
{
  NodeView carrier;
  NodeView peer;
  const Message* message = nullptr;
  SimTime now{0};
  bool peer_has_message = false;
};

class ForwardingStrategy
{
public:
  virtual ~ForwardingStrategy() = default;
  virtual std::string_view name() const = 0;
  virtual Decision decide(const DecisionContext& ctx) const = 0;
  /// Whether decisions read k-clique communities (they are derived lazily).
  virtual bool uses_communities() const { return false; }
  /// Content-typed (true) or destination-addressed (false) workloads.
  virtual bool content_oriented() const { return false; }
};

/// Builds `epidemic`, `bubble`, `dlife` or `scorp`; throws std::invalid_argument
/// for anything else.
std::unique_ptr<ForwardingStrategy> make_strategy(std::string_view name);

// Stateless decision rules -----------------------------------------------------

/// Peer is a target when it is the destination or interested in the type.
bool is_target(const Message& msg, NodeId peer, const InterestRegistry& peer_registry);

Decision epidemic_decide(NodeId peer, bool peer_is_target, bool peer_has_message);

Decision bubble_decide(const SocialProfile& carrier, const SocialProfile& peer, const Message& msg);

Decision dlife_decide(const SocialProfile& carrier, const SocialProfile& peer, const Message& msg,
                      SimTime now);

Decision scorp_decide(const SocialProfile& carrier, const SocialProfile& peer,
                      const InterestSet& peer_interests, const Message& msg,
                      const InterestRegistry& carrier_registry,
                      const InterestRegistry& peer_registry, SimTime now);

// Buffers ----------------------------------------------------------------------

struct Resident
{
  MessageId id = 0;
  std::uint32_t size_bytes = 0;
};

class BufferState
{
public:
  explicit BufferState(std::uint64_t capacity_bytes = 2'000'000) : m_capacity(capacity_bytes) {}

  bool unlimited() const { return m_capacity == kUnlimitedBuffer; }
  std::uint64_t capacity() const { return m_capacity; }
  std::uint64_t occupancy() const { return m_occupancy; }
  /// Oldest arrival first.
  const std::vector<Resident>& resident() const { return m_resident; }
  bool contains(MessageId id) const;

  void insert(Resident r);
  void remove(MessageId id);

private:
  std::uint64_t m_capacity;
  std::uint64_t m_occupancy = 0;
  std::vector<Resident> m_resident;
};

struct AdmitResult
{
  bool accepted = false;
  std::vector<MessageId> evicted;
};

/// Drop-oldest admission. Messages for which `is_protected` returns true are
/// never evicted; if the message cannot fit even after evicting every
/// unprotected resident it is rejected and nothing is evicted.
AdmitResult buffer_admit(BufferState& buffer, Resident msg,
                         const std::function<bool(MessageId)>& is_protected = {});

enum class TtlStatus
{
  kKeep,
  kExpire,
};

TtlStatus ttl_check(const Message& msg, SimTime now);

} // namespace oppsim
