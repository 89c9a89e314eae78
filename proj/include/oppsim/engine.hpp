#pragma once

#include "oppsim/metrics.hpp"
#include "oppsim/routing.hpp"
#include "oppsim/scenario.hpp"
#include "oppsim/social.hpp"
#include "oppsim/types.hpp"

#include <cstdint>
#include <deque>
#include <iosfwd>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

namespace oppsim {

/// Milliseconds needed to push `size_bytes` over a `bandwidth_bps` link,
/// rounded up. kInfiniteBandwidth yields zero. Non-positive inputs throw
/// std::invalid_argument.
SimTime transfer_duration(std::int64_t size_bytes, std::int64_t bandwidth_bps);

/// Complete input of one run.
struct Scenario
{
  std::string name = "scenario";
  std::size_t node_count = 0;
  SimTime duration{0};
  std::vector<ContactEvent> contacts;
  Workload workload;
  std::int64_t bandwidth_bps = 250'000;
  std::uint64_t buffer_bytes = 2'000'000;
  std::vector<NodeId> unlimited_buffer_nodes;
  /// Sources never evict their own messages until every target has them.
  bool protect_source_messages = false;
  SocialParams social;
};

/// Throws ValidationError naming every offending entry.
void validate_scenario(const Scenario& scenario);

// Event log ------------------------------------------------------------------

enum class EventKind : std::uint8_t
{
  kContactUp,
  kContactDown,
  kMsgCreate,
  kXferStart,
  kXferDone,
  kXferVoid,
  kDeliver,
  kDrop,
};

std::string_view to_string(EventKind kind);

enum class Reason : std::uint8_t
{
  kNone,
  kContactDown,
  kRejected,
  kEvicted,
  kExpired,
};

/// One log line. Field use depends on the kind:
///   CONTACT_UP/DOWN  a b
///   MSG_CREATE       msg a(source) value(size) target
///   XFER_START       msg a(from) b(to) decision value(completes_ms)
///   XFER_DONE        msg a(from) b(to) decision
///   XFER_VOID        msg a(from) b(to) reason
///   DELIVER          msg a(node) value(latency_ms)
///   DROP             msg a(node) reason
struct EventRecord
{
  SimTime t{0};
  EventKind kind = EventKind::kContactUp;
  Decision decision = Decision::kHold;
  Reason reason = Reason::kNone;
  NodeId a = 0;
  NodeId b = 0;
  MessageId msg = 0;
  std::int64_t value = 0;
  /// MSG_CREATE only: destination node or content type.
  bool content = false;
  std::uint32_t target = 0;
};

class EventLog
{
public:
  void append(const EventRecord& r) { m_records.push_back(r); }
  const std::vector<EventRecord>& records() const { return m_records; }
  std::size_t size() const { return m_records.size(); }

  /// `t_ms KIND fields...`, one record per line.
  void write(std::ostream& out) const;
  std::string to_text() const;

private:
  std::vector<EventRecord> m_records;
};

// Simulation -----------------------------------------------------------------

struct Transfer
{
  MessageId message = 0;
  NodeId sender = 0;
  NodeId receiver = 0;
  SimTime started_at{0};
  SimTime completes_at{0};
  Decision decision = Decision::kHold;
};

struct RunResult
{
  EventLog log;
  RunStats stats;
};

/// Single-run discrete-event state. Scenario contacts and message creations
/// are queued at construction; tests may also drive contacts by hand through
/// on_contact_up/on_contact_down on a scenario without contacts.
class Simulation
{
public:
  Simulation(const Scenario& scenario, const ForwardingStrategy& strategy, bool record_log = true);

  /// Processes every queued event with time <= t.
  void advance_to(SimTime t);
  /// Runs the whole scenario.
  void run();

  /// Opens a link and returns the transfers it plans, in FIFO order, assuming
  /// the contact lasts. Throws ScheduleError if the link is already up.
  std::vector<Transfer> on_contact_up(NodeId a, NodeId b, SimTime t);
  /// Closes a link, voiding any transfer that would complete after t.
  void on_contact_down(NodeId a, NodeId b, SimTime t);

  SimTime now() const { return m_now; }
  bool holds(NodeId node, MessageId msg) const;
  bool consumed(NodeId node, MessageId msg) const;
  const SocialProfile& profile(NodeId node) const { return m_nodes.at(node).profile; }
  const InterestRegistry& registry(NodeId node) const { return m_nodes.at(node).registry; }
  const BufferState& buffer(NodeId node) const { return m_nodes.at(node).buffer; }
  const EventLog& log() const { return m_log; }
  const RunStats& stats() const { return m_stats; }
  RunResult take_result();

private:
  struct ContactUpEv
  {
    NodeId a, b;
  };
  struct ContactDownEv
  {
    NodeId a, b;
  };
  struct CreateEv
  {
    MessageId msg;
  };
  struct XferDoneEv
  {
    std::uint64_t link;
    std::uint64_t token;
  };
  using Payload = std::variant<ContactUpEv, ContactDownEv, CreateEv, XferDoneEv>;

  struct QueuedEvent
  {
    SimTime t;
    std::uint64_t seq;
    Payload payload;
    bool operator>(const QueuedEvent& o) const
    {
      return t != o.t ? t > o.t : seq > o.seq;
    }
  };

  struct Offer
  {
    NodeId sender;
    MessageId msg;
  };

  struct Link
  {
    NodeId a = 0;
    NodeId b = 0;
    SimTime up_at{0};
    std::deque<Offer> queue;
    std::optional<Transfer> inflight;
    std::uint64_t token = 0;
  };

  struct NodeState
  {
    NodeState(NodeId id, std::size_t universe, std::size_t messages, const SocialParams& social,
              std::uint64_t capacity, InterestSet interests);
    SocialProfile profile;
    InterestRegistry registry;
    BufferState buffer;
    std::vector<char> holds;
    std::vector<char> consumed;
    std::vector<std::uint16_t> sending;
    /// A transfer of the message towards this node is in flight.
    std::vector<char> incoming;
    std::set<NodeId> active_peers;
  };

  void push_event(SimTime t, Payload p);
  void dispatch(const QueuedEvent& ev);
  void log_event(EventRecord r);

  std::uint64_t link_key(NodeId a, NodeId b) const;
  void on_create(MessageId id);
  Decision decide(NodeId carrier, NodeId peer, const Message& msg);
  bool offerable(NodeId sender, NodeId receiver, MessageId msg) const;
  void offer_to_active_peers(NodeId node, MessageId msg);
  void request_from_active_peers(NodeId node, MessageId msg);
  void request_pump(std::uint64_t key);
  void drain_pumps();
  void pump(std::uint64_t key);
  void complete(const Transfer& t);
  bool store(NodeId node, MessageId msg);
  bool is_protected(NodeId node, MessageId msg) const;
  void drop_expired(NodeId node, MessageId msg);

  const Scenario& m_scenario;
  const ForwardingStrategy& m_strategy;
  bool m_record_log;
  SimTime m_now{0};
  std::uint64_t m_seq = 0;
  std::priority_queue<QueuedEvent, std::vector<QueuedEvent>, std::greater<>> m_events;
  std::vector<NodeState> m_nodes;
  std::unordered_map<std::uint64_t, Link> m_links;
  std::deque<std::uint64_t> m_pump_queue;
  std::vector<std::size_t> m_target_count;
  std::vector<std::size_t> m_delivered_count;
  EventLog m_log;
  RunStats m_stats;
};

/// Validates the scenario and runs it to completion. The engine draws no
/// random numbers; `seed` is carried into the statistics only.
RunResult run(const Scenario& scenario, const ForwardingStrategy& strategy, std::uint64_t seed,
              bool record_log = true);

} // namespace oppsim
