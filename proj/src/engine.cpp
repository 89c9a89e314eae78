#include "oppsim/engine.hpp"

#include <algorithm>
#include <map>
#include <ostream>
#include <sstream>

namespace oppsim {

SimTime transfer_duration(std::int64_t size_bytes, std::int64_t bandwidth_bps)
{
  if (size_bytes <= 0 || bandwidth_bps <= 0)
    throw std::invalid_argument("transfer_duration: size and bandwidth must be positive");
  if (bandwidth_bps == kInfiniteBandwidth)
    return SimTime{0};
  const std::int64_t bit_ms = size_bytes * 8 * 1000;
  return SimTime((bit_ms + bandwidth_bps - 1) / bandwidth_bps);
}

void validate_scenario(const Scenario& s)
{
  std::vector<std::string> issues;
  const auto n = s.node_count;
  if (n == 0)
    issues.push_back("node_count must be positive");
  if (s.duration.count() <= 0)
    issues.push_back("duration must be positive");
  if (s.bandwidth_bps <= 0)
    issues.push_back("bandwidth_bps must be positive");

  std::map<std::pair<NodeId, NodeId>, SimTime> last_end;
  SimTime last_start{0};
  for (std::size_t i = 0; i < s.contacts.size(); ++i)
  {
    const auto& c = s.contacts[i];
    const std::string tag = "contact #" + std::to_string(i) + " (" + std::to_string(c.node_a) +
                            "," + std::to_string(c.node_b) + ")";
    if (c.node_a == c.node_b)
      issues.push_back(tag + ": self contact");
    if (c.node_a >= n || c.node_b >= n)
      issues.push_back(tag + ": node outside population");
    if (c.start >= c.end)
      issues.push_back(tag + ": start must precede end");
    if (c.start.count() < 0 || c.end > s.duration)
      issues.push_back(tag + ": outside [0, duration]");
    if (c.start < last_start)
      issues.push_back(tag + ": schedule not sorted by start");
    last_start = c.start;
    const auto key = std::minmax(c.node_a, c.node_b);
    auto it = last_end.find(key);
    if (it != last_end.end() && c.start <= it->second)
      issues.push_back(tag + ": overlaps or touches a previous contact of the same pair");
    last_end[key] = std::max(c.end, it == last_end.end() ? c.end : it->second);
  }

  const auto& w = s.workload;
  if (!w.interests.empty() && w.interests.size() != n)
    issues.push_back("interests must list every node");
  for (std::size_t i = 0; i < w.messages.size(); ++i)
  {
    const auto& m = w.messages[i];
    const std::string tag = "message #" + std::to_string(i);
    if (m.id != i)
      issues.push_back(tag + ": ids must equal their position");
    if (m.source >= n)
      issues.push_back(tag + ": source outside population");
    if (m.destination.has_value() == m.content_type.has_value())
      issues.push_back(tag + ": exactly one of destination / content type must be set");
    if (m.destination && (*m.destination >= n || *m.destination == m.source))
      issues.push_back(tag + ": invalid destination");
    if (m.size_bytes < 1000 || m.size_bytes > 100000)
      issues.push_back(tag + ": size outside [1000, 100000] bytes");
    if (m.created_at.count() < 0 || m.created_at >= s.duration)
      issues.push_back(tag + ": created outside the run");
    if (m.ttl.count() <= 0)
      issues.push_back(tag + ": ttl must be positive");
  }
  if (issues.empty())
  {
    std::vector<InterestSet> interests = w.interests;
    interests.resize(n);
    const auto expected = count_expected_deliveries(w.messages, interests);
    if (expected != w.expected_deliveries)
      issues.push_back("expected_deliveries is " + std::to_string(w.expected_deliveries) +
                       " but the workload implies " + std::to_string(expected));
  }
  if (!issues.empty())
    throw ValidationError(std::move(issues));
}

// Event log ------------------------------------------------------------------

std::string_view to_string(EventKind kind)
{
  switch (kind)
  {
  case EventKind::kContactUp:
    return "CONTACT_UP";
  case EventKind::kContactDown:
    return "CONTACT_DOWN";
  case EventKind::kMsgCreate:
    return "MSG_CREATE";
  case EventKind::kXferStart:
    return "XFER_START";
  case EventKind::kXferDone:
    return "XFER_DONE";
  case EventKind::kXferVoid:
    return "XFER_VOID";
  case EventKind::kDeliver:
    return "DELIVER";
  case EventKind::kDrop:
    return "DROP";
  }
  return "?";
}

namespace {

std::string_view reason_text(Reason r)
{
  switch (r)
  {
  case Reason::kNone:
    return "none";
  case Reason::kContactDown:
    return "contact_down";
  case Reason::kRejected:
    return "rejected";
  case Reason::kEvicted:
    return "evicted";
  case Reason::kExpired:
    return "expired";
  }
  return "?";
}

} // namespace

void EventLog::write(std::ostream& out) const
{
  for (const auto& r : m_records)
  {
    out << r.t.count() << ' ' << to_string(r.kind);
    switch (r.kind)
    {
    case EventKind::kContactUp:
    case EventKind::kContactDown:
      out << ' ' << r.a << ' ' << r.b;
      break;
    case EventKind::kMsgCreate:
      out << ' ' << r.msg << ' ' << r.a << ' ' << r.value << (r.content ? " type=" : " dst=")
          << r.target;
      break;
    case EventKind::kXferStart:
      out << ' ' << r.msg << ' ' << r.a << ' ' << r.b << ' ' << to_string(r.decision) << ' '
          << r.value;
      break;
    case EventKind::kXferDone:
      out << ' ' << r.msg << ' ' << r.a << ' ' << r.b << ' ' << to_string(r.decision);
      break;
    case EventKind::kXferVoid:
      out << ' ' << r.msg << ' ' << r.a << ' ' << r.b << ' ' << reason_text(r.reason);
      break;
    case EventKind::kDeliver:
      out << ' ' << r.msg << ' ' << r.a << ' ' << r.value;
      break;
    case EventKind::kDrop:
      out << ' ' << r.msg << ' ' << r.a << ' ' << reason_text(r.reason);
      break;
    }
    out << '\n';
  }
}

std::string EventLog::to_text() const
{
  std::ostringstream os;
  write(os);
  return os.str();
}

// Simulation -----------------------------------------------------------------

Simulation::NodeState::NodeState(NodeId id, std::size_t universe, std::size_t messages,
                                 const SocialParams& social, std::uint64_t capacity,
                                 InterestSet interests)
    : profile(id, universe, social),
      registry(id, std::move(interests)),
      buffer(capacity),
      holds(messages, 0),
      consumed(messages, 0),
      sending(messages, 0),
      incoming(messages, 0)
{
}

Simulation::Simulation(const Scenario& scenario, const ForwardingStrategy& strategy, bool record_log)
    : m_scenario(scenario), m_strategy(strategy), m_record_log(record_log)
{
  const auto n = scenario.node_count;
  const auto& msgs = scenario.workload.messages;
  m_nodes.reserve(n);
  for (NodeId i = 0; i < n; ++i)
  {
    const bool unlimited =
        std::find(scenario.unlimited_buffer_nodes.begin(), scenario.unlimited_buffer_nodes.end(),
                  i) != scenario.unlimited_buffer_nodes.end();
    InterestSet own = i < scenario.workload.interests.size() ? scenario.workload.interests[i]
                                                             : InterestSet{};
    m_nodes.emplace_back(i, n, msgs.size(), scenario.social,
                         unlimited ? kUnlimitedBuffer : scenario.buffer_bytes, std::move(own));
  }

  m_target_count.assign(msgs.size(), 0);
  m_delivered_count.assign(msgs.size(), 0);
  for (const auto& m : msgs)
  {
    if (m.destination)
      m_target_count[m.id] = 1;
    else
      for (NodeId i = 0; i < n; ++i)
        if (i != m.source && m_nodes[i].registry.own().contains(*m.content_type))
          ++m_target_count[m.id];
  }
  m_stats.expected = scenario.workload.expected_deliveries;

  // Insertion order fixes ties: link-ups, then link-downs, then creations.
  for (const auto& c : scenario.contacts)
    push_event(c.start, ContactUpEv{c.node_a, c.node_b});
  for (const auto& c : scenario.contacts)
    push_event(c.end, ContactDownEv{c.node_a, c.node_b});
  for (const auto& m : msgs)
    push_event(m.created_at, CreateEv{m.id});
}

void Simulation::push_event(SimTime t, Payload p)
{
  m_events.push(QueuedEvent{t, m_seq++, std::move(p)});
}

void Simulation::log_event(EventRecord r)
{
  if (m_record_log)
    m_log.append(r);
}

std::uint64_t Simulation::link_key(NodeId a, NodeId b) const
{
  const auto [lo, hi] = std::minmax(a, b);
  return static_cast<std::uint64_t>(lo) * m_scenario.node_count + hi;
}

bool Simulation::holds(NodeId node, MessageId msg) const
{
  return m_nodes.at(node).holds.at(msg) != 0;
}

bool Simulation::consumed(NodeId node, MessageId msg) const
{
  return m_nodes.at(node).consumed.at(msg) != 0;
}

void Simulation::advance_to(SimTime t)
{
  while (!m_events.empty() && m_events.top().t <= t)
  {
    const QueuedEvent ev = m_events.top();
    m_events.pop();
    m_now = std::max(m_now, ev.t);
    dispatch(ev);
  }
  m_now = std::max(m_now, t);
}

void Simulation::run()
{
  advance_to(m_scenario.duration);
}

void Simulation::dispatch(const QueuedEvent& ev)
{
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, ContactUpEv>)
          on_contact_up(p.a, p.b, ev.t);
        else if constexpr (std::is_same_v<T, ContactDownEv>)
          on_contact_down(p.a, p.b, ev.t);
        else if constexpr (std::is_same_v<T, CreateEv>)
          on_create(p.msg);
        else
        {
          auto it = m_links.find(p.link);
          if (it == m_links.end() || it->second.token != p.token || !it->second.inflight)
            return;
          const Transfer t = *it->second.inflight;
          it->second.inflight.reset();
          complete(t);
          request_pump(p.link);
          drain_pumps();
        }
      },
      ev.payload);
}

Decision Simulation::decide(NodeId carrier, NodeId peer, const Message& msg)
{
  const auto& c = m_nodes[carrier];
  const auto& p = m_nodes[peer];
  DecisionContext ctx{{carrier, &c.profile, &c.registry},
                      {peer, &p.profile, &p.registry},
                      &msg,
                      m_now,
                      p.holds[msg.id] != 0 || p.consumed[msg.id] != 0};
  return m_strategy.decide(ctx);
}

bool Simulation::offerable(NodeId sender, NodeId receiver, MessageId msg) const
{
  const auto& r = m_nodes[receiver];
  return m_nodes[sender].holds[msg] && !r.holds[msg] && !r.consumed[msg] && !r.incoming[msg];
}

void Simulation::drop_expired(NodeId node, MessageId msg)
{
  auto& st = m_nodes[node];
  if (!st.holds[msg] || st.sending[msg] > 0)
    return;
  st.buffer.remove(msg);
  st.holds[msg] = 0;
  ++m_stats.drops;
  log_event({.t = m_now, .kind = EventKind::kDrop, .reason = Reason::kExpired, .a = node, .msg = msg});
}

bool Simulation::is_protected(NodeId node, MessageId msg) const
{
  if (m_nodes[node].sending[msg] > 0)
    return true;
  const auto& m = m_scenario.workload.messages[msg];
  return m_scenario.protect_source_messages && m.source == node &&
         m_delivered_count[msg] < m_target_count[msg];
}

bool Simulation::store(NodeId node, MessageId msg)
{
  auto& st = m_nodes[node];
  const auto& m = m_scenario.workload.messages[msg];
  const auto result = buffer_admit(st.buffer, {msg, m.size_bytes},
                                   [&](MessageId id) { return is_protected(node, id); });
  for (auto victim : result.evicted)
  {
    st.holds[victim] = 0;
    ++m_stats.drops;
    log_event({.t = m_now, .kind = EventKind::kDrop, .reason = Reason::kEvicted, .a = node, .msg = victim});
  }
  if (result.accepted)
    st.holds[msg] = 1;
  return result.accepted;
}

void Simulation::on_create(MessageId id)
{
  const auto& m = m_scenario.workload.messages[id];
  log_event({.t = m_now,
             .kind = EventKind::kMsgCreate,
             .a = m.source,
             .msg = id,
             .value = m.size_bytes,
             .content = m.content_typed(),
             .target = m.destination ? *m.destination : *m.content_type});
  if (!store(m.source, id))
  {
    ++m_stats.drops;
    log_event({.t = m_now, .kind = EventKind::kDrop, .reason = Reason::kRejected, .a = m.source, .msg = id});
    return;
  }
  offer_to_active_peers(m.source, id);
  drain_pumps();
}

void Simulation::offer_to_active_peers(NodeId node, MessageId msg)
{
  const auto& m = m_scenario.workload.messages[msg];
  for (NodeId peer : m_nodes[node].active_peers)
  {
    if (!offerable(node, peer, msg))
      continue;
    if (ttl_check(m, m_now) == TtlStatus::kExpire)
    {
      drop_expired(node, msg);
      return;
    }
    if (decide(node, peer, m) == Decision::kHold)
      continue;
    m_links.at(link_key(node, peer)).queue.push_back({node, msg});
    request_pump(link_key(node, peer));
  }
}

void Simulation::request_from_active_peers(NodeId node, MessageId msg)
{
  const auto& m = m_scenario.workload.messages[msg];
  for (NodeId peer : m_nodes[node].active_peers)
  {
    if (!offerable(peer, node, msg))
      continue;
    if (ttl_check(m, m_now) == TtlStatus::kExpire)
    {
      drop_expired(peer, msg);
      continue;
    }
    if (decide(peer, node, m) == Decision::kHold)
      continue;
    m_links.at(link_key(node, peer)).queue.push_back({peer, msg});
    request_pump(link_key(node, peer));
  }
}

void Simulation::request_pump(std::uint64_t key)
{
  m_pump_queue.push_back(key);
}

void Simulation::drain_pumps()
{
  while (!m_pump_queue.empty())
  {
    const auto key = m_pump_queue.front();
    m_pump_queue.pop_front();
    pump(key);
  }
}

void Simulation::pump(std::uint64_t key)
{
  auto it = m_links.find(key);
  if (it == m_links.end())
    return;
  Link& link = it->second;
  const auto& msgs = m_scenario.workload.messages;
  while (!link.inflight && !link.queue.empty())
  {
    const Offer offer = link.queue.front();
    link.queue.pop_front();
    const NodeId sender = offer.sender;
    const NodeId receiver = sender == link.a ? link.b : link.a;
    const Message& m = msgs[offer.msg];
    if (!offerable(sender, receiver, offer.msg))
      continue;
    if (ttl_check(m, m_now) == TtlStatus::kExpire)
    {
      drop_expired(sender, offer.msg);
      continue;
    }
    // The strategy is consulted again: state may have moved since queueing.
    const Decision d = decide(sender, receiver, m);
    if (d == Decision::kHold)
      continue;
    if (d == Decision::kReplicate && m.size_bytes > m_nodes[receiver].buffer.capacity())
      continue;

    const SimTime dur = transfer_duration(m.size_bytes, m_scenario.bandwidth_bps);
    const Transfer t{offer.msg, sender, receiver, m_now, m_now + dur, d};
    ++m_nodes[sender].sending[offer.msg];
    m_nodes[receiver].incoming[offer.msg] = 1;
    log_event({.t = m_now,
               .kind = EventKind::kXferStart,
               .decision = d,
               .a = sender,
               .b = receiver,
               .msg = offer.msg,
               .value = t.completes_at.count()});
    if (dur.count() == 0)
    {
      complete(t);
      continue;
    }
    link.inflight = t;
    ++link.token;
    push_event(t.completes_at, XferDoneEv{key, link.token});
  }
}

void Simulation::complete(const Transfer& t)
{
  auto& sender = m_nodes[t.sender];
  --sender.sending[t.message];
  auto& recv = m_nodes[t.receiver];
  recv.incoming[t.message] = 0;
  const Message& m = m_scenario.workload.messages[t.message];

  if (t.decision == Decision::kDeliver)
  {
    ++m_stats.replicas;
    log_event({.t = m_now,
               .kind = EventKind::kXferDone,
               .decision = t.decision,
               .a = t.sender,
               .b = t.receiver,
               .msg = t.message});
    recv.consumed[t.message] = 1;
    ++m_delivered_count[t.message];
    ++m_stats.delivered;
    m_stats.latencies.push_back(m_now - m.created_at);
    log_event({.t = m_now,
               .kind = EventKind::kDeliver,
               .a = t.receiver,
               .msg = t.message,
               .value = (m_now - m.created_at).count()});
    // Content consumers keep carrying what they consumed.
    if (m.content_typed())
    {
      if (store(t.receiver, t.message))
        offer_to_active_peers(t.receiver, t.message);
      else
      {
        ++m_stats.drops;
        log_event({.t = m_now, .kind = EventKind::kDrop, .reason = Reason::kRejected, .a = t.receiver, .msg = t.message});
      }
    }
    return;
  }

  if (!store(t.receiver, t.message))
  {
    log_event({.t = m_now,
               .kind = EventKind::kXferVoid,
               .reason = Reason::kRejected,
               .a = t.sender,
               .b = t.receiver,
               .msg = t.message});
    return;
  }
  ++m_stats.replicas;
  log_event({.t = m_now,
             .kind = EventKind::kXferDone,
             .decision = t.decision,
             .a = t.sender,
             .b = t.receiver,
             .msg = t.message});
  offer_to_active_peers(t.receiver, t.message);
}

std::vector<Transfer> Simulation::on_contact_up(NodeId a, NodeId b, SimTime t)
{
  if (a == b || a >= m_nodes.size() || b >= m_nodes.size())
    throw ScheduleError("contact-up with invalid endpoints");
  const auto key = link_key(a, b);
  if (m_links.contains(key))
    throw ScheduleError("duplicate contact-up for " + std::to_string(a) + "-" + std::to_string(b));
  m_now = std::max(m_now, t);
  log_event({.t = m_now, .kind = EventKind::kContactUp, .a = std::min(a, b), .b = std::max(a, b)});

  Link& link = m_links[key];
  link.a = a;
  link.b = b;
  link.up_at = m_now;
  auto& na = m_nodes[a];
  auto& nb = m_nodes[b];
  na.active_peers.insert(b);
  nb.active_peers.insert(a);

  // Zero-cost summaries: degree and own interests.
  na.profile.note_encounter(b);
  nb.profile.note_encounter(a);
  na.profile.learn_degree(b, nb.profile.degree());
  nb.profile.learn_degree(a, na.profile.degree());
  na.registry.learn(b, nb.registry.own());
  nb.registry.learn(a, na.registry.own());
  na.profile.roll_windows(m_now);
  nb.profile.roll_windows(m_now);

  // Both buffers, oldest creation first.
  const auto& msgs = m_scenario.workload.messages;
  std::vector<Offer> candidates;
  for (const NodeId side : {a, b})
    for (const auto& r : m_nodes[side].buffer.resident())
      candidates.push_back({side, r.id});
  std::sort(candidates.begin(), candidates.end(), [&](const Offer& l, const Offer& r) {
    return std::tie(msgs[l.msg].created_at, l.msg, l.sender) <
           std::tie(msgs[r.msg].created_at, r.msg, r.sender);
  });

  std::vector<Transfer> plan;
  SimTime cursor = m_now;
  for (const auto& offer : candidates)
  {
    const NodeId receiver = offer.sender == a ? b : a;
    if (!offerable(offer.sender, receiver, offer.msg))
      continue;
    const Message& m = msgs[offer.msg];
    if (ttl_check(m, m_now) == TtlStatus::kExpire)
    {
      drop_expired(offer.sender, offer.msg);
      continue;
    }
    const Decision d = decide(offer.sender, receiver, m);
    if (d == Decision::kHold)
      continue;
    link.queue.push_back(offer);
    const SimTime dur = transfer_duration(m.size_bytes, m_scenario.bandwidth_bps);
    plan.push_back({offer.msg, offer.sender, receiver, cursor, cursor + dur, d});
    cursor += dur;
  }
  request_pump(key);
  drain_pumps();
  return plan;
}

void Simulation::on_contact_down(NodeId a, NodeId b, SimTime t)
{
  const auto key = link_key(a, b);
  auto it = m_links.find(key);
  if (it == m_links.end())
    throw ScheduleError("contact-down without an active contact for " + std::to_string(a) + "-" +
                        std::to_string(b));
  m_now = std::max(m_now, t);
  const SimTime up_at = it->second.up_at;
  const std::optional<Transfer> inflight = it->second.inflight;
  m_links.erase(it);
  m_nodes[a].active_peers.erase(b);
  m_nodes[b].active_peers.erase(a);

  if (inflight)
  {
    if (inflight->completes_at <= m_now)
      complete(*inflight);
    else
    {
      --m_nodes[inflight->sender].sending[inflight->message];
      m_nodes[inflight->receiver].incoming[inflight->message] = 0;
      log_event({.t = m_now,
                 .kind = EventKind::kXferVoid,
                 .reason = Reason::kContactDown,
                 .a = inflight->sender,
                 .b = inflight->receiver,
                 .msg = inflight->message});
      // Other neighbours may have skipped this message while it was in flight.
      request_from_active_peers(inflight->receiver, inflight->message);
    }
  }
  log_event({.t = m_now, .kind = EventKind::kContactDown, .a = std::min(a, b), .b = std::max(a, b)});

  if (m_now > up_at)
  {
    auto& pa = m_nodes[a].profile;
    auto& pb = m_nodes[b].profile;
    pa.record_contact(b, up_at, m_now);
    pb.record_contact(a, up_at, m_now);
    update_community(pa, pb, pa.cumulative_contact_s(b), m_scenario.social);
  }
  drain_pumps();
}

RunResult Simulation::take_result()
{
  return RunResult{std::move(m_log), std::move(m_stats)};
}

RunResult run(const Scenario& scenario, const ForwardingStrategy& strategy, std::uint64_t seed,
              bool record_log)
{
  validate_scenario(scenario);
  Simulation sim(scenario, strategy, record_log);
  sim.run();
  auto result = sim.take_result();
  result.stats.seed = seed;
  return result;
}

} // namespace oppsim
