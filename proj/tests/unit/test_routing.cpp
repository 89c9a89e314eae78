#include "oppsim/routing.hpp"

#include <doctest.h>

using namespace oppsim;
using std::chrono::hours;
using std::chrono::minutes;
using std::chrono::seconds;

namespace {

Message to_node(NodeId src, NodeId dst)
{
  Message m;
  m.source = src;
  m.destination = dst;
  m.size_bytes = 1000;
  m.ttl = kDay;
  return m;
}

Message typed(NodeId src, ContentType type)
{
  Message m;
  m.source = src;
  m.content_type = type;
  m.size_bytes = 1000;
  m.ttl = kDay;
  return m;
}

/// `count` distinct encounters inside the first 6-hour window, then closed.
void window_with(SocialProfile& p, NodeId first, std::size_t count)
{
  for (std::size_t i = 0; i < count; ++i)
    p.record_contact(first + static_cast<NodeId>(i), hours(1), hours(1) + minutes(1));
  p.roll_windows(hours(7));
}

/// Contact of `secs` inside hour 9 of day 0; weight at 9:30 is secs * 24 / 300.
void meet_at_nine(SocialProfile& p, NodeId peer, int secs)
{
  p.record_contact(peer, hours(9), hours(9) + seconds(secs));
}

const SimTime kNine30 = hours(9) + minutes(30);

} // namespace

TEST_CASE("epidemic: target, holder, everyone else")
{
  CHECK(epidemic_decide(3, true, false) == Decision::kDeliver);
  CHECK(epidemic_decide(3, false, true) == Decision::kHold);
  CHECK(epidemic_decide(3, true, true) == Decision::kHold);
  CHECK(epidemic_decide(3, false, false) == Decision::kReplicate);
}

TEST_CASE("bubble: worked examples")
{
  const std::size_t n = 20;
  SocialParams params;
  SocialProfile carrier(0, n, params);
  SocialProfile peer(1, n, params);

  CHECK(bubble_decide(carrier, peer, to_node(0, 1)) == Decision::kDeliver);

  // Peer is familiar with destination 2, the carrier is not.
  SocialProfile other(2, n, params);
  update_community(peer, other, 700.0, params);
  CHECK(peer.community().contains(2));
  CHECK(bubble_decide(carrier, peer, to_node(0, 2)) == Decision::kReplicate);

  // Both outside the destination's community: global centrality 4 vs 5.
  SocialProfile c5(0, n, params);
  SocialProfile p4(1, n, params);
  window_with(c5, 10, 5);
  window_with(p4, 10, 4);
  CHECK(centrality(c5, CentralityScope::kGlobal) == 5.0);
  CHECK(centrality(p4, CentralityScope::kGlobal) == 4.0);
  CHECK(bubble_decide(c5, p4, to_node(0, 3)) == Decision::kHold);
  CHECK(bubble_decide(p4, c5, to_node(1, 3)) == Decision::kReplicate);
}

TEST_CASE("bubble: inside the destination community local centrality decides")
{
  const std::size_t n = 20;
  SocialParams params;
  SocialProfile carrier(0, n, params);
  SocialProfile peer(1, n, params);
  SocialProfile dest(2, n, params);
  update_community(carrier, dest, 800.0, params);
  update_community(peer, dest, 800.0, params);
  // Equal (zero) local centrality: strict comparison holds.
  CHECK(bubble_decide(carrier, peer, to_node(0, 2)) == Decision::kHold);

  // The peer met the destination in a completed window; the carrier did not.
  peer.record_contact(2, hours(1), hours(1) + minutes(1));
  peer.roll_windows(hours(7));
  carrier.roll_windows(hours(7));
  CHECK(centrality(peer, CentralityScope::kCommunity) > 0.0);
  CHECK(bubble_decide(carrier, peer, to_node(0, 2)) == Decision::kReplicate);
  CHECK(bubble_decide(peer, carrier, to_node(1, 2)) == Decision::kHold);
}

TEST_CASE("dlife: worked examples")
{
  const std::size_t n = 8;
  SocialProfile carrier(0, n);
  SocialProfile peer(1, n);
  CHECK(dlife_decide(carrier, peer, to_node(0, 1), kNine30) == Decision::kDeliver);

  meet_at_nine(peer, 5, 600);
  meet_at_nine(carrier, 5, 150);
  CHECK(social_weight(peer, 5, kNine30) == doctest::Approx(48.0));
  CHECK(social_weight(carrier, 5, kNine30) == doctest::Approx(12.0));
  CHECK(dlife_decide(carrier, peer, to_node(0, 5), kNine30) == Decision::kReplicate);
  CHECK(dlife_decide(peer, carrier, to_node(1, 5), kNine30) == Decision::kHold);

  // Neither met node 6: importance decides (144 vs 10).
  SocialProfile c(0, n);
  SocialProfile p(1, n);
  meet_at_nine(p, 3, 600);
  p.learn_degree(3, 3);
  meet_at_nine(c, 4, 125);
  c.learn_degree(4, 1);
  CHECK(node_importance(p, kNine30) == doctest::Approx(144.0));
  CHECK(node_importance(c, kNine30) == doctest::Approx(10.0));
  CHECK(dlife_decide(c, p, to_node(0, 6), kNine30) == Decision::kReplicate);
  CHECK(dlife_decide(p, c, to_node(1, 6), kNine30) == Decision::kHold);

  // Equal nonzero weights hold.
  SocialProfile e1(0, n);
  SocialProfile e2(1, n);
  meet_at_nine(e1, 5, 300);
  meet_at_nine(e2, 5, 300);
  CHECK(dlife_decide(e1, e2, to_node(0, 5), kNine30) == Decision::kHold);
}

TEST_CASE("scorp: worked examples")
{
  const std::size_t n = 8;
  SocialProfile carrier(0, n);
  SocialProfile peer(1, n);
  InterestRegistry carrier_reg(0, {});
  InterestRegistry peer_reg(1, {3});
  const ContentType games = 3;
  const ContentType reading = 4;

  CHECK(scorp_decide(carrier, peer, peer_reg.own(), typed(0, games), carrier_reg, peer_reg,
                     kNine30) == Decision::kDeliver);

  // Uninterested peer with no knowledge on either side.
  CHECK(scorp_decide(carrier, peer, peer_reg.own(), typed(0, reading), carrier_reg, peer_reg,
                     kNine30) == Decision::kHold);

  // Peer weight-to-interested 60 vs carrier 48.
  meet_at_nine(peer, 5, 600);
  meet_at_nine(peer, 6, 150);
  peer_reg.learn(5, {reading});
  peer_reg.learn(6, {reading});
  meet_at_nine(carrier, 5, 600);
  carrier_reg.learn(5, {reading});
  CHECK(weight_to_interested(peer, reading, peer_reg, kNine30) == doctest::Approx(60.0));
  CHECK(weight_to_interested(carrier, reading, carrier_reg, kNine30) == doctest::Approx(48.0));
  CHECK(scorp_decide(carrier, peer, peer_reg.own(), typed(0, reading), carrier_reg, peer_reg,
                     kNine30) == Decision::kReplicate);
  CHECK(scorp_decide(peer, carrier, carrier_reg.own(), typed(1, reading), peer_reg, carrier_reg,
                     kNine30) == Decision::kHold);
}

TEST_CASE("strategies reject the wrong addressing kind")
{
  SocialProfile a(0, 4);
  SocialProfile b(1, 4);
  InterestRegistry ra(0, {});
  InterestRegistry rb(1, {});
  CHECK_THROWS_AS(bubble_decide(a, b, typed(0, 1)), StrategyMismatch);
  CHECK_THROWS_AS(dlife_decide(a, b, typed(0, 1), SimTime{0}), StrategyMismatch);
  CHECK_THROWS_AS(scorp_decide(a, b, rb.own(), to_node(0, 1), ra, rb, SimTime{0}), StrategyMismatch);
}

TEST_CASE("DELIVER only ever goes to targets")
{
  const std::size_t n = 6;
  for (const auto* name : {"epidemic", "bubble", "dlife", "scorp"})
  {
    auto s = make_strategy(name);
    for (NodeId peer = 1; peer < n; ++peer)
    {
      SocialProfile cp(0, n);
      SocialProfile pp(peer, n);
      InterestRegistry cr(0, {});
      InterestRegistry pr(peer, peer % 2 ? InterestSet{1} : InterestSet{});
      const Message m = s->content_oriented() ? typed(0, 1) : to_node(0, 3);
      const DecisionContext ctx{{0, &cp, &cr}, {peer, &pp, &pr}, &m, SimTime{0}, false};
      const bool target = s->content_oriented() ? peer % 2 == 1 : peer == 3;
      CHECK((s->decide(ctx) == Decision::kDeliver) == target);
      CHECK(is_target(m, peer, pr) == target);
    }
  }
}

TEST_CASE("make_strategy: names and unknown strategy")
{
  CHECK(make_strategy("scorp")->content_oriented());
  CHECK(make_strategy("bubble")->uses_communities());
  CHECK(make_strategy("dlife")->name() == "dlife");
  CHECK_THROWS_AS(make_strategy("prophet"), std::invalid_argument);
}

TEST_CASE("buffer_admit: worked examples")
{
  BufferState empty(2'000'000);
  auto r = buffer_admit(empty, {1, 100'000});
  CHECK(r.accepted);
  CHECK(r.evicted.empty());
  CHECK(empty.occupancy() == 100'000);

  BufferState full(2'000'000);
  for (MessageId id = 0; id < 39; ++id)
    full.insert({id, 50'000});
  REQUIRE(full.occupancy() == 1'950'000);
  r = buffer_admit(full, {100, 100'000});
  CHECK(r.accepted);
  CHECK(r.evicted == std::vector<MessageId>{0});
  CHECK(full.occupancy() == 2'000'000);
  CHECK(!full.contains(0));
  CHECK(full.contains(100));

  BufferState small(2'000'000);
  r = buffer_admit(small, {7, 3'000'000});
  CHECK(!r.accepted);
  CHECK(small.occupancy() == 0);
}

TEST_CASE("buffer_admit: protected residents survive, failed admission evicts nothing")
{
  BufferState b(300'000);
  b.insert({1, 100'000});
  b.insert({2, 100'000});
  b.insert({3, 100'000});
  auto protect_1 = [](MessageId id) { return id == 1; };
  auto r = buffer_admit(b, {4, 150'000}, protect_1);
  CHECK(r.accepted);
  CHECK(r.evicted == std::vector<MessageId>{2, 3});
  CHECK(b.contains(1));

  auto protect_all = [](MessageId) { return true; };
  const auto before = b.resident().size();
  r = buffer_admit(b, {5, 100'000}, protect_all);
  CHECK(!r.accepted);
  CHECK(r.evicted.empty());
  CHECK(b.resident().size() == before);
}

TEST_CASE("buffer_admit: unlimited buffers and duplicates")
{
  BufferState b(kUnlimitedBuffer);
  for (MessageId id = 0; id < 1000; ++id)
    CHECK(buffer_admit(b, {id, 100'000}).accepted);
  CHECK(b.occupancy() == 100'000'000);
  CHECK_THROWS_AS(buffer_admit(b, {5, 1000}), BookkeepingError);
}

TEST_CASE("buffer occupancy never exceeds capacity under random admissions")
{
  BufferState b(500'000);
  std::uint64_t state = 12345;
  for (MessageId id = 0; id < 500; ++id)
  {
    state = state * 6364136223846793005ULL + 1442695040888963407ULL;
    const auto size = static_cast<std::uint32_t>(1000 + (state >> 33) % 99'001);
    buffer_admit(b, {id, size}, [](MessageId m) { return m % 7 == 0; });
    std::uint64_t sum = 0;
    for (const auto& r : b.resident())
      sum += r.size_bytes;
    CHECK(sum == b.occupancy());
    CHECK(b.occupancy() <= b.capacity());
  }
}

TEST_CASE("ttl_check: boundaries")
{
  Message m = to_node(0, 1);
  m.created_at = SimTime{5000};
  m.ttl = SimTime{1000};
  CHECK(ttl_check(m, SimTime{5000}) == TtlStatus::kKeep);
  CHECK(ttl_check(m, SimTime{6000}) == TtlStatus::kKeep);
  CHECK(ttl_check(m, SimTime{6001}) == TtlStatus::kExpire);

  m.ttl = 21 * kDay;
  m.created_at = SimTime{0};
  CHECK(ttl_check(m, 21 * kDay) == TtlStatus::kKeep);
}
