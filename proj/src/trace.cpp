#include "oppsim/rng.hpp"
#include "oppsim/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <sstream>

namespace oppsim {

ValidationError::ValidationError(std::vector<std::string> issues)
    : Error([&] {
        std::string msg = "validation failed:";
        for (const auto& i : issues)
          msg += "\n  - " + i;
        return msg;
      }()),
      m_issues(std::move(issues))
{
}

ParseError::ParseError(std::size_t line, const std::string& what)
    : Error("line " + std::to_string(line) + ": " + what), m_line(line)
{
}

std::vector<ContactEvent> normalize_contacts(std::vector<ContactEvent> events)
{
  for (auto& e : events)
  {
    if (e.node_a == e.node_b)
      throw std::invalid_argument("contact joins a node with itself");
    if (e.start >= e.end)
      throw std::invalid_argument("contact interval must have start < end");
    if (e.node_a > e.node_b)
      std::swap(e.node_a, e.node_b);
  }
  std::sort(events.begin(), events.end(), [](const ContactEvent& l, const ContactEvent& r) {
    return std::tie(l.node_a, l.node_b, l.start, l.end) < std::tie(r.node_a, r.node_b, r.start, r.end);
  });

  std::vector<ContactEvent> merged;
  for (const auto& e : events)
  {
    if (!merged.empty())
    {
      auto& last = merged.back();
      if (last.node_a == e.node_a && last.node_b == e.node_b && e.start <= last.end)
      {
        last.end = std::max(last.end, e.end);
        continue;
      }
    }
    merged.push_back(e);
  }
  std::sort(merged.begin(), merged.end(), [](const ContactEvent& l, const ContactEvent& r) {
    return std::tie(l.start, l.node_a, l.node_b) < std::tie(r.start, r.node_a, r.node_b);
  });
  return merged;
}

namespace {

template <typename T>
bool parse_number(std::string_view token, T& out)
{
  const auto* first = token.data();
  const auto* last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && ptr == last;
}

} // namespace

std::vector<ContactEvent> parse_trace(std::istream& in)
{
  std::vector<ContactEvent> events;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line))
  {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#')
      continue;

    std::istringstream fields(line);
    std::string tok[5];
    int count = 0;
    while (count < 5 && fields >> tok[count])
      ++count;
    if (count != 4)
      throw ParseError(line_no, "expected `node_a node_b start_s end_s`, got " +
                                    std::to_string(count) + " fields");

    std::uint32_t a = 0;
    std::uint32_t b = 0;
    double start_s = 0.0;
    double end_s = 0.0;
    if (!parse_number(tok[0], a) || !parse_number(tok[1], b))
      throw ParseError(line_no, "node ids must be non-negative integers");
    if (!parse_number(tok[2], start_s) || !parse_number(tok[3], end_s) || !std::isfinite(start_s) ||
        !std::isfinite(end_s) || start_s < 0.0)
      throw ParseError(line_no, "times must be non-negative numbers of seconds");
    if (a == b)
      throw ParseError(line_no, "contact joins node " + std::to_string(a) + " with itself");
    if (start_s >= end_s)
      throw RangeError(line_no, "range error: start " + tok[2] + " is not before end " + tok[3]);
    events.push_back({a, b, from_seconds(start_s), from_seconds(end_s)});
  }
  return normalize_contacts(std::move(events));
}

std::vector<ContactEvent> generate_trace_like(const TraceLikeParams& p, std::uint64_t seed)
{
  if (p.nodes < 2 || p.days == 0 || p.communities == 0 || p.active_from_hour < 0 ||
      p.active_to_hour > 24 || p.active_from_hour >= p.active_to_hour)
    throw std::invalid_argument("generate_trace_like: invalid parameters");

  auto community_of = [&](std::size_t n) { return n * p.communities / p.nodes; };

  std::vector<ContactEvent> events;
  std::uint64_t pair_index = 0;
  for (std::size_t i = 0; i < p.nodes; ++i)
  {
    for (std::size_t j = i + 1; j < p.nodes; ++j, ++pair_index)
    {
      Rng rng = Rng::derive(seed, pair_index);
      const double affinity = rng.uniform(0.25, 1.75);
      const double base = community_of(i) == community_of(j) ? p.intra_contacts_per_hour
                                                             : p.inter_contacts_per_hour;
      for (std::size_t d = 0; d < p.days; ++d)
      {
        const bool weekend = d % 7 >= 5;
        const double rate = base * affinity * (weekend ? p.weekend_activity : 1.0);
        if (rate <= 0.0)
          continue;
        const double window_h = static_cast<double>(p.active_to_hour - p.active_from_hour);
        double at_h = rng.exponential(1.0 / rate);
        while (at_h < window_h)
        {
          const double start_s =
              static_cast<double>(d) * 86400.0 + (p.active_from_hour + at_h) * 3600.0;
          const double dur_s = std::max(p.min_duration_s, rng.exponential(p.mean_duration_s));
          events.push_back({static_cast<NodeId>(i), static_cast<NodeId>(j), from_seconds(start_s),
                            from_seconds(start_s + dur_s)});
          at_h += dur_s / 3600.0 + rng.exponential(1.0 / rate);
        }
      }
    }
  }
  return normalize_contacts(std::move(events));
}

} // namespace oppsim
