#pragma once

#include <chrono>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace oppsim {

using NodeId = std::uint32_t;
using MessageId = std::uint32_t;
using ContentType = std::uint32_t;

/// Simulated time: integer milliseconds since the start of the run.
using SimTime = std::chrono::milliseconds;

inline constexpr SimTime kHour = std::chrono::hours(1);
inline constexpr SimTime kDay = std::chrono::hours(24);

inline SimTime from_seconds(double s)
{
  return SimTime(static_cast<std::int64_t>(s * 1000.0 + (s >= 0 ? 0.5 : -0.5)));
}

inline double to_seconds(SimTime t)
{
  return static_cast<double>(t.count()) / 1000.0;
}

/// Sentinel for buffers without a capacity limit.
inline constexpr std::uint64_t kUnlimitedBuffer = std::numeric_limits<std::uint64_t>::max();

/// Sentinel bandwidth selecting instantaneous transfers.
inline constexpr std::int64_t kInfiniteBandwidth = std::numeric_limits<std::int64_t>::max();

/// Symmetric link-up/link-down interval between two nodes. Stored with
/// node_a < node_b.
struct ContactEvent
{
  NodeId node_a = 0;
  NodeId node_b = 0;
  SimTime start{0};
  SimTime end{0};

  friend bool operator==(const ContactEvent&, const ContactEvent&) = default;
};

struct Message
{
  MessageId id = 0;
  NodeId source = 0;
  std::optional<NodeId> destination;
  std::optional<ContentType> content_type;
  std::uint32_t size_bytes = 0;
  SimTime created_at{0};
  SimTime ttl{0};

  bool content_typed() const { return content_type.has_value(); }
};

// Errors ---------------------------------------------------------------------

class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// A scenario, config or workload failed validation. Carries every offending
/// entry, not just the first.
class ValidationError : public Error
{
public:
  explicit ValidationError(std::vector<std::string> issues);
  const std::vector<std::string>& issues() const { return m_issues; }

private:
  std::vector<std::string> m_issues;
};

class ParseError : public Error
{
public:
  ParseError(std::size_t line, const std::string& what);
  std::size_t line() const { return m_line; }

private:
  std::size_t m_line;
};

/// A record whose interval is empty or reversed.
class RangeError : public ParseError
{
public:
  using ParseError::ParseError;
};

/// Contact lifecycle violations (duplicate link-up, unknown link-down).
class ScheduleError : public Error
{
public:
  using Error::Error;
};

/// Internal state accounting violations (duplicate buffer insert, overlapping
/// contact bookkeeping).
class BookkeepingError : public Error
{
public:
  using Error::Error;
};

/// A strategy was handed a message of the wrong addressing kind.
class StrategyMismatch : public Error
{
public:
  using Error::Error;
};

class NoPathError : public Error
{
public:
  using Error::Error;
};

} // namespace oppsim
