#pragma once

#include "oppsim/types.hpp"

#include <bit>
#include <cstdint>
#include <vector>

namespace oppsim {

/// Fixed-universe bitset over node ids [0, size).
class NodeSet
{
public:
  NodeSet() = default;
  explicit NodeSet(std::size_t universe) : m_size(universe), m_words((universe + 63) / 64, 0) {}

  std::size_t universe() const { return m_size; }

  void insert(NodeId n) { m_words[n >> 6] |= (std::uint64_t{1} << (n & 63)); }
  void erase(NodeId n) { m_words[n >> 6] &= ~(std::uint64_t{1} << (n & 63)); }
  bool contains(NodeId n) const
  {
    return n < m_size && ((m_words[n >> 6] >> (n & 63)) & 1U) != 0;
  }

  std::size_t count() const
  {
    std::size_t c = 0;
    for (auto w : m_words)
      c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }

  bool empty() const
  {
    for (auto w : m_words)
      if (w != 0)
        return false;
    return true;
  }

  void clear()
  {
    for (auto& w : m_words)
      w = 0;
  }

  std::size_t intersection_count(const NodeSet& other) const
  {
    std::size_t c = 0;
    for (std::size_t i = 0; i < m_words.size(); ++i)
      c += static_cast<std::size_t>(std::popcount(m_words[i] & other.m_words[i]));
    return c;
  }

  /// Returns true if any bit was added.
  bool unite(const NodeSet& other)
  {
    bool changed = false;
    for (std::size_t i = 0; i < m_words.size(); ++i)
    {
      const auto merged = m_words[i] | other.m_words[i];
      changed |= merged != m_words[i];
      m_words[i] = merged;
    }
    return changed;
  }

  NodeSet operator&(const NodeSet& other) const
  {
    NodeSet r(m_size);
    for (std::size_t i = 0; i < m_words.size(); ++i)
      r.m_words[i] = m_words[i] & other.m_words[i];
    return r;
  }

  NodeSet operator-(const NodeSet& other) const
  {
    NodeSet r(m_size);
    for (std::size_t i = 0; i < m_words.size(); ++i)
      r.m_words[i] = m_words[i] & ~other.m_words[i];
    return r;
  }

  bool is_subset_of(const NodeSet& other) const
  {
    for (std::size_t i = 0; i < m_words.size(); ++i)
      if ((m_words[i] & ~other.m_words[i]) != 0)
        return false;
    return true;
  }

  template <typename F>
  void for_each(F&& f) const
  {
    for (std::size_t i = 0; i < m_words.size(); ++i)
    {
      auto w = m_words[i];
      while (w != 0)
      {
        const auto bit = static_cast<std::size_t>(std::countr_zero(w));
        f(static_cast<NodeId>(i * 64 + bit));
        w &= w - 1;
      }
    }
  }

  std::vector<NodeId> to_vector() const
  {
    std::vector<NodeId> out;
    for_each([&](NodeId n) { out.push_back(n); });
    return out;
  }

  std::uint64_t hash() const
  {
    std::uint64_t h = m_size;
    for (auto w : m_words)
      h = (h ^ w) * 0x100000001b3ULL + (h >> 29);
    return h;
  }

  friend bool operator==(const NodeSet&, const NodeSet&) = default;

private:
  std::size_t m_size = 0;
  std::vector<std::uint64_t> m_words;
};

} // namespace oppsim
