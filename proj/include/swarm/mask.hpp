#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace swarm {

// Symmetric agent-agent connectivity with self-edges. The diagonal is always
// true: an agent attends its own message. Entity-agent edges are
// unconditional and are not represented here; the mask governs only
// agent-agent attention.
class AdjacencyMask {
 public:
  AdjacencyMask() : m_(0) {}
  explicit AdjacencyMask(int m, bool connected = false)
      : m_(m), a_(static_cast<size_t>(m) * m, connected ? 1 : 0) {
    for (int i = 0; i < m; ++i) set(i, i, true);
  }

  int size() const { return m_; }

  bool at(int i, int j) const { return a_[static_cast<size_t>(i) * m_ + j] != 0; }

  // Symmetric set; refuses to clear a self-edge.
  void set(int i, int j, bool v) {
    if (i == j && !v) throw std::logic_error("adjacency: self-edges are fixed");
    a_[static_cast<size_t>(i) * m_ + j] = v ? 1 : 0;
    a_[static_cast<size_t>(j) * m_ + i] = v ? 1 : 0;
  }

  int degree(int i) const {
    int d = 0;
    for (int j = 0; j < m_; ++j) d += at(i, j) ? 1 : 0;
    return d;
  }

  // Neighbor indices of agent i in increasing sender order, including i.
  std::vector<int> neighbors(int i) const {
    std::vector<int> out;
    out.reserve(m_);
    for (int j = 0; j < m_; ++j)
      if (at(i, j)) out.push_back(j);
    return out;
  }

  // Undirected off-diagonal edges (i < j).
  std::vector<std::pair<int, int>> edges() const {
    std::vector<std::pair<int, int>> out;
    for (int i = 0; i < m_; ++i)
      for (int j = i + 1; j < m_; ++j)
        if (at(i, j)) out.emplace_back(i, j);
    return out;
  }

  bool operator==(const AdjacencyMask& o) const { return m_ == o.m_ && a_ == o.a_; }

 private:
  int m_;
  std::vector<uint8_t> a_;
};

}  // namespace swarm
