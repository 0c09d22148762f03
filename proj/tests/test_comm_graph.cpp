#include <doctest.h>

#include <set>

#include "swarm/comm_graph.hpp"

using namespace swarm;

TEST_CASE("build_adjacency modes") {
  std::vector<Vec2> pos = {{0, 0}, {0.9, 0}, {1.8, 0}};

  auto uc = build_adjacency(pos, CommMode::Unrestricted);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(uc.at(i, j));

  // chain 0-1-2, no 0-2 edge
  auto rc = build_adjacency(pos, CommMode::Restricted, 1.0);
  CHECK(rc.at(0, 1));
  CHECK(rc.at(1, 2));
  CHECK_FALSE(rc.at(0, 2));
  for (int i = 0; i < 3; ++i) CHECK(rc.at(i, i));

  // distance beyond radius disconnects, diagonal stays
  auto far = build_adjacency({{0, 0}, {1.5, 0}}, CommMode::Restricted, 1.0);
  CHECK_FALSE(far.at(0, 1));
  CHECK(far.at(0, 0));

  // boundary is inclusive
  auto edge = build_adjacency({{0, 0}, {1.0, 0}}, CommMode::Restricted, 1.0);
  CHECK(edge.at(0, 1));

  CHECK_THROWS(build_adjacency(pos, CommMode::Restricted, 0.0));
}

TEST_CASE("restricted masks are invariant under rigid translation") {
  Rng rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Vec2> pos;
    for (int i = 0; i < 5; ++i) pos.push_back({rng.uniform(-2, 2), rng.uniform(-2, 2)});
    auto base = build_adjacency(pos, CommMode::Restricted, 1.0);
    const Vec2 shift = {rng.uniform(-3, 3), rng.uniform(-3, 3)};
    for (auto& p : pos) {
      p.x += shift.x;
      p.y += shift.y;
    }
    CHECK(build_adjacency(pos, CommMode::Restricted, 1.0) == base);
  }
}

TEST_CASE("dropout removes floor(p*E) symmetric off-diagonal edges") {
  AdjacencyMask full(4, true);  // 6 undirected edges
  DropoutSchedule sched(0.5, 10, Rng(77));
  auto masked = sched.apply(full, 0);
  CHECK(sched.dropped().size() == 3);
  int edges = 0;
  for (int i = 0; i < 4; ++i) {
    CHECK(masked.at(i, i));
    for (int j = i + 1; j < 4; ++j) {
      CHECK(masked.at(i, j) == masked.at(j, i));
      edges += masked.at(i, j) ? 1 : 0;
    }
  }
  CHECK(edges == 3);
}

TEST_CASE("dropout p=0 leaves the mask unchanged") {
  AdjacencyMask full(5, true);
  DropoutSchedule sched(0.0, 10, Rng(1));
  CHECK(sched.apply(full, 0) == full);
  CHECK(sched.apply(full, 5) == full);
}

TEST_CASE("dropout set is constant within a period and resampled at its end") {
  AdjacencyMask full(6, true);
  DropoutSchedule sched(0.5, 10, Rng(5));
  auto at10 = sched.apply(full, 10);
  auto d10 = sched.dropped();
  for (int step = 11; step <= 19; ++step) {
    CHECK(sched.apply(full, step) == at10);
    CHECK(sched.dropped() == d10);
  }
  bool changed = false;
  for (int probe = 0; probe < 8 && !changed; ++probe) {
    sched.apply(full, 20 + 10 * probe);
    changed = sched.dropped() != d10;
  }
  CHECK(changed);
}

TEST_CASE("dropout is deterministic given the schedule rng") {
  AdjacencyMask full(5, true);
  DropoutSchedule a(0.5, 10, Rng(9)), b(0.5, 10, Rng(9));
  CHECK(a.apply(full, 0) == b.apply(full, 0));
  CHECK(a.apply(full, 10) == b.apply(full, 10));
}

TEST_CASE("dropout samples only currently-connected pairs") {
  // sparse mask: chain 0-1-2-3
  AdjacencyMask chain(4);
  chain.set(0, 1, true);
  chain.set(1, 2, true);
  chain.set(2, 3, true);
  DropoutSchedule sched(0.5, 10, Rng(13));
  sched.apply(chain, 0);
  CHECK(sched.dropped().size() == 1);
  for (const auto& [i, j] : sched.dropped()) {
    CHECK(i != j);
    CHECK(chain.at(i, j));
  }
}

TEST_CASE("connected components") {
  AdjacencyMask full(3, true);
  auto one = connected_components(full);
  CHECK(one == std::vector<int>{0, 0, 0});

  AdjacencyMask diag(4);
  auto singletons = connected_components(diag);
  CHECK(singletons == std::vector<int>{0, 1, 2, 3});

  AdjacencyMask chain(4);
  chain.set(0, 1, true);
  chain.set(1, 2, true);
  auto comp = connected_components(chain);
  CHECK(comp[0] == comp[1]);
  CHECK(comp[1] == comp[2]);
  CHECK(comp[3] != comp[0]);
}

TEST_CASE("masks always keep a true diagonal") {
  AdjacencyMask m(3);
  CHECK_THROWS(m.set(1, 1, false));
}
