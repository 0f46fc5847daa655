#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "bkh/planar.hpp"

using namespace bkh;

namespace {

Matching m(int n, std::vector<std::pair<int, int>> pairs) {
  return Matching(n, std::move(pairs));
}

long long catalan(int n) {
  // Binomial recurrence, independent of the enumerator.
  long long c = 1;
  for (int i = 0; i < n; ++i) c = c * 2 * (2 * i + 1) / (i + 2);
  return c;
}

}  // namespace

TEST_CASE("matching validation") {
  CHECK_NOTHROW(m(2, {{1, 4}, {2, 3}}));
  CHECK_THROWS_AS(m(2, {{1, 3}, {2, 4}}), std::invalid_argument);  // crossing
  CHECK_THROWS_AS(m(2, {{1, 2}, {2, 3}}), std::invalid_argument);  // repeat
  CHECK_THROWS_AS(m(2, {{1, 2}}), std::invalid_argument);          // count
  CHECK(m(2, {{3, 4}, {2, 1}}).to_text() == "[(1,2),(3,4)]");
}

TEST_CASE("enumerate_matchings counts are Catalan") {
  for (int n = 1; n <= 6; ++n) {
    auto all = enumerate_matchings(n);
    CHECK(static_cast<long long>(all.size()) == catalan(n));
    std::set<Matching> distinct(all.begin(), all.end());
    CHECK(distinct.size() == all.size());
  }
  CHECK(enumerate_matchings(1).size() == 1);
  CHECK(enumerate_matchings(3).size() == 5);
  CHECK(enumerate_matchings(4).size() == 14);
  CHECK_THROWS_AS(enumerate_matchings(0), std::invalid_argument);
  CHECK_THROWS_AS(enumerate_matchings(99), std::invalid_argument);
}

TEST_CASE("matching <-> partition bijection") {
  CHECK(matching_to_partition(m(2, {{1, 2}, {3, 4}})).to_text() ==
        "{{1},{2}}");
  CHECK(matching_to_partition(m(2, {{1, 4}, {2, 3}})).to_text() == "{{1,2}}");
  for (int n = 1; n <= 5; ++n) {
    std::set<Partition> images;
    for (const Matching& a : enumerate_matchings(n)) {
      Partition p = matching_to_partition(a);
      images.insert(p);
      CHECK(partition_to_matching(p) == a);
    }
    CHECK(static_cast<long long>(images.size()) == catalan(n));
  }
}

TEST_CASE("refines basics") {
  Partition finest(3, {{1}, {2}, {3}});
  Partition coarsest(3, {{1, 2, 3}});
  Partition p12(3, {{1, 2}, {3}});
  Partition p23(3, {{1}, {2, 3}});
  CHECK(refines(finest, coarsest));
  CHECK(refines(finest, p12));
  CHECK(refines(p12, coarsest));
  CHECK(!refines(coarsest, finest));
  CHECK(!refines(p12, p23));
  CHECK(!refines(p23, p12));
  CHECK(refines(p12, p12));
  CHECK_THROWS_AS(refines(finest, Partition(2, {{1}, {2}})),
                  std::invalid_argument);
}

TEST_CASE("partition validation rejects crossings") {
  CHECK_THROWS_AS(Partition(4, {{1, 3}, {2, 4}}), std::invalid_argument);
  CHECK_NOTHROW(Partition(4, {{1, 4}, {2, 3}}));
}

TEST_CASE("kreweras_dual sends finest to coarsest and reverses order") {
  for (int n = 1; n <= 5; ++n) {
    auto all = enumerate_partitions(n);
    Partition finest(n, [n] {
      std::vector<std::vector<int>> b;
      for (int i = 1; i <= n; ++i) b.push_back({i});
      return b;
    }());
    Partition coarsest(n, [n] {
      std::vector<int> b;
      for (int i = 1; i <= n; ++i) b.push_back(i);
      return std::vector<std::vector<int>>{b};
    }());
    CHECK(kreweras_dual(finest) == coarsest);
    CHECK(kreweras_dual(coarsest) == finest);

    std::set<Partition> images;
    for (const Partition& p : all) images.insert(kreweras_dual(p));
    CHECK(images.size() == all.size());  // bijection

    if (n <= 4) {
      for (const Partition& p : all)
        for (const Partition& q : all)
          CHECK(refines(p, q) == refines(kreweras_dual(q), kreweras_dual(p)));
    }
  }
}

TEST_CASE("hasse_graph small cases") {
  HasseGraph g1 = hasse_graph(1);
  CHECK(g1.vertices.size() == 1);
  CHECK(g1.edges.empty());

  HasseGraph g2 = hasse_graph(2);
  CHECK(g2.vertices.size() == 2);
  CHECK(g2.edges.size() == 1);

  // NC_3: finest -> three two-block partitions -> coarsest, 6 covers.
  HasseGraph g3 = hasse_graph(3);
  CHECK(g3.vertices.size() == 5);
  CHECK(g3.edges.size() == 6);
}

TEST_CASE("hasse edges match an independent cover computation") {
  for (int n = 2; n <= 4; ++n) {
    auto all = enumerate_partitions(n);
    HasseGraph g = hasse_graph(n);
    std::set<std::pair<std::size_t, std::size_t>> expected;
    for (std::size_t i = 0; i < all.size(); ++i)
      for (std::size_t j = 0; j < all.size(); ++j) {
        if (i == j || !refines(all[i], all[j])) continue;
        bool strictly_between = false;
        for (std::size_t k = 0; k < all.size(); ++k) {
          if (k == i || k == j) continue;
          if (refines(all[i], all[k]) && refines(all[k], all[j]))
            strictly_between = true;
        }
        if (!strictly_between)
          expected.insert({g.index_of(all[i]) < g.index_of(all[j])
                               ? std::make_pair(g.index_of(all[i]),
                                                g.index_of(all[j]))
                               : std::make_pair(g.index_of(all[j]),
                                                g.index_of(all[i]))});
      }
    std::set<std::pair<std::size_t, std::size_t>> got(g.edges.begin(),
                                                      g.edges.end());
    CHECK(got == expected);
    for (const auto& [i, j] : got) {
      auto bi = g.vertices[i].block_count();
      auto bj = g.vertices[j].block_count();
      CHECK((bi > bj ? bi - bj : bj - bi) == 1);
    }
  }
}

TEST_CASE("surgery on the spec example") {
  Matching a = m(2, {{1, 2}, {3, 4}});
  Matching b = surger(a, Bridge{2, 3});
  CHECK(b.to_text() == "[(1,4),(2,3)]");
  CHECK_THROWS_AS(surger(a, Bridge{1, 2}), std::invalid_argument);  // same arc
  CHECK_THROWS_AS(surger(a, Bridge{1, 4}), std::invalid_argument);  // undrawable
}

TEST_CASE("bridges: identification and counts") {
  CHECK(bridges(m(1, {{1, 2}})).empty());
  auto b1 = bridges(m(2, {{1, 2}, {3, 4}}));
  REQUIRE(b1.size() == 1);
  CHECK(b1[0] == Bridge{2, 3});
  // (1,2) and (3,4) act on the same arcs with the same result: identified.
  auto b2 = bridges(m(2, {{1, 4}, {2, 3}}));
  REQUIRE(b2.size() == 1);
  CHECK(b2[0] == Bridge{1, 2});

  // Identified bridge count over B^n = directed cover count of NC_n.
  for (int n = 2; n <= 4; ++n) {
    std::size_t total = 0;
    for (const Matching& a : enumerate_matchings(n)) total += bridges(a).size();
    CHECK(total == 2 * hasse_graph(n).edges.size());
  }
}

TEST_CASE("dual_bridge reverses every surgery") {
  for (int n = 1; n <= 3; ++n)
    for (const Matching& a : enumerate_matchings(n))
      for (const Bridge& g : bridges(a)) {
        Bridge back = dual_bridge(a, g);
        CHECK(surger(surger(a, g), back) == a);
      }
}

TEST_CASE("surgery moves the partition by one cover step") {
  for (int n = 2; n <= 4; ++n)
    for (const Matching& a : enumerate_matchings(n)) {
      auto pa = matching_to_partition(a);
      for (const Bridge& g : bridges(a)) {
        auto pb = matching_to_partition(surger(a, g));
        auto ca = pa.block_count(), cb = pb.block_count();
        CHECK((ca > cb ? ca - cb : cb - ca) == 1);
        CHECK((refines(pa, pb) || refines(pb, pa)));
      }
    }
}

TEST_CASE("geodesic graph: NC_3 finest to coarsest") {
  Partition finest(3, {{1}, {2}, {3}});
  Partition coarsest(3, {{1, 2, 3}});
  GeodesicGraph g = geodesic_graph(finest, coarsest);
  CHECK(g.geodesics.size() == 3);
  CHECK(g.edges.size() == 3);  // pairwise adjacent
  CHECK(is_geodesic_graph_connected(finest, coarsest));
}

TEST_CASE("geodesic graph: trivial cases") {
  Partition p(2, {{1}, {2}});
  CHECK(geodesic_graph(p, p).geodesics.size() == 1);
  CHECK(is_geodesic_graph_connected(p, p));
  Partition q(2, {{1, 2}});
  CHECK(geodesic_graph(p, q).geodesics.size() == 1);
  CHECK(is_geodesic_graph_connected(p, q));
}

TEST_CASE("geodesic connectivity holds across NC_4") {
  auto all = enumerate_partitions(4);
  for (const Partition& p : all)
    for (const Partition& q : all) CHECK(is_geodesic_graph_connected(p, q));
}
