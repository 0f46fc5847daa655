#pragma once
// Crossingless matchings of 2n boundary points, noncrossing partitions of n
// points, the refinement lattice with its Hasse diagram, bridges/surgeries,
// and geodesic-graph connectivity.
//
// Conventions: boundary points are numbered 1..2n bottom-to-top; partition
// points 1..n with point i sitting between boundary points 2i-1 and 2i.

#include <algorithm>
#include <compare>
#include <cstddef>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace bkh {

class Matching {
 public:
  Matching() = default;
  // Validates: perfect matching on 1..2n, noncrossing.
  Matching(int n, std::vector<std::pair<int, int>> pairs);

  int n() const { return n_; }
  const std::vector<std::pair<int, int>>& pairs() const { return pairs_; }
  int partner(int p) const { return partner_[p]; }
  std::pair<int, int> arc_of(int p) const {
    return {std::min(p, partner(p)), std::max(p, partner(p))};
  }

  std::string to_text() const;  // e.g. [(1,4),(2,3)]

  auto operator<=>(const Matching& o) const {
    return std::tie(n_, pairs_) <=> std::tie(o.n_, o.pairs_);
  }
  bool operator==(const Matching& o) const {
    return n_ == o.n_ && pairs_ == o.pairs_;
  }

 private:
  int n_ = 0;
  std::vector<std::pair<int, int>> pairs_;  // (lo,hi), sorted by lo
  std::vector<int> partner_;                // size 2n+1, 1-based
};

class Partition {
 public:
  Partition() = default;
  // Validates: blocks partition 1..n and are noncrossing.
  Partition(int n, std::vector<std::vector<int>> blocks);

  int n() const { return n_; }
  const std::vector<std::vector<int>>& blocks() const { return blocks_; }
  std::size_t block_count() const { return blocks_.size(); }
  std::size_t block_of(int i) const { return block_of_[i]; }

  std::string to_text() const;  // e.g. {{1,2},{3}}

  auto operator<=>(const Partition& o) const {
    return std::tie(n_, blocks_) <=> std::tie(o.n_, o.blocks_);
  }
  bool operator==(const Partition& o) const {
    return n_ == o.n_ && blocks_ == o.blocks_;
  }

 private:
  int n_ = 0;
  std::vector<std::vector<int>> blocks_;  // each sorted; sorted by min
  std::vector<std::size_t> block_of_;     // size n+1, 1-based
};

// A bridge is stored by its two boundary endpoints p < q on the host
// matching.  It is drawable when every point strictly between p and q is
// matched to another such point; it is a surgery bridge when additionally
// p and q lie on distinct arcs.
struct Bridge {
  int p = 0;
  int q = 0;
  auto operator<=>(const Bridge&) const = default;
};

// All crossingless matchings, lexicographically ordered; |result| = Catalan(n).
std::vector<Matching> enumerate_matchings(int n);

// Checkerboard bijection with noncrossing partitions: two partition points
// belong to one block exactly when their gaps lie in the same complementary
// region of the arc diagram.
Partition matching_to_partition(const Matching& a);
Matching partition_to_matching(const Partition& p);

// NC_n in the canonical order induced by enumerate_matchings.
std::vector<Partition> enumerate_partitions(int n);

// True iff every block of p is contained in a block of q.
bool refines(const Partition& p, const Partition& q);

// Order-reversing bijection of NC_n realized by complementing the
// checkerboard picture and rotating one step.
Partition kreweras_dual(const Partition& p);

struct HasseGraph {
  std::vector<Partition> vertices;
  std::vector<std::pair<std::size_t, std::size_t>> edges;  // i < j, undirected
  std::vector<std::vector<std::size_t>> adjacency;
  std::size_t index_of(const Partition& p) const;
};

// Cover relations of the refinement order on NC_n, as an undirected graph.
HasseGraph hasse_graph(int n);

bool bridge_is_drawable(const Matching& a, const Bridge& g);
bool bridge_is_surgery(const Matching& a, const Bridge& g);

// Planar surgery along a drawable bridge joining arcs (p,p'), (q,q'):
// replaces them by (p,q), (p',q').  Throws on invalid bridges.
Matching surger(const Matching& a, const Bridge& g);

// The reverse bridge on surger(a,g): surgering it restores a.  Deterministic
// (lexicographically least among bridges with that effect).
Bridge dual_bridge(const Matching& a, const Bridge& g);

// All surgery bridges on a, deduplicated: bridges acting on the same arc
// pair with the same resulting matching are identified (least endpoints kept).
std::vector<Bridge> bridges(const Matching& a);

struct GeodesicGraph {
  std::vector<std::vector<Partition>> geodesics;  // minimal paths p -> q
  std::vector<std::pair<std::size_t, std::size_t>> edges;  // differ in 1 spot
};

// All minimal-length paths p -> q in the undirected Hasse graph, with edges
// between paths differing in exactly one intermediate vertex.
GeodesicGraph geodesic_graph(const Partition& p, const Partition& q);
bool is_geodesic_graph_connected(const Partition& p, const Partition& q);

}  // namespace bkh
