// Planar combinatorics: crossingless matchings, noncrossing partitions,
// Hasse and geodesic graphs, bridges and surgeries.

#include "bkh/planar.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace bkh {

namespace {

constexpr int kMaxN = 8;

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

Matching::Matching(int n, std::vector<std::pair<int, int>> pairs) : n_(n) {
  require(n >= 0 && n <= kMaxN, "matching: n out of bound");
  require(static_cast<int>(pairs.size()) == n, "matching: wrong pair count");
  partner_.assign(2 * n + 1, 0);
  for (auto& [a, b] : pairs) {
    if (a > b) std::swap(a, b);
    require(a >= 1 && b <= 2 * n && a != b, "matching: point out of range");
    require(partner_[a] == 0 && partner_[b] == 0, "matching: repeated point");
    partner_[a] = b;
    partner_[b] = a;
  }
  for (int p = 1; p <= 2 * n; ++p)
    require(partner_[p] != 0, "matching: unmatched point");
  std::sort(pairs.begin(), pairs.end());
  for (const auto& [a, b] : pairs)
    for (const auto& [c, d] : pairs)
      require(!(a < c && c < b && b < d), "matching: crossing pairs");
  pairs_ = std::move(pairs);
}

std::string Matching::to_text() const {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < pairs_.size(); ++i) {
    if (i) os << ',';
    os << '(' << pairs_[i].first << ',' << pairs_[i].second << ')';
  }
  os << ']';
  return os.str();
}

Partition::Partition(int n, std::vector<std::vector<int>> blocks) : n_(n) {
  require(n >= 0 && n <= 2 * kMaxN, "partition: n out of bound");
  block_of_.assign(n + 1, 0);
  std::vector<bool> seen(n + 1, false);
  for (auto& block : blocks) {
    require(!block.empty(), "partition: empty block");
    std::sort(block.begin(), block.end());
    for (int x : block) {
      require(x >= 1 && x <= n, "partition: point out of range");
      require(!seen[x], "partition: repeated point");
      seen[x] = true;
    }
  }
  for (int x = 1; x <= n; ++x) require(seen[x], "partition: missing point");
  std::sort(blocks.begin(), blocks.end());
  for (std::size_t b = 0; b < blocks.size(); ++b)
    for (int x : blocks[b]) block_of_[x] = b;
  // Noncrossing: no a < b < c < d with a,c together and b,d together apart.
  for (int a = 1; a <= n; ++a)
    for (int b = a + 1; b <= n; ++b)
      for (int c = b + 1; c <= n; ++c)
        for (int d = c + 1; d <= n; ++d)
          require(!(block_of_[a] == block_of_[c] &&
                    block_of_[b] == block_of_[d] &&
                    block_of_[a] != block_of_[b]),
                  "partition: crossing blocks");
  blocks_ = std::move(blocks);
}

std::string Partition::to_text() const {
  std::ostringstream os;
  os << '{';
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    if (b) os << ',';
    os << '{';
    for (std::size_t i = 0; i < blocks_[b].size(); ++i) {
      if (i) os << ',';
      os << blocks_[b][i];
    }
    os << '}';
  }
  os << '}';
  return os.str();
}

namespace {

// All crossingless pairings of the interval [lo, hi], lexicographic.
void enumerate_interval(int lo, int hi,
                        std::vector<std::vector<std::pair<int, int>>>& out) {
  if (lo > hi) {
    out.push_back({});
    return;
  }
  for (int k = lo + 1; k <= hi; k += 2) {
    std::vector<std::vector<std::pair<int, int>>> inside, outside;
    enumerate_interval(lo + 1, k - 1, inside);
    enumerate_interval(k + 1, hi, outside);
    for (const auto& in : inside)
      for (const auto& outp : outside) {
        std::vector<std::pair<int, int>> all;
        all.reserve(in.size() + outp.size() + 1);
        all.emplace_back(lo, k);
        all.insert(all.end(), in.begin(), in.end());
        all.insert(all.end(), outp.begin(), outp.end());
        out.push_back(std::move(all));
      }
  }
}

}  // namespace

std::vector<Matching> enumerate_matchings(int n) {
  require(n >= 1 && n <= kMaxN, "enumerate_matchings: n out of bound");
  std::vector<std::vector<std::pair<int, int>>> raw;
  enumerate_interval(1, 2 * n, raw);
  std::vector<Matching> out;
  out.reserve(raw.size());
  for (auto& pairs : raw) out.emplace_back(n, std::move(pairs));
  std::sort(out.begin(), out.end());
  return out;
}

Partition matching_to_partition(const Matching& a) {
  int n = a.n();
  // Gap i sits between boundary points 2i-1 and 2i; group gaps by the
  // innermost arc covering them (two gaps under the same innermost arc lie
  // in one complementary region of the diagram).
  std::map<std::pair<int, int>, std::vector<int>> by_region;
  for (int i = 1; i <= n; ++i) {
    std::pair<int, int> innermost{0, 0};
    for (const auto& arc : a.pairs()) {
      if (arc.first <= 2 * i - 1 && arc.second >= 2 * i) {
        if (innermost.first == 0 || arc.first > innermost.first)
          innermost = arc;
      }
    }
    require(innermost.first != 0, "matching_to_partition: uncovered gap");
    by_region[innermost].push_back(i);
  }
  std::vector<std::vector<int>> blocks;
  for (auto& [arc, block] : by_region) blocks.push_back(std::move(block));
  return Partition(n, std::move(blocks));
}

Matching partition_to_matching(const Partition& p) {
  std::vector<std::pair<int, int>> pairs;
  for (const auto& block : p.blocks()) {
    pairs.emplace_back(2 * block.front() - 1, 2 * block.back());
    for (std::size_t t = 0; t + 1 < block.size(); ++t)
      pairs.emplace_back(2 * block[t], 2 * block[t + 1] - 1);
  }
  return Matching(p.n(), std::move(pairs));
}

std::vector<Partition> enumerate_partitions(int n) {
  std::vector<Partition> out;
  for (const Matching& a : enumerate_matchings(n))
    out.push_back(matching_to_partition(a));
  return out;
}

bool refines(const Partition& p, const Partition& q) {
  require(p.n() == q.n(), "refines: size mismatch");
  for (const auto& block : p.blocks()) {
    std::size_t host = q.block_of(block.front());
    for (int x : block)
      if (q.block_of(x) != host) return false;
  }
  return true;
}

Partition kreweras_dual(const Partition& p) {
  int n = p.n();
  // Permutation of the complement picture: blocks of the complement are the
  // cycles of x -> pi_p^{-1}(shift(x)), where pi_p cycles each block upward.
  std::vector<int> pi(n + 1), pi_inv(n + 1);
  for (const auto& block : p.blocks()) {
    for (std::size_t t = 0; t < block.size(); ++t) {
      int from = block[t];
      int to = block[(t + 1) % block.size()];
      pi[from] = to;
    }
  }
  for (int x = 1; x <= n; ++x) pi_inv[pi[x]] = x;
  auto shift = [n](int x) { return x == n ? 1 : x + 1; };

  std::vector<bool> seen(n + 1, false);
  std::vector<std::vector<int>> blocks;
  for (int start = 1; start <= n; ++start) {
    if (seen[start]) continue;
    std::vector<int> cycle;
    int x = start;
    while (!seen[x]) {
      seen[x] = true;
      cycle.push_back(x);
      x = pi_inv[shift(x)];
    }
    blocks.push_back(std::move(cycle));
  }
  // The construction ends with a one-step rotation of the disk.
  for (auto& block : blocks)
    for (int& x : block) x = shift(x);
  return Partition(n, std::move(blocks));
}

std::size_t HasseGraph::index_of(const Partition& p) const {
  for (std::size_t i = 0; i < vertices.size(); ++i)
    if (vertices[i] == p) return i;
  throw std::invalid_argument("partition not a vertex");
}

HasseGraph hasse_graph(int n) {
  HasseGraph g;
  g.vertices = enumerate_partitions(n);
  g.adjacency.assign(g.vertices.size(), {});
  for (std::size_t i = 0; i < g.vertices.size(); ++i)
    for (std::size_t j = 0; j < g.vertices.size(); ++j) {
      if (i == j) continue;
      const Partition& a = g.vertices[i];
      const Partition& b = g.vertices[j];
      // Covers in the refinement order merge exactly two blocks.
      if (a.block_count() == b.block_count() + 1 && refines(a, b)) {
        g.edges.emplace_back(std::min(i, j), std::max(i, j));
        g.adjacency[i].push_back(j);
        g.adjacency[j].push_back(i);
      }
    }
  return g;
}

bool bridge_is_drawable(const Matching& a, const Bridge& g) {
  if (g.p < 1 || g.q > 2 * a.n() || g.p >= g.q) return false;
  for (int x = g.p + 1; x < g.q; ++x) {
    int y = a.partner(x);
    if (y <= g.p || y >= g.q) return false;
  }
  return true;
}

bool bridge_is_surgery(const Matching& a, const Bridge& g) {
  return bridge_is_drawable(a, g) && a.partner(g.p) != g.q;
}

Matching surger(const Matching& a, const Bridge& g) {
  require(bridge_is_surgery(a, g), "surger: invalid bridge");
  int p2 = a.partner(g.p), q2 = a.partner(g.q);
  std::vector<std::pair<int, int>> pairs;
  for (const auto& arc : a.pairs())
    if (arc != a.arc_of(g.p) && arc != a.arc_of(g.q)) pairs.push_back(arc);
  pairs.emplace_back(g.p, g.q);
  pairs.emplace_back(p2, q2);
  return Matching(a.n(), std::move(pairs));
}

Bridge dual_bridge(const Matching& a, const Bridge& g) {
  Matching after = surger(a, g);
  auto arc1 = after.arc_of(g.p);
  int p2 = a.partner(g.p);
  auto arc2 = after.arc_of(p2);
  for (int u = 1; u <= 2 * a.n(); ++u) {
    for (int v = u + 1; v <= 2 * a.n(); ++v) {
      bool endpoints_ok =
          (after.arc_of(u) == arc1 && after.arc_of(v) == arc2) ||
          (after.arc_of(u) == arc2 && after.arc_of(v) == arc1);
      if (!endpoints_ok) continue;
      Bridge candidate{u, v};
      if (!bridge_is_surgery(after, candidate)) continue;
      if (surger(after, candidate) == a) return candidate;
    }
  }
  throw std::logic_error("dual_bridge: no reversing bridge found");
}

std::vector<Bridge> bridges(const Matching& a) {
  // key: (arc pair, resulting matching) -> least bridge with that effect.
  std::map<std::tuple<std::pair<int, int>, std::pair<int, int>, Matching>,
           Bridge>
      distinct;
  for (int u = 1; u <= 2 * a.n(); ++u)
    for (int v = u + 1; v <= 2 * a.n(); ++v) {
      Bridge g{u, v};
      if (!bridge_is_surgery(a, g)) continue;
      auto lo = a.arc_of(u), hi = a.arc_of(v);
      if (hi < lo) std::swap(lo, hi);
      auto key = std::make_tuple(lo, hi, surger(a, g));
      // (u,v) scan order is lexicographic, so the first hit is the least.
      distinct.emplace(key, g);
    }
  std::vector<Bridge> out;
  for (const auto& [key, g] : distinct) out.push_back(g);
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

void collect_geodesics(const HasseGraph& g, std::size_t at, std::size_t goal,
                       const std::vector<int>& dist_to_goal,
                       std::vector<std::size_t>& path,
                       std::vector<std::vector<std::size_t>>& out) {
  path.push_back(at);
  if (at == goal) {
    out.push_back(path);
  } else {
    for (std::size_t next : g.adjacency[at])
      if (dist_to_goal[next] == dist_to_goal[at] - 1)
        collect_geodesics(g, next, goal, dist_to_goal, path, out);
  }
  path.pop_back();
}

}  // namespace

GeodesicGraph geodesic_graph(const Partition& p, const Partition& q) {
  require(p.n() == q.n(), "geodesic_graph: size mismatch");
  HasseGraph g = hasse_graph(p.n());
  std::size_t src = g.index_of(p), dst = g.index_of(q);

  std::vector<int> dist(g.vertices.size(), -1);
  std::vector<std::size_t> queue{dst};
  dist[dst] = 0;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    std::size_t at = queue[head];
    for (std::size_t next : g.adjacency[at])
      if (dist[next] < 0) {
        dist[next] = dist[at] + 1;
        queue.push_back(next);
      }
  }
  require(dist[src] >= 0, "geodesic_graph: vertices not connected");

  std::vector<std::vector<std::size_t>> paths;
  std::vector<std::size_t> path;
  collect_geodesics(g, src, dst, dist, path, paths);

  GeodesicGraph out;
  for (const auto& pth : paths) {
    std::vector<Partition> verts;
    for (std::size_t v : pth) verts.push_back(g.vertices[v]);
    out.geodesics.push_back(std::move(verts));
  }
  for (std::size_t i = 0; i < paths.size(); ++i)
    for (std::size_t j = i + 1; j < paths.size(); ++j) {
      int diffs = 0;
      for (std::size_t t = 0; t < paths[i].size(); ++t)
        if (paths[i][t] != paths[j][t]) ++diffs;
      if (diffs == 1) out.edges.emplace_back(i, j);
    }
  return out;
}

bool is_geodesic_graph_connected(const Partition& p, const Partition& q) {
  GeodesicGraph g = geodesic_graph(p, q);
  if (g.geodesics.size() <= 1) return true;
  std::vector<std::vector<std::size_t>> adj(g.geodesics.size());
  for (const auto& [i, j] : g.edges) {
    adj[i].push_back(j);
    adj[j].push_back(i);
  }
  std::vector<bool> seen(g.geodesics.size(), false);
  std::vector<std::size_t> queue{0};
  seen[0] = true;
  for (std::size_t head = 0; head < queue.size(); ++head)
    for (std::size_t next : adj[queue[head]])
      if (!seen[next]) {
        seen[next] = true;
        queue.push_back(next);
      }
  return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
}

}  // namespace bkh
