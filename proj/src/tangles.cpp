// Tangle words and their complexes.  Every construction here runs on one
// shared primitive: a sweep over the event list that records the smoothed
// diagram as a graph on stable anchors (boundary points, crossing corners,
// cup ends).  Components of that graph are the boundary arcs and free
// circles of a resolution; comparing components across two resolutions that
// differ at one crossing classifies the saddle and drives both the
// projective-module differential and the closed Khovanov cube.

#include "bkh/tangles.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace bkh {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

std::string event_text(const TangleEvent& e) {
  switch (e.kind) {
    case TangleEvent::Kind::kCap:
      return "cap " + std::to_string(e.at);
    case TangleEvent::Kind::kCup:
      return "cup " + std::to_string(e.at);
    case TangleEvent::Kind::kCrossPos:
      return "x+ " + std::to_string(e.at);
    case TangleEvent::Kind::kCrossNeg:
      return "x- " + std::to_string(e.at);
  }
  return {};
}

bool is_crossing(const TangleEvent& e) {
  return e.kind == TangleEvent::Kind::kCrossPos ||
         e.kind == TangleEvent::Kind::kCrossNeg;
}

// Union-find with an orientation parity on each edge to the parent: two
// strands in one class either agree (parity 0) or disagree (parity 1) about
// their direction along the sweep.
class ParityDSU {
 public:
  int make() {
    parent_.push_back(static_cast<int>(parent_.size()));
    parity_.push_back(0);
    return parent_.back();
  }
  std::pair<int, int> find(int x) {
    if (parent_[x] == x) return {x, 0};
    auto [root, par] = find(parent_[x]);
    parent_[x] = root;
    parity_[x] ^= par;
    return {root, parity_[x]};
  }
  // Declares direction(a) = direction(b) xor rel; false on contradiction.
  bool unite(int a, int b, int rel) {
    auto [ra, pa] = find(a);
    auto [rb, pb] = find(b);
    if (ra == rb) return (pa ^ pb) == rel;
    parent_[ra] = rb;
    parity_[ra] = pa ^ pb ^ rel;
    return true;
  }

 private:
  std::vector<int> parent_;
  std::vector<int> parity_;
};

// Anchor layout: boundary point p gets anchor bdy_base + p - 1; each event
// then claims a block in order (four corners for a crossing, in the order
// bottom-left, bottom-right, top-left, top-right; two ends for a cup).
std::vector<int> event_anchor_bases(const std::vector<TangleEvent>& events,
                                    int first, int* total) {
  std::vector<int> bases(events.size(), 0);
  int next = first;
  for (std::size_t t = 0; t < events.size(); ++t) {
    bases[t] = next;
    if (is_crossing(events[t])) next += 4;
    if (events[t].kind == TangleEvent::Kind::kCup) next += 2;
  }
  if (total) *total = next - first;
  return bases;
}

enum Corner { kBL = 0, kBR = 1, kTL = 2, kTR = 3 };

// Sweeps the word under the given smoothing choices (bits[k] for the k-th
// crossing) and appends the strand segments of the smoothed picture as
// anchor-pair edges.
void simulate_word(const TangleWord& w, const int* bits, int bdy_base,
                   const std::vector<int>& bases,
                   std::vector<std::pair<int, int>>* edges) {
  std::vector<int> last;  // per running strand: its most recent anchor
  last.reserve(static_cast<std::size_t>(w.points()) + 4);
  for (int p = 1; p <= w.points(); ++p) last.push_back(bdy_base + p - 1);

  int crossing = 0;
  for (std::size_t t = 0; t < w.events().size(); ++t) {
    const TangleEvent& e = w.events()[t];
    const std::size_t i = static_cast<std::size_t>(e.at) - 1;
    switch (e.kind) {
      case TangleEvent::Kind::kCap:
        edges->emplace_back(last[i], last[i + 1]);
        last.erase(last.begin() + static_cast<std::ptrdiff_t>(i), last.begin() + static_cast<std::ptrdiff_t>(i) + 2);
        break;
      case TangleEvent::Kind::kCup:
        edges->emplace_back(bases[t], bases[t] + 1);
        last.insert(last.begin() + static_cast<std::ptrdiff_t>(i), {bases[t], bases[t] + 1});
        break;
      case TangleEvent::Kind::kCrossPos:
      case TangleEvent::Kind::kCrossNeg: {
        const int b = bases[t];
        const int parallel =
            e.kind == TangleEvent::Kind::kCrossPos ? 1 - bits[crossing] : bits[crossing];
        edges->emplace_back(last[i], b + kBL);
        edges->emplace_back(last[i + 1], b + kBR);
        if (parallel) {
          edges->emplace_back(b + kBL, b + kTL);
          edges->emplace_back(b + kBR, b + kTR);
        } else {
          edges->emplace_back(b + kBL, b + kBR);
          edges->emplace_back(b + kTL, b + kTR);
        }
        last[i] = b + kTL;
        last[i + 1] = b + kTR;
        ++crossing;
        break;
      }
    }
  }
}

struct Pieces {
  std::vector<std::pair<int, int>> arcs;   // boundary pairs (p, q), p < q
  std::vector<std::vector<int>> arc_sets;  // anchor sets aligned with arcs
  std::vector<std::vector<int>> circles;   // anchor sets, by smallest anchor
};

// Splits the anchor graph into components.  Anchors below `points` are
// boundary anchors; a component containing them is an arc, the rest are
// free circles ordered by their smallest (earliest-created) anchor.
Pieces split_components(const std::vector<std::pair<int, int>>& edges,
                        int points) {
  std::map<int, int> parent;
  auto find = [&parent](int x) {
    while (parent.try_emplace(x, x).first->second != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (const auto& [a, b] : edges) parent[find(a)] = find(b);

  std::map<int, std::vector<int>> members;
  for (const auto& [a, unused] : parent) members[find(a)].push_back(a);

  Pieces out;
  std::vector<std::pair<int, std::vector<int>>> comps;
  for (auto& [root, anchors] : members) {
    std::sort(anchors.begin(), anchors.end());
    comps.emplace_back(anchors.front(), std::move(anchors));
  }
  std::sort(comps.begin(), comps.end());
  for (auto& [minA, anchors] : comps) {
    std::vector<int> bdy;
    for (int a : anchors) {
      if (a < points) bdy.push_back(a);
    }
    if (bdy.empty()) {
      out.circles.push_back(std::move(anchors));
    } else {
      if (bdy.size() != 2) {
        throw std::logic_error("tangle component with odd boundary contact");
      }
      out.arcs.emplace_back(bdy[0] + 1, bdy[1] + 1);
      out.arc_sets.push_back(std::move(anchors));
    }
  }
  return out;
}

Matching matching_from_arcs(int n, const std::vector<std::pair<int, int>>& arcs) {
  return Matching(n, arcs);
}

long long parity(long long v) { return ((v % 2) + 2) % 2; }

std::string resolution_name(unsigned rho, int k, unsigned mask, int circles) {
  std::string id = "r";
  for (int c = 0; c < k; ++c) id += ((rho >> c) & 1u) ? '1' : '0';
  if (circles > 0) {
    id += ':';
    for (int ci = 0; ci < circles; ++ci) id += ((mask >> ci) & 1u) ? '-' : '+';
  }
  return id;
}

// The dotted-circle label on the arc through boundary point p of matching a.
SignedDiagram dotted_arc_label(const Matching& a, int p) {
  std::vector<int> signs(static_cast<std::size_t>(SignedDiagram::circle_count(a, a)), 1);
  const SignedDiagram plain(a, a, signs);
  signs[static_cast<std::size_t>(plain.circle_of_point(p))] = -1;
  return SignedDiagram(a, a, signs);
}

// One smoothed cube vertex of a word.
struct WordVertex {
  Matching matching;
  Pieces pieces;
  std::size_t base = 0;  // generator index of the all-plus sign pattern
};

// Matches circles of two vertices by anchor-set equality.  src_of_dst[di] is
// the source circle carried to target circle di, or -1 for a circle created
// by the saddle; src_open lists source circles the saddle consumed.
void align_circles(const Pieces& src, const Pieces& dst,
                   std::vector<int>* src_of_dst, std::vector<int>* src_open) {
  std::map<std::vector<int>, int> by_set;
  for (std::size_t si = 0; si < src.circles.size(); ++si)
    by_set[src.circles[si]] = static_cast<int>(si);
  src_of_dst->assign(dst.circles.size(), -1);
  for (std::size_t di = 0; di < dst.circles.size(); ++di) {
    auto it = by_set.find(dst.circles[di]);
    if (it != by_set.end()) {
      (*src_of_dst)[di] = it->second;
      by_set.erase(it);
    }
  }
  src_open->clear();
  for (const auto& [set, si] : by_set) src_open->push_back(si);
  std::sort(src_open->begin(), src_open->end());
}

// Boundary pairs of the arcs whose anchor sets appear on exactly one side:
// one pair from each side for a circle join/split (the same pair twice),
// two from each side for an arc-arc surgery.
std::vector<std::pair<int, int>> unmatched_arcs(const Pieces& a, const Pieces& b) {
  std::map<std::vector<int>, std::pair<int, int>> am, bm;
  for (std::size_t i = 0; i < a.arcs.size(); ++i) am[a.arc_sets[i]] = a.arcs[i];
  for (std::size_t i = 0; i < b.arcs.size(); ++i) bm[b.arc_sets[i]] = b.arcs[i];
  std::vector<std::pair<int, int>> out;
  for (const auto& [set, pq] : am)
    if (!bm.count(set)) out.push_back(pq);
  for (const auto& [set, pq] : bm)
    if (!am.count(set)) out.push_back(pq);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TangleWord::TangleWord(TangleSide side, int points, std::vector<bool> orient_in,
                       std::vector<TangleEvent> events)
    : side_(side),
      points_(points),
      orient_in_(std::move(orient_in)),
      events_(std::move(events)) {
  require(points_ > 0 && points_ % 2 == 0,
          "tangle word: boundary point count must be positive and even");
  require(static_cast<int>(orient_in_.size()) == points_,
          "tangle word: need one orientation mark per boundary point");

  // Strand bookkeeping plus orientation propagation in one sweep.  Each
  // running strand carries a parity-DSU node; caps and cups relate the two
  // joined strands with opposite directions, crossings swap positions.
  ParityDSU dsu;
  std::vector<int> node;
  std::vector<int> bdy_node;
  for (int p = 0; p < points_; ++p) {
    node.push_back(dsu.make());
    bdy_node.push_back(node.back());
  }
  std::vector<std::pair<int, int>> crossing_nodes;
  strands_before_.push_back(points_);
  for (std::size_t t = 0; t < events_.size(); ++t) {
    const TangleEvent& e = events_[t];
    const std::string where = "tangle word: event " + std::to_string(t + 1) + ": ";
    const int count = static_cast<int>(node.size());
    const std::size_t i = static_cast<std::size_t>(e.at) - 1;
    switch (e.kind) {
      case TangleEvent::Kind::kCap: {
        require(e.at >= 1 && e.at + 1 <= count, where + "cap position out of range");
        require(dsu.unite(node[i], node[i + 1], 1),
                where + "cap joins strands with equal orientation");
        node.erase(node.begin() + static_cast<std::ptrdiff_t>(i), node.begin() + static_cast<std::ptrdiff_t>(i) + 2);
        break;
      }
      case TangleEvent::Kind::kCup: {
        require(e.at >= 1 && e.at <= count + 1, where + "cup position out of range");
        const int a = dsu.make();
        const int b = dsu.make();
        dsu.unite(a, b, 1);
        node.insert(node.begin() + static_cast<std::ptrdiff_t>(i), {a, b});
        break;
      }
      case TangleEvent::Kind::kCrossPos:
      case TangleEvent::Kind::kCrossNeg: {
        require(e.at >= 1 && e.at + 1 <= count, where + "crossing position out of range");
        crossing_nodes.emplace_back(node[i], node[i + 1]);
        crossing_events_.push_back(t);
        std::swap(node[i], node[i + 1]);
        break;
      }
    }
    strands_before_.push_back(static_cast<int>(node.size()));
  }
  require(node.empty(), "tangle word: event " + std::to_string(events_.size()) +
                            ": " + std::to_string(node.size()) +
                            " strand(s) left uncapped");

  // Resolve each orientation class against the boundary marks; classes not
  // touching the boundary are directed along the sweep at their first strand.
  std::map<int, int> root_value;
  for (int p = 0; p < points_; ++p) {
    auto [root, par] = dsu.find(bdy_node[p]);
    const int dir = orient_in_[static_cast<std::size_t>(p)] ? 0 : 1;  // 0 = along the sweep
    const int val = dir ^ par;
    auto [it, inserted] = root_value.try_emplace(root, val);
    require(inserted || it->second == val,
            "tangle word: orientation marks disagree along the strand through point " +
                std::to_string(p + 1));
  }
  auto direction = [&](int x) {
    // dsu.find is non-const by path compression; safe here.
    auto [root, par] = dsu.find(x);
    auto it = root_value.find(root);
    return it == root_value.end() ? par : (par ^ it->second);
  };
  for (std::size_t k = 0; k < crossing_events_.size(); ++k) {
    const TangleEvent& e = events_[crossing_events_[k]];
    const int base = e.kind == TangleEvent::Kind::kCrossPos ? 1 : -1;
    const auto [u, v] = crossing_nodes[k];
    const int sign = direction(u) == direction(v) ? base : -base;
    crossing_signs_.push_back(sign);
    (sign > 0 ? n_plus_ : n_minus_)++;
  }
}

std::string TangleWord::to_text() const {
  std::ostringstream out;
  out << "tangle " << (side_ == TangleSide::kLeft ? "left" : "right") << ' '
      << points_ << '\n';
  for (int p = 1; p <= points_; ++p)
    out << "orient " << p << ' ' << (orient_in(p) ? "in" : "out") << '\n';
  for (const TangleEvent& e : events_) out << event_text(e) << '\n';
  return out.str();
}

Resolution::Resolution(std::vector<int> bits) : bits_(std::move(bits)) {
  for (int b : bits_)
    require(b == 0 || b == 1, "resolution: smoothing choices must be 0 or 1");
}

int Resolution::total() const {
  return static_cast<int>(std::count(bits_.begin(), bits_.end(), 1));
}

TangleWord parse_tangle(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  bool seen_header = false;
  TangleSide side = TangleSide::kRight;
  int points = 0;
  std::vector<int> orient;  // -1 unset, 0 out, 1 in
  std::vector<TangleEvent> events;

  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = "parse_tangle: line " + std::to_string(lineno) + ": ";
    if (const auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    std::istringstream ls(line);
    std::string word;
    if (!(ls >> word)) continue;
    if (word == "tangle") {
      require(!seen_header, where + "duplicate tangle header");
      std::string s;
      require(static_cast<bool>(ls >> s >> points), where + "expected `tangle <side> <points>`");
      require(s == "left" || s == "right", where + "side must be left or right");
      side = s == "left" ? TangleSide::kLeft : TangleSide::kRight;
      require(points > 0 && points % 2 == 0, where + "point count must be positive and even");
      orient.assign(static_cast<std::size_t>(points), -1);
      seen_header = true;
      continue;
    }
    require(seen_header, where + "content before the tangle header");
    if (word == "orient") {
      int p = 0;
      std::string dir;
      require(static_cast<bool>(ls >> p >> dir) && (dir == "in" || dir == "out"),
              where + "expected `orient <point> in|out`");
      require(p >= 1 && p <= points, where + "orient point out of range");
      require(orient[static_cast<std::size_t>(p) - 1] == -1, where + "duplicate orient mark");
      orient[static_cast<std::size_t>(p) - 1] = dir == "in" ? 1 : 0;
      continue;
    }
    TangleEvent e;
    if (word == "cap") {
      e.kind = TangleEvent::Kind::kCap;
    } else if (word == "cup") {
      e.kind = TangleEvent::Kind::kCup;
    } else if (word == "x+") {
      e.kind = TangleEvent::Kind::kCrossPos;
    } else if (word == "x-") {
      e.kind = TangleEvent::Kind::kCrossNeg;
    } else {
      require(false, where + "unknown event `" + word + "`");
    }
    require(static_cast<bool>(ls >> e.at), where + "expected a strand position");
    events.push_back(e);
  }
  require(seen_header, "parse_tangle: missing tangle header");
  std::vector<bool> marks;
  for (int v : orient) {
    require(v != -1, "parse_tangle: missing orient mark for some boundary point");
    marks.push_back(v == 1);
  }
  return TangleWord(side, points, std::move(marks), std::move(events));
}

std::pair<TangleWord, TangleWord> parse_link(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> blocks;
  std::string current;
  bool in_block = false;  // leading comments stay glued to the first block
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string word;
    if (ls >> word && word == "tangle") {
      if (in_block) {
        blocks.push_back(current);
        current.clear();
      }
      in_block = true;
    }
    current += line;
    current += '\n';
  }
  if (in_block) blocks.push_back(current);
  require(blocks.size() == 2, "parse_link: expected a left block then a right block");
  TangleWord left = parse_tangle(blocks[0]);
  TangleWord right = parse_tangle(blocks[1]);
  require(left.side() == TangleSide::kLeft, "parse_link: first block must be the left tangle");
  require(right.side() == TangleSide::kRight, "parse_link: second block must be the right tangle");
  return {std::move(left), std::move(right)};
}

ResolvedTangle resolve(const TangleWord& t, const Resolution& rho) {
  require(rho.crossings() == static_cast<std::size_t>(t.crossing_count()),
          "resolve: one smoothing choice per crossing required");
  const std::vector<int> bases = event_anchor_bases(t.events(), t.points(), nullptr);
  std::vector<std::pair<int, int>> edges;
  simulate_word(t, rho.bits().data(), 0, bases, &edges);
  Pieces pieces = split_components(edges, t.points());
  return ResolvedTangle{matching_from_arcs(t.n(), pieces.arcs),
                        static_cast<int>(pieces.circles.size())};
}

ProjComplex khovanov_complex(const TangleWord& t,
                             std::shared_ptr<const ArcAlgebra> algebra) {
  const int k = t.crossing_count();
  require(k <= 16, "khovanov_complex: more than 16 crossings");
  if (!algebra) algebra = std::make_shared<const ArcAlgebra>(t.n());
  require(algebra->n() == t.n(), "khovanov_complex: algebra strand count mismatch");
  const ModuleSide side =
      t.side() == TangleSide::kLeft ? ModuleSide::kRight : ModuleSide::kLeft;
  ProjComplex out(algebra, side);

  const std::vector<int> bases = event_anchor_bases(t.events(), t.points(), nullptr);
  std::vector<WordVertex> verts(std::size_t{1} << k);
  for (unsigned rho = 0; rho < verts.size(); ++rho) {
    std::vector<int> bits(static_cast<std::size_t>(k));
    for (int c = 0; c < k; ++c) bits[static_cast<std::size_t>(c)] = (rho >> c) & 1u;
    std::vector<std::pair<int, int>> edges;
    simulate_word(t, bits.data(), 0, bases, &edges);
    WordVertex& v = verts[rho];
    v.pieces = split_components(edges, t.points());
    v.matching = matching_from_arcs(t.n(), v.pieces.arcs);
    v.base = out.size();
    const int circ = static_cast<int>(v.pieces.circles.size());
    const int r = std::popcount(rho);
    const long long h = r - t.n_minus();
    const long long q0 = -r + 2LL * t.n_minus() - t.n_plus();
    for (unsigned mask = 0; mask < (1u << circ); ++mask) {
      const int minus = std::popcount(mask);
      const long long q = (2LL * minus - circ) + q0;  // #minus - #plus, shifted
      out.add_generator(resolution_name(rho, k, mask, circ), v.matching, q, h);
    }
  }

  for (unsigned rho = 0; rho < verts.size(); ++rho) {
    for (int c = 0; c < k; ++c) {
      if ((rho >> c) & 1u) continue;
      const unsigned rho2 = rho | (1u << c);
      const Int sign = parity(std::popcount(rho & ((1u << c) - 1u))) ? -1 : 1;
      const WordVertex& S = verts[rho];
      const WordVertex& D = verts[rho2];

      std::vector<int> src_of_dst, opened;
      align_circles(S.pieces, D.pieces, &src_of_dst, &opened);
      const std::vector<std::pair<int, int>> arcs = unmatched_arcs(S.pieces, D.pieces);
      std::vector<int> born;
      for (std::size_t di = 0; di < src_of_dst.size(); ++di)
        if (src_of_dst[di] < 0) born.push_back(static_cast<int>(di));

      const int circS = static_cast<int>(S.pieces.circles.size());
      for (unsigned s = 0; s < (1u << circS); ++s) {
        unsigned base_mask = 0;
        for (std::size_t di = 0; di < src_of_dst.size(); ++di) {
          if (src_of_dst[di] >= 0 && ((s >> src_of_dst[di]) & 1u))
            base_mask |= 1u << di;
        }
        const std::size_t src = S.base + s;
        if (opened.size() == 2 && born.size() == 1 && arcs.empty()) {
          // Two free circles merge.
          const bool m1 = (s >> opened[0]) & 1u;
          const bool m2 = (s >> opened[1]) & 1u;
          if (m1 && m2) continue;
          const unsigned mask = base_mask | ((m1 || m2) ? 1u << born[0] : 0u);
          out.add_d(src, D.base + mask, sign);
        } else if (opened.size() == 1 && born.size() == 2 && arcs.empty()) {
          // One free circle splits in two.
          if ((s >> opened[0]) & 1u) {
            out.add_d(src, D.base + (base_mask | (1u << born[0]) | (1u << born[1])), sign);
          } else {
            out.add_d(src, D.base + (base_mask | (1u << born[0])), sign);
            out.add_d(src, D.base + (base_mask | (1u << born[1])), sign);
          }
        } else if (opened.size() == 1 && born.empty() && arcs.size() == 2) {
          // A free circle joins a boundary arc.
          if ((s >> opened[0]) & 1u) {
            out.add_dt(src, D.base + base_mask,
                       dotted_arc_label(S.matching, arcs[0].first), sign);
          } else {
            out.add_d(src, D.base + base_mask, sign);
          }
        } else if (opened.empty() && born.size() == 1 && arcs.size() == 2) {
          // A boundary arc splits off a free circle.
          out.add_d(src, D.base + (base_mask | (1u << born[0])), sign);
          out.add_dt(src, D.base + base_mask,
                     dotted_arc_label(S.matching, arcs[0].first), sign);
        } else if (opened.empty() && born.empty() && arcs.size() == 4) {
          // Two boundary arcs are surgered; the matching changes.
          const SignedDiagram label =
              side == ModuleSide::kRight
                  ? SignedDiagram(D.matching, S.matching,
                                  std::vector<int>(static_cast<std::size_t>(t.n()) - 1, 1))
                  : SignedDiagram(S.matching, D.matching,
                                  std::vector<int>(static_cast<std::size_t>(t.n()) - 1, 1));
          out.add_dt(src, D.base + base_mask, label, sign);
        } else {
          throw std::logic_error("khovanov_complex: unclassifiable saddle");
        }
      }
    }
  }
  return out;
}

namespace {

// Shared layout of the closed cube of left+right: crossing bits are the
// right word's crossings first (its event order), then the left word's.
struct ClosedCube {
  int k1 = 0, k2 = 0;  // right / left crossing counts
  int n_plus = 0, n_minus = 0;
  std::vector<int> right_bases, left_bases;
  std::vector<Pieces> pieces;       // per resolution, circles only
  std::vector<std::size_t> base;    // first generator index per resolution
  int left_anchor_first = 0;        // anchors >= this belong to the left word
};

ClosedCube build_closed_cube(const TangleWord& left, const TangleWord& right) {
  require(left.side() == TangleSide::kLeft && right.side() == TangleSide::kRight,
          "closed diagram: want a left word and a right word");
  require(left.points() == right.points(),
          "closed diagram: boundary mismatch: point counts differ");
  for (int p = 1; p <= left.points(); ++p) {
    require(left.orient_in(p) != right.orient_in(p),
            "closed diagram: boundary mismatch: orientation marks at point " +
                std::to_string(p) + " do not oppose");
  }

  ClosedCube cube;
  cube.k1 = right.crossing_count();
  cube.k2 = left.crossing_count();
  require(cube.k1 + cube.k2 <= 16, "closed diagram: more than 16 crossings");
  cube.n_plus = left.n_plus() + right.n_plus();
  cube.n_minus = left.n_minus() + right.n_minus();
  int right_total = 0;
  cube.right_bases = event_anchor_bases(right.events(), left.points(), &right_total);
  cube.left_anchor_first = left.points() + right_total;
  cube.left_bases = event_anchor_bases(left.events(), cube.left_anchor_first, nullptr);

  const int k = cube.k1 + cube.k2;
  cube.pieces.resize(std::size_t{1} << k);
  cube.base.resize(cube.pieces.size());
  std::size_t next = 0;
  for (unsigned rho = 0; rho < cube.pieces.size(); ++rho) {
    std::vector<int> bits1(static_cast<std::size_t>(cube.k1));
    std::vector<int> bits2(static_cast<std::size_t>(cube.k2));
    for (int c = 0; c < cube.k1; ++c) bits1[static_cast<std::size_t>(c)] = (rho >> c) & 1u;
    for (int c = 0; c < cube.k2; ++c)
      bits2[static_cast<std::size_t>(c)] = (rho >> (cube.k1 + c)) & 1u;
    std::vector<std::pair<int, int>> edges;
    simulate_word(right, bits1.data(), 0, cube.right_bases, &edges);
    simulate_word(left, bits2.data(), 0, cube.left_bases, &edges);
    cube.pieces[rho] = split_components(edges, 0);
    if (!cube.pieces[rho].arcs.empty())
      throw std::logic_error("closed diagram left an open component");
    cube.base[rho] = next;
    next += std::size_t{1} << cube.pieces[rho].circles.size();
  }
  return cube;
}

}  // namespace

ZComplex direct_CKh(const TangleWord& left, const TangleWord& right,
                    const std::vector<std::size_t>* crossing_order) {
  const ClosedCube cube = build_closed_cube(left, right);
  const int k = cube.k1 + cube.k2;

  std::vector<int> pos(static_cast<std::size_t>(k));
  if (crossing_order) {
    require(crossing_order->size() == static_cast<std::size_t>(k),
            "direct_CKh: crossing order must list every crossing once");
    std::vector<bool> seen(static_cast<std::size_t>(k), false);
    for (std::size_t m = 0; m < crossing_order->size(); ++m) {
      const std::size_t c = (*crossing_order)[m];
      require(c < static_cast<std::size_t>(k) && !seen[c],
              "direct_CKh: crossing order must be a permutation");
      seen[c] = true;
      pos[c] = static_cast<int>(m);
    }
  } else {
    std::iota(pos.begin(), pos.end(), 0);
  }

  ZComplex out;
  for (unsigned rho = 0; rho < cube.pieces.size(); ++rho) {
    const int circ = static_cast<int>(cube.pieces[rho].circles.size());
    const int r = std::popcount(rho);
    const long long h = r - cube.n_minus;
    for (unsigned mask = 0; mask < (1u << circ); ++mask) {
      const int minus = std::popcount(mask);
      const long long q = (circ - 2LL * minus) + r + cube.n_plus - 2LL * cube.n_minus;
      out.add_gen(resolution_name(rho, k, mask, circ), h, 2 * q);
    }
  }

  for (unsigned rho = 0; rho < cube.pieces.size(); ++rho) {
    for (int c = 0; c < k; ++c) {
      if ((rho >> c) & 1u) continue;
      const unsigned rho2 = rho | (1u << c);
      int ones = 0;
      for (int c2 = 0; c2 < k; ++c2)
        if (c2 != c && pos[c2] < pos[c] && ((rho >> c2) & 1u)) ++ones;
      const Int sign = parity(ones) ? -1 : 1;

      std::vector<int> src_of_dst, opened;
      align_circles(cube.pieces[rho], cube.pieces[rho2], &src_of_dst, &opened);
      std::vector<int> born;
      for (std::size_t di = 0; di < src_of_dst.size(); ++di)
        if (src_of_dst[di] < 0) born.push_back(static_cast<int>(di));

      const int circS = static_cast<int>(cube.pieces[rho].circles.size());
      for (unsigned s = 0; s < (1u << circS); ++s) {
        unsigned base_mask = 0;
        for (std::size_t di = 0; di < src_of_dst.size(); ++di) {
          if (src_of_dst[di] >= 0 && ((s >> src_of_dst[di]) & 1u))
            base_mask |= 1u << di;
        }
        const std::size_t src = cube.base[rho] + s;
        if (opened.size() == 2 && born.size() == 1) {
          const bool m1 = (s >> opened[0]) & 1u;
          const bool m2 = (s >> opened[1]) & 1u;
          if (m1 && m2) continue;
          out.add_diff(src, cube.base[rho2] + (base_mask | ((m1 || m2) ? 1u << born[0] : 0u)),
                       sign);
        } else if (opened.size() == 1 && born.size() == 2) {
          if ((s >> opened[0]) & 1u) {
            out.add_diff(src,
                         cube.base[rho2] + (base_mask | (1u << born[0]) | (1u << born[1])),
                         sign);
          } else {
            out.add_diff(src, cube.base[rho2] + (base_mask | (1u << born[0])), sign);
            out.add_diff(src, cube.base[rho2] + (base_mask | (1u << born[1])), sign);
          }
        } else {
          throw std::logic_error("direct_CKh: saddle is not a merge or split");
        }
      }
    }
  }
  return out;
}

namespace {

// Enumerates the tensor generators of khovanov_complex(left) (x)
// khovanov_complex(right) in tensor_over_Hn's order, calling visit with
// (M index, basis index, N index).
template <typename F>
void enumerate_tensor_triples(const ProjComplex& m, const ProjComplex& n,
                              const ArcAlgebra& alg, F&& visit) {
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t b = 0; b < alg.basis_size(); ++b) {
      const SignedDiagram& d = alg.basis(b);
      if (alg.matching_index(d.left()) != m.generator(i).idem) continue;
      const std::size_t rm = alg.matching_index(d.right());
      for (std::size_t j = 0; j < n.size(); ++j) {
        if (n.generator(j).idem != rm) continue;
        visit(i, b, j);
      }
    }
  }
}

}  // namespace

ZComplex closed_complex_via_tensor(const TangleWord& left, const TangleWord& right) {
  auto alg = std::make_shared<const ArcAlgebra>(left.n());
  const ProjComplex m = khovanov_complex(left, alg);
  const ProjComplex n = khovanov_complex(right, alg);
  const ZComplex t = tensor_over_Hn(m, n, /*negate_intrinsic=*/true);

  // The crossing-order conjugation: the glued cube counts every 1-smoothing
  // of the right word ahead of any left-word crossing, while the tensor
  // differential weighs left-word arrows by the right factor's homological
  // degree; the two bookkeepings differ by the right word's negative
  // crossing count.
  std::vector<int> twist;
  twist.reserve(t.size());
  const long long n1minus = right.n_minus();
  enumerate_tensor_triples(m, n, *alg, [&](std::size_t i, std::size_t, std::size_t) {
    twist.push_back(static_cast<int>(parity(n1minus * m.generator(i).h)));
  });
  if (twist.size() != t.size())
    throw std::logic_error("closed_complex_via_tensor: generator enumeration drifted");

  ZComplex out;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const ZComplex::Gen& g = t.gen(i);
    out.add_gen(g.name, g.h, g.q2 + 2LL * left.n());
  }
  for (const auto& [ft, coeff] : t.diff()) {
    const Int flip = (twist[ft.first] ^ twist[ft.second]) ? -1 : 1;
    out.add_diff(ft.first, ft.second, coeff * flip);
  }
  return out;
}

std::vector<std::size_t> pairing_identification(const TangleWord& left,
                                                const TangleWord& right) {
  const ClosedCube cube = build_closed_cube(left, right);
  auto alg = std::make_shared<const ArcAlgebra>(left.n());
  const ProjComplex m = khovanov_complex(left, alg);
  const ProjComplex n = khovanov_complex(right, alg);

  std::map<std::string, std::size_t> tensor_index;
  {
    std::size_t next = 0;
    enumerate_tensor_triples(m, n, *alg, [&](std::size_t i, std::size_t b, std::size_t j) {
      tensor_index[m.generator(i).id + "|" + std::to_string(b) + "|" +
                   n.generator(j).id] = next++;
    });
  }

  const int points = left.points();
  std::vector<std::size_t> bij;
  for (unsigned rho = 0; rho < cube.pieces.size(); ++rho) {
    std::vector<int> bits1(static_cast<std::size_t>(cube.k1));
    std::vector<int> bits2(static_cast<std::size_t>(cube.k2));
    for (int c = 0; c < cube.k1; ++c) bits1[static_cast<std::size_t>(c)] = (rho >> c) & 1u;
    for (int c = 0; c < cube.k2; ++c)
      bits2[static_cast<std::size_t>(c)] = (rho >> (cube.k1 + c)) & 1u;
    const Matching a1 = resolve(right, Resolution(bits1)).matching;
    const Matching a2 = resolve(left, Resolution(bits2)).matching;
    const SignedDiagram plain(
        a2, a1, std::vector<int>(static_cast<std::size_t>(SignedDiagram::circle_count(a2, a1)), 1));

    // Classify the closed circles: through the axis (they assemble the
    // algebra element), inside the right word (N signs), inside the left
    // word (M signs).
    const auto& circles = cube.pieces[rho].circles;
    std::vector<int> kind(circles.size());           // 0 glued, 1 right, 2 left
    std::vector<int> glue_slot(circles.size(), -1);  // algebra circle index
    unsigned rho1 = 0, rho2 = 0;
    for (int c = 0; c < cube.k1; ++c) rho1 |= static_cast<unsigned>(bits1[static_cast<std::size_t>(c)]) << c;
    for (int c = 0; c < cube.k2; ++c) rho2 |= static_cast<unsigned>(bits2[static_cast<std::size_t>(c)]) << c;
    int right_free = 0, left_free = 0;
    std::vector<int> word_slot(circles.size(), -1);
    for (std::size_t ci = 0; ci < circles.size(); ++ci) {
      const int min_anchor = circles[ci].front();
      if (min_anchor < points) {
        kind[ci] = 0;
        glue_slot[ci] = plain.circle_of_point(min_anchor + 1);
      } else if (min_anchor < cube.left_anchor_first) {
        kind[ci] = 1;
        word_slot[ci] = right_free++;
      } else {
        kind[ci] = 2;
        word_slot[ci] = left_free++;
      }
    }

    for (unsigned mask = 0; mask < (1u << circles.size()); ++mask) {
      std::vector<int> glued_signs(static_cast<std::size_t>(plain.circles()), 1);
      unsigned mmask = 0, nmask = 0;
      for (std::size_t ci = 0; ci < circles.size(); ++ci) {
        const bool minus = (mask >> ci) & 1u;
        if (!minus) continue;
        if (kind[ci] == 0) glued_signs[static_cast<std::size_t>(glue_slot[ci])] = -1;
        if (kind[ci] == 1) nmask |= 1u << word_slot[ci];
        if (kind[ci] == 2) mmask |= 1u << word_slot[ci];
      }
      const std::size_t b = alg->basis_index(SignedDiagram(a2, a1, glued_signs));
      const std::string name = resolution_name(rho2, cube.k2, mmask, left_free) + "|" +
                               std::to_string(b) + "|" +
                               resolution_name(rho1, cube.k1, nmask, right_free);
      bij.push_back(tensor_index.at(name));
    }
  }
  return bij;
}

TangleWord reidemeister(const TangleWord& t, ReidemeisterMove move,
                        const MoveSite& site) {
  std::vector<TangleEvent> ev = t.events();
  const std::size_t at = site.event;
  const auto fail = [&](const std::string& what) {
    throw std::invalid_argument("reidemeister: " + what + " at event " +
                                std::to_string(at));
  };
  const auto insertable = [&](int width) {
    return at <= ev.size() && site.at >= 1 &&
           site.at + width - 1 <= t.strands_before(at);
  };
  using K = TangleEvent::Kind;

  switch (move) {
    case ReidemeisterMove::kR1Plus:
    case ReidemeisterMove::kR1Minus: {
      if (!insertable(1)) fail("kink insertion does not apply");
      const K kind = move == ReidemeisterMove::kR1Plus ? K::kCrossPos : K::kCrossNeg;
      const std::vector<TangleEvent> kink = {{K::kCup, site.at + 1},
                                             {kind, site.at},
                                             {K::kCap, site.at + 1}};
      ev.insert(ev.begin() + static_cast<std::ptrdiff_t>(at), kink.begin(), kink.end());
      break;
    }
    case ReidemeisterMove::kR1PlusInv:
    case ReidemeisterMove::kR1MinusInv: {
      const K kind =
          move == ReidemeisterMove::kR1PlusInv ? K::kCrossPos : K::kCrossNeg;
      if (at + 3 > ev.size() || ev[at].kind != K::kCup || ev[at + 1].kind != kind ||
          ev[at + 2].kind != K::kCap || ev[at].at < 2 ||
          ev[at + 1].at != ev[at].at - 1 || ev[at + 2].at != ev[at].at) {
        fail("no kink pattern");
      }
      ev.erase(ev.begin() + static_cast<std::ptrdiff_t>(at),
               ev.begin() + static_cast<std::ptrdiff_t>(at) + 3);
      break;
    }
    case ReidemeisterMove::kR2: {
      if (!insertable(2)) fail("crossing-pair insertion does not apply");
      const std::vector<TangleEvent> pair = {{K::kCrossPos, site.at},
                                             {K::kCrossNeg, site.at}};
      ev.insert(ev.begin() + static_cast<std::ptrdiff_t>(at), pair.begin(), pair.end());
      break;
    }
    case ReidemeisterMove::kR2Inv: {
      if (at + 2 > ev.size() || !is_crossing(ev[at]) || !is_crossing(ev[at + 1]) ||
          ev[at].kind == ev[at + 1].kind || ev[at].at != ev[at + 1].at) {
        fail("no cancelling crossing pair");
      }
      ev.erase(ev.begin() + static_cast<std::ptrdiff_t>(at),
               ev.begin() + static_cast<std::ptrdiff_t>(at) + 2);
      break;
    }
    case ReidemeisterMove::kR3: {
      if (at + 3 > ev.size() || !is_crossing(ev[at]) ||
          ev[at + 1].kind != ev[at].kind || ev[at + 2].kind != ev[at].kind ||
          ev[at + 2].at != ev[at].at ||
          std::abs(ev[at + 1].at - ev[at].at) != 1) {
        fail("no slide-compatible crossing triple");
      }
      std::swap(ev[at].at, ev[at + 1].at);
      ev[at + 2].at = ev[at].at;
      break;
    }
  }
  return TangleWord(t.side(), t.points(),
                    std::vector<bool>([&] {
                      std::vector<bool> marks;
                      for (int p = 1; p <= t.points(); ++p)
                        marks.push_back(t.orient_in(p));
                      return marks;
                    }()),
                    std::move(ev));
}

TangleWord random_tangle_word(int n, TangleSide side, int crossings,
                              std::uint64_t seed) {
  require(n >= 1 && crossings >= 0, "random_tangle_word: bad parameters");
  std::mt19937_64 rng(seed);
  const auto pick = [&rng](int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
  };

  std::vector<TangleEvent> events;
  int count = 2 * n;
  int placed = 0;
  using K = TangleEvent::Kind;
  for (int guard = 0; !(placed == crossings && count == 0); ++guard) {
    if (guard > 10000)
      throw std::logic_error("random_tangle_word: generation did not settle");
    if (count == 0) {
      events.push_back({K::kCup, 1});
      count += 2;
      continue;
    }
    // Weighted choice among the feasible actions: keep crossings coming,
    // then drain with caps.
    int w_cross = (placed < crossings && count >= 2) ? 4 : 0;
    int w_cap = count >= 2 ? (placed == crossings ? 6 : 2) : 0;
    int w_cup = (placed < crossings && count < 2 * n + 6) ? 2 : 0;
    int roll = pick(1, w_cross + w_cap + w_cup);
    if (roll <= w_cross) {
      events.push_back({pick(0, 1) ? K::kCrossPos : K::kCrossNeg, pick(1, count - 1)});
      ++placed;
    } else if (roll <= w_cross + w_cap) {
      events.push_back({K::kCap, pick(1, count - 1)});
      count -= 2;
    } else {
      events.push_back({K::kCup, pick(1, count + 1)});
      count += 2;
    }
  }

  // Derive boundary marks from a consistent orientation: propagate the
  // opposite-direction constraints, then flip a fair coin per strand class.
  ParityDSU dsu;
  std::vector<int> node;
  std::vector<int> bdy_node;
  for (int p = 0; p < 2 * n; ++p) {
    node.push_back(dsu.make());
    bdy_node.push_back(node.back());
  }
  for (const TangleEvent& e : events) {
    const std::size_t i = static_cast<std::size_t>(e.at) - 1;
    switch (e.kind) {
      case K::kCap:
        dsu.unite(node[i], node[i + 1], 1);
        node.erase(node.begin() + static_cast<std::ptrdiff_t>(i), node.begin() + static_cast<std::ptrdiff_t>(i) + 2);
        break;
      case K::kCup: {
        const int a = dsu.make();
        const int b = dsu.make();
        dsu.unite(a, b, 1);
        node.insert(node.begin() + static_cast<std::ptrdiff_t>(i), {a, b});
        break;
      }
      case K::kCrossPos:
      case K::kCrossNeg:
        std::swap(node[i], node[i + 1]);
        break;
    }
  }
  std::map<int, int> root_value;
  std::vector<bool> marks;
  for (int p = 0; p < 2 * n; ++p) {
    auto [root, par] = dsu.find(bdy_node[p]);
    auto [it, inserted] = root_value.try_emplace(root, pick(0, 1));
    marks.push_back((par ^ it->second) == 0);  // direction 0 = into the sweep
  }
  return TangleWord(side, 2 * n, std::move(marks), std::move(events));
}

}  // namespace bkh
