// Endomorphism algebras over the arc algebra: quadratic-linear presentations,
// monomial classification, quadratic duals with differential, mirroring, the
// product with the mirrored dual, and rank-one DD operations.

#include "bkh/roberts.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace bkh {

namespace {

std::string num(std::size_t k) { return std::to_string(k); }

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw std::runtime_error("roberts: " + where + ": " + what);
}

std::string piece_text(const PieceKey& key) {
  std::ostringstream os;
  os << "(" << key.lidem << "," << key.ridem << "," << key.q2 << ","
     << key.hom << ")";
  return os.str();
}

std::string mono_names(const PresentedAlgebra& P, const Monomial& m) {
  std::string out;
  for (std::size_t t = 0; t < m.size(); ++t) {
    if (t) out += "*";
    out += P.generator(m[t]).name;
  }
  return out.empty() ? std::string("1") : out;
}

// ---------------------------------------------------------------------------
// Exact integer kernels
// ---------------------------------------------------------------------------

// Basis of the integer kernel lattice of M (columns = unknowns), rows in
// Hermite-canonical form.  The lattice is saturated because it is cut out by
// unimodular column operations.
std::vector<std::vector<Int>> integer_kernel(const IntMatrix& M) {
  const std::size_t rows = M.rows(), cols = M.cols();
  if (cols == 0) return {};
  std::vector<std::vector<Int>> vecs;
  if (rows == 0) {
    for (std::size_t j = 0; j < cols; ++j) {
      std::vector<Int> v(cols, 0);
      v[j] = 1;
      vecs.push_back(std::move(v));
    }
  } else {
    SmithForm sf = smith_normal_form(M);
    for (std::size_t j = sf.rank(); j < cols; ++j) {
      std::vector<Int> v(cols);
      for (std::size_t r = 0; r < cols; ++r) v[r] = sf.v.at(r, j);
      vecs.push_back(std::move(v));
    }
  }
  if (vecs.empty()) return vecs;
  IntMatrix K(vecs.size(), cols);
  for (std::size_t r = 0; r < vecs.size(); ++r)
    for (std::size_t c = 0; c < cols; ++c) K.at(r, c) = vecs[r][c];
  HermiteForm hf = hermite_normal_form(K);
  std::vector<std::vector<Int>> out;
  for (std::size_t r = 0; r < hf.rank(); ++r) {
    std::vector<Int> v(cols);
    for (std::size_t c = 0; c < cols; ++c) v[c] = hf.h.at(r, c);
    out.push_back(std::move(v));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Arc algebra evaluation helpers
// ---------------------------------------------------------------------------

// Expand a word in multiplicative generators (given by their basis elements)
// over the additive basis.
std::map<std::size_t, Int> expand_word(const ArcAlgebra& A,
                                       const std::vector<std::size_t>& letters) {
  std::map<std::size_t, Int> cur;
  cur[letters[0]] = 1;
  for (std::size_t t = 1; t < letters.size(); ++t) {
    std::map<std::size_t, Int> nxt;
    for (const auto& [k, c] : cur) {
      for (const auto& [k2, c2] : A.multiply_basis(k, letters[t])) {
        Int& v = nxt[k2];
        v += c * c2;
        if (v == 0) nxt.erase(k2);
      }
    }
    cur = std::move(nxt);
  }
  return cur;
}

// Basis indices of one graded piece of the arc algebra, ascending.
std::vector<std::size_t> arc_piece_basis(const ArcAlgebra& A, std::size_t l,
                                         std::size_t r, int q2) {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < A.basis_size(); ++k) {
    const SignedDiagram& d = A.basis(k);
    if (A.matching_index(d.left()) == l && A.matching_index(d.right()) == r &&
        2 * degree(d) == q2)
      out.push_back(k);
  }
  return out;
}

std::string arc_gen_name(const ArcAlgebra& A, const Generator& g) {
  const std::size_t ai = A.matching_index(g.a);
  if (g.kind == Generator::Kind::HGamma)
    return "sg" + num(ai) + "_" + num(g.gamma.p) + "_" + num(g.gamma.q);
  return "fl" + num(ai) + "_" + num(g.alpha.first);
}

// ---------------------------------------------------------------------------
// Shared word collection for the endomorphism algebra
// ---------------------------------------------------------------------------

std::map<PieceKey, std::vector<Monomial>> quadratic_words(
    const std::vector<RobertsGenerator>& gens, std::size_t n_states) {
  std::vector<std::vector<std::size_t>> by_h1(n_states);
  for (std::size_t j = 0; j < gens.size(); ++j) by_h1[gens[j].h1].push_back(j);
  std::map<PieceKey, std::vector<Monomial>> words;
  for (std::size_t i = 0; i < gens.size(); ++i) {
    for (std::size_t j : by_h1[gens[i].h2]) {
      PieceKey key{gens[i].h1, gens[j].h2,
                   gens[i].bidegree.q2 + gens[j].bidegree.q2, 0};
      words[key].push_back(Monomial{i, j});
    }
  }
  for (auto& [key, ms] : words) std::sort(ms.begin(), ms.end());
  return words;
}

// Sorted point set of one circle of a diagram.
std::vector<int> circle_point_set(const SignedDiagram& d, int circle) {
  std::vector<int> s;
  for (int p = 1; p <= 2 * d.n(); ++p)
    if (d.circle_of_point(p) == circle) s.push_back(p);
  return s;
}

std::set<std::vector<int>> all_circle_sets(const SignedDiagram& d) {
  std::set<std::vector<int>> out;
  for (int c = 0; c < d.circles(); ++c) out.insert(circle_point_set(d, c));
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Arc algebra presentation
// ---------------------------------------------------------------------------

ArcPresentation arc_presentation(std::shared_ptr<const ArcAlgebra> states) {
  const ArcAlgebra& A = *states;
  std::vector<std::string> idems;
  for (std::size_t k = 0; k < A.matchings().size(); ++k)
    idems.push_back("i" + num(k));

  const std::vector<Generator>& gens = A.mult_generators();
  std::vector<PresGenerator> pg;
  std::vector<std::size_t> gen_basis;
  pg.reserve(gens.size());
  for (std::size_t i = 0; i < gens.size(); ++i) {
    const Generator& g = gens[i];
    PresGenerator p;
    p.name = arc_gen_name(A, g);
    p.lidem = A.matching_index(g.a);
    p.ridem = A.matching_index(g.right_matching());
    p.intr2 = 2 * g.intrinsic_degree();
    p.hom = 0;
    pg.push_back(std::move(p));
    gen_basis.push_back(A.generator_basis_index(i));
  }

  // Relations: the exact kernel of evaluation on words of length one and two,
  // one graded piece at a time.
  std::map<std::tuple<std::size_t, std::size_t, int>, std::vector<Monomial>>
      columns;
  for (std::size_t i = 0; i < pg.size(); ++i)
    columns[{pg[i].lidem, pg[i].ridem, pg[i].intr2}].push_back(Monomial{i});
  for (std::size_t i = 0; i < pg.size(); ++i)
    for (std::size_t j = 0; j < pg.size(); ++j)
      if (pg[i].ridem == pg[j].lidem)
        columns[{pg[i].lidem, pg[j].ridem, pg[i].intr2 + pg[j].intr2}]
            .push_back(Monomial{i, j});

  std::vector<PresElement> rels;
  for (auto& [key, items] : columns) {
    auto [l, r, q2] = key;
    std::sort(items.begin(), items.end(),
              [](const Monomial& a, const Monomial& b) {
                return a.size() != b.size() ? a.size() < b.size() : a < b;
              });
    const std::vector<std::size_t> target = arc_piece_basis(A, l, r, q2);
    std::map<std::size_t, std::size_t> row_of;
    for (std::size_t t = 0; t < target.size(); ++t) row_of[target[t]] = t;
    IntMatrix M(target.size(), items.size());
    for (std::size_t c = 0; c < items.size(); ++c) {
      std::vector<std::size_t> letters;
      for (std::size_t g : items[c]) letters.push_back(gen_basis[g]);
      for (const auto& [k, coeff] : expand_word(A, letters)) {
        auto it = row_of.find(k);
        if (it == row_of.end())
          fail("arc_presentation", "evaluation left its graded piece");
        M.at(it->second, c) = coeff;
      }
    }
    for (const std::vector<Int>& v : integer_kernel(M)) {
      PresElement rel;
      bool quadratic = false;
      for (std::size_t c = 0; c < v.size(); ++c) {
        if (v[c] == 0) continue;
        rel.add(items[c], v[c]);
        if (items[c].size() == 2) quadratic = true;
      }
      if (!quadratic)
        fail("arc_presentation",
             "kernel vector supported on single letters only");
      rels.push_back(std::move(rel));
    }
  }

  return ArcPresentation{
      std::move(states),
      PresentedAlgebra(std::move(idems), std::move(pg), std::move(rels))};
}

TargetOracle arc_oracle(const ArcPresentation& ap) {
  std::shared_ptr<const ArcAlgebra> states = ap.states;
  auto gen_basis = std::make_shared<std::vector<std::size_t>>();
  auto gen_info = std::make_shared<std::vector<PresGenerator>>();
  for (std::size_t i = 0; i < ap.presentation.generator_count(); ++i) {
    gen_basis->push_back(states->generator_basis_index(i));
    gen_info->push_back(ap.presentation.generator(i));
  }
  auto piece_cache = std::make_shared<
      std::map<std::tuple<std::size_t, std::size_t, int>,
               std::vector<std::size_t>>>();

  TargetOracle oracle;
  oracle.rank = [states](const PieceKey& key) -> long long {
    if (key.hom != 0) return 0;
    return static_cast<long long>(
        arc_piece_basis(*states, key.lidem, key.ridem, key.q2).size());
  };
  oracle.evaluate = [states, gen_basis, gen_info,
                     piece_cache](const Monomial& m) -> std::vector<Int> {
    std::size_t l = (*gen_info)[m.front()].lidem;
    std::size_t r = (*gen_info)[m.back()].ridem;
    int q2 = 0;
    for (std::size_t g : m) q2 += (*gen_info)[g].intr2;
    auto key = std::make_tuple(l, r, q2);
    auto it = piece_cache->find(key);
    if (it == piece_cache->end())
      it = piece_cache->emplace(key, arc_piece_basis(*states, l, r, q2)).first;
    const std::vector<std::size_t>& basis = it->second;
    std::vector<std::size_t> letters;
    for (std::size_t g : m) letters.push_back((*gen_basis)[g]);
    std::map<std::size_t, Int> val = expand_word(*states, letters);
    std::vector<Int> coords(basis.size(), 0);
    for (std::size_t t = 0; t < basis.size(); ++t) {
      auto vt = val.find(basis[t]);
      if (vt != val.end()) {
        coords[t] = vt->second;
        val.erase(vt);
      }
    }
    if (!val.empty()) fail("arc_oracle", "evaluation left its graded piece");
    return coords;
  };
  return oracle;
}

std::vector<PieceKey> arc_audit_pieces(const ArcPresentation& ap) {
  const ArcAlgebra& A = *ap.states;
  const int n = A.n();
  const int qmax = n >= 3 ? 4 * n : 4 * n + 2;
  std::vector<PieceKey> keys;
  for (std::size_t l = 0; l < A.matchings().size(); ++l)
    for (std::size_t r = 0; r < A.matchings().size(); ++r)
      for (int q2 = 0; q2 <= qmax; q2 += 2)
        keys.push_back(PieceKey{l, r, q2, 0});
  return keys;
}

// ---------------------------------------------------------------------------
// The endomorphism algebra B_R
// ---------------------------------------------------------------------------

RobertsAlgebra build_BR(int n) {
  auto states = std::make_shared<const ArcAlgebra>(n);
  const ArcAlgebra& A = *states;
  const std::size_t N = A.basis_size();

  std::vector<BetaIdempotent> beta;
  beta.reserve(N);
  for (std::size_t k = 0; k < N; ++k)
    beta.push_back(BetaIdempotent{k, A.basis(k), "e" + num(k)});

  std::vector<RobertsGenerator> gens;
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> bridge_at;
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> circle_at;

  const std::vector<Generator>& mult = A.mult_generators();
  for (std::size_t k1 = 0; k1 < N; ++k1) {
    const SignedDiagram& h1 = A.basis(k1);
    for (std::size_t gi = 0; gi < mult.size(); ++gi) {
      const Generator& g = mult[gi];
      if (!(g.a == h1.right())) continue;
      const bool bridge = g.kind == Generator::Kind::HGamma;
      for (const auto& [k2, coeff] :
           A.multiply_basis(k1, A.generator_basis_index(gi))) {
        if (coeff != 1)
          fail("build_BR", "right multiplication by a generator produced a "
                           "coefficient other than one");
        auto key = std::make_pair(k1, k2);
        auto& table = bridge ? bridge_at : circle_at;
        auto it = table.find(key);
        if (it == table.end()) {
          RobertsGenerator rg;
          rg.kind = bridge ? RobertsKind::BGamma : RobertsKind::BC;
          rg.h1 = k1;
          rg.h2 = k2;
          rg.name =
              std::string(bridge ? "g" : "c") + num(k1) + "_" + num(k2);
          rg.bidegree = Bidegree{degree(h1) - degree(A.basis(k2)), 0};
          if (rg.bidegree.q2 != (bridge ? -1 : -2))
            fail("build_BR", "generator " + rg.name +
                                 " has unexpected degree drop");
          if (bridge)
            rg.bridges.push_back(g.gamma);
          else
            rg.circle = h1.circle_of_point(g.alpha.first);
          table.emplace(key, gens.size());
          gens.push_back(std::move(rg));
        } else {
          RobertsGenerator& rg = gens[it->second];
          if (bridge) {
            if (std::find(rg.bridges.begin(), rg.bridges.end(), g.gamma) ==
                rg.bridges.end())
              rg.bridges.push_back(g.gamma);
          } else if (*rg.circle != h1.circle_of_point(g.alpha.first)) {
            fail("build_BR", "one state pair reached by flipping two "
                             "different circles");
          }
        }
      }
    }
  }

  // Relations, one graded piece of two-letter words at a time.  A piece tied
  // to a circle generator equates each word with that generator; an untied
  // piece identifies all of its words pairwise.
  std::vector<TaggedRelation> tagged;
  for (const auto& [key, ms] : quadratic_words(gens, N)) {
    auto lit = circle_at.find({key.lidem, key.ridem});
    if (lit != circle_at.end() && key.q2 == -2) {
      for (const Monomial& m : ms) {
        PresElement rel = PresElement::single(m);
        rel.add(Monomial{lit->second}, -1);
        tagged.push_back(
            TaggedRelation{std::move(rel), RelationFamily::BridgeCollapse, key});
      }
      continue;
    }
    if (ms.size() < 2) continue;
    RelationFamily family;
    switch (key.q2) {
      case -2: family = RelationFamily::BridgeBridge; break;
      case -3: family = RelationFamily::BridgeCircle; break;
      case -4: family = RelationFamily::CircleCircle; break;
      default:
        fail("build_BR", "two-letter words at unexpected degree " +
                             piece_text(key));
    }
    for (std::size_t t = 1; t < ms.size(); ++t) {
      PresElement rel = PresElement::single(ms[t]);
      rel.add(ms[0], -1);
      tagged.push_back(TaggedRelation{std::move(rel), family, key});
    }
  }

  std::vector<std::string> idem_names;
  idem_names.reserve(N);
  for (const BetaIdempotent& b : beta) idem_names.push_back(b.name);
  std::vector<PresGenerator> pg;
  pg.reserve(gens.size());
  for (const RobertsGenerator& rg : gens) {
    PresGenerator p;
    p.name = rg.name;
    p.lidem = rg.h1;
    p.ridem = rg.h2;
    p.intr2 = rg.bidegree.q2;
    p.hom = 0;
    pg.push_back(std::move(p));
  }
  std::vector<PresElement> rels;
  rels.reserve(tagged.size());
  for (const TaggedRelation& t : tagged) rels.push_back(t.element);

  return RobertsAlgebra{
      n,
      std::move(states),
      std::move(beta),
      std::move(gens),
      std::move(tagged),
      PresentedAlgebra(std::move(idem_names), std::move(pg), std::move(rels)),
      std::move(bridge_at),
      std::move(circle_at)};
}

namespace {

// Reachability of state pairs through the generator arrows (the arrows
// strictly raise the state's intrinsic degree, so this is a DAG).
std::vector<std::vector<char>> state_reachability(const RobertsAlgebra& R) {
  const std::size_t N = R.states->basis_size();
  std::vector<std::vector<std::size_t>> succ(N);
  for (const RobertsGenerator& g : R.generators) succ[g.h1].push_back(g.h2);
  std::vector<std::vector<char>> reach(N, std::vector<char>(N, 0));
  for (std::size_t s = 0; s < N; ++s) {
    std::vector<std::size_t> stack{s};
    reach[s][s] = 1;
    while (!stack.empty()) {
      std::size_t v = stack.back();
      stack.pop_back();
      for (std::size_t w : succ[v])
        if (!reach[s][w]) {
          reach[s][w] = 1;
          stack.push_back(w);
        }
    }
  }
  return reach;
}

}  // namespace

TargetOracle endomorphism_oracle(const RobertsAlgebra& R) {
  const std::size_t N = R.states->basis_size();
  auto deg = std::make_shared<std::vector<int>>(N);
  for (std::size_t k = 0; k < N; ++k) (*deg)[k] = degree(R.states->basis(k));
  auto reach =
      std::make_shared<std::vector<std::vector<char>>>(state_reachability(R));

  TargetOracle oracle;
  oracle.rank = [deg, reach, N](const PieceKey& key) -> long long {
    if (key.hom != 0 || key.lidem >= N || key.ridem >= N) return 0;
    if (key.lidem == key.ridem) return key.q2 == 0 ? 1 : 0;
    if (!(*reach)[key.lidem][key.ridem]) return 0;
    return key.q2 == (*deg)[key.lidem] - (*deg)[key.ridem] ? 1 : 0;
  };
  oracle.evaluate = [](const Monomial&) { return std::vector<Int>{Int(1)}; };
  return oracle;
}

std::vector<PieceKey> roberts_audit_pieces(const RobertsAlgebra& R,
                                           int min_q2) {
  const std::size_t N = R.states->basis_size();
  std::vector<int> deg(N);
  for (std::size_t k = 0; k < N; ++k) deg[k] = degree(R.states->basis(k));
  std::vector<std::vector<char>> reach = state_reachability(R);
  std::vector<PieceKey> keys;
  for (std::size_t k = 0; k < N; ++k) keys.push_back(PieceKey{k, k, 0, 0});
  for (std::size_t k1 = 0; k1 < N; ++k1)
    for (std::size_t k2 = 0; k2 < N; ++k2) {
      if (k1 == k2 || !reach[k1][k2]) continue;
      int q2 = deg[k1] - deg[k2];
      if (q2 >= min_q2) keys.push_back(PieceKey{k1, k2, q2, 0});
    }
  return keys;
}

// ---------------------------------------------------------------------------
// Monomial classification
// ---------------------------------------------------------------------------

std::size_t MonomialGraph::count(ComponentShape s) const {
  std::size_t c = 0;
  for (const GraphComponent& comp : components)
    if (comp.shape == s) ++c;
  return c;
}

MonomialGraph monomial_graph_G(const RobertsAlgebra& R) {
  const ArcAlgebra& A = *R.states;
  MonomialGraph G;
  for (const auto& [key, ms] :
       quadratic_words(R.generators, A.basis_size())) {
    const bool tied = key.q2 == -2 &&
                      R.circle_gen_at.count({key.lidem, key.ridem}) > 0;
    if (tied) {
      for (const Monomial& m : ms)
        G.components.push_back(
            GraphComponent{key, ComponentShape::IsolatedPoint, {m}, {}});
      continue;
    }
    switch (ms.size()) {
      case 1:
        G.lone_monomials.emplace_back(key, ms[0]);
        break;
      case 2:
        G.components.push_back(
            GraphComponent{key, ComponentShape::Segment, ms, {}});
        break;
      case 3:
        G.components.push_back(
            GraphComponent{key, ComponentShape::Triangle, ms, {}});
        break;
      case 4: {
        // Bipartition by the matching of the intermediate state.
        std::map<std::size_t, std::vector<std::size_t>> by_mid;
        for (std::size_t t = 0; t < ms.size(); ++t) {
          const SignedDiagram& mid =
              A.basis(R.generators[ms[t][0]].h2);
          by_mid[A.matching_index(mid.right())].push_back(t);
        }
        if (by_mid.size() != 2)
          fail("monomial_graph_G",
               "four-word piece " + piece_text(key) + " has " +
                   num(by_mid.size()) + " intermediate matchings");
        GraphComponent comp{key, ComponentShape::Tetrahedron, ms, {}};
        std::size_t half = 0;
        for (const auto& [mid, positions] : by_mid) {
          (void)mid;
          if (positions.size() != 2)
            fail("monomial_graph_G",
                 "four-word piece " + piece_text(key) +
                     " does not split two against two");
          comp.halves[half][0] = positions[0];
          comp.halves[half][1] = positions[1];
          ++half;
        }
        G.components.push_back(std::move(comp));
        break;
      }
      default:
        fail("monomial_graph_G",
             "piece " + piece_text(key) + " holds " + num(ms.size()) +
                 " words (" + mono_names(R.presentation, ms[0]) + ", ...)");
    }
  }
  return G;
}

// ---------------------------------------------------------------------------
// Quadratic dual
// ---------------------------------------------------------------------------

DualAlgebra dual_BR(const RobertsAlgebra& R, const MonomialGraph& G) {
  QuadraticData q = quadratic_part(R.presentation);
  DualReport report;
  PresentedAlgebra dual = quadratic_dual(R.presentation, q, &report);
  if (!report.i_saturated)
    fail("dual_BR", "relation lattice is not saturated");
  if (report.cross_checked && !report.cross_check_passed)
    fail("dual_BR", "annihilator cross-check failed");

  for (std::size_t i = 0; i < dual.generator_count(); ++i) {
    const PresGenerator& d = dual.generator(i);
    const PresGenerator& p = R.presentation.generator(i);
    if (d.intr2 != -p.intr2 || d.hom != 1 || d.lidem != p.lidem ||
        d.ridem != p.ridem || d.name != p.name + "*")
      fail("dual_BR", "dual generator " + d.name +
                          " does not match its primal generator");
  }

  // Shape cross-check: on each piece of two-letter words the dual must keep
  // every word of a tied piece and exactly drop one rank otherwise.
  struct Count {
    long long words = 0;
    bool tied = false;
  };
  std::map<PieceKey, Count> counts;
  for (const GraphComponent& comp : G.components) {
    Count& c = counts[comp.piece];
    c.words += static_cast<long long>(comp.monomials.size());
    if (comp.shape == ComponentShape::IsolatedPoint) c.tied = true;
  }
  for (const auto& [key, mono] : G.lone_monomials) {
    (void)mono;
    counts[key].words += 1;
  }
  for (const auto& [key, c] : counts) {
    PieceKey dk{key.lidem, key.ridem, -key.q2, 2};
    long long expect = c.tied ? c.words : c.words - 1;
    long long got = dual.piece_rank(dk);
    if (got != expect)
      fail("dual_BR", "dual piece " + piece_text(dk) + " has rank " +
                          std::to_string(got) + ", expected " +
                          std::to_string(expect));
  }

  dual.set_differential(dual_differential(R.presentation, q, dual));

  // Shape of the differential: bridge stars are closed and the differential
  // of a circle star is minus the sum of the stars of its tied words.
  std::map<std::size_t, std::vector<Monomial>> tied_words;
  for (const GraphComponent& comp : G.components) {
    if (comp.shape != ComponentShape::IsolatedPoint) continue;
    std::size_t l = R.circle_gen_at.at({comp.piece.lidem, comp.piece.ridem});
    tied_words[l].push_back(comp.monomials[0]);
  }
  for (std::size_t i = 0; i < dual.generator_count(); ++i) {
    PresElement d = dual.differential(i);
    if (R.generators[i].kind == RobertsKind::BGamma) {
      if (!dual.is_zero_in_quotient(d))
        fail("dual_BR", "bridge star " + dual.generator(i).name +
                            " has nonzero differential");
    } else {
      PresElement expect;
      auto it = tied_words.find(i);
      if (it != tied_words.end())
        for (const Monomial& m : it->second) expect.add(m, 1);
      PresElement diff = d;
      diff += expect;  // d should equal minus the sum of tied stars
      if (!dual.is_zero_in_quotient(diff))
        fail("dual_BR", "circle star " + dual.generator(i).name +
                            " has unexpected differential");
    }
    if (!dual.is_zero_in_quotient(dual.mu1(d)))
      fail("dual_BR", "differential does not square to zero on " +
                          dual.generator(i).name);
  }
  if (R.n <= 3) {
    VerifyReport vr = verify_differential(dual);
    if (!vr.passed) fail("dual_BR", vr.summary());
  }

  return DualAlgebra{std::move(dual), std::move(q), std::move(report)};
}

// ---------------------------------------------------------------------------
// Mirroring
// ---------------------------------------------------------------------------

std::vector<std::size_t> mirror_state_permutation(const ArcAlgebra& states) {
  std::vector<std::size_t> perm(states.basis_size());
  for (std::size_t k = 0; k < perm.size(); ++k)
    perm[k] = states.basis_index(mirror_diagram(states.basis(k)));
  for (std::size_t k = 0; k < perm.size(); ++k)
    if (perm[perm[k]] != k) fail("mirror_state_permutation", "not involutive");
  return perm;
}

namespace {

// Rewrites "<prefix><k1>_<k2><suffix>" through the state permutation.
std::string rewrite_state_pair_name(const std::string& name,
                                    const std::vector<std::size_t>& perm) {
  std::size_t i = 0;
  while (i < name.size() && !std::isdigit(static_cast<unsigned char>(name[i])))
    ++i;
  std::size_t j = i;
  while (j < name.size() && std::isdigit(static_cast<unsigned char>(name[j])))
    ++j;
  if (i == 0 || i == j || j >= name.size() || name[j] != '_')
    fail("mirror rename", "unparsable generator name " + name);
  std::size_t k = j + 1, l = k;
  while (l < name.size() && std::isdigit(static_cast<unsigned char>(name[l])))
    ++l;
  if (k == l) fail("mirror rename", "unparsable generator name " + name);
  std::size_t k1 = std::stoull(name.substr(i, j - i));
  std::size_t k2 = std::stoull(name.substr(k, l - k));
  if (k1 >= perm.size() || k2 >= perm.size())
    fail("mirror rename", "state index out of range in " + name);
  return name.substr(0, i) + num(perm[k1]) + "_" + num(perm[k2]) +
         name.substr(l);
}

}  // namespace

PresentedAlgebra mirror_roberts(const PresentedAlgebra& P,
                                const std::vector<std::size_t>& perm) {
  return mirror_presentation(P, perm, [&perm](const std::string& nm) {
    return rewrite_state_pair_name(nm, perm);
  });
}

// ---------------------------------------------------------------------------
// Product algebra
// ---------------------------------------------------------------------------

namespace {

struct LetterInfo {
  std::size_t idx = 0;    // product generator index
  std::size_t lidem = 0;  // product idempotents (state indices)
  std::size_t ridem = 0;
  int intr2 = 0;
  bool is_bridge = false;
  std::vector<int> flip_set;  // circle letters: the flipped circle's points
};

struct MixedEntry {
  Monomial mono;
  const LetterInfo* b;  // the degree-zero letter
  const LetterInfo* d;  // the mirrored dual letter
};

std::string entry_names(const std::vector<PresGenerator>& pg,
                        const Monomial& m) {
  std::string out;
  for (std::size_t t = 0; t < m.size(); ++t) {
    if (t) out += "*";
    out += pg[m[t]].name;
  }
  return out;
}

// Mixing relations between the two halves of the product, one graded piece
// of two-letter mixed words at a time, classified by which boundary matching
// the piece moves.
std::vector<TaggedExtraRelation> build_mixing_relations(
    const ArcAlgebra& A, const RobertsAlgebra& R,
    const std::vector<std::size_t>& perm, std::size_t nd,
    const std::vector<PresGenerator>& pg) {
  std::vector<LetterInfo> bletters, dletters;
  bletters.reserve(R.generators.size());
  dletters.reserve(R.generators.size());
  for (std::size_t i = 0; i < R.generators.size(); ++i) {
    const RobertsGenerator& g = R.generators[i];
    LetterInfo b;
    b.idx = nd + i;
    b.lidem = g.h1;
    b.ridem = g.h2;
    b.intr2 = g.bidegree.q2;
    b.is_bridge = g.kind == RobertsKind::BGamma;
    if (!b.is_bridge) b.flip_set = circle_point_set(A.basis(g.h1), *g.circle);
    LetterInfo d;
    d.idx = i;
    d.lidem = perm[g.h1];
    d.ridem = perm[g.h2];
    d.intr2 = -g.bidegree.q2;
    d.is_bridge = b.is_bridge;
    d.flip_set = b.flip_set;  // point sets survive mirroring
    bletters.push_back(std::move(b));
    dletters.push_back(std::move(d));
  }

  struct PieceEntries {
    std::vector<MixedEntry> L;  // degree-zero letter first
    std::vector<MixedEntry> R;  // mirrored dual letter first
  };
  std::map<PieceKey, PieceEntries> pieces;
  for (const LetterInfo& b : bletters)
    for (const LetterInfo& d : dletters) {
      if (b.ridem == d.lidem)
        pieces[PieceKey{b.lidem, d.ridem, b.intr2 + d.intr2, 1}].L.push_back(
            MixedEntry{Monomial{b.idx, d.idx}, &b, &d});
      if (d.ridem == b.lidem)
        pieces[PieceKey{d.lidem, b.ridem, b.intr2 + d.intr2, 1}].R.push_back(
            MixedEntry{Monomial{d.idx, b.idx}, &b, &d});
    }

  std::vector<TaggedExtraRelation> out;
  auto emit = [&out](PresElement rel, ExtraFamily fam, const PieceKey& key) {
    out.push_back(TaggedExtraRelation{std::move(rel), fam, key});
  };

  for (const auto& [key, pe] : pieces) {
    const SignedDiagram& hu = A.basis(key.lidem);
    const SignedDiagram& hw = A.basis(key.ridem);
    const bool left_moves = !(hu.left() == hw.left());
    const bool right_moves = !(hu.right() == hw.right());

    if (left_moves && right_moves) {
      for (const MixedEntry& l : pe.L)
        for (const MixedEntry& r : pe.R) {
          if (!l.b->is_bridge || !l.d->is_bridge || !r.b->is_bridge ||
              !r.d->is_bridge)
            fail("product mixing", "non-surgery letter in a piece moving "
                                   "both matchings " + piece_text(key));
          PresElement rel = PresElement::single(l.mono);
          rel.add(r.mono, -1);
          emit(std::move(rel), ExtraFamily::BridgeBridge, key);
        }
      continue;
    }

    if (left_moves) {
      for (const MixedEntry& l : pe.L)
        for (const MixedEntry& r : pe.R) {
          if (l.b->is_bridge || !l.d->is_bridge || r.b->is_bridge ||
              !r.d->is_bridge)
            fail("product mixing", "unexpected letter kinds in " +
                                       piece_text(key));
          PresElement rel = PresElement::single(l.mono);
          rel.add(r.mono, -1);
          emit(std::move(rel), ExtraFamily::CircleBridge, key);
        }
      continue;
    }

    if (right_moves) {
      // A surgery on the right matching against a decoration move.  The
      // decoration's circle either survives the surgery untouched (one-to-one
      // commutation) or lies in its support (join/split three-term family).
      const std::set<std::vector<int>> before = all_circle_sets(hu);
      const std::set<std::vector<int>> after = all_circle_sets(hw);
      std::vector<const MixedEntry*> Lon, Loff, Ron, Roff;
      for (const MixedEntry& l : pe.L) {
        if (!l.b->is_bridge || l.d->is_bridge)
          fail("product mixing", "unexpected letter kinds in " +
                                     piece_text(key));
        // The decoration acts after the surgery: untouched circles are
        // circles of the starting diagram too.
        (before.count(l.d->flip_set) ? Loff : Lon).push_back(&l);
      }
      for (const MixedEntry& r : pe.R) {
        if (!r.b->is_bridge || r.d->is_bridge)
          fail("product mixing", "unexpected letter kinds in " +
                                     piece_text(key));
        // The decoration acts before the surgery: untouched circles remain
        // circles of the final diagram.
        (after.count(r.d->flip_set) ? Roff : Ron).push_back(&r);
      }
      if (Lon.empty() && Ron.empty()) {
        std::map<std::vector<int>, const MixedEntry*> by_set;
        for (const MixedEntry* r : Roff)
          if (!by_set.emplace(r->d->flip_set, r).second)
            fail("product mixing", "two commuting words flip one circle in " +
                                       piece_text(key));
        std::size_t used = 0;
        for (const MixedEntry* l : Loff) {
          auto it = by_set.find(l->d->flip_set);
          if (it == by_set.end())
            fail("product mixing",
                 "no commuting partner for " + entry_names(pg, l->mono) +
                     " in " + piece_text(key));
          PresElement rel = PresElement::single(l->mono);
          rel.add(it->second->mono, -1);
          emit(std::move(rel), ExtraFamily::BridgeCircleDisjoint, key);
          ++used;
        }
        if (used != Roff.size())
          fail("product mixing", "unmatched commuting words in " +
                                     piece_text(key));
        continue;
      }
      if (!Loff.empty() || !Roff.empty())
        fail("product mixing", "piece " + piece_text(key) +
                                   " mixes surgery-support and disjoint "
                                   "decorations");
      const int cu = hu.circles(), cw = hw.circles();
      if (cw == cu - 1) {
        // Two circles merge: flipping either input equals flipping the
        // output.
        if (Lon.size() != 1 || Ron.size() != 2)
          fail("product mixing", "merge piece " + piece_text(key) + " has " +
                                     num(Lon.size()) + "/" + num(Ron.size()) +
                                     " words");
        std::vector<int> united = Ron[0]->d->flip_set;
        united.insert(united.end(), Ron[1]->d->flip_set.begin(),
                      Ron[1]->d->flip_set.end());
        std::sort(united.begin(), united.end());
        if (united != Lon[0]->d->flip_set)
          fail("product mixing", "merge circles do not cover the merged "
                                 "circle in " + piece_text(key));
        PresElement rel = PresElement::single(Lon[0]->mono);
        rel.add(Ron[0]->mono, -1);
        rel.add(Ron[1]->mono, -1);
        emit(std::move(rel), ExtraFamily::BridgeCircleSurgery, key);
      } else if (cw == cu + 1) {
        // One circle splits: flipping either output equals flipping the
        // input.
        if (Lon.size() != 2 || Ron.size() != 1)
          fail("product mixing", "split piece " + piece_text(key) + " has " +
                                     num(Lon.size()) + "/" + num(Ron.size()) +
                                     " words");
        std::vector<int> united = Lon[0]->d->flip_set;
        united.insert(united.end(), Lon[1]->d->flip_set.begin(),
                      Lon[1]->d->flip_set.end());
        std::sort(united.begin(), united.end());
        if (united != Ron[0]->d->flip_set)
          fail("product mixing", "split circles do not cover the split "
                                 "circle in " + piece_text(key));
        PresElement rel = PresElement::single(Lon[0]->mono);
        rel.add(Lon[1]->mono, 1);
        rel.add(Ron[0]->mono, -1);
        emit(std::move(rel), ExtraFamily::BridgeCircleSurgery, key);
      } else {
        fail("product mixing", "surgery changed the circle count by more "
                               "than one in " + piece_text(key));
      }
      continue;
    }

    // Neither matching moves: two decoration moves, paired by their circles.
    {
      std::map<std::pair<std::vector<int>, std::vector<int>>,
               const MixedEntry*>
          by_sets;
      for (const MixedEntry& r : pe.R) {
        if (r.b->is_bridge || r.d->is_bridge)
          fail("product mixing", "unexpected letter kinds in " +
                                     piece_text(key));
        if (!by_sets.emplace(std::make_pair(r.b->flip_set, r.d->flip_set), &r)
                 .second)
          fail("product mixing", "two decoration words flip one circle pair "
                                 "in " + piece_text(key));
      }
      std::size_t used = 0;
      for (const MixedEntry& l : pe.L) {
        if (l.b->is_bridge || l.d->is_bridge)
          fail("product mixing", "unexpected letter kinds in " +
                                     piece_text(key));
        auto it = by_sets.find(std::make_pair(l.b->flip_set, l.d->flip_set));
        if (it == by_sets.end())
          fail("product mixing",
               "no decoration partner for " + entry_names(pg, l.mono) +
                   " in " + piece_text(key));
        PresElement rel = PresElement::single(l.mono);
        rel.add(it->second->mono, -1);
        emit(std::move(rel), ExtraFamily::CircleCircle, key);
        ++used;
      }
      if (used != pe.R.size())
        fail("product mixing", "unmatched decoration words in " +
                                   piece_text(key));
    }
  }
  return out;
}

std::string mirrored_dual_name(const std::string& dual_name,
                               const std::vector<std::size_t>& perm) {
  if (dual_name.empty() || dual_name.back() != '*')
    fail("product", "dual generator name " + dual_name + " lacks a star");
  std::string base = dual_name.substr(0, dual_name.size() - 1);
  base[0] = static_cast<char>(
      std::toupper(static_cast<unsigned char>(base[0])));
  return rewrite_state_pair_name(base, perm);
}

PresElement shift_monomials(const PresElement& e, std::size_t offset) {
  PresElement out;
  for (const auto& [m, c] : e.terms()) {
    Monomial shifted = m;
    for (std::size_t& g : shifted) g += offset;
    out.add(shifted, c);
  }
  return out;
}

}  // namespace

ProductAlgebraData product_algebra(int n, ProductMode mode) {
  RobertsAlgebra right = build_BR(n);
  MonomialGraph graph = monomial_graph_G(right);
  DualAlgebra dual = dual_BR(right, graph);
  std::vector<std::size_t> perm = mirror_state_permutation(*right.states);
  const ArcAlgebra& A = *right.states;
  const std::size_t nd = dual.presentation.generator_count();
  const std::size_t nb = right.presentation.generator_count();
  if (nd != nb) fail("product_algebra", "generator tables out of step");

  std::vector<PresGenerator> pg;
  std::vector<std::pair<bool, std::size_t>> origin;
  pg.reserve(nd + nb);
  for (std::size_t j = 0; j < nd; ++j) {
    const PresGenerator& d = dual.presentation.generator(j);
    PresGenerator g;
    g.name = mirrored_dual_name(d.name, perm);
    g.lidem = perm[d.lidem];
    g.ridem = perm[d.ridem];
    g.intr2 = d.intr2;
    g.hom = 1;
    pg.push_back(std::move(g));
    origin.emplace_back(true, j);
  }
  for (std::size_t i = 0; i < nb; ++i) {
    pg.push_back(right.presentation.generator(i));
    origin.emplace_back(false, i);
  }

  std::vector<PresElement> rels;
  for (const PresElement& r : dual.presentation.relations())
    rels.push_back(r);  // mirrored dual letters keep their indices
  for (const PresElement& r : right.presentation.relations())
    rels.push_back(shift_monomials(r, nd));

  std::vector<TaggedExtraRelation> extra =
      build_mixing_relations(A, right, perm, nd, pg);
  for (const TaggedExtraRelation& e : extra) rels.push_back(e.element);

  std::vector<PresElement> qex;
  if (mode == ProductMode::GammaQuotient) {
    for (const GraphComponent& comp : graph.components) {
      if (comp.shape != ComponentShape::Tetrahedron) continue;
      for (std::size_t a : comp.halves[0])
        for (std::size_t c : comp.halves[1]) {
          PresElement rel = PresElement::single(comp.monomials[a]);
          rel.add(comp.monomials[c], 1);
          qex.push_back(std::move(rel));
        }
    }
    for (const PresElement& r : qex) rels.push_back(r);
  }

  std::vector<std::string> idems;
  idems.reserve(A.basis_size());
  for (std::size_t k = 0; k < A.basis_size(); ++k)
    idems.push_back(right.presentation.idempotent_name(k));

  PresentedAlgebra pres(std::move(idems), std::move(pg), std::move(rels));

  std::vector<PresElement> mu;
  mu.reserve(nd + nb);
  for (std::size_t j = 0; j < nd; ++j)
    mu.push_back(dual.presentation.differential(j));
  for (std::size_t i = 0; i < nb; ++i) mu.emplace_back();
  pres.set_differential(std::move(mu));

  if (n <= 3) {
    VerifyReport vr = verify_differential(pres);
    if (!vr.passed) fail("product_algebra", vr.summary());
  } else {
    for (const PresElement& r : qex)
      if (!pres.is_zero_in_quotient(pres.mu1(r)))
        fail("product_algebra",
             "differential does not annihilate a tetrahedron relation");
  }

  return ProductAlgebraData{n,
                            mode,
                            std::move(right),
                            std::move(dual),
                            std::move(graph),
                            std::move(perm),
                            std::move(pres),
                            std::move(origin),
                            std::move(extra),
                            std::move(qex)};
}

// ---------------------------------------------------------------------------
// Rank-one DD operations
// ---------------------------------------------------------------------------

DDOperation dd_delta_generic(const PresentedAlgebra& P,
                             const PresentedAlgebra& dual,
                             bool dual_on_right) {
  if (P.generator_count() != dual.generator_count() ||
      P.idempotent_count() != dual.idempotent_count())
    fail("dd_delta_generic", "presentation and dual are out of step");
  for (std::size_t i = 0; i < P.generator_count(); ++i)
    if (P.generator(i).lidem != dual.generator(i).lidem ||
        P.generator(i).ridem != dual.generator(i).ridem)
      fail("dd_delta_generic", "generator " + P.generator(i).name +
                                   " and its dual have different idempotents");
  std::vector<std::vector<DDTerm>> delta(P.idempotent_count());
  for (std::size_t i = 0; i < P.generator_count(); ++i)
    delta[P.generator(i).lidem].push_back(
        DDTerm{Int(1), Monomial{i}, Monomial{i}});
  return DDOperation{dual_on_right ? DDKind::K_B_Bdual : DDKind::K_Bdual_B,
                     dual_on_right ? P : dual, dual_on_right ? dual : P,
                     std::move(delta)};
}

DDOperation dd_delta(const RobertsAlgebra& R, const DualAlgebra& D,
                     DDKind kind) {
  switch (kind) {
    case DDKind::K_B_Bdual:
      return dd_delta_generic(R.presentation, D.presentation, true);
    case DDKind::K_Bdual_B:
      return dd_delta_generic(R.presentation, D.presentation, false);
    case DDKind::K_product:
      fail("dd_delta", "the product pairing takes the product algebra");
  }
  fail("dd_delta", "unknown kind");
}

DDOperation dd_delta(const ProductAlgebraData& P) {
  PresentedAlgebra rightm = mirror_roberts(P.presentation, P.mirror_perm);
  const std::size_t total = P.presentation.generator_count();
  const std::size_t nd = total / 2;
  if (2 * nd != total) fail("dd_delta", "odd product generator count");
  std::vector<std::vector<DDTerm>> delta(P.presentation.idempotent_count());
  for (std::size_t t = 0; t < total; ++t) {
    const PresGenerator& g = P.presentation.generator(t);
    const std::size_t partner = t < nd ? t + nd : t - nd;
    const PresGenerator& p = rightm.generator(partner);
    // The partner carries the same state pair with the opposite case.
    std::string toggled = g.name;
    toggled[0] = std::isupper(static_cast<unsigned char>(toggled[0]))
                     ? static_cast<char>(std::tolower(
                           static_cast<unsigned char>(toggled[0])))
                     : static_cast<char>(std::toupper(
                           static_cast<unsigned char>(toggled[0])));
    if (p.name != toggled || p.lidem != g.lidem || p.ridem != g.ridem)
      fail("dd_delta", "partner of " + g.name + " is " + p.name +
                           " with mismatched labels");
    delta[g.lidem].push_back(DDTerm{Int(1), Monomial{t}, Monomial{partner}});
  }
  return DDOperation{DDKind::K_product, P.presentation, std::move(rightm),
                     std::move(delta)};
}

std::string DDOperation::to_text() const {
  std::ostringstream os;
  for (std::size_t e = 0; e < delta.size(); ++e) {
    os << "delta " << left_algebra.idempotent_name(e) << " ->";
    if (delta[e].empty()) {
      os << " 0";
    } else {
      for (const DDTerm& t : delta[e]) {
        Int c = t.coeff;
        os << (c < 0 ? " - " : " + ");
        if (c < 0) c = -c;
        os << c << " (" << mono_names(left_algebra, t.left) << " (x) "
           << mono_names(right_algebra, t.right) << "^op)";
      }
    }
    os << "\n";
  }
  return os.str();
}

DDCheckReport check_dd_relations(const DDOperation& op) {
  const PresentedAlgebra& L = op.left_algebra;
  const PresentedAlgebra& Rm = op.right_algebra;
  DDCheckReport rep;

  auto record = [&rep](const std::string& msg) {
    rep.ok = false;
    rep.failures.push_back(msg);
  };

  for (std::size_t e = 0; e < op.delta.size(); ++e) {
    std::map<std::pair<Monomial, Monomial>, Int> acc;
    auto add = [&acc](const Int& c, const PresElement& xs,
                      const PresElement& ys) {
      if (c == 0) return;
      for (const auto& [mx, cx] : xs.terms())
        for (const auto& [my, cy] : ys.terms()) {
          auto key = std::make_pair(mx, my);
          Int& v = acc[key];
          v += c * cx * cy;
          if (v == 0) acc.erase(key);
        }
    };

    bool audit_ok = true;
    for (const DDTerm& t : op.delta[e]) {
      ++rep.terms_checked;
      if (L.mono_lidem(t.left) != e || Rm.mono_lidem(t.right) != e) {
        record("delta term at idempotent " + num(e) +
               " has a stray outer idempotent");
        audit_ok = false;
        continue;
      }
      const Bidegree bl = L.mono_bidegree(t.left);
      const Bidegree br = Rm.mono_bidegree(t.right);
      if (bl.q2 + br.q2 != 0 || bl.hom + br.hom != 1) {
        record("delta term " + mono_names(L, t.left) + " (x) " +
               mono_names(Rm, t.right) + " has total bidegree (" +
               std::to_string(bl.q2 + br.q2) + "," +
               std::to_string(bl.hom + br.hom) + ")");
        audit_ok = false;
        continue;
      }
      if (L.mono_ridem(t.left) != Rm.mono_ridem(t.right)) {
        record("delta term " + mono_names(L, t.left) + " (x) " +
               mono_names(Rm, t.right) + " has mismatched inner idempotents");
        audit_ok = false;
        continue;
      }

      // Differential on the left factor, with the homological sign of the
      // right partner.
      PresElement dx = L.mu1(PresElement::single(t.left));
      if (!dx.is_zero())
        add(t.coeff * Int(br.hom % 2 ? -1 : 1), L.reduce(dx),
            Rm.reduce(PresElement::single(t.right)));
      // Differential on the right factor.
      PresElement dy = Rm.mu1(PresElement::single(t.right));
      if (!dy.is_zero())
        add(t.coeff, L.reduce(PresElement::single(t.left)), Rm.reduce(dy));
      // Composite term through the inner idempotent.
      const std::size_t mid = L.mono_ridem(t.left);
      for (const DDTerm& s : op.delta[mid]) {
        Monomial xm = t.left;
        xm.insert(xm.end(), s.left.begin(), s.left.end());
        Monomial ym = t.right;
        ym.insert(ym.end(), s.right.begin(), s.right.end());
        if (!L.mono_composable(xm) || !Rm.mono_composable(ym)) {
          record("composite delta term through idempotent " + num(mid) +
                 " is not composable");
          audit_ok = false;
          continue;
        }
        const int sgn =
            (L.mono_bidegree(s.left).hom * br.hom) % 2 ? -1 : 1;
        add(t.coeff * s.coeff * Int(sgn), L.reduce(PresElement::single(xm)),
            Rm.reduce(PresElement::single(ym)));
      }
    }

    if (audit_ok && !acc.empty()) {
      for (const auto& [key, c] : acc) {
        std::ostringstream os;
        os << "structure equation fails at idempotent " << e << ": "
           << mono_names(L, key.first) << " (x) "
           << mono_names(Rm, key.second) << " survives with coefficient "
           << c;
        record(os.str());
      }
    }
  }
  return rep;
}

}  // namespace bkh
