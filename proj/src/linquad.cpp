// Presented algebras over product-of-Z idempotent rings.  Graded pieces are
// built by exhaustive word enumeration with exact feasibility pruning; the
// relation span in each piece is put in Hermite form so normal forms, ranks
// and saturation certificates are exact over Z.

#include "bkh/linquad.hpp"

#include <algorithm>
#include <iterator>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>
#include <utility>

namespace bkh {

namespace {

constexpr std::size_t kMaxWordLen = 64;
constexpr std::size_t kMaxPieceMonomials = 200000;

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

// floor division with positive divisor
Int floor_div(const Int& a, const Int& b) {
  Int q = a / b;
  if (a % b != 0 && a < 0) --q;
  return q;
}

bool shortlex_less(const Monomial& a, const Monomial& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

std::string coeff_text(const Int& c) {
  std::ostringstream os;
  os << (c < 0 ? "-" : "+") << boost::multiprecision::abs(c);
  return os.str();
}

std::string key_text(const PieceKey& k) {
  std::ostringstream os;
  os << "(" << k.lidem << "," << k.ridem << "," << k.q2 << "," << k.hom << ")";
  return os.str();
}

}  // namespace

PresElement PresElement::single(Monomial m, Int coeff) {
  PresElement e;
  e.add(m, coeff);
  return e;
}

void PresElement::add(const Monomial& m, const Int& coeff) {
  require(!m.empty(), "PresElement: empty monomial");
  if (coeff == 0) return;
  Int& c = terms_[m];
  c += coeff;
  if (c == 0) terms_.erase(m);
}

PresElement& PresElement::operator+=(const PresElement& o) {
  for (const auto& [m, c] : o.terms_) add(m, c);
  return *this;
}

PresElement& PresElement::negate() {
  for (auto& [m, c] : terms_) c = -c;
  return *this;
}

PresElement& PresElement::scale(const Int& k) {
  if (k == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [m, c] : terms_) c *= k;
  return *this;
}

PresentedAlgebra::PresentedAlgebra(std::vector<std::string> idem_names,
                                   std::vector<PresGenerator> gens,
                                   std::vector<PresElement> rels)
    : idem_names_(std::move(idem_names)),
      gens_(std::move(gens)),
      rels_(std::move(rels)) {
  require(!idem_names_.empty(), "at least one idempotent required");
  std::set<std::string> names;
  for (const auto& nm : idem_names_) {
    require(!nm.empty() && nm.find_first_of(" \t\n") == std::string::npos,
            "idempotent names must be nonempty and whitespace-free");
    require(names.insert(nm).second, "duplicate idempotent name: " + nm);
  }
  names.clear();
  bool any_hom1 = false, hom0_all_pos = true, hom0_all_neg = true;
  for (const auto& g : gens_) {
    require(!g.name.empty() && g.name.find_first_of(" \t\n") == std::string::npos,
            "generator names must be nonempty and whitespace-free");
    require(names.insert(g.name).second, "duplicate generator name: " + g.name);
    require(g.lidem < idem_names_.size() && g.ridem < idem_names_.size(),
            "generator idempotent out of range: " + g.name);
    require(g.hom == 0 || g.hom == 1,
            "generator homological degree must be 0 or 1: " + g.name);
    if (g.hom == 1) {
      any_hom1 = true;
    } else {
      require(g.intr2 != 0, "degree-(0,0) generator not allowed: " + g.name);
      if (g.intr2 <= 0) hom0_all_pos = false;
      if (g.intr2 >= 0) hom0_all_neg = false;
    }
  }
  if (!any_hom1 && hom0_all_pos) {
    profile_ = Profile::kPositive;
  } else if (hom0_all_neg) {
    profile_ = Profile::kMixed;
    for (const auto& g : gens_)
      if (g.hom == 1) max_dual_q2_ = std::max(max_dual_q2_, g.intr2);
  } else {
    throw std::invalid_argument(
        "generator degrees admit no termination certificate: need either all "
        "degree-(positive,0) or all degree-0 generators negative with "
        "degree-1 generators arbitrary");
  }
  by_lidem_.assign(idem_names_.size(), {});
  for (std::size_t i = 0; i < gens_.size(); ++i)
    by_lidem_[gens_[i].lidem].push_back(i);
  for (const auto& r : rels_) validate_relation(r);
  mu1_gens_.assign(gens_.size(), PresElement{});
}

void PresentedAlgebra::validate_relation(const PresElement& r) const {
  require(!r.is_zero(), "zero relation");
  bool first = true;
  std::size_t l = 0, rr = 0;
  Bidegree b;
  for (const auto& [m, c] : r.terms()) {
    require(mono_composable(m), "relation monomial is not composable");
    if (first) {
      l = mono_lidem(m);
      rr = mono_ridem(m);
      b = mono_bidegree(m);
      first = false;
    } else {
      require(mono_lidem(m) == l && mono_ridem(m) == rr &&
                  mono_bidegree(m) == b,
              "relation terms must share idempotents and bidegree");
    }
  }
}

std::size_t PresentedAlgebra::generator_named(const std::string& name) const {
  for (std::size_t i = 0; i < gens_.size(); ++i)
    if (gens_[i].name == name) return i;
  throw std::out_of_range("no generator named " + name);
}

void PresentedAlgebra::set_differential(
    std::vector<PresElement> mu1_on_generators) {
  require(mu1_on_generators.size() == gens_.size(),
          "differential must cover every generator");
  for (std::size_t g = 0; g < gens_.size(); ++g) {
    const PresElement& e = mu1_on_generators[g];
    for (const auto& [m, c] : e.terms()) {
      require(mono_composable(m), "differential monomial is not composable");
      require(mono_lidem(m) == gens_[g].lidem &&
                  mono_ridem(m) == gens_[g].ridem,
              "differential of " + gens_[g].name +
                  " must keep its idempotents");
      Bidegree b = mono_bidegree(m);
      require(b.q2 == gens_[g].intr2 && b.hom == gens_[g].hom + 1,
              "differential of " + gens_[g].name +
                  " must have bidegree (intr2, hom+1)");
    }
  }
  mu1_gens_ = std::move(mu1_on_generators);
}

bool PresentedAlgebra::differential_is_zero() const {
  for (const auto& e : mu1_gens_)
    if (!e.is_zero()) return false;
  return true;
}

bool PresentedAlgebra::mono_composable(const Monomial& m) const {
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m[i] >= gens_.size()) return false;
    if (i > 0 && gens_[m[i - 1]].ridem != gens_[m[i]].lidem) return false;
  }
  return !m.empty();
}

std::size_t PresentedAlgebra::mono_lidem(const Monomial& m) const {
  require(!m.empty(), "mono_lidem: empty monomial");
  return gens_[m.front()].lidem;
}

std::size_t PresentedAlgebra::mono_ridem(const Monomial& m) const {
  require(!m.empty(), "mono_ridem: empty monomial");
  return gens_[m.back()].ridem;
}

Bidegree PresentedAlgebra::mono_bidegree(const Monomial& m) const {
  Bidegree b;
  for (std::size_t g : m) {
    b.q2 += gens_[g].intr2;
    b.hom += gens_[g].hom;
  }
  return b;
}

PresElement PresentedAlgebra::multiply(const PresElement& x,
                                       const PresElement& y) const {
  PresElement out;
  for (const auto& [mx, cx] : x.terms()) {
    for (const auto& [my, cy] : y.terms()) {
      if (mono_ridem(mx) != mono_lidem(my)) continue;
      Monomial m = mx;
      m.insert(m.end(), my.begin(), my.end());
      out.add(m, cx * cy);
    }
  }
  return out;
}

PresElement PresentedAlgebra::mu1(const PresElement& x) const {
  // Leibniz rule mu1(xy) = (-1)^{hom deg y} mu1(x) y + x mu1(y): the letter
  // being differentiated picks up the homological parity of its suffix.
  PresElement out;
  for (const auto& [m, c] : x.terms()) {
    std::vector<int> suffix(m.size() + 1, 0);
    for (std::size_t i = m.size(); i-- > 0;)
      suffix[i] = suffix[i + 1] + gens_[m[i]].hom;
    for (std::size_t i = 0; i < m.size(); ++i) {
      const PresElement& dg = mu1_gens_[m[i]];
      if (dg.is_zero()) continue;
      const int sign = suffix[i + 1] % 2 == 0 ? 1 : -1;
      for (const auto& [dm, dc] : dg.terms()) {
        Monomial w(m.begin(), m.begin() + static_cast<std::ptrdiff_t>(i));
        w.insert(w.end(), dm.begin(), dm.end());
        w.insert(w.end(), m.begin() + static_cast<std::ptrdiff_t>(i) + 1,
                 m.end());
        out.add(w, c * dc * sign);
      }
    }
  }
  return out;
}

bool PresentedAlgebra::feasible(const PieceKey& key, int q2_acc,
                                int hom_acc) const {
  if (profile_ == Profile::kPositive)
    return key.hom == 0 && hom_acc == 0 && q2_acc <= key.q2;
  if (hom_acc > key.hom) return false;
  return key.q2 - q2_acc <= (key.hom - hom_acc) * max_dual_q2_;
}

void PresentedAlgebra::enumerate_words(const PieceKey& key,
                                       bool collect_prefixes,
                                       std::vector<Monomial>* out) const {
  if (!feasible(key, 0, 0)) return;
  Monomial cur;
  auto dfs = [&](auto&& self, std::size_t idem, int q2_acc,
                 int hom_acc) -> void {
    if (collect_prefixes) {
      out->push_back(cur);
    } else if (!cur.empty() && idem == key.ridem && q2_acc == key.q2 &&
               hom_acc == key.hom) {
      out->push_back(cur);
    }
    if (out->size() > kMaxPieceMonomials)
      throw std::runtime_error("graded piece exceeds the monomial budget at " +
                               key_text(key));
    if (cur.size() >= kMaxWordLen)
      throw std::runtime_error("word length budget exceeded at " +
                               key_text(key));
    for (std::size_t g : by_lidem_[idem]) {
      int q2_next = q2_acc + gens_[g].intr2;
      int hom_next = hom_acc + gens_[g].hom;
      if (!feasible(key, q2_next, hom_next)) continue;
      cur.push_back(g);
      self(self, gens_[g].ridem, q2_next, hom_next);
      cur.pop_back();
    }
  };
  dfs(dfs, key.lidem, 0, 0);
}

PresentedAlgebra::Piece PresentedAlgebra::build_piece(
    const PieceKey& key) const {
  require(key.lidem < idem_names_.size() && key.ridem < idem_names_.size(),
          "piece idempotent out of range");
  Piece p;
  if (key.q2 == 0 && key.hom == 0) {
    // No nonempty word has bidegree (0,0) under either termination profile,
    // so this piece is spanned by the idempotent alone (when the two sides
    // agree) and is never touched by relations.
    p.idempotent_line = (key.lidem == key.ridem);
    return p;
  }
  enumerate_words(key, false, &p.monomials);
  std::sort(p.monomials.begin(), p.monomials.end(), shortlex_less);
  const std::size_t n = p.monomials.size();
  for (std::size_t i = 0; i < n; ++i) p.index[p.monomials[i]] = i;
  if (n == 0) return p;

  // Elimination order: long words first (ties broken lexicographically
  // descending), so surviving basis monomials are the short ones.
  p.priority.resize(n);
  for (std::size_t i = 0; i < n; ++i) p.priority[i] = i;
  std::sort(p.priority.begin(), p.priority.end(),
            [&](std::size_t a, std::size_t b) {
              return shortlex_less(p.monomials[b], p.monomials[a]);
            });
  std::vector<std::size_t> inv(n);
  for (std::size_t k = 0; k < n; ++k) inv[p.priority[k]] = k;

  // Incremental integer row echelon of all relation instances u * rel * v
  // landing in this piece, over the permuted coordinates.
  std::vector<std::vector<Int>> echelon;
  std::map<std::size_t, std::size_t> pivot_of;  // permuted column -> row
  auto insert_row = [&](std::vector<Int> row) {
    for (std::size_t pos = 0; pos < n; ++pos) {
      if (row[pos] == 0) continue;
      auto it = pivot_of.find(pos);
      if (it == pivot_of.end()) {
        if (row[pos] < 0)
          for (auto& e : row) e = -e;
        pivot_of[pos] = echelon.size();
        echelon.push_back(std::move(row));
        return;
      }
      std::vector<Int>& er = echelon[it->second];
      while (row[pos] != 0) {
        Int q = row[pos] / er[pos];
        if (q != 0)
          for (std::size_t j = pos; j < n; ++j) row[j] -= q * er[j];
        if (row[pos] != 0) std::swap(row, er);
      }
    }
  };

  for (const PresElement& r : rels_) {
    const Monomial& m0 = r.terms().begin()->first;
    const std::size_t rel_l = mono_lidem(m0);
    const std::size_t rel_r = mono_ridem(m0);
    const Bidegree rel_b = mono_bidegree(m0);
    PieceKey left_budget{key.lidem, key.ridem, key.q2 - rel_b.q2,
                         key.hom - rel_b.hom};
    std::vector<Monomial> prefixes;
    enumerate_words(left_budget, true, &prefixes);
    for (const Monomial& u : prefixes) {
      if ((u.empty() ? key.lidem : mono_ridem(u)) != rel_l) continue;
      Bidegree bu = mono_bidegree(u);
      PieceKey right_key{rel_r, key.ridem, left_budget.q2 - bu.q2,
                         left_budget.hom - bu.hom};
      std::vector<Monomial> suffixes;
      if (right_key.q2 == 0 && right_key.hom == 0) {
        if (rel_r == key.ridem) suffixes.emplace_back();
      } else {
        enumerate_words(right_key, false, &suffixes);
      }
      for (const Monomial& v : suffixes) {
        std::vector<Int> row(n);
        for (const auto& [m, c] : r.terms()) {
          Monomial w = u;
          w.insert(w.end(), m.begin(), m.end());
          w.insert(w.end(), v.begin(), v.end());
          row[inv[p.index.at(w)]] += c;
        }
        insert_row(std::move(row));
      }
    }
  }

  // Assemble the Hermite form: rows by ascending pivot, positive pivots,
  // entries above each pivot reduced into [0, pivot).
  std::vector<std::pair<std::size_t, std::size_t>> by_pivot(pivot_of.begin(),
                                                            pivot_of.end());
  const std::size_t rank = by_pivot.size();
  p.span.h = IntMatrix(rank, n);
  p.span.u = IntMatrix();
  for (std::size_t i = 0; i < rank; ++i) {
    std::vector<Int>& row = echelon[by_pivot[i].second];
    if (row[by_pivot[i].first] < 0)
      for (auto& e : row) e = -e;
    p.span.pivot_cols.push_back(by_pivot[i].first);
    for (std::size_t j = 0; j < n; ++j) p.span.h.at(i, j) = row[j];
  }
  for (std::size_t i = 0; i < rank; ++i) {
    const std::size_t pc = p.span.pivot_cols[i];
    const Int& piv = p.span.h.at(i, pc);
    if (piv != 1) p.saturated = false;
    for (std::size_t e = 0; e < i; ++e) {
      Int q = floor_div(p.span.h.at(e, pc), piv);
      if (q != 0)
        for (std::size_t j = pc; j < n; ++j)
          p.span.h.at(e, j) -= q * p.span.h.at(i, j);
    }
  }
  std::set<std::size_t> pivots(p.span.pivot_cols.begin(),
                               p.span.pivot_cols.end());
  for (std::size_t i = 0; i < n; ++i)
    if (!pivots.count(inv[i])) p.basis.push_back(i);
  return p;
}

long long PresentedAlgebra::Piece::rank() const {
  return static_cast<long long>(basis.size()) + (idempotent_line ? 1 : 0);
}

const PresentedAlgebra::Piece& PresentedAlgebra::piece(
    const PieceKey& key) const {
  auto it = pieces_.find(key);
  if (it == pieces_.end()) it = pieces_.emplace(key, build_piece(key)).first;
  return it->second;
}

long long PresentedAlgebra::piece_rank(const PieceKey& key) const {
  return piece(key).rank();
}

PresElement PresentedAlgebra::reduce(const PresElement& x) const {
  std::map<PieceKey, PresElement> groups;
  for (const auto& [m, c] : x.terms()) {
    require(mono_composable(m), "reduce: monomial is not composable");
    Bidegree b = mono_bidegree(m);
    groups[PieceKey{mono_lidem(m), mono_ridem(m), b.q2, b.hom}].add(m, c);
  }
  PresElement out;
  for (const auto& [key, el] : groups) {
    const Piece& p = piece(key);
    if (!p.saturated)
      throw std::runtime_error("reduce: piece " + key_text(key) +
                               " has a non-unit pivot");
    const std::size_t n = p.monomials.size();
    std::vector<std::size_t> inv(n);
    for (std::size_t k = 0; k < n; ++k) inv[p.priority[k]] = k;
    std::vector<Int> v(n);
    for (const auto& [m, c] : el.terms()) v[inv[p.index.at(m)]] += c;
    for (std::size_t i = 0; i < p.span.pivot_cols.size(); ++i) {
      const std::size_t pc = p.span.pivot_cols[i];
      if (v[pc] == 0) continue;
      Int q = v[pc];
      for (std::size_t j = pc; j < n; ++j) v[j] -= q * p.span.h.at(i, j);
    }
    for (std::size_t k = 0; k < n; ++k)
      if (v[k] != 0) out.add(p.monomials[p.priority[k]], v[k]);
  }
  return out;
}

bool PresentedAlgebra::is_zero_in_quotient(const PresElement& x) const {
  return reduce(x).is_zero();
}

std::string PresentedAlgebra::to_text() const {
  std::ostringstream os;
  for (const auto& g : gens_)
    os << "gen " << g.name << " " << idem_names_[g.lidem] << " "
       << idem_names_[g.ridem] << " " << g.intr2 << " " << g.hom << "\n";
  auto element_text = [&](const PresElement& e) {
    std::ostringstream t;
    bool first = true;
    for (const auto& [m, c] : e.terms()) {
      if (!first) t << "; ";
      first = false;
      t << coeff_text(c) << " ";
      for (std::size_t i = 0; i < m.size(); ++i)
        t << (i ? "*" : "") << gens_[m[i]].name;
    }
    return t.str();
  };
  for (const auto& r : rels_) os << "rel " << element_text(r) << "\n";
  for (std::size_t g = 0; g < gens_.size(); ++g)
    if (!mu1_gens_[g].is_zero())
      os << "mu1 " << gens_[g].name << " " << element_text(mu1_gens_[g])
         << "\n";
  return os.str();
}

QuadraticData quadratic_part(const PresentedAlgebra& P) {
  QuadraticData qd;
  for (const PresElement& r : P.relations()) {
    PresElement quad, lin;
    for (const auto& [m, c] : r.terms()) {
      if (m.size() == 2)
        quad.add(m, c);
      else if (m.size() == 1)
        lin.add(m, c);
      else
        throw std::invalid_argument(
            "relation is not linear-quadratic (monomial length > 2)");
    }
    require(!quad.is_zero(), "relation has no quadratic part");
    qd.quad.push_back(std::move(quad));
    qd.lin.push_back(std::move(lin));
  }
  // The linear part must be a function of the quadratic part: every rational
  // dependency among the quadratic parts must extend to the full relations.
  std::map<PieceKey, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < qd.quad.size(); ++i) {
    const Monomial& m = qd.quad[i].terms().begin()->first;
    Bidegree b = P.mono_bidegree(m);
    groups[PieceKey{P.mono_lidem(m), P.mono_ridem(m), b.q2, b.hom}].push_back(
        i);
  }
  for (const auto& [key, idxs] : groups) {
    std::map<Monomial, std::size_t> qcols, lcols;
    for (std::size_t i : idxs) {
      for (const auto& [m, c] : qd.quad[i].terms())
        qcols.emplace(m, qcols.size());
      for (const auto& [m, c] : qd.lin[i].terms())
        lcols.emplace(m, lcols.size());
    }
    IntMatrix q(idxs.size(), qcols.size());
    IntMatrix ql(idxs.size(), qcols.size() + lcols.size());
    for (std::size_t r = 0; r < idxs.size(); ++r) {
      for (const auto& [m, c] : qd.quad[idxs[r]].terms()) {
        q.at(r, qcols.at(m)) = c;
        ql.at(r, qcols.at(m)) = c;
      }
      for (const auto& [m, c] : qd.lin[idxs[r]].terms())
        ql.at(r, qcols.size() + lcols.at(m)) = c;
    }
    require(rank_of(q) == rank_of(ql),
            "linear parts are not determined by the quadratic parts at " +
                key_text(key));
  }
  return qd;
}

namespace {

// Composable generator pairs and quadratic-part relation indices, grouped by
// (left idempotent, right idempotent, total intrinsic degree).
struct QuadGroups {
  using Key = std::tuple<std::size_t, std::size_t, int>;
  std::map<Key, std::vector<std::pair<std::size_t, std::size_t>>> pairs;
  std::map<Key, std::vector<std::size_t>> igens;
};

QuadGroups build_quad_groups(const PresentedAlgebra& P,
                             const QuadraticData& q) {
  QuadGroups g;
  for (std::size_t i = 0; i < P.generator_count(); ++i) {
    for (std::size_t j = 0; j < P.generator_count(); ++j) {
      if (P.generator(i).ridem != P.generator(j).lidem) continue;
      QuadGroups::Key key{P.generator(i).lidem, P.generator(j).ridem,
                          P.generator(i).intr2 + P.generator(j).intr2};
      g.pairs[key].push_back({i, j});
    }
  }
  for (std::size_t a = 0; a < q.quad.size(); ++a) {
    const Monomial& m = q.quad[a].terms().begin()->first;
    QuadGroups::Key key{P.mono_lidem(m), P.mono_ridem(m),
                        P.mono_bidegree(m).q2};
    g.igens[key].push_back(a);
  }
  return g;
}

IntMatrix igen_matrix(
    const QuadraticData& q, const std::vector<std::size_t>& igens,
    const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
  std::map<Monomial, std::size_t> col;
  for (std::size_t p = 0; p < pairs.size(); ++p)
    col[Monomial{pairs[p].first, pairs[p].second}] = p;
  IntMatrix m(igens.size(), pairs.size());
  for (std::size_t r = 0; r < igens.size(); ++r)
    for (const auto& [mono, c] : q.quad[igens[r]].terms())
      m.at(r, col.at(mono)) = c;
  return m;
}

// Strip trailing zero rows so Hermite forms of equal lattices compare equal.
IntMatrix trim_to_rank(const HermiteForm& hf) {
  IntMatrix out(hf.rank(), hf.h.cols());
  for (std::size_t i = 0; i < hf.rank(); ++i)
    for (std::size_t j = 0; j < hf.h.cols(); ++j)
      out.at(i, j) = hf.h.at(i, j);
  return out;
}

}  // namespace

PresentedAlgebra quadratic_dual(const PresentedAlgebra& P,
                                const QuadraticData& q, DualReport* report) {
  for (std::size_t i = 0; i < P.generator_count(); ++i)
    require(P.generator(i).hom == 0,
            "quadratic dual requires purely intrinsic generators");
  DualReport local;
  DualReport& rep = report ? *report : local;

  std::vector<std::string> idems;
  for (std::size_t i = 0; i < P.idempotent_count(); ++i)
    idems.push_back(P.idempotent_name(i));
  std::vector<PresGenerator> dual_gens;
  for (std::size_t i = 0; i < P.generator_count(); ++i) {
    const PresGenerator& g = P.generator(i);
    dual_gens.push_back({g.name + "*", g.lidem, g.ridem, -g.intr2, 1});
  }

  QuadGroups groups = build_quad_groups(P, q);
  std::vector<PresElement> dual_rels;
  bool qualifies = true;  // every I-generator is 0/+-1 with 1 or 2 monomials
  for (const auto& e : q.quad) {
    if (e.terms().size() > 2) qualifies = false;
    for (const auto& [m, c] : e.terms())
      if (c != 1 && c != -1) qualifies = false;
  }

  for (const auto& [key, pairs] : groups.pairs) {
    auto ig_it = groups.igens.find(key);
    if (ig_it == groups.igens.end()) {
      for (const auto& [i, j] : pairs)
        dual_rels.push_back(PresElement::single(Monomial{i, j}));
      continue;
    }
    const std::vector<std::size_t>& igens = ig_it->second;
    IntMatrix m = igen_matrix(q, igens, pairs);
    HermiteForm hf = hermite_normal_form(m);
    for (std::size_t i = 0; i < hf.rank(); ++i)
      if (hf.h.at(i, hf.pivot_cols[i]) != 1) {
        rep.i_saturated = false;
        rep.notes.push_back("I-lattice not saturated in pair group");
      }
    SmithForm sf = smith_normal_form(m);
    const std::size_t r = sf.rank();
    const std::size_t kdim = pairs.size() - r;
    IntMatrix kernel(kdim, pairs.size());
    for (std::size_t k = 0; k < kdim; ++k)
      for (std::size_t p = 0; p < pairs.size(); ++p)
        kernel.at(k, p) = sf.v.at(p, r + k);
    HermiteForm khf = hermite_normal_form(kernel);
    require(khf.rank() == kdim, "annihilator basis is not independent");
    for (std::size_t k = 0; k < kdim; ++k) {
      PresElement rel;
      for (std::size_t p = 0; p < pairs.size(); ++p)
        if (khf.h.at(k, p) != 0)
          rel.add(Monomial{pairs[p].first, pairs[p].second}, khf.h.at(k, p));
      dual_rels.push_back(std::move(rel));
    }

    if (!qualifies) continue;
    // Independent combinatorial construction of the annihilator when every
    // I-generator is a single monomial or a difference of two: free on
    // non-vertex pairs, constant on each graph component, zero on components
    // carrying a single-monomial generator.
    std::map<Monomial, std::size_t> vertex;
    for (std::size_t a : igens)
      for (const auto& [mono, c] : q.quad[a].terms())
        vertex.emplace(mono, vertex.size());
    std::vector<std::size_t> uf(vertex.size());
    for (std::size_t i = 0; i < uf.size(); ++i) uf[i] = i;
    auto find = [&](std::size_t x) {
      while (uf[x] != x) x = uf[x] = uf[uf[x]];
      return x;
    };
    std::vector<bool> killed(vertex.size(), false);
    for (std::size_t a : igens) {
      const auto& ts = q.quad[a].terms();
      if (ts.size() == 1) {
        killed[vertex.at(ts.begin()->first)] = true;
      } else {
        auto it = ts.begin();
        std::size_t v1 = vertex.at(it->first);
        std::size_t v2 = vertex.at(std::next(it)->first);
        uf[find(v1)] = find(v2);
      }
    }
    std::vector<std::vector<Int>> comb;
    std::map<Monomial, std::size_t> pair_col;
    for (std::size_t p = 0; p < pairs.size(); ++p)
      pair_col[Monomial{pairs[p].first, pairs[p].second}] = p;
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      if (!vertex.count(Monomial{pairs[p].first, pairs[p].second})) {
        std::vector<Int> row(pairs.size());
        row[p] = 1;
        comb.push_back(std::move(row));
      }
    }
    std::map<std::size_t, std::vector<std::size_t>> comps;
    for (const auto& [mono, v] : vertex) comps[find(v)].push_back(v);
    std::vector<bool> comp_killed_map(vertex.size(), false);
    for (std::size_t v = 0; v < vertex.size(); ++v)
      if (killed[v]) comp_killed_map[find(v)] = true;
    for (const auto& [root, members] : comps) {
      if (comp_killed_map[root]) continue;
      std::vector<Int> row(pairs.size());
      for (const auto& [mono, v] : vertex)
        if (find(v) == root) row[pair_col.at(mono)] = 1;
      comb.push_back(std::move(row));
    }
    IntMatrix combm(comb.size(), pairs.size());
    for (std::size_t i = 0; i < comb.size(); ++i)
      for (std::size_t j = 0; j < pairs.size(); ++j)
        combm.at(i, j) = comb[i][j];
    if (trim_to_rank(hermite_normal_form(combm)) != trim_to_rank(khf)) {
      rep.cross_check_passed = false;
      rep.notes.push_back("graph-combinatorial annihilator disagrees");
    }
  }
  rep.cross_checked = qualifies;

  return PresentedAlgebra(std::move(idems), std::move(dual_gens),
                          std::move(dual_rels));
}

std::vector<PresElement> dual_differential(const PresentedAlgebra& P,
                                           const QuadraticData& q,
                                           const PresentedAlgebra& dual) {
  QuadGroups groups = build_quad_groups(P, q);
  std::vector<PresElement> out(P.generator_count());
  for (std::size_t k = 0; k < P.generator_count(); ++k) {
    const PresGenerator& g = P.generator(k);
    QuadGroups::Key key{g.lidem, g.ridem, g.intr2};
    auto ig_it = groups.igens.find(key);
    auto pr_it = groups.pairs.find(key);
    if (ig_it == groups.igens.end()) continue;  // no constraints: take zero
    require(pr_it != groups.pairs.end(),
            "I-generator group without composable pairs");
    const auto& igens = ig_it->second;
    const auto& pairs = pr_it->second;
    IntMatrix m = igen_matrix(q, igens, pairs);
    std::vector<Int> c(igens.size());
    for (std::size_t a = 0; a < igens.size(); ++a) {
      auto it = q.lin[igens[a]].terms().find(Monomial{k});
      if (it != q.lin[igens[a]].terms().end()) c[a] = it->second;
    }
    SmithForm sf = smith_normal_form(m);
    std::vector<Int> z(igens.size());
    for (std::size_t i = 0; i < igens.size(); ++i)
      for (std::size_t a = 0; a < igens.size(); ++a)
        z[i] += sf.u.at(i, a) * c[a];
    std::vector<Int> y(pairs.size());
    for (std::size_t i = 0; i < igens.size(); ++i) {
      if (i < sf.rank()) {
        if (z[i] % sf.divisors[i] != 0)
          throw std::runtime_error(
              "dual differential is not integral (phi* lift fails)");
        y[i] = z[i] / sf.divisors[i];
      } else if (z[i] != 0) {
        throw std::runtime_error(
            "dual differential is inconsistent (no phi* lift)");
      }
    }
    PresElement w;
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      Int wp = 0;
      for (std::size_t j = 0; j < pairs.size(); ++j)
        wp += sf.v.at(p, j) * y[j];
      if (wp != 0) w.add(Monomial{pairs[p].first, pairs[p].second}, wp);
    }
    out[k] = dual.reduce(w);
  }
  return out;
}

Int dual_pairing(const Monomial& dual_mono, const PresElement& primal) {
  auto it = primal.terms().find(dual_mono);
  return it == primal.terms().end() ? Int(0) : it->second;
}

void VerifyReport::fail(std::string msg) {
  passed = false;
  failures.push_back(std::move(msg));
}

std::string VerifyReport::summary() const {
  if (passed) return "ok";
  std::ostringstream os;
  os << failures.size() << " failure(s): ";
  for (std::size_t i = 0; i < failures.size(); ++i)
    os << (i ? " | " : "") << failures[i];
  return os.str();
}

VerifyReport verify_presentation(const PresentedAlgebra& P,
                                 const TargetOracle& target,
                                 const std::vector<PieceKey>& audit) {
  VerifyReport rep;
  for (std::size_t i = 0; i < P.relations().size(); ++i) {
    const PresElement& r = P.relations()[i];
    std::vector<Int> acc;
    bool sized = false;
    for (const auto& [m, c] : r.terms()) {
      std::vector<Int> v = target.evaluate(m);
      if (!sized) {
        acc.assign(v.size(), 0);
        sized = true;
      }
      if (v.size() != acc.size()) {
        rep.fail("relation " + std::to_string(i) +
                 ": inconsistent target dimensions");
        acc.clear();
        break;
      }
      for (std::size_t j = 0; j < v.size(); ++j) acc[j] += c * v[j];
    }
    for (const Int& a : acc)
      if (a != 0) {
        rep.fail("relation " + std::to_string(i) +
                 " does not vanish in the target");
        break;
      }
  }
  for (const PieceKey& key : audit) {
    const auto& p = P.piece(key);
    const long long tr = target.rank(key);
    if (!p.saturated)
      rep.fail("piece " + key_text(key) + " has a non-unit pivot");
    if (p.rank() != tr) {
      rep.fail("piece " + key_text(key) + " has rank " +
               std::to_string(p.rank()) + ", target has " +
               std::to_string(tr));
      continue;
    }
    if (p.idempotent_line || tr == 0) continue;
    std::vector<std::vector<Int>> rows;
    std::size_t dim = 0;
    bool ok = true;
    for (std::size_t b : p.basis) {
      std::vector<Int> v = target.evaluate(p.monomials[b]);
      if (rows.empty()) dim = v.size();
      if (v.size() != dim) {
        rep.fail("piece " + key_text(key) +
                 ": inconsistent target dimensions");
        ok = false;
        break;
      }
      rows.push_back(std::move(v));
    }
    if (!ok) continue;
    IntMatrix m(rows.size(), dim);
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t j = 0; j < dim; ++j) m.at(i, j) = rows[i][j];
    if (static_cast<long long>(rank_of(m)) != tr)
      rep.fail("piece " + key_text(key) +
               ": basis image does not span the target");
  }
  return rep;
}

VerifyReport verify_differential(const PresentedAlgebra& P) {
  VerifyReport rep;
  for (std::size_t g = 0; g < P.generator_count(); ++g) {
    PresElement dd = P.mu1(P.differential(g));
    if (!P.is_zero_in_quotient(dd))
      rep.fail("mu1^2 != 0 on generator " + P.generator(g).name);
  }
  for (std::size_t i = 0; i < P.relations().size(); ++i) {
    if (!P.is_zero_in_quotient(P.mu1(P.relations()[i])))
      rep.fail("mu1 does not annihilate relation " + std::to_string(i));
  }
  return rep;
}

PresentedAlgebra mirror_presentation(
    const PresentedAlgebra& P, const std::vector<std::size_t>& idem_perm,
    const std::function<std::string(const std::string&)>& rename) {
  require(idem_perm.size() == P.idempotent_count(),
          "idempotent permutation has the wrong size");
  std::vector<bool> seen(idem_perm.size(), false);
  for (std::size_t v : idem_perm) {
    require(v < idem_perm.size() && !seen[v],
            "idempotent permutation is not a bijection");
    seen[v] = true;
  }
  std::vector<std::string> idems;
  for (std::size_t i = 0; i < P.idempotent_count(); ++i)
    idems.push_back(P.idempotent_name(i));
  std::vector<PresGenerator> gens;
  for (std::size_t i = 0; i < P.generator_count(); ++i) {
    const PresGenerator& g = P.generator(i);
    gens.push_back({rename(g.name), idem_perm[g.lidem], idem_perm[g.ridem],
                    g.intr2, g.hom});
  }
  PresentedAlgebra out(std::move(idems), std::move(gens), P.relations());
  std::vector<PresElement> mu1;
  for (std::size_t g = 0; g < P.generator_count(); ++g)
    mu1.push_back(P.differential(g));
  out.set_differential(std::move(mu1));
  return out;
}

}  // namespace bkh
