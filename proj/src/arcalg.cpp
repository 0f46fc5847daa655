// Arc algebra: signed diagrams and TQFT multiplication by saddle contraction.

#include "bkh/arcalg.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace bkh {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

// Circles of the closed 1-manifold with the given arcs on points 1..2n,
// indexed by smallest contained point.  Returns (point -> circle index).
std::vector<int> circle_labels(const Matching& left, const Matching& right,
                               int* count) {
  int n = left.n();
  std::vector<int> label(2 * n + 1, -1);
  int circles = 0;
  for (int start = 1; start <= 2 * n; ++start) {
    if (label[start] >= 0) continue;
    // Walk the circle alternating left- and right-arcs.
    int p = start;
    do {
      label[p] = circles;
      p = left.partner(p);
      label[p] = circles;
      p = right.partner(p);
    } while (p != start);
    ++circles;
  }
  if (count) *count = circles;
  return label;
}

}  // namespace

SignedDiagram::SignedDiagram(Matching left, Matching right,
                             std::vector<int> signs)
    : left_(std::move(left)), right_(std::move(right)),
      signs_(std::move(signs)) {
  require(left_.n() == right_.n(), "diagram: side size mismatch");
  int circles = 0;
  circle_of_point_ = circle_labels(left_, right_, &circles);
  require(static_cast<int>(signs_.size()) == circles,
          "diagram: one sign per circle required");
  for (int s : signs_) require(s == 1 || s == -1, "diagram: signs are +-1");
}

int SignedDiagram::circle_count(const Matching& left, const Matching& right) {
  require(left.n() == right.n(), "diagram: side size mismatch");
  int circles = 0;
  circle_labels(left, right, &circles);
  return circles;
}

std::string SignedDiagram::to_text() const {
  std::ostringstream os;
  os << "W(" << left_.to_text() << ")" << right_.to_text() << " signs:{";
  for (int c = 0; c < circles(); ++c)
    os << (c ? "," : "") << 'c' << c << ':' << (signs_[c] > 0 ? '+' : '-');
  os << '}';
  return os.str();
}

int degree(const SignedDiagram& d) {
  int plus = 0, minus = 0;
  for (int s : d.signs()) (s > 0 ? plus : minus)++;
  return d.n() - plus + minus;
}

SignedDiagram mirror_diagram(const SignedDiagram& d) {
  return SignedDiagram(d.right(), d.left(), d.signs());
}

void ArcElement::add(const SignedDiagram& d, const Int& coeff) {
  if (coeff == 0) return;
  auto it = terms_.find(d);
  if (it == terms_.end()) {
    terms_.emplace(d, coeff);
  } else {
    it->second += coeff;
    if (it->second == 0) terms_.erase(it);
  }
}

ArcElement& ArcElement::operator+=(const ArcElement& o) {
  for (const auto& [d, c] : o.terms_) add(d, c);
  return *this;
}

ArcElement& ArcElement::negate() {
  for (auto& [d, c] : terms_) c = -c;
  return *this;
}

Matching Generator::right_matching() const {
  return kind == Kind::HGamma ? surger(a, gamma) : a;
}

std::string Generator::to_text() const {
  std::ostringstream os;
  if (kind == Kind::HGamma)
    os << "hg" << a.to_text() << ":(" << gamma.p << ',' << gamma.q << ')';
  else
    os << "ha" << a.to_text() << ":(" << alpha.first << ',' << alpha.second
       << ')';
  return os.str();
}

SignedDiagram generator_to_element(const Generator& g) {
  if (g.kind == Generator::Kind::HGamma) {
    Matching b = surger(g.a, g.gamma);
    return SignedDiagram(g.a, b,
                         std::vector<int>(SignedDiagram::circle_count(g.a, b),
                                          1));
  }
  int circles = SignedDiagram::circle_count(g.a, g.a);
  std::vector<int> signs(circles, 1);
  SignedDiagram plain(g.a, g.a, signs);
  signs[plain.circle_of_point(g.alpha.first)] = -1;
  return SignedDiagram(g.a, g.a, std::move(signs));
}

std::vector<Generator> generators(int n) {
  std::vector<Generator> out;
  for (const Matching& a : enumerate_matchings(n)) {
    for (const Bridge& g : bridges(a))
      out.push_back(Generator{Generator::Kind::HGamma, a, g, {0, 0}});
    for (const auto& arc : a.pairs())
      out.push_back(Generator{Generator::Kind::HAlpha, a, Bridge{0, 0}, arc});
  }
  return out;
}

namespace {

// One saddle-contraction state: a multigraph on points P_1..P_2n (vertices
// 0..2n-1, x's side) and Q_1..Q_2n (vertices 2n..4n-1, y's side).
struct Contraction {
  int n;
  // Edges as vertex pairs; the middle arcs carry their arc index, boundary
  // arcs carry -1.
  struct Edge {
    int u, v, mid;
  };
  std::vector<Edge> edges;

  std::vector<int> component_reps;            // rep (min vertex) per component
  std::vector<int> comp_of;                   // vertex -> component index
  void recompute_components() {
    int verts = 4 * n;
    comp_of.assign(verts, -1);
    component_reps.clear();
    std::vector<std::vector<int>> adj(verts);
    for (const Edge& e : edges) {
      adj[e.u].push_back(e.v);
      adj[e.v].push_back(e.u);
    }
    for (int start = 0; start < verts; ++start) {
      if (comp_of[start] >= 0) continue;
      int comp = static_cast<int>(component_reps.size());
      component_reps.push_back(start);
      std::vector<int> queue{start};
      comp_of[start] = comp;
      for (std::size_t head = 0; head < queue.size(); ++head)
        for (int next : adj[queue[head]])
          if (comp_of[next] < 0) {
            comp_of[next] = comp;
            queue.push_back(next);
          }
    }
  }

  void remove_middle_edge(int u, int v, int mid) {
    auto it = std::find_if(edges.begin(), edges.end(), [&](const Edge& e) {
      return e.mid == mid && ((e.u == u && e.v == v) || (e.u == v && e.v == u));
    });
    require(it != edges.end(), "contraction: middle edge missing");
    edges.erase(it);
  }
};

}  // namespace

ArcElement multiply_with_order(const SignedDiagram& x, const SignedDiagram& y,
                               const std::vector<std::size_t>& order) {
  require(x.n() == y.n(), "multiply: size mismatch");
  ArcElement result;
  if (!(x.right() == y.left())) return result;
  int n = x.n();
  const Matching& mid = x.right();
  require(order.size() == mid.pairs().size(), "multiply: bad schedule");

  Contraction st;
  st.n = n;
  auto pv = [](int point) { return point - 1; };           // x side
  auto qv = [n](int point) { return 2 * n + point - 1; };  // y side
  for (const auto& [i, j] : x.left().pairs())
    st.edges.push_back({pv(i), pv(j), -1});
  for (std::size_t k = 0; k < mid.pairs().size(); ++k) {
    const auto& [i, j] = mid.pairs()[k];
    st.edges.push_back({pv(i), pv(j), static_cast<int>(k)});
    st.edges.push_back({qv(i), qv(j), static_cast<int>(k)});
  }
  for (const auto& [i, j] : y.right().pairs())
    st.edges.push_back({qv(i), qv(j), -1});

  st.recompute_components();

  // Terms: component rep -> sign, with integer coefficients; deduplicated.
  using SignMap = std::map<int, int>;
  std::map<SignMap, Int> terms;
  {
    SignMap initial;
    for (int rep : st.component_reps) {
      if (rep < 2 * n)
        initial[rep] = x.sign(x.circle_of_point(rep + 1));
      else
        initial[rep] = y.sign(y.circle_of_point(rep - 2 * n + 1));
    }
    terms[initial] = 1;
  }

  for (std::size_t step : order) {
    const auto& [i, j] = mid.pairs()[step];
    int cp = st.comp_of[pv(i)], cq = st.comp_of[qv(i)];
    int rep_p = st.component_reps[cp], rep_q = st.component_reps[cq];
    std::size_t before = st.component_reps.size();

    st.remove_middle_edge(pv(i), pv(j), static_cast<int>(step));
    st.remove_middle_edge(qv(i), qv(j), static_cast<int>(step));
    st.edges.push_back({pv(i), qv(i), -1});
    st.edges.push_back({pv(j), qv(j), -1});
    st.recompute_components();

    std::map<SignMap, Int> next;
    if (cp != cq) {
      // Merge: ++ -> +, +- and -+ -> -, -- -> 0.
      require(st.component_reps.size() + 1 == before,
              "contraction: merge must drop one circle");
      int rep_new = st.component_reps[st.comp_of[pv(i)]];
      for (const auto& [signs, coeff] : terms) {
        int s1 = signs.at(rep_p), s2 = signs.at(rep_q);
        if (s1 < 0 && s2 < 0) continue;
        SignMap m = signs;
        m.erase(rep_p);
        m.erase(rep_q);
        m[rep_new] = (s1 < 0 || s2 < 0) ? -1 : 1;
        next[std::move(m)] += coeff;
      }
    } else {
      // Split: + -> (+,-) + (-,+); - -> (-,-).
      require(st.component_reps.size() == before + 1,
              "contraction: split must add one circle");
      int rep_a = st.component_reps[st.comp_of[pv(i)]];
      int rep_b = st.component_reps[st.comp_of[pv(j)]];
      require(rep_a != rep_b, "contraction: split components coincide");
      for (const auto& [signs, coeff] : terms) {
        int s = signs.at(rep_p);
        SignMap base = signs;
        base.erase(rep_p);
        if (s > 0) {
          SignMap m1 = base;
          m1[rep_a] = 1;
          m1[rep_b] = -1;
          next[std::move(m1)] += coeff;
          SignMap m2 = std::move(base);
          m2[rep_a] = -1;
          m2[rep_b] = 1;
          next[std::move(m2)] += coeff;
        } else {
          SignMap m = std::move(base);
          m[rep_a] = -1;
          m[rep_b] = -1;
          next[std::move(m)] += coeff;
        }
      }
    }
    std::erase_if(next, [](const auto& kv) { return kv.second == 0; });
    terms = std::move(next);
  }

  // Translate final components to circles of W(a)b.
  SignedDiagram shape(x.left(), y.right(),
                      std::vector<int>(SignedDiagram::circle_count(
                                           x.left(), y.right()),
                                       1));
  for (const auto& [signs, coeff] : terms) {
    std::vector<int> out(shape.circles(), 0);
    for (const auto& [rep, s] : signs) {
      int point = rep < 2 * n ? rep + 1 : rep - 2 * n + 1;
      out[shape.circle_of_point(point)] = s;
    }
    for (int s : out) require(s != 0, "contraction: unsigned circle");
    result.add(SignedDiagram(x.left(), y.right(), out), coeff);
  }
  return result;
}

ArcElement multiply(const SignedDiagram& x, const SignedDiagram& y) {
  std::vector<std::size_t> order(x.right().pairs().size());
  std::iota(order.begin(), order.end(), 0);
  return multiply_with_order(x, y, order);
}

ArcElement multiply(const ArcElement& x, const ArcElement& y) {
  ArcElement out;
  for (const auto& [dx, cx] : x.terms())
    for (const auto& [dy, cy] : y.terms()) {
      ArcElement prod = multiply(dx, dy);
      for (const auto& [dz, cz] : prod.terms()) out.add(dz, cx * cy * cz);
    }
  return out;
}

ArcAlgebra::ArcAlgebra(int n) : n_(n), matchings_(enumerate_matchings(n)) {
  for (const Matching& a : matchings_)
    for (const Matching& b : matchings_) {
      int circles = SignedDiagram::circle_count(a, b);
      for (int mask = 0; mask < (1 << circles); ++mask) {
        std::vector<int> signs(circles);
        for (int c = 0; c < circles; ++c)
          signs[c] = (mask >> c) & 1 ? -1 : 1;
        basis_.emplace_back(a, b, std::move(signs));
      }
    }
  std::sort(basis_.begin(), basis_.end());
  for (std::size_t i = 0; i < basis_.size(); ++i)
    basis_lookup_.emplace(basis_[i], i);

  gens_ = generators(n);
  for (std::size_t i = 0; i < gens_.size(); ++i) {
    gen_lookup_.emplace(gens_[i], i);
    gen_basis_.push_back(basis_index(generator_to_element(gens_[i])));
  }
}

std::size_t ArcAlgebra::matching_index(const Matching& a) const {
  auto it = std::lower_bound(matchings_.begin(), matchings_.end(), a);
  require(it != matchings_.end() && *it == a, "matching not in algebra");
  return static_cast<std::size_t>(it - matchings_.begin());
}

std::size_t ArcAlgebra::basis_index(const SignedDiagram& d) const {
  auto it = basis_lookup_.find(d);
  require(it != basis_lookup_.end(), "diagram not in basis");
  return it->second;
}

std::size_t ArcAlgebra::idempotent(const Matching& a) const {
  return basis_index(SignedDiagram(
      a, a, std::vector<int>(SignedDiagram::circle_count(a, a), 1)));
}

long long ArcAlgebra::rank_piece(const Matching& a, const Matching& b) const {
  return 1LL << SignedDiagram::circle_count(a, b);
}

long long ArcAlgebra::algebra_rank() const {
  long long total = 0;
  for (const Matching& a : matchings_)
    for (const Matching& b : matchings_) total += rank_piece(a, b);
  return total;
}

std::size_t ArcAlgebra::generator_index(const Generator& g) const {
  auto it = gen_lookup_.find(g);
  require(it != gen_lookup_.end(), "generator not in algebra");
  return it->second;
}

std::size_t ArcAlgebra::generator_basis_index(std::size_t gen) const {
  return gen_basis_.at(gen);
}

const std::vector<std::pair<std::size_t, Int>>& ArcAlgebra::multiply_basis(
    std::size_t x, std::size_t y) const {
  auto key = std::make_pair(x, y);
  auto it = product_cache_.find(key);
  if (it != product_cache_.end()) return it->second;
  ArcElement prod = multiply(basis_[x], basis_[y]);
  std::vector<std::pair<std::size_t, Int>> expanded;
  for (const auto& [d, c] : prod.terms())
    expanded.emplace_back(basis_index(d), c);
  return product_cache_.emplace(key, std::move(expanded)).first->second;
}

const std::vector<std::pair<std::size_t, Int>>& ArcAlgebra::structure_constants(
    std::size_t gen, std::size_t h) const {
  return multiply_basis(gen_basis_.at(gen), h);
}

}  // namespace bkh
