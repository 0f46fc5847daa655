#pragma once
// The arc algebra H^n: signed glued diagrams (W(a)b, sigma) as basis,
// TQFT multiplication by contracting the middle matching one saddle at a
// time, multiplicative generators, and structure constants.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bkh/planar.hpp"
#include "bkh/zlinalg.hpp"

namespace bkh {

// A basis element of H^n: left matching a (drawn reflected, W(a)), right
// matching b, and one sign per circle of the closed 1-manifold W(a)b.
// Circles are indexed 0,1,... ordered by their smallest contained point.
class SignedDiagram {
 public:
  SignedDiagram() = default;
  SignedDiagram(Matching left, Matching right, std::vector<int> signs);

  static int circle_count(const Matching& left, const Matching& right);

  int n() const { return left_.n(); }
  const Matching& left() const { return left_; }
  const Matching& right() const { return right_; }
  int circles() const { return static_cast<int>(signs_.size()); }
  int sign(int circle) const { return signs_[circle]; }
  const std::vector<int>& signs() const { return signs_; }
  int circle_of_point(int p) const { return circle_of_point_[p]; }

  std::string to_text() const;  // W([(1,4),(2,3)])[(1,2),(3,4)] signs:{c0:+,c1:-}

  auto operator<=>(const SignedDiagram& o) const {
    return std::tie(left_, right_, signs_) <=>
           std::tie(o.left_, o.right_, o.signs_);
  }
  bool operator==(const SignedDiagram& o) const {
    return left_ == o.left_ && right_ == o.right_ && signs_ == o.signs_;
  }

 private:
  Matching left_, right_;
  std::vector<int> signs_;            // +1 / -1 per circle
  std::vector<int> circle_of_point_;  // 1-based point -> circle index
};

// Intrinsic degree: n - #plus + #minus.  Idempotents have degree 0.
int degree(const SignedDiagram& d);

// Reflection across the boundary line: (W(a)b, s) -> (W(b)a, s).  The point
// set of every circle is unchanged, so the sign vector carries over.
SignedDiagram mirror_diagram(const SignedDiagram& d);

// Finitely supported integer combination of basis diagrams.
class ArcElement {
 public:
  ArcElement() = default;
  void add(const SignedDiagram& d, const Int& coeff);
  const std::map<SignedDiagram, Int>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  ArcElement& operator+=(const ArcElement& o);
  ArcElement& negate();
  bool operator==(const ArcElement&) const = default;

 private:
  std::map<SignedDiagram, Int> terms_;
};

// Multiplicative generators of H^n.
struct Generator {
  enum class Kind { HGamma, HAlpha };
  Kind kind = Kind::HGamma;
  Matching a;                    // left idempotent matching
  Bridge gamma;                  // HGamma: surgery bridge on a
  std::pair<int, int> alpha;     // HAlpha: an arc of a

  Matching right_matching() const;
  int intrinsic_degree() const { return kind == Kind::HGamma ? 1 : 2; }
  std::string to_text() const;

  auto operator<=>(const Generator& o) const {
    return std::tie(kind, a, gamma, alpha) <=>
           std::tie(o.kind, o.a, o.gamma, o.alpha);
  }
  bool operator==(const Generator& o) const {
    return kind == o.kind && a == o.a && gamma == o.gamma && alpha == o.alpha;
  }
};

// The basis element realizing a generator: h_gamma = (W(a)a', all plus);
// h_alpha = (W(a)a, minus exactly on the circle through alpha).
SignedDiagram generator_to_element(const Generator& g);

// All h_gamma (one per identified bridge) and h_alpha (one per arc),
// deterministically ordered.
std::vector<Generator> generators(int n);

// TQFT product of two basis elements: zero unless right(x) = left(y); else
// contract the middle matching by saddles in the fixed lowest-site order.
ArcElement multiply(const SignedDiagram& x, const SignedDiagram& y);

// Same, with an explicit contraction schedule (a permutation of the middle
// arc indices); the result must not depend on it.
ArcElement multiply_with_order(const SignedDiagram& x, const SignedDiagram& y,
                               const std::vector<std::size_t>& order);

ArcElement multiply(const ArcElement& x, const ArcElement& y);

// Interned basis of all of H^n with cached products and structure constants.
class ArcAlgebra {
 public:
  explicit ArcAlgebra(int n);

  int n() const { return n_; }
  const std::vector<Matching>& matchings() const { return matchings_; }
  std::size_t matching_index(const Matching& a) const;

  std::size_t basis_size() const { return basis_.size(); }
  const SignedDiagram& basis(std::size_t i) const { return basis_[i]; }
  std::size_t basis_index(const SignedDiagram& d) const;

  // Index of the idempotent (W(a)a, all plus).
  std::size_t idempotent(const Matching& a) const;

  long long rank_piece(const Matching& a, const Matching& b) const;
  long long algebra_rank() const;

  const std::vector<Generator>& mult_generators() const { return gens_; }
  std::size_t generator_index(const Generator& g) const;
  // Basis index of generator_to_element(g).
  std::size_t generator_basis_index(std::size_t gen) const;

  // Cached product of basis elements, expanded over the basis.
  const std::vector<std::pair<std::size_t, Int>>& multiply_basis(
      std::size_t x, std::size_t y) const;

  // Structure constants of h' * h for h' a generator, h a basis element.
  const std::vector<std::pair<std::size_t, Int>>& structure_constants(
      std::size_t gen, std::size_t h) const;

 private:
  int n_;
  std::vector<Matching> matchings_;
  std::vector<SignedDiagram> basis_;
  std::map<SignedDiagram, std::size_t> basis_lookup_;
  std::vector<Generator> gens_;
  std::map<Generator, std::size_t> gen_lookup_;
  std::vector<std::size_t> gen_basis_;
  mutable std::map<std::pair<std::size_t, std::size_t>,
                   std::vector<std::pair<std::size_t, Int>>>
      product_cache_;
};

}  // namespace bkh
