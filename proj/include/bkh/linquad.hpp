#pragma once
// Presented algebras over product-of-Z idempotent rings: graded word
// enumeration, normal forms by exact integer elimination, presentation
// verification against an oracle, quadratic parts, quadratic duals and the
// induced differential.

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "bkh/zlinalg.hpp"

namespace bkh {

// A word in the generators (indices, left to right); adjacent letters must
// compose (right idempotent of one = left idempotent of the next).
using Monomial = std::vector<std::size_t>;

struct Bidegree {
  int q2 = 0;   // intrinsic degree, doubled so half-units stay exact
  int hom = 0;  // homological degree
  auto operator<=>(const Bidegree&) const = default;
};

// Finitely supported integer combination of nonempty monomials.
class PresElement {
 public:
  PresElement() = default;
  static PresElement single(Monomial m, Int coeff = 1);

  void add(const Monomial& m, const Int& coeff);
  const std::map<Monomial, Int>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  PresElement& operator+=(const PresElement& o);
  PresElement& negate();
  PresElement& scale(const Int& c);
  bool operator==(const PresElement&) const = default;

 private:
  std::map<Monomial, Int> terms_;
};

struct PresGenerator {
  std::string name;  // unique, whitespace-free
  std::size_t lidem = 0, ridem = 0;
  int intr2 = 0;
  int hom = 0;
};

struct PieceKey {
  std::size_t lidem = 0, ridem = 0;
  int q2 = 0, hom = 0;
  auto operator<=>(const PieceKey&) const = default;
};

class PresentedAlgebra {
 public:
  PresentedAlgebra(std::vector<std::string> idem_names,
                   std::vector<PresGenerator> gens,
                   std::vector<PresElement> rels);

  std::size_t idempotent_count() const { return idem_names_.size(); }
  const std::string& idempotent_name(std::size_t i) const {
    return idem_names_[i];
  }
  std::size_t generator_count() const { return gens_.size(); }
  const PresGenerator& generator(std::size_t i) const { return gens_[i]; }
  std::size_t generator_named(const std::string& name) const;
  const std::vector<PresElement>& relations() const { return rels_; }

  // Differential on generators; zero by default.  Each value must consist of
  // monomials with the generator's idempotents and bidegree (intr2, hom+1).
  void set_differential(std::vector<PresElement> mu1_on_generators);
  const PresElement& differential(std::size_t gen) const {
    return mu1_gens_[gen];
  }
  bool differential_is_zero() const;

  bool mono_composable(const Monomial& m) const;
  std::size_t mono_lidem(const Monomial& m) const;  // nonempty m
  std::size_t mono_ridem(const Monomial& m) const;
  Bidegree mono_bidegree(const Monomial& m) const;

  // Product by concatenation; incomposable concatenations vanish.
  PresElement multiply(const PresElement& x, const PresElement& y) const;
  // Signed Leibniz extension of the generator differential:
  // mu1(xy) = (-1)^{hom deg y} mu1(x) y + x mu1(y).
  PresElement mu1(const PresElement& x) const;

  // One graded piece of the quotient: every composable word of the exact
  // signature, the integer row span of all relation instances landing there,
  // and the surviving monomial basis.
  struct Piece {
    std::vector<Monomial> monomials;  // shortlex ascending
    std::map<Monomial, std::size_t> index;
    std::vector<std::size_t> priority;  // elimination order (reducible first)
    HermiteForm span;                   // relation span over permuted coords
    std::vector<std::size_t> basis;     // surviving monomials (indices)
    bool saturated = true;              // all span pivots are 1
    bool idempotent_line = false;       // the rank-one (e,e,0,0) piece
    long long rank() const;
  };
  const Piece& piece(const PieceKey& key) const;
  long long piece_rank(const PieceKey& key) const;

  // Normal form; requires every touched piece to be saturated.
  PresElement reduce(const PresElement& x) const;
  bool is_zero_in_quotient(const PresElement& x) const;

  std::string to_text() const;

 private:
  enum class Profile { kPositive, kMixed };

  void validate_relation(const PresElement& r) const;
  bool feasible(const PieceKey& key, int q2_acc, int hom_acc) const;
  void enumerate_words(const PieceKey& key, bool collect_prefixes,
                       std::vector<Monomial>* out) const;
  Piece build_piece(const PieceKey& key) const;

  std::vector<std::string> idem_names_;
  std::vector<PresGenerator> gens_;
  std::vector<PresElement> rels_;
  std::vector<PresElement> mu1_gens_;
  std::vector<std::vector<std::size_t>> by_lidem_;
  Profile profile_ = Profile::kPositive;
  int max_dual_q2_ = 0;  // max intr2 over hom-1 generators (0 if none)
  mutable std::map<PieceKey, Piece> pieces_;
};

// Quadratic/linear split of a linear-quadratic presentation: quad[i] is the
// I-generator from relation i, lin[i] the linear part with phi(quad[i]) =
// lin[i] (so that quad[i] + lin[i] is the relation).
struct QuadraticData {
  std::vector<PresElement> quad;
  std::vector<PresElement> lin;
};

QuadraticData quadratic_part(const PresentedAlgebra& P);

struct DualReport {
  bool i_saturated = true;      // I-lattice saturated in every pair group
  bool cross_checked = false;   // graph-combinatorial construction compared
  bool cross_check_passed = true;
  std::vector<std::string> notes;
};

// T(V*)/I^perp: dual generator i has the idempotents of generator i and
// bidegree (-intr2_i, 1); relations are a canonical basis of the integer
// annihilator of I in each quadratic pair group.
PresentedAlgebra quadratic_dual(const PresentedAlgebra& P,
                                const QuadraticData& q,
                                DualReport* report = nullptr);

// mu1 on the dual generators realizing phi*, one element per generator;
// install with set_differential.
std::vector<PresElement> dual_differential(const PresentedAlgebra& P,
                                           const QuadraticData& q,
                                           const PresentedAlgebra& dual);

// <b*_i b*_j, sum c b_k b_l> = c at (k,l) = (i,j).
Int dual_pairing(const Monomial& dual_mono, const PresElement& primal);

struct TargetOracle {
  // Rank of the target's graded piece.
  std::function<long long(const PieceKey&)> rank;
  // Coordinates of a monomial's image in a fixed basis of its target piece.
  std::function<std::vector<Int>(const Monomial&)> evaluate;
};

struct VerifyReport {
  bool passed = true;
  std::vector<std::string> failures;
  void fail(std::string msg);
  std::string summary() const;
};

// Checks that (i) every relation evaluates to zero in the target, (ii) for
// each audited piece the quotient rank equals the target rank, the piece is
// saturated, and the evaluated basis monomials span a lattice of full rank.
VerifyReport verify_presentation(const PresentedAlgebra& P,
                                 const TargetOracle& target,
                                 const std::vector<PieceKey>& audit);

// mu1 squares to zero on generators and annihilates relations, in the
// quotient.
VerifyReport verify_differential(const PresentedAlgebra& P);

// Relabeling functor: same generators, relations, and differential, with
// idempotents permuted (idem_perm[old] = new) and generators renamed.
PresentedAlgebra mirror_presentation(
    const PresentedAlgebra& P, const std::vector<std::size_t>& idem_perm,
    const std::function<std::string(const std::string&)>& rename);

}  // namespace bkh
