#pragma once
// Chain complexes of projective graded modules over the arc algebra H^n.
// A complex is a direct sum of cyclic projectives x_i * H^n (right side) or
// H^n * x_i (left side); its differential is stored through plain integer
// coefficients c[i][j] and labeled coefficients ct[i][j][g], where the label
// g is a multiplicative generator basis element (surgery or dotted-circle
// type).  On top of that shape the module provides: the d^2 = 0 check in two
// independent formulations, chain maps and homotopies with their defining
// equations, the tensor product of a right complex with a left complex over
// H^n, the side-swapping mirror, and hypothesis-checked Gaussian elimination
// against a designated subcomplex.

#include <array>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "bkh/arcalg.hpp"
#include "bkh/planar.hpp"
#include "bkh/zlinalg.hpp"

namespace bkh {

// Which half of a pairing the complex lives on: right modules x_i * H^n are
// glued from the left side of a diagram, left modules H^n * x_i from the
// right side.
enum class ModuleSide { kLeft, kRight };

// One projective summand.  `idem` indexes the matching whose idempotent
// carries the summand; (q, h) is the (intrinsic, homological) bigrading of
// the generator x_i.
struct ProjGenerator {
  std::string id;
  std::size_t idem = 0;
  long long q = 0;
  long long h = 0;

  bool operator==(const ProjGenerator&) const = default;
};

// Z-linear combination of module basis elements.  A key (i, b) stands for
// x_i * basis(b) on the right side and basis(b) * x_i on the left side.
class ModuleElement {
 public:
  ModuleElement() = default;
  void add(std::size_t gen, std::size_t beta, const Int& coeff);
  const std::map<std::pair<std::size_t, std::size_t>, Int>& terms() const {
    return terms_;
  }
  bool is_zero() const { return terms_.empty(); }
  ModuleElement& operator+=(const ModuleElement& o);
  ModuleElement& negate();
  bool operator==(const ModuleElement&) const = default;

 private:
  std::map<std::pair<std::size_t, std::size_t>, Int> terms_;
};

// A finite complex of projective graded H^n-modules whose differential has
// the generator-labeled shape
//   d(x_i) = sum_j c[i][j] x_j  +  sum_{j,g} ct[i][j][g] x_j * g
// (right side; the labeled term is g * x_j on the left side), with every
// label g a multiplicative generator.  Degree bookkeeping is enforced when
// coefficients are added: plain arrows shift bigradings by (0,1), surgery
// labels by (-1,1), dotted-circle labels by (-2,1), and idempotents must
// compose.  d^2 = 0 is *not* enforced here; check_d_squared decides it.
class ProjComplex {
 public:
  ProjComplex() = default;
  ProjComplex(std::shared_ptr<const ArcAlgebra> algebra, ModuleSide side);

  const ArcAlgebra& algebra() const { return *algebra_; }
  std::shared_ptr<const ArcAlgebra> algebra_ptr() const { return algebra_; }
  ModuleSide side() const { return side_; }

  std::size_t add_generator(std::string id, const Matching& idem, long long q,
                            long long h);
  std::size_t size() const { return gens_.size(); }
  const ProjGenerator& generator(std::size_t i) const { return gens_[i]; }

  // Accumulates into c[i][j]; zero sums are erased.  Requires matching
  // idempotents and deg x_j = deg x_i + (0,1).
  void add_d(std::size_t i, std::size_t j, const Int& coeff);
  // Accumulates into ct[i][j][label]; the label must be a multiplicative
  // generator basis element with the composing idempotents and the degree
  // shift of its kind.
  void add_dt(std::size_t i, std::size_t j, const SignedDiagram& label,
              const Int& coeff);

  const std::map<std::pair<std::size_t, std::size_t>, Int>& c_entries() const {
    return c_;
  }
  const std::map<std::tuple<std::size_t, std::size_t, std::size_t>, Int>&
  ct_entries() const {
    return ct_;
  }
  Int c(std::size_t i, std::size_t j) const;
  Int ct(std::size_t i, std::size_t j, std::size_t label_basis) const;

  // All pairs (i, b) with basis(b) attachable to x_i: left idempotent of b
  // equal to idem(x_i) on the right side, right idempotent on the left side.
  std::vector<std::pair<std::size_t, std::size_t>> module_basis() const;
  // Bigrading of the basis element (i, b): (q_i + deg basis(b), h_i).
  std::pair<long long, long long> basis_bigrading(std::size_t gen,
                                                  std::size_t beta) const;

  // The differential, expanded H^n-linearly over the Z-basis.
  ModuleElement apply_d(const ModuleElement& e) const;

  // gen/d/dt lines; generators in index order, coefficients in key order.
  std::string to_text() const;

  bool operator==(const ProjComplex& o) const;

 private:
  friend class ChainMap;
  friend class Homotopy;

  std::shared_ptr<const ArcAlgebra> algebra_;
  ModuleSide side_ = ModuleSide::kRight;
  std::vector<ProjGenerator> gens_;
  std::map<std::pair<std::size_t, std::size_t>, Int> c_;
  std::map<std::tuple<std::size_t, std::size_t, std::size_t>, Int> ct_;
};

// First nonzero coefficient of a failed identity, located at the pair of
// module basis elements (source generator i with algebra factor h, target
// generator k with algebra factor h2).
struct CoeffWitness {
  std::size_t i = 0;
  std::size_t h = 0;
  std::size_t k = 0;
  std::size_t h2 = 0;
  Int value;
};

// Result of check_d_squared.  The check runs two independent formulations:
// the direct one expands d(d(x_i * h)) over the Z-basis; the grouped one
// evaluates the five coefficient-equation families that sort the same
// coefficients by the bigrading drop from x_i to x_k (0, -1, -2, -3, -4 in
// the intrinsic direction).  `formulations_agree` records that both produce
// identical nonzero coefficient sets.
struct DSquaredReport {
  bool passed = false;
  bool formulations_agree = false;
  std::array<bool, 5> family_ok{true, true, true, true, true};
  std::optional<CoeffWitness> witness;
  std::string detail;
};

DSquaredReport check_d_squared(const ProjComplex& m);

// Bigrading-preserving map of complexes on one side, with the same labeled
// shape as the differential: f(x_i) = sum f[i][j] x'_j + sum ft[i][j][g]
// x'_j * g.  A map with no labeled terms is "plain"; plain maps are closed
// under composition with anything, and a composition of two labeled maps is
// not representable here.
class ChainMap {
 public:
  ChainMap() = default;
  ChainMap(ProjComplex source, ProjComplex target);

  const ProjComplex& source() const { return source_; }
  const ProjComplex& target() const { return target_; }

  void add_f(std::size_t i, std::size_t j, const Int& coeff);
  void add_ft(std::size_t i, std::size_t j, const SignedDiagram& label,
              const Int& coeff);

  const std::map<std::pair<std::size_t, std::size_t>, Int>& f_entries() const {
    return f_;
  }
  const std::map<std::tuple<std::size_t, std::size_t, std::size_t>, Int>&
  ft_entries() const {
    return ft_;
  }
  bool is_plain() const { return ft_.empty(); }

  ModuleElement apply(const ModuleElement& e) const;

  bool operator==(const ChainMap& o) const;

 private:
  ProjComplex source_, target_;
  std::map<std::pair<std::size_t, std::size_t>, Int> f_;
  std::map<std::tuple<std::size_t, std::size_t, std::size_t>, Int> ft_;
};

// Degree (0,-1) map with plain coefficients only.
class Homotopy {
 public:
  Homotopy() = default;
  Homotopy(ProjComplex source, ProjComplex target);

  const ProjComplex& source() const { return source_; }
  const ProjComplex& target() const { return target_; }

  void add_psi(std::size_t i, std::size_t j, const Int& coeff);
  const std::map<std::pair<std::size_t, std::size_t>, Int>& psi_entries()
      const {
    return psi_;
  }

  ModuleElement apply(const ModuleElement& e) const;

 private:
  ProjComplex source_, target_;
  std::map<std::pair<std::size_t, std::size_t>, Int> psi_;
};

struct MapReport {
  bool passed = false;
  std::optional<CoeffWitness> witness;
  std::string detail;
};

// d_target(f(x)) = f(d_source(x)) on every module basis element.
MapReport check_chain_map(const ChainMap& f);

// f - g = d_target(psi(x)) + psi(d_source(x)) on every module basis element;
// f, g, psi must share source and target.
MapReport check_homotopy(const ChainMap& f, const ChainMap& g,
                         const Homotopy& psi);

ChainMap identity_map(const ProjComplex& m);

// outer after inner; at least one factor must be plain, otherwise the
// composite leaves the labeled shape and the call throws.
ChainMap compose(const ChainMap& outer, const ChainMap& inner);

// The underlying Z-complex: one generator per module basis element (i, b),
// named "<id>|<b>", at bigrading (2 * (q_i + deg basis(b)), h_i).
ZComplex underlying_z_complex(const ProjComplex& m);

// Tensor product over H^n of a right complex M and a left complex N on the
// same algebra: basis x_i * h * y_j with the idempotent of x_i matching the
// left idempotent of h and the idempotent of y_j matching the right one, in
// lexicographic (i, h, j) order, named "<M id>|<h>|<N id>".  The
// differential applies d_M with the sign (-1)^{hom deg y_j} and d_N without
// a sign.  negate_intrinsic flips the sign of every q2.
ZComplex tensor_over_Hn(const ProjComplex& m, const ProjComplex& n,
                        bool negate_intrinsic);

// Side-swapping relabel: same generators and bigradings, plain coefficients
// unchanged, each label replaced by its reflection.  An involution, and it
// conjugates the differential, so validity is preserved.
ProjComplex mirror_complex(const ProjComplex& m);

// Input to gaussian_eliminate.  `keep` designates the generators spanning
// the retained complement M1; the remaining generators span the subcomplex
// M2 to cancel.  Variant 1 takes M2 spanned by the remaining x_i
// themselves.  Variant 2 spans M2 by shifted generators
//   z_i = x_i + sum_{j in keep} tau[i][j] x_j
//             + sum_{j in keep, g} tau_tilde[i][j][g] x_j * g,
// which must be bigrading-homogeneous with the idempotent of x_i.
struct GaussianSplit {
  std::vector<std::size_t> keep;
  int variant = 1;
  std::map<std::pair<std::size_t, std::size_t>, Int> tau;
  std::map<std::tuple<std::size_t, std::size_t, std::size_t>, Int> tau_tilde;
};

// Outcome of one elimination.  The hypotheses verified before anything is
// built, numbered as reported in `violated_item`:
//   1  d^2 = 0 on M;
//   2  the designated decomposition is well-formed (variant 2: every z_i is
//      bigrading-homogeneous with the idempotent of x_i);
//   3  M2 is a subcomplex;
//   4  psi_prime is a degree (0,-1) plain idempotent-compatible map of M2
//      with  id_{M2} = d psi_prime + psi_prime d;
//   5  (variant 2) no labeled arrow from a kept generator lands on a
//      psi_prime source: ct[i][j][g] * psi_prime[j][k] = 0 termwise;
//   6  (variant 2) no labeled arrow lands on a shifted generator:
//      ct[i][j][g] * tau[j][k] = 0 and ct[i][j][g] * tau_tilde[j][k][g2] = 0;
//   7  (variant 2) psi_prime never reaches a shifted generator:
//      psi_prime[i][j] * tau[j][k] = 0 and psi_prime[i][j] *
//      tau_tilde[j][k][g] = 0.
// On success: f: M -> M1 and g: M1 -> M with f o g = id and
// g o f - id = d psi + psi d; in variant 1 f is plain, in variant 2 g is
// plain; psi is always plain.  All of that is re-checked before returning.
struct GaussianResult {
  bool ok = false;
  int violated_item = 0;
  std::string detail;
  ProjComplex m1;
  ChainMap f;
  ChainMap g;
  Homotopy psi;
};

GaussianResult gaussian_eliminate(
    const ProjComplex& m, const GaussianSplit& split,
    const std::map<std::pair<std::size_t, std::size_t>, Int>& psi_prime);

}  // namespace bkh
