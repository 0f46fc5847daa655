#pragma once
// Endomorphism algebras built on the arc algebra: the subalgebra of
// basis-respecting endomorphisms generated by right multiplication, its
// quadratic-linear presentation, the classification of its quadratic
// monomials, the quadratic dual with differential, mirroring, the product of
// the algebra with its mirrored dual, the quotient presentation with the
// extra tetrahedron relations, and the rank-one DD operations pairing an
// algebra with its dual.

#include "bkh/arcalg.hpp"
#include "bkh/linquad.hpp"
#include "bkh/planar.hpp"

#include <array>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace bkh {

// ---------------------------------------------------------------------------
// The arc algebra as a presented algebra
// ---------------------------------------------------------------------------

// The arc algebra itself, presented over one idempotent per crossingless
// matching with one generator per surgery move (degree 1) and one per
// circle decoration (degree 2), and relations spanning the full kernel of
// evaluation in degrees one and two.  Generator i corresponds to
// states->mult_generators()[i].
struct ArcPresentation {
  std::shared_ptr<const ArcAlgebra> states;
  PresentedAlgebra presentation;
};

ArcPresentation arc_presentation(std::shared_ptr<const ArcAlgebra> states);

// Exact rank and evaluation oracle for the arc algebra: piece ranks count
// basis diagrams by (left matching, right matching, doubled degree), and
// monomials evaluate through the multiplication table.
TargetOracle arc_oracle(const ArcPresentation& ap);

// Every piece key of the arc algebra that contains at least one generator
// word (plus the idempotent pieces), for use as a verification audit list.
std::vector<PieceKey> arc_audit_pieces(const ArcPresentation& ap);

// ---------------------------------------------------------------------------
// The right-multiplication endomorphism algebra B_R
// ---------------------------------------------------------------------------

// One idempotent per additive basis element of the arc algebra: the
// endomorphism fixing that basis element and killing the others.
struct BetaIdempotent {
  std::size_t basis_index = 0;  // index into ArcAlgebra::basis
  SignedDiagram h;
  std::string name;  // "e<k>"
};

enum class RobertsKind { BGamma, BC, DualBGamma, DualBC };

// A multiplicative generator: the endomorphism sending basis state h1 to
// state h2 (dual kinds name the dual-algebra generator with the same state
// pair).  BGamma: h2 is a term of h1 times a surgery generator; the bridges
// on h1's right matching realizing the move are recorded.  BC: h2 is h1 with
// one circle decoration lowered; the circle index (in h1's diagram) is
// recorded.  Bidegrees (doubled intrinsic, homological): BGamma (-1,0),
// BC (-2,0), DualBGamma (1,1), DualBC (2,1).
struct RobertsGenerator {
  RobertsKind kind = RobertsKind::BGamma;
  std::size_t h1 = 0;
  std::size_t h2 = 0;
  std::string name;  // g<h1>_<h2> / c<h1>_<h2>; duals carry a trailing '*'
  Bidegree bidegree;
  std::vector<Bridge> bridges;         // BGamma only
  std::optional<int> circle;           // BC only: circle index in h1's diagram
};

// Families of quadratic(-linear) relations, tagged by the degree and shape
// of the graded piece they live in.  Doubled intrinsic degrees: BridgeBridge
// -2, BridgeCircle -3, CircleCircle -4, BridgeCollapse -2 (the linearly tied
// family equating a two-bridge word with a circle generator).
enum class RelationFamily {
  BridgeBridge,
  BridgeCircle,
  CircleCircle,
  BridgeCollapse,
};

struct TaggedRelation {
  PresElement element;
  RelationFamily family;
  PieceKey piece;
};

// B_R: generators, relations, and the presented algebra, together with the
// state table the construction ran on.
struct RobertsAlgebra {
  int n = 0;
  std::shared_ptr<const ArcAlgebra> states;
  std::vector<BetaIdempotent> idempotents;   // index = basis index
  std::vector<RobertsGenerator> generators;  // presentation order
  std::vector<TaggedRelation> relations;
  PresentedAlgebra presentation;
  // (h1,h2) -> generator index, per kind.
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> bridge_gen_at;
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> circle_gen_at;
};

// Enumerates the generators (every state pair (h1,h2) with h2 a nonzero term
// of h1 times a multiplicative generator of the arc algebra), computes the
// relation families as the exact kernel of evaluation on words of length one
// and two, and assembles the presentation.
RobertsAlgebra build_BR(int n);

// Rank/evaluation oracle realizing B_R inside the endomorphism ring of the
// arc algebra: every graded piece has rank one (reachable state pairs at the
// degree difference) or zero, and every composable word evaluates to the
// single basis endomorphism with coefficient one.
TargetOracle endomorphism_oracle(const RobertsAlgebra& R);

// Audit list: every piece with at least one word, plus idempotent pieces.
// Pieces are restricted to doubled degree >= min_q2 (use a small bound for
// large n; -4 covers all words of length <= 4).
std::vector<PieceKey> roberts_audit_pieces(const RobertsAlgebra& R,
                                           int min_q2);

// ---------------------------------------------------------------------------
// Classification of quadratic monomials
// ---------------------------------------------------------------------------

// Components of the graph on quadratic monomials (edges join monomials whose
// difference lies in the degree-two part of the relation ideal):
//  - IsolatedPoint: a monomial individually equal (mod relations) to a
//    circle generator; contributes nothing to the dual relations.
//  - Segment / Triangle / Tetrahedron: 2/3/4 monomials of one graded piece
//    pairwise identified; the dual relation is the sum of their stars.
// Monomials appearing in no relation are reported separately; their dual
// star vanishes in the dual algebra.
enum class ComponentShape { IsolatedPoint, Segment, Triangle, Tetrahedron };

struct GraphComponent {
  PieceKey piece;
  ComponentShape shape;
  std::vector<Monomial> monomials;
  // Tetrahedron only: the two monomial pairs sharing the intermediate
  // matching (indices into `monomials`).
  std::array<std::array<std::size_t, 2>, 2> halves{};
};

struct MonomialGraph {
  std::vector<GraphComponent> components;
  std::vector<std::pair<PieceKey, Monomial>> lone_monomials;
  std::size_t count(ComponentShape s) const;
};

// Classifies every quadratic monomial of R's presentation.  Throws (with a
// witness) if any graded piece fails to match one of the four shapes.
MonomialGraph monomial_graph_G(const RobertsAlgebra& R);

// ---------------------------------------------------------------------------
// Quadratic dual
// ---------------------------------------------------------------------------

// The quadratic dual of B_R with its induced differential.  Dual generator i
// corresponds to primal generator i (name + "*", bidegree negated, +1
// homological).  The construction cross-checks the generic annihilator
// computation against the component shapes of the monomial graph and throws
// on any mismatch.
struct DualAlgebra {
  PresentedAlgebra presentation;  // differential installed
  QuadraticData quadratic;        // quadratic/linear split of the primal
  DualReport report;              // annihilator certificates
};

DualAlgebra dual_BR(const RobertsAlgebra& R, const MonomialGraph& G);

// ---------------------------------------------------------------------------
// Mirroring
// ---------------------------------------------------------------------------

// The involution on basis states swapping the two boundary matchings
// (circle decorations carry over).
std::vector<std::size_t> mirror_state_permutation(const ArcAlgebra& states);

// Mirrors a presentation whose idempotents are the basis states: idempotents
// are permuted by the state involution and generator names g<k1>_<k2> /
// c<k1>_<k2> (optionally suffixed) are rewritten through it.  Involutive.
PresentedAlgebra mirror_roberts(const PresentedAlgebra& P,
                                const std::vector<std::size_t>& perm);

// ---------------------------------------------------------------------------
// Product algebra
// ---------------------------------------------------------------------------

// Families of mixing relations between the two halves of the product, tagged
// by the shape of the state change (which side's matching moves):
//  - BridgeBridge: both matchings move; all cross-order differences.
//  - CircleBridge: decoration move against a left-matching surgery.
//  - BridgeCircleDisjoint: right-matching surgery against a decoration on a
//    circle untouched by the surgery (one-to-one commutation).
//  - CircleCircle: two decoration moves, paired by circle.
//  - BridgeCircleSurgery: surgery against a decoration on a circle the
//    surgery changes (three-term join/split relations).
enum class ExtraFamily {
  BridgeBridge,
  CircleBridge,
  BridgeCircleDisjoint,
  CircleCircle,
  BridgeCircleSurgery,
};

struct TaggedExtraRelation {
  PresElement element;
  ExtraFamily family;
  PieceKey piece;
};

enum class ProductMode { Full, GammaQuotient };

// The product of B_R with the mirror of its quadratic dual: generators are
// the mirrored dual generators (listed first, so normal-form words carry
// them as prefixes) followed by the B_R generators; relations are both
// halves' relations plus the mixing families; the differential comes from
// the dual side and vanishes on the B_R side.  GammaQuotient mode adds, per
// tetrahedron of the monomial graph, the four cross-half sums of mirrored
// dual monomials.
struct ProductAlgebraData {
  int n = 0;
  ProductMode mode = ProductMode::Full;
  RobertsAlgebra right;  // the degree-0 half
  DualAlgebra dual;      // dual of `right` (pre-mirroring)
  MonomialGraph graph;
  std::vector<std::size_t> mirror_perm;
  PresentedAlgebra presentation;
  // Product generator index -> (true = mirrored dual letter, source index in
  // dual/right generator tables).
  std::vector<std::pair<bool, std::size_t>> origin;
  std::vector<TaggedExtraRelation> extra;     // mixing relations
  std::vector<PresElement> quotient_extras;   // GammaQuotient tetrahedra
};

// Builds the product.  For n <= 3 the differential is verified to square to
// zero and annihilate every relation in the quotient (throws otherwise); for
// larger n the same check is run on the quotient extras only.
ProductAlgebraData product_algebra(int n, ProductMode mode);

// ---------------------------------------------------------------------------
// Rank-one DD operations
// ---------------------------------------------------------------------------

enum class DDKind { K_B_Bdual, K_Bdual_B, K_product };

struct DDTerm {
  Int coeff;
  Monomial left;   // monomial in left_algebra
  Monomial right;  // monomial in right_algebra (reversal handled by checker)
};

// delta(e) = sum over generators x with left idempotent e of x tensor
// (partner x)^op.  left_algebra and right_algebra are the presentations the
// two tensor factors reduce in; delta is stored per idempotent index.
struct DDOperation {
  DDKind kind = DDKind::K_B_Bdual;
  PresentedAlgebra left_algebra;
  PresentedAlgebra right_algebra;
  std::vector<std::vector<DDTerm>> delta;
  std::string to_text() const;  // "delta <idem> -> ..." lines
};

// The two operations pairing B_R with its dual: delta over (B_R, dual) and
// the reversed delta over (dual, B_R).
DDOperation dd_delta(const RobertsAlgebra& R, const DualAlgebra& D,
                     DDKind kind);

// The combined operation over the product algebra and its mirror: each
// product generator pairs with the opposite-half generator of the same state
// indices.  In GammaQuotient mode both reduction contexts are the quotient
// presentations.
DDOperation dd_delta(const ProductAlgebraData& P);

// Generic pairing for a presentation and its quadratic dual (used for the
// arc algebra itself): delta(e) = sum x tensor (x*)^op when dual_on_right,
// else sum x* tensor x^op.
DDOperation dd_delta_generic(const PresentedAlgebra& P,
                             const PresentedAlgebra& dual, bool dual_on_right);

struct DDCheckReport {
  bool ok = true;
  long long terms_checked = 0;
  std::vector<std::string> failures;
};

// Expands the three structure terms (differential on each factor with the
// homological sign twist on its partner, plus the composite term with the
// sign (-1)^{hom(second) * hom(outer partner)}), reduces each tensor factor
// in its presentation, and checks exact cancellation over the integers.
// Also audits that every delta term has total bidegree (0, +1) and both
// outer idempotents equal to the source idempotent.
DDCheckReport check_dd_relations(const DDOperation& op);

}  // namespace bkh
