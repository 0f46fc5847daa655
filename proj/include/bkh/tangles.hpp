#pragma once
// Oriented tangle words in a half-plane: cap/cup/crossing events acting on a
// running strand list, resolutions into a crossingless matching plus free
// circles, the complex of projective H^n-modules attached to a word, the
// ordinary Khovanov cube of a closed two-word diagram, and word-level
// Reidemeister rewrites.
//
// Conventions: a word's 2n boundary points sit on the gluing axis, numbered
// 1..2n.  Events are processed away from the axis; `cap i` joins the running
// strands at positions i, i+1, `cup i` inserts a new oppositely-oriented
// strand pair at positions i, i+1, and `x+ i` / `x- i` cross the strands at
// positions i, i+1 (`x+` puts the strand at position i on top).  With both
// strands oriented along the sweep, `x+` is a positive crossing; each
// crossing's sign is derived from the propagated orientations.  The
// 0-smoothing of `x+` is the parallel (pass-through) picture and its
// 1-smoothing is the turnback; `x-` smooths the other way around.

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "bkh/arcalg.hpp"
#include "bkh/hncomplex.hpp"
#include "bkh/planar.hpp"
#include "bkh/zlinalg.hpp"

namespace bkh {

enum class TangleSide { kLeft, kRight };

struct TangleEvent {
  enum class Kind { kCap, kCup, kCrossPos, kCrossNeg };
  Kind kind = Kind::kCap;
  int at = 1;  // 1-based strand position the event acts on

  bool operator==(const TangleEvent&) const = default;
};

// A validated tangle word.  Construction checks the strand bookkeeping
// (every event index in range at its time, the running count ending at 0)
// and propagates orientations (caps and cups join oppositely oriented
// strands; the two boundary marks of each strand are one `in`, one `out`);
// a violation throws std::invalid_argument naming the offending event.
class TangleWord {
 public:
  TangleWord() = default;
  // orient_in[p-1] is true when the strand at boundary point p is directed
  // into the half-plane.  points must be even and positive.
  TangleWord(TangleSide side, int points, std::vector<bool> orient_in,
             std::vector<TangleEvent> events);

  TangleSide side() const { return side_; }
  int points() const { return points_; }
  int n() const { return points_ / 2; }
  bool orient_in(int p) const { return orient_in_[p - 1]; }
  const std::vector<TangleEvent>& events() const { return events_; }

  int crossing_count() const { return static_cast<int>(crossing_events_.size()); }
  // Index of the k-th crossing (0-based, in event order) in events().
  std::size_t crossing_event(int k) const { return crossing_events_[k]; }
  int crossing_sign(int k) const { return crossing_signs_[k]; }
  int n_plus() const { return n_plus_; }
  int n_minus() const { return n_minus_; }

  // Running strand count before event t (t = events().size() gives 0).
  int strands_before(std::size_t t) const { return strands_before_[t]; }

  std::string to_text() const;  // the parse_tangle file format

  bool operator==(const TangleWord&) const = default;

 private:
  TangleSide side_ = TangleSide::kRight;
  int points_ = 0;
  std::vector<bool> orient_in_;
  std::vector<TangleEvent> events_;
  std::vector<std::size_t> crossing_events_;
  std::vector<int> crossing_signs_;
  std::vector<int> strands_before_;
  int n_plus_ = 0;
  int n_minus_ = 0;
};

// One choice of smoothing per crossing: bits[k] in {0,1} for the k-th
// crossing in event order.
class Resolution {
 public:
  Resolution() = default;
  explicit Resolution(std::vector<int> bits);

  std::size_t crossings() const { return bits_.size(); }
  int bit(std::size_t k) const { return bits_[k]; }
  const std::vector<int>& bits() const { return bits_; }
  int total() const;  // number of 1-smoothings

  bool operator==(const Resolution&) const = default;

 private:
  std::vector<int> bits_;
};

// A fully smoothed word: the boundary matching plus the count of free
// circles.  Free circles carry stable ids 0..free_circles-1, ordered by the
// first strand segment created on them during the event sweep.
struct ResolvedTangle {
  Matching matching;
  int free_circles = 0;

  bool operator==(const ResolvedTangle&) const = default;
};

// Parses the one-event-per-line format:
//   tangle right 4
//   orient 1 in
//   ...
//   x+ 2
//   cap 1
// Blank lines and `#` comments are skipped.  Every boundary point needs
// exactly one orient line.  Throws std::invalid_argument on malformed input.
TangleWord parse_tangle(const std::string& text);

// A link file is a `tangle left ...` block followed by a `tangle right ...`
// block.
std::pair<TangleWord, TangleWord> parse_link(const std::string& text);

ResolvedTangle resolve(const TangleWord& t, const Resolution& rho);

// The bigraded complex of projective H^n-modules attached to a word.  A left
// word yields a right module and a right word a left module (the module side
// faces the gluing axis).  Generators are pairs (resolution, one sign per
// free circle), named "r<bits>" or "r<bits>:<signs>", in homological degree
// r - n_minus and intrinsic degree (#minus - #plus) - r + 2 n_minus - n_plus.
// The intrinsic grading is normalized per word to be integral; gluing two
// words recovers the absolute grading of the closed diagram after
// subtracting n (see closed_complex_via_tensor).  Differential coefficients
// are (-1)^{#_1} where #_1 counts 1-smoothed crossings before the changed
// one; a surgery between two boundary arcs emits a surgery-labeled arrow and
// a surgery joining a minus circle into an arc (or splitting a plus circle
// off one) emits a dotted-circle-labeled arrow.
// If algebra is null a fresh ArcAlgebra(n) is created; otherwise its strand
// count must match the word's.
ProjComplex khovanov_complex(const TangleWord& t,
                             std::shared_ptr<const ArcAlgebra> algebra = nullptr);

// The ordinary Khovanov cube over Z of the closed diagram left+right:
// generators are (resolution, one sign per circle), graded by
// h = r - n_minus and q = (#plus - #minus) + r + n_plus - 2 n_minus, with
// merges and splits following the same two-line rules as the H^n saddle
// maps.  Crossings are ordered right word first (its own event order), then
// left word; crossing_order, when given, is a permutation of 0..k-1 listing
// the crossings (in that default indexing) in the order used for the
// (-1)^{#_1} signs.  Generator identity does not depend on crossing_order.
// Throws on mismatched boundary data (point counts or orientation marks).
ZComplex direct_CKh(const TangleWord& left, const TangleWord& right,
                    const std::vector<std::size_t>* crossing_order = nullptr);

// The closed-diagram complex computed from the two word complexes: the
// tensor of khovanov_complex(left) and khovanov_complex(right) over H^n with
// negated intrinsic grading, renormalized so it is generator-by-generator
// equal to direct_CKh(left, right): every q2 is shifted by +2n (undoing the
// per-word integral normalization), and the differential is conjugated by
// (-1)^{n1minus * h(x)} (n1minus = the right word's negative crossing count,
// h(x) = the left-word generator's homological degree), which realigns the
// crossing-order bookkeeping of the glued cube.  The conjugation is the
// identity whenever the right word has no negative crossings.
ZComplex closed_complex_via_tensor(const TangleWord& left,
                                   const TangleWord& right);

// The canonical generator identification: bijection[i] is the index in
// closed_complex_via_tensor(left, right) (equivalently in the tensor
// complex, which enumerates generators identically) of the cube generator i
// of direct_CKh(left, right) carrying the same resolution and circle signs.
std::vector<std::size_t> pairing_identification(const TangleWord& left,
                                                const TangleWord& right);

enum class ReidemeisterMove {
  kR1Plus,      // insert a positive kink at site (event, at)
  kR1Minus,     // insert a negative kink
  kR1PlusInv,   // delete the three-event pattern a positive kink inserts
  kR1MinusInv,  // delete a negative kink pattern
  kR2,          // insert a cancelling crossing pair at (event, at)
  kR2Inv,       // delete an adjacent cancelling crossing pair at event
  kR3,          // slide: rewrite (k at, k at', k at) -> (k at', k at, k at')
};

struct MoveSite {
  std::size_t event = 0;  // insertion point / start of the pattern
  int at = 1;             // strand position (insertions only)
};

// Rewrites the word without changing the underlying tangle.  Throws
// std::invalid_argument when the move does not apply at the site.
TangleWord reidemeister(const TangleWord& t, ReidemeisterMove move,
                        const MoveSite& site);

// Deterministic pseudo-random valid word on 2n points with exactly the
// requested number of crossings; used by the randomized verification suites.
TangleWord random_tangle_word(int n, TangleSide side, int crossings,
                              std::uint64_t seed);

}  // namespace bkh
