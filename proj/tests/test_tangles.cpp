// Tests for tangle words: event bookkeeping and orientation propagation,
// resolutions, the projective-module complex of a word, the closed Khovanov
// cube and its crossing-reorder isomorphism, the glued-tensor comparison
// under the canonical generator identification, word-level Reidemeister
// rewrites with closure-homology invariance, and frozen homology tables for
// the small-link corpus.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "bkh/hncomplex.hpp"
#include "bkh/tangles.hpp"
#include "corpus.hpp"

using namespace bkh;

namespace {

using K = TangleEvent::Kind;

TangleEvent ev(K k, int at) { return TangleEvent{k, at}; }

TangleWord word(TangleSide side, std::vector<bool> marks,
                std::vector<TangleEvent> events) {
  const int points = static_cast<int>(marks.size());
  return TangleWord(side, points, std::move(marks), std::move(events));
}

// A strand that doubles back across itself: an x+ event makes a negative
// kink and an x- event a positive one, for either choice of marks.
TangleWord kink(K cross) {
  return word(TangleSide::kRight, {true, false}, {ev(cross, 1), ev(K::kCap, 1)});
}

std::size_t index_of(const ProjComplex& m, const std::string& id) {
  for (std::size_t i = 0; i < m.size(); ++i)
    if (m.generator(i).id == id) return i;
  const std::string msg = "no generator named " + id;
  REQUIRE_MESSAGE(false, msg);
  return 0;
}

// Smoothing bits of a cube generator, recovered from its name "r<bits>...".
unsigned bits_of(const std::string& name, int k) {
  unsigned rho = 0;
  for (int c = 0; c < k; ++c)
    if (name.at(1 + static_cast<std::size_t>(c)) == '1') rho |= 1u << c;
  return rho;
}

BigradedHomology unknot_homology() {
  return BigradedHomology({{0, -2, 1, {}}, {0, 2, 1, {}}});
}

}  // namespace

TEST_CASE("tangle words: bookkeeping, crossing signs, serialization") {
  const auto [hl, hr] = corpus::load_link("hopf.link");
  CHECK(hl.side() == TangleSide::kLeft);
  CHECK(hr.side() == TangleSide::kRight);
  CHECK(hr.points() == 4);
  CHECK(hr.n() == 2);
  CHECK(hr.crossing_count() == 1);
  CHECK(hr.crossing_event(0) == 0);
  CHECK(hr.crossing_sign(0) == 1);
  CHECK(hr.n_plus() == 1);
  CHECK(hr.n_minus() == 0);
  CHECK(hl.n_plus() == 1);
  CHECK(hr.strands_before(0) == 4);
  CHECK(hr.strands_before(1) == 4);
  CHECK(hr.strands_before(2) == 2);
  CHECK(hr.strands_before(3) == 0);
  CHECK(hr.orient_in(1));
  CHECK_FALSE(hr.orient_in(2));

  const TangleWord neg = kink(K::kCrossPos);
  CHECK(neg.n_minus() == 1);
  CHECK(neg.n_plus() == 0);
  CHECK(neg.crossing_sign(0) == -1);
  const TangleWord pos = kink(K::kCrossNeg);
  CHECK(pos.n_plus() == 1);
  CHECK(pos.n_minus() == 0);

  const auto [tl, tr] = corpus::load_link("trefoil.link");
  CHECK(tl.crossing_count() == 2);
  CHECK(tl.n_plus() == 2);
  CHECK(tr.n_plus() == 1);

  for (const std::string& name : corpus::link_names()) {
    const auto [left, right] = corpus::load_link(name);
    CHECK(parse_tangle(left.to_text()) == left);
    CHECK(parse_tangle(right.to_text()) == right);
  }
  CHECK(parse_tangle(neg.to_text()) == neg);
  CHECK(neg == kink(K::kCrossPos));
  CHECK_FALSE(neg == pos);
}

TEST_CASE("tangle words: construction rejects bad bookkeeping") {
  // Cap beyond the strand list.
  CHECK_THROWS_AS(word(TangleSide::kRight, {true, false}, {ev(K::kCap, 2)}),
                  std::invalid_argument);
  // Strands left uncapped.
  CHECK_THROWS_AS(word(TangleSide::kRight, {true, false, true, false},
                       {ev(K::kCap, 1)}),
                  std::invalid_argument);
  // Crossing after the strands are gone.
  CHECK_THROWS_AS(word(TangleSide::kRight, {true, false},
                       {ev(K::kCap, 1), ev(K::kCrossPos, 1)}),
                  std::invalid_argument);
  // Cup inserted past the end of the list.
  CHECK_THROWS_AS(
      word(TangleSide::kRight, {true, false},
           {ev(K::kCup, 4), ev(K::kCap, 1), ev(K::kCap, 1)}),
      std::invalid_argument);
  // Position indices are 1-based.
  CHECK_THROWS_AS(word(TangleSide::kRight, {true, false}, {ev(K::kCap, 0)}),
                  std::invalid_argument);
  // Odd and non-positive point counts.
  CHECK_THROWS_AS(TangleWord(TangleSide::kRight, 3, {true, false, true}, {}),
                  std::invalid_argument);
  CHECK_THROWS_AS(TangleWord(TangleSide::kRight, 0, {}, {}),
                  std::invalid_argument);
  // One mark per boundary point.
  CHECK_THROWS_AS(TangleWord(TangleSide::kRight, 2, {true},
                             {ev(K::kCap, 1)}),
                  std::invalid_argument);
  // A cap joins two ends of one strand, so its marks must oppose.
  CHECK_THROWS_AS(word(TangleSide::kRight, {true, true}, {ev(K::kCap, 1)}),
                  std::invalid_argument);
  // Same conflict routed through a crossing: the swap connects 1 to 3 and
  // 2 to 4, so these marks pair equal directions.
  CHECK_THROWS_AS(word(TangleSide::kRight, {true, false, true, false},
                       {ev(K::kCrossPos, 2), ev(K::kCap, 1), ev(K::kCap, 1)}),
                  std::invalid_argument);
}

TEST_CASE("tangle words: parse errors") {
  CHECK_THROWS_AS(parse_tangle(""), std::invalid_argument);
  CHECK_THROWS_AS(parse_tangle("tangle middle 4\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_tangle("tangle right 3\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_tangle("cap 1\ntangle right 2\n"),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      parse_tangle("tangle right 2\norient 1 in\norient 2 out\nzap 1\n"),
      std::invalid_argument);
  CHECK_THROWS_AS(
      parse_tangle("tangle right 2\norient 1 in\norient 2 out\ncap\n"),
      std::invalid_argument);
  // Missing and duplicate orient marks.
  CHECK_THROWS_AS(parse_tangle("tangle right 2\norient 1 in\ncap 1\n"),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_tangle("tangle right 2\norient 1 in\norient 1 out\n"
                               "orient 2 out\ncap 1\n"),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_tangle("tangle right 2\norient 1 in\norient 3 out\n"),
                  std::invalid_argument);

  // Link files: need a left block then a right block.
  CHECK_THROWS_AS(parse_link("tangle right 2\norient 1 in\norient 2 out\ncap 1\n"),
                  std::invalid_argument);
  const std::string right_only =
      "tangle right 2\norient 1 in\norient 2 out\ncap 1\n";
  CHECK_THROWS_AS(parse_link(right_only + right_only), std::invalid_argument);

  // Comments and blank lines are fine.
  const TangleWord w = parse_tangle(
      "# a lone cap\n\ntangle right 2\norient 1 in\norient 2 out\ncap 1 # join\n");
  CHECK(w.events().size() == 1);
}

TEST_CASE("resolve: matchings and free circles") {
  const TangleWord cap1 =
      word(TangleSide::kRight, {true, false}, {ev(K::kCap, 1)});
  const ResolvedTangle r0 = resolve(cap1, Resolution(std::vector<int>{}));
  CHECK(r0.matching == Matching(1, {{1, 2}}));
  CHECK(r0.free_circles == 0);

  const TangleWord neg = kink(K::kCrossPos);
  CHECK(resolve(neg, Resolution({0})) ==
        ResolvedTangle{Matching(1, {{1, 2}}), 0});
  CHECK(resolve(neg, Resolution({1})) ==
        ResolvedTangle{Matching(1, {{1, 2}}), 1});

  const auto [hl, hr] = corpus::load_link("hopf.link");
  CHECK(resolve(hr, Resolution({0})).matching == Matching(2, {{1, 2}, {3, 4}}));
  CHECK(resolve(hr, Resolution({1})).matching == Matching(2, {{1, 4}, {2, 3}}));
  CHECK(resolve(hr, Resolution({0})).free_circles == 0);
  CHECK(resolve(hr, Resolution({1})).free_circles == 0);

  const auto [tl, tr] = corpus::load_link("trefoil.link");
  CHECK(resolve(tl, Resolution({0, 0})).matching ==
        Matching(2, {{1, 2}, {3, 4}}));
  CHECK(resolve(tl, Resolution({1, 0})).matching ==
        Matching(2, {{1, 4}, {2, 3}}));
  CHECK(resolve(tl, Resolution({0, 1})).matching ==
        Matching(2, {{1, 4}, {2, 3}}));
  const ResolvedTangle both = resolve(tl, Resolution({1, 1}));
  CHECK(both.matching == Matching(2, {{1, 4}, {2, 3}}));
  CHECK(both.free_circles == 1);

  CHECK_THROWS_AS(resolve(neg, Resolution(std::vector<int>{})), std::invalid_argument);
  CHECK_THROWS_AS(Resolution({2}), std::invalid_argument);
}

TEST_CASE("projective complex: crossingless words are concentrated") {
  const TangleWord capr =
      word(TangleSide::kRight, {true, false}, {ev(K::kCap, 1)});
  const ProjComplex m = khovanov_complex(capr);
  CHECK(m.side() == ModuleSide::kLeft);
  CHECK(m.size() == 1);
  CHECK(m.generator(0).id == "r");
  CHECK(m.generator(0).q == 0);
  CHECK(m.generator(0).h == 0);
  CHECK(m.c_entries().empty());
  CHECK(m.ct_entries().empty());

  const auto [u4l, u4r] = corpus::load_link("unknot4.link");
  const ProjComplex ml = khovanov_complex(u4l);
  CHECK(ml.side() == ModuleSide::kRight);
  CHECK(ml.size() == 1);
  CHECK(ml.algebra().matchings()[ml.generator(0).idem] ==
        Matching(2, {{1, 4}, {2, 3}}));
}

TEST_CASE("projective complex: kink oracles") {
  // Negative kink: the 0-smoothing generator maps to the minus-signed
  // 1-smoothing circle plainly and to the plus-signed one with a dotted
  // label on the arc.
  const ProjComplex m = khovanov_complex(kink(K::kCrossPos));
  REQUIRE(m.size() == 3);
  const std::size_t x0 = index_of(m, "r0");
  const std::size_t xp = index_of(m, "r1:+");
  const std::size_t xm = index_of(m, "r1:-");
  CHECK(m.generator(x0).q == 2);
  CHECK(m.generator(x0).h == -1);
  CHECK(m.generator(xp).q == 0);
  CHECK(m.generator(xp).h == 0);
  CHECK(m.generator(xm).q == 2);
  CHECK(m.generator(xm).h == 0);

  REQUIRE(m.c_entries().size() == 1);
  CHECK(m.c(x0, xm) == 1);
  REQUIRE(m.ct_entries().size() == 1);
  const SignedDiagram dotted(Matching(1, {{1, 2}}), Matching(1, {{1, 2}}), {-1});
  CHECK(m.ct(x0, xp, m.algebra().basis_index(dotted)) == 1);
  CHECK(check_d_squared(m).passed);

  // Positive kink: an x- crossing smooths the other way around, so the free
  // circle sits at the 0-resolution and the arrows run out of it.
  const ProjComplex p = khovanov_complex(kink(K::kCrossNeg));
  REQUIRE(p.size() == 3);
  CHECK(p.generator(index_of(p, "r0:+")).q == -2);
  CHECK(p.generator(index_of(p, "r0:+")).h == 0);
  CHECK(p.generator(index_of(p, "r0:-")).q == 0);
  CHECK(p.generator(index_of(p, "r0:-")).h == 0);
  CHECK(p.generator(index_of(p, "r1")).q == -2);
  CHECK(p.generator(index_of(p, "r1")).h == 1);
  CHECK(p.c(index_of(p, "r0:+"), index_of(p, "r1")) == 1);
  CHECK(p.ct(index_of(p, "r0:-"), index_of(p, "r1"),
             p.algebra().basis_index(dotted)) == 1);
  CHECK(check_d_squared(p).passed);
}

TEST_CASE("projective complex: one-crossing halves carry a surgery arrow") {
  const auto [hl, hr] = corpus::load_link("hopf.link");

  // Right word, so a left module: the surgery label reflects the source
  // matching on its left side.
  const ProjComplex n = khovanov_complex(hr);
  REQUIRE(n.size() == 2);
  const std::size_t s = index_of(n, "r0");
  const std::size_t d = index_of(n, "r1");
  CHECK(n.generator(s).q == -1);
  CHECK(n.generator(s).h == 0);
  CHECK(n.generator(d).q == -2);
  CHECK(n.generator(d).h == 1);
  CHECK(n.c_entries().empty());
  REQUIRE(n.ct_entries().size() == 1);
  const SignedDiagram hgam(Matching(2, {{1, 2}, {3, 4}}),
                           Matching(2, {{1, 4}, {2, 3}}), {1});
  CHECK(n.ct(s, d, n.algebra().basis_index(hgam)) == 1);
  CHECK(check_d_squared(n).passed);

  // Left word, so a right module: the label reflects the target matching.
  const ProjComplex m = khovanov_complex(hl);
  REQUIRE(m.size() == 2);
  const SignedDiagram hgam2(Matching(2, {{1, 4}, {2, 3}}),
                            Matching(2, {{1, 2}, {3, 4}}), {1});
  CHECK(m.ct(index_of(m, "r0"), index_of(m, "r1"),
             m.algebra().basis_index(hgam2)) == 1);
  CHECK(check_d_squared(m).passed);
}

TEST_CASE("projective complex: d squared vanishes across the corpus") {
  for (const std::string& name : corpus::link_names()) {
    CAPTURE(name);
    const auto [left, right] = corpus::load_link(name);
    const auto alg = std::make_shared<const ArcAlgebra>(left.n());
    const ProjComplex m = khovanov_complex(left, alg);
    const ProjComplex n = khovanov_complex(right, alg);
    const DSquaredReport rm = check_d_squared(m);
    const DSquaredReport rn = check_d_squared(n);
    CHECK_MESSAGE(rm.passed, rm.detail);
    CHECK_MESSAGE(rn.passed, rn.detail);
    CHECK(rm.formulations_agree);
    CHECK(rn.formulations_agree);
  }
}

TEST_CASE("closed cube: frozen homology of the corpus links") {
  const auto kh = [](const char* name) {
    const auto [left, right] = corpus::load_link(name);
    return homology(direct_CKh(left, right));
  };

  CHECK(kh("unknot.link") == unknot_homology());
  CHECK(kh("unknot4.link") == unknot_homology());
  CHECK(kh("mixed.link") == unknot_homology());

  CHECK(kh("hopf.link") == BigradedHomology({{0, 0, 1, {}},
                                             {0, 4, 1, {}},
                                             {2, 8, 1, {}},
                                             {2, 12, 1, {}}}));
  CHECK(kh("hopfneg.link") == BigradedHomology({{-2, -12, 1, {}},
                                                {-2, -8, 1, {}},
                                                {0, -4, 1, {}},
                                                {0, 0, 1, {}}}));

  const BigradedHomology trefoil = kh("trefoil.link");
  CHECK(trefoil == BigradedHomology({{0, 2, 1, {}},
                                     {0, 6, 1, {}},
                                     {2, 10, 1, {}},
                                     {3, 14, 0, {2}},
                                     {3, 18, 1, {}}}));
  // Exactly one bidegree carries torsion, and it is a single Z/2.
  int torsion_spots = 0;
  for (const HomologyGroup& g : trefoil.groups())
    if (!g.torsion.empty()) ++torsion_spots;
  CHECK(torsion_spots == 1);
}

TEST_CASE("closed cube: generator count and validity") {
  const auto [hl, hr] = corpus::load_link("hopf.link");
  const ZComplex cube = direct_CKh(hl, hr);
  std::map<long long, int> per_h;
  for (std::size_t i = 0; i < cube.size(); ++i) ++per_h[cube.gen(i).h];
  CHECK(per_h == std::map<long long, int>{{0, 4}, {1, 4}, {2, 4}});
  std::string why;
  CHECK_MESSAGE(cube.is_valid(&why), why);

  // Boundary data must oppose.
  CHECK_THROWS_AS(direct_CKh(hl, corpus::load_link("unknot.link").second),
                  std::invalid_argument);
  const auto [tl, tr] = corpus::load_link("trefoil.link");
  CHECK_THROWS_AS(direct_CKh(hl, tr), std::invalid_argument);
}

TEST_CASE("closed cube: crossing reorder changes signs by the two-one rule") {
  const auto [tl, tr] = corpus::load_link("trefoil.link");
  const ZComplex base = direct_CKh(tl, tr);
  const int k = tl.crossing_count() + tr.crossing_count();
  REQUIRE(k == 3);

  const std::vector<std::vector<std::size_t>> orders = {
      {1, 0, 2}, {0, 2, 1}, {2, 1, 0}, {1, 2, 0}};
  for (const auto& order : orders) {
    CAPTURE(order);
    const ZComplex perm = direct_CKh(tl, tr, &order);
    REQUIRE(perm.size() == base.size());
    std::vector<int> pos(static_cast<std::size_t>(k));
    for (std::size_t m = 0; m < order.size(); ++m) pos[order[m]] = static_cast<int>(m);

    // The identity on generators is an isomorphism after twisting each
    // generator by (-1)^{# inverted crossing pairs both resolved 1}.
    std::vector<int> twist(base.size());
    for (std::size_t i = 0; i < base.size(); ++i) {
      CHECK(base.gen(i).name == perm.gen(i).name);
      CHECK(base.gen(i).h == perm.gen(i).h);
      CHECK(base.gen(i).q2 == perm.gen(i).q2);
      const unsigned rho = bits_of(base.gen(i).name, k);
      int inv = 0;
      for (int a = 0; a < k; ++a)
        for (int b = a + 1; b < k; ++b)
          if (pos[a] > pos[b] && ((rho >> a) & 1u) && ((rho >> b) & 1u)) ++inv;
      twist[i] = inv % 2;
    }
    CHECK(base.diff().size() == perm.diff().size());
    for (const auto& [ft, coeff] : base.diff()) {
      const Int flip = (twist[ft.first] ^ twist[ft.second]) ? -1 : 1;
      CHECK(perm.diff_coeff(ft.first, ft.second) == coeff * flip);
    }
    CHECK(homology(perm) == homology(base));
  }

  const std::vector<std::size_t> bad = {0, 0, 1};
  CHECK_THROWS_AS(direct_CKh(tl, tr, &bad), std::invalid_argument);
}

TEST_CASE("pairing: glued tensor equals the cube generator by generator") {
  for (const std::string& name : corpus::link_names()) {
    CAPTURE(name);
    const auto [left, right] = corpus::load_link(name);
    const ZComplex direct = direct_CKh(left, right);
    const ZComplex glued = closed_complex_via_tensor(left, right);
    REQUIRE(direct.size() == glued.size());

    const std::vector<std::size_t> bij = pairing_identification(left, right);
    REQUIRE(bij.size() == direct.size());
    std::set<std::size_t> image(bij.begin(), bij.end());
    CHECK(image.size() == bij.size());

    CHECK(complexes_equal_under_identification(direct, glued, bij, false));
    CHECK(homology(glued) == homology(direct));
  }
}

TEST_CASE("reidemeister: insertion/deletion round trips and crossing counts") {
  const auto [tl, tr] = corpus::load_link("trefoil.link");

  // A first-move kink insertion is a positive kink wherever it is placed.
  for (std::size_t t = 0; t <= tl.events().size(); ++t) {
    for (int i = 1; i <= tl.strands_before(t); ++i) {
      const TangleWord w1 = reidemeister(tl, ReidemeisterMove::kR1Plus, {t, i});
      CHECK(w1.n_plus() == tl.n_plus() + 1);
      CHECK(w1.n_minus() == tl.n_minus());
      CHECK(reidemeister(w1, ReidemeisterMove::kR1PlusInv, {t, 0}) == tl);

      const TangleWord w2 = reidemeister(tl, ReidemeisterMove::kR1Minus, {t, i});
      CHECK(w2.n_minus() == tl.n_minus() + 1);
      CHECK(reidemeister(w2, ReidemeisterMove::kR1MinusInv, {t, 0}) == tl);
    }
  }

  // A second-move insertion adds one crossing of each sign.
  const TangleWord r2 = reidemeister(tr, ReidemeisterMove::kR2, {0, 2});
  CHECK(r2.n_plus() == tr.n_plus() + 1);
  CHECK(r2.n_minus() == tr.n_minus() + 1);
  CHECK(reidemeister(r2, ReidemeisterMove::kR2Inv, {0, 0}) == tr);

  // Third move: same-kind triple at positions (p, q, p) becomes (q, p, q),
  // and doing it twice is the identity.
  const TangleWord braid =
      word(TangleSide::kRight, {true, true, false, false},
           {ev(K::kCrossPos, 2), ev(K::kCrossPos, 1), ev(K::kCrossPos, 2),
            ev(K::kCap, 1), ev(K::kCap, 1)});
  const TangleWord slid = reidemeister(braid, ReidemeisterMove::kR3, {0, 0});
  CHECK(slid.events()[0] == ev(K::kCrossPos, 1));
  CHECK(slid.events()[1] == ev(K::kCrossPos, 2));
  CHECK(slid.events()[2] == ev(K::kCrossPos, 1));
  CHECK(reidemeister(slid, ReidemeisterMove::kR3, {0, 0}) == braid);

  // Inapplicable sites are rejected.
  CHECK_THROWS_AS(reidemeister(tl, ReidemeisterMove::kR1PlusInv, {0, 0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(reidemeister(tl, ReidemeisterMove::kR2Inv, {0, 0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(reidemeister(tl, ReidemeisterMove::kR3, {0, 0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(reidemeister(tl, ReidemeisterMove::kR1Plus, {4, 1}),
                  std::invalid_argument);
  CHECK_THROWS_AS(reidemeister(tl, ReidemeisterMove::kR2, {3, 2}),
                  std::invalid_argument);
  const TangleWord mixed_triple =
      word(TangleSide::kRight, {true, true, false, false},
           {ev(K::kCrossPos, 2), ev(K::kCrossNeg, 1), ev(K::kCrossPos, 2),
            ev(K::kCap, 1), ev(K::kCap, 1)});
  CHECK_THROWS_AS(reidemeister(mixed_triple, ReidemeisterMove::kR3, {0, 0}),
                  std::invalid_argument);
}

TEST_CASE("reidemeister: closure homology is invariant, pairing intact") {
  const auto [tl, tr] = corpus::load_link("trefoil.link");
  const BigradedHomology base = homology(direct_CKh(tl, tr));

  const auto check_pair = [&base](const TangleWord& l, const TangleWord& r) {
    CHECK(homology(direct_CKh(l, r)) == base);
    CHECK(complexes_equal_under_identification(
        direct_CKh(l, r), closed_complex_via_tensor(l, r),
        pairing_identification(l, r), false));
  };

  check_pair(reidemeister(tl, ReidemeisterMove::kR1Plus, {0, 1}), tr);
  check_pair(reidemeister(tl, ReidemeisterMove::kR1Plus, {3, 1}), tr);
  check_pair(reidemeister(tl, ReidemeisterMove::kR1Minus, {1, 2}), tr);
  check_pair(tl, reidemeister(tr, ReidemeisterMove::kR1Minus, {0, 3}));
  check_pair(reidemeister(tl, ReidemeisterMove::kR2, {0, 2}), tr);
  check_pair(tl, reidemeister(tr, ReidemeisterMove::kR2, {1, 1}));

  // Third move on a braid-shaped closure.
  const TangleWord braid_right =
      word(TangleSide::kRight, {true, true, false, false},
           {ev(K::kCrossPos, 2), ev(K::kCrossPos, 1), ev(K::kCrossPos, 2),
            ev(K::kCap, 1), ev(K::kCap, 1)});
  const TangleWord braid_left =
      word(TangleSide::kLeft, {false, false, true, true},
           {ev(K::kCap, 2), ev(K::kCap, 1)});
  const BigradedHomology braid_h = homology(direct_CKh(braid_left, braid_right));
  const TangleWord slid = reidemeister(braid_right, ReidemeisterMove::kR3, {0, 0});
  CHECK(homology(direct_CKh(braid_left, slid)) == braid_h);
  CHECK(complexes_equal_under_identification(
      direct_CKh(braid_left, slid), closed_complex_via_tensor(braid_left, slid),
      pairing_identification(braid_left, slid), false));

  // Deleting the cancelling pair of the mixed unknot leaves unknot homology.
  const auto [ml, mr] = corpus::load_link("mixed.link");
  CHECK(homology(direct_CKh(ml, mr)) == unknot_homology());
  const TangleWord cancelled = reidemeister(mr, ReidemeisterMove::kR2Inv, {0, 0});
  CHECK(homology(direct_CKh(ml, cancelled)) == unknot_homology());
}

TEST_CASE("random words: determinism, round trips, d squared") {
  CHECK(random_tangle_word(2, TangleSide::kRight, 3, 7) ==
        random_tangle_word(2, TangleSide::kRight, 3, 7));
  CHECK_FALSE(random_tangle_word(2, TangleSide::kRight, 3, 7) ==
              random_tangle_word(2, TangleSide::kRight, 3, 8));

  std::uint64_t seed = 0;
  for (int n = 1; n <= 2; ++n) {
    for (int crossings = 0; crossings <= 4; ++crossings) {
      for (int rep = 0; rep < 5; ++rep) {
        const TangleSide side =
            (rep % 2 == 0) ? TangleSide::kRight : TangleSide::kLeft;
        const TangleWord w = random_tangle_word(n, side, crossings, seed++);
        CAPTURE(w.to_text());
        CHECK(w.crossing_count() == crossings);
        CHECK(w.n_plus() + w.n_minus() == crossings);
        CHECK(w.strands_before(w.events().size()) == 0);
        CHECK(parse_tangle(w.to_text()) == w);
        const DSquaredReport rep2 = check_d_squared(khovanov_complex(w));
        CHECK_MESSAGE(rep2.passed, rep2.detail);
      }
    }
  }
}
