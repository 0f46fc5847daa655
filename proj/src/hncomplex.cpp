// Complexes of projective graded H^n-modules: generator-labeled
// differentials, the two-formulation d^2 check, chain maps and homotopies,
// tensor over H^n, the side-swapping mirror, and hypothesis-checked Gaussian
// elimination.

#include "bkh/hncomplex.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>

namespace bkh {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

enum class LabelKind { kNone, kGamma, kAlpha };

// Multiplicative generator test on a basis element: surgery labels are
// all-plus diagrams with one circle fewer than the strand count (the two
// matchings then differ by a single surgery); dotted-circle labels repeat
// one matching and carry exactly one minus sign.
LabelKind label_kind(const SignedDiagram& d) {
  int minus = 0;
  for (int s : d.signs()) minus += (s < 0) ? 1 : 0;
  if (d.left() == d.right()) {
    return minus == 1 ? LabelKind::kAlpha : LabelKind::kNone;
  }
  if (minus == 0 && d.circles() == d.n() - 1) return LabelKind::kGamma;
  return LabelKind::kNone;
}

using Key2 = std::pair<std::size_t, std::size_t>;
using Key3 = std::tuple<std::size_t, std::size_t, std::size_t>;
using Key4 = std::tuple<std::size_t, std::size_t, std::size_t, std::size_t>;

void prune_zeros(std::map<Key4, Int>& m) {
  for (auto it = m.begin(); it != m.end();) {
    it = (it->second == 0) ? m.erase(it) : std::next(it);
  }
}

// Product of a label g with a basis factor b, on the side where the label
// multiplies onto the algebra factor: g * b for right modules (labels attach
// between the generator and the factor), b * g for left modules.
const std::vector<std::pair<std::size_t, Int>>& label_product(
    const ArcAlgebra& alg, ModuleSide side, std::size_t label, std::size_t b) {
  return side == ModuleSide::kRight ? alg.multiply_basis(label, b)
                                    : alg.multiply_basis(b, label);
}

// Shared expansion of any plain + labeled coefficient pair over the Z-basis.
ModuleElement apply_coeffs(
    const ArcAlgebra& alg, ModuleSide side,
    const std::map<Key2, Int>& plain,
    const std::map<Key3, Int>& labeled, const ModuleElement& e) {
  ModuleElement out;
  for (const auto& [key, v] : e.terms()) {
    const auto [i, b] = key;
    for (auto it = plain.lower_bound({i, 0});
         it != plain.end() && it->first.first == i; ++it) {
      out.add(it->first.second, b, v * it->second);
    }
    for (auto it = labeled.lower_bound({i, 0, 0});
         it != labeled.end() && std::get<0>(it->first) == i; ++it) {
      const std::size_t j = std::get<1>(it->first);
      const std::size_t g = std::get<2>(it->first);
      for (const auto& [h2, cc] : label_product(alg, side, g, b)) {
        out.add(j, h2, v * it->second * cc);
      }
    }
  }
  return out;
}

std::string bigrading_text(long long q, long long h) {
  return "(" + std::to_string(q) + "," + std::to_string(h) + ")";
}

}  // namespace

void ModuleElement::add(std::size_t gen, std::size_t beta, const Int& coeff) {
  if (coeff == 0) return;
  auto [it, inserted] = terms_.try_emplace({gen, beta}, coeff);
  if (!inserted) {
    it->second += coeff;
    if (it->second == 0) terms_.erase(it);
  }
}

ModuleElement& ModuleElement::operator+=(const ModuleElement& o) {
  for (const auto& [key, v] : o.terms_) add(key.first, key.second, v);
  return *this;
}

ModuleElement& ModuleElement::negate() {
  for (auto& [key, v] : terms_) v = -v;
  return *this;
}

ProjComplex::ProjComplex(std::shared_ptr<const ArcAlgebra> algebra,
                         ModuleSide side)
    : algebra_(std::move(algebra)), side_(side) {
  require(algebra_ != nullptr, "ProjComplex: null algebra");
}

std::size_t ProjComplex::add_generator(std::string id, const Matching& idem,
                                       long long q, long long h) {
  require(algebra_ != nullptr, "ProjComplex: not attached to an algebra");
  require(idem.n() == algebra_->n(), "add_generator: idempotent strand count");
  gens_.push_back(
      ProjGenerator{std::move(id), algebra_->matching_index(idem), q, h});
  return gens_.size() - 1;
}

void ProjComplex::add_d(std::size_t i, std::size_t j, const Int& coeff) {
  require(i < gens_.size() && j < gens_.size(), "add_d: generator index");
  if (coeff == 0) return;
  const ProjGenerator& a = gens_[i];
  const ProjGenerator& b = gens_[j];
  require(a.idem == b.idem, "add_d: idempotents differ between " + a.id +
                                " and " + b.id);
  require(b.q == a.q && b.h == a.h + 1,
          "add_d: bigrading of " + b.id + " must be " +
              bigrading_text(a.q, a.h) + " + (0,1)");
  auto [it, inserted] = c_.try_emplace({i, j}, coeff);
  if (!inserted) {
    it->second += coeff;
    if (it->second == 0) c_.erase(it);
  }
}

void ProjComplex::add_dt(std::size_t i, std::size_t j,
                         const SignedDiagram& label, const Int& coeff) {
  require(i < gens_.size() && j < gens_.size(), "add_dt: generator index");
  if (coeff == 0) return;
  require(label.n() == algebra_->n(), "add_dt: label strand count");
  const LabelKind kind = label_kind(label);
  require(kind != LabelKind::kNone,
          "add_dt: label is not a multiplicative generator: " +
              label.to_text());
  const ProjGenerator& a = gens_[i];
  const ProjGenerator& b = gens_[j];
  const long long drop = kind == LabelKind::kGamma ? 1 : 2;
  require(b.q == a.q - drop && b.h == a.h + 1,
          "add_dt: bigrading of " + b.id + " must be " +
              bigrading_text(a.q - drop, a.h + 1));
  const std::size_t lm = algebra_->matching_index(label.left());
  const std::size_t rm = algebra_->matching_index(label.right());
  if (side_ == ModuleSide::kRight) {
    require(lm == b.idem && rm == a.idem,
            "add_dt: label idempotents must compose as x_j * label * e(x_i)");
  } else {
    require(lm == a.idem && rm == b.idem,
            "add_dt: label idempotents must compose as e(x_i) * label * x_j");
  }
  const std::size_t g = algebra_->basis_index(label);
  auto [it, inserted] = ct_.try_emplace({i, j, g}, coeff);
  if (!inserted) {
    it->second += coeff;
    if (it->second == 0) ct_.erase(it);
  }
}

Int ProjComplex::c(std::size_t i, std::size_t j) const {
  auto it = c_.find({i, j});
  return it == c_.end() ? Int(0) : it->second;
}

Int ProjComplex::ct(std::size_t i, std::size_t j,
                    std::size_t label_basis) const {
  auto it = ct_.find({i, j, label_basis});
  return it == ct_.end() ? Int(0) : it->second;
}

std::vector<std::pair<std::size_t, std::size_t>> ProjComplex::module_basis()
    const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  if (!algebra_) return out;
  for (std::size_t i = 0; i < gens_.size(); ++i) {
    for (std::size_t b = 0; b < algebra_->basis_size(); ++b) {
      const SignedDiagram& d = algebra_->basis(b);
      const Matching& attach =
          side_ == ModuleSide::kRight ? d.left() : d.right();
      if (algebra_->matching_index(attach) == gens_[i].idem) {
        out.emplace_back(i, b);
      }
    }
  }
  return out;
}

std::pair<long long, long long> ProjComplex::basis_bigrading(
    std::size_t gen, std::size_t beta) const {
  return {gens_[gen].q + degree(algebra_->basis(beta)), gens_[gen].h};
}

ModuleElement ProjComplex::apply_d(const ModuleElement& e) const {
  return apply_coeffs(*algebra_, side_, c_, ct_, e);
}

std::string ProjComplex::to_text() const {
  std::ostringstream out;
  for (const auto& g : gens_) {
    out << "gen " << g.id << " "
        << algebra_->matchings()[g.idem].to_text() << " " << g.q << " " << g.h
        << "\n";
  }
  for (const auto& [key, v] : c_) {
    out << "d " << key.first << " " << key.second << " " << v << "\n";
  }
  for (const auto& [key, v] : ct_) {
    out << "dt " << std::get<0>(key) << " " << std::get<1>(key) << " "
        << algebra_->basis(std::get<2>(key)).to_text() << " " << v << "\n";
  }
  return out.str();
}

bool ProjComplex::operator==(const ProjComplex& o) const {
  if ((algebra_ == nullptr) != (o.algebra_ == nullptr)) return false;
  if (algebra_ && algebra_->n() != o.algebra_->n()) return false;
  return side_ == o.side_ && gens_ == o.gens_ && c_ == o.c_ && ct_ == o.ct_;
}

namespace {

// The grouped formulation of the d^2 coefficients: five families sorted by
// the intrinsic-degree drop from source to target generator (0 plain-plain;
// -1 surgery x plain; -2 dotted x plain and surgery x surgery; -3 mixed
// second-order; -4 dotted x dotted).  Returns the per-family nonzero
// coefficient maps over keys (i, h, k, h2).
std::array<std::map<Key4, Int>, 5> family_coefficients(const ProjComplex& m) {
  std::array<std::map<Key4, Int>, 5> fam;
  const ArcAlgebra& alg = m.algebra();
  const ModuleSide side = m.side();
  const auto& cs = m.c_entries();
  const auto& cts = m.ct_entries();

  std::vector<std::vector<std::size_t>> factors(m.size());
  for (const auto& [i, b] : m.module_basis()) factors[i].push_back(b);

  auto kind_of = [&](std::size_t g) {
    return label_kind(alg.basis(g)) == LabelKind::kGamma ? 0 : 1;
  };

  // Family 1: plain after plain; independent of the algebra factor, so the
  // per-pair sum is copied to every basis factor of x_i.
  std::map<Key2, Int> plain2;
  for (const auto& [ij, v1] : cs) {
    for (auto it = cs.lower_bound({ij.second, 0});
         it != cs.end() && it->first.first == ij.second; ++it) {
      plain2[{ij.first, it->first.second}] += v1 * it->second;
    }
  }
  for (const auto& [ik, v] : plain2) {
    if (v == 0) continue;
    for (std::size_t b : factors[ik.first]) {
      fam[0][{ik.first, b, ik.second, b}] = v;
    }
  }

  // Families 2-3, two-step parts: a labeled arrow composed with a plain one,
  // in either order; surgery labels feed family 2, dotted labels family 3.
  for (const auto& [ijg, vt] : cts) {
    const auto [i, j, g] = ijg;
    const int f = 1 + kind_of(g);
    for (auto it = cs.lower_bound({j, 0});
         it != cs.end() && it->first.first == j; ++it) {
      for (std::size_t b : factors[i]) {
        for (const auto& [h2, cc] : label_product(alg, side, g, b)) {
          fam[f][{i, b, it->first.second, h2}] += vt * cc * it->second;
        }
      }
    }
  }
  for (const auto& [ij, v1] : cs) {
    const auto [i, j] = ij;
    for (auto it = cts.lower_bound({j, 0, 0});
         it != cts.end() && std::get<0>(it->first) == j; ++it) {
      const std::size_t k = std::get<1>(it->first);
      const std::size_t g = std::get<2>(it->first);
      const int f = 1 + kind_of(g);
      for (std::size_t b : factors[i]) {
        for (const auto& [h2, cc] : label_product(alg, side, g, b)) {
          fam[f][{i, b, k, h2}] += v1 * it->second * cc;
        }
      }
    }
  }

  // Families 3-5, second-order parts: two labeled arrows in a row; the
  // family index counts the dotted labels among the two.
  for (const auto& [ijg, vt1] : cts) {
    const auto [i, j, g1] = ijg;
    for (auto it = cts.lower_bound({j, 0, 0});
         it != cts.end() && std::get<0>(it->first) == j; ++it) {
      const std::size_t k = std::get<1>(it->first);
      const std::size_t g2 = std::get<2>(it->first);
      const int f = 2 + kind_of(g1) + kind_of(g2);
      for (std::size_t b : factors[i]) {
        for (const auto& [h4, cc1] : label_product(alg, side, g1, b)) {
          for (const auto& [h2, cc2] : label_product(alg, side, g2, h4)) {
            fam[f][{i, b, k, h2}] += vt1 * cc1 * it->second * cc2;
          }
        }
      }
    }
  }

  for (auto& f : fam) prune_zeros(f);
  return fam;
}

std::string witness_text(const ProjComplex& m, const CoeffWitness& w) {
  std::ostringstream out;
  out << "coefficient " << w.value << " from "
      << m.generator(w.i).id << " * " << m.algebra().basis(w.h).to_text()
      << " to " << m.generator(w.k).id << " * "
      << m.algebra().basis(w.h2).to_text();
  return out.str();
}

}  // namespace

DSquaredReport check_d_squared(const ProjComplex& m) {
  DSquaredReport report;

  std::map<Key4, Int> direct;
  for (const auto& [i, b] : m.module_basis()) {
    ModuleElement e;
    e.add(i, b, 1);
    const ModuleElement dd = m.apply_d(m.apply_d(e));
    for (const auto& [key, v] : dd.terms()) {
      direct[{i, b, key.first, key.second}] = v;
    }
  }
  prune_zeros(direct);

  const auto fam = family_coefficients(m);
  std::map<Key4, Int> grouped;
  for (std::size_t f = 0; f < fam.size(); ++f) {
    report.family_ok[f] = fam[f].empty();
    for (const auto& [key, v] : fam[f]) grouped[key] += v;
  }
  prune_zeros(grouped);

  report.formulations_agree = (direct == grouped);
  report.passed = direct.empty() && grouped.empty();
  if (!report.formulations_agree) {
    report.passed = false;
    report.detail = "internal disagreement between the direct and grouped "
                    "d^2 expansions";
  }
  const auto& source = direct.empty() ? grouped : direct;
  if (!source.empty()) {
    const auto& [key, v] = *source.begin();
    report.witness = CoeffWitness{std::get<0>(key), std::get<1>(key),
                                  std::get<2>(key), std::get<3>(key), v};
    if (report.detail.empty()) {
      report.detail = "d^2 != 0: " + witness_text(m, *report.witness);
    }
  } else if (report.detail.empty()) {
    report.detail = "d^2 = 0";
  }
  return report;
}

ChainMap::ChainMap(ProjComplex source, ProjComplex target)
    : source_(std::move(source)), target_(std::move(target)) {
  require(source_.algebra().n() == target_.algebra().n(),
          "ChainMap: source and target strand counts differ");
  require(source_.side() == target_.side(),
          "ChainMap: source and target sides differ");
}

void ChainMap::add_f(std::size_t i, std::size_t j, const Int& coeff) {
  require(i < source_.size() && j < target_.size(), "add_f: generator index");
  if (coeff == 0) return;
  const ProjGenerator& a = source_.generator(i);
  const ProjGenerator& b = target_.generator(j);
  require(a.idem == b.idem, "add_f: idempotents differ");
  require(a.q == b.q && a.h == b.h, "add_f: map must preserve bigradings");
  auto [it, inserted] = f_.try_emplace({i, j}, coeff);
  if (!inserted) {
    it->second += coeff;
    if (it->second == 0) f_.erase(it);
  }
}

void ChainMap::add_ft(std::size_t i, std::size_t j, const SignedDiagram& label,
                      const Int& coeff) {
  require(i < source_.size() && j < target_.size(), "add_ft: generator index");
  if (coeff == 0) return;
  const ArcAlgebra& alg = source_.algebra();
  require(label.n() == alg.n(), "add_ft: label strand count");
  const LabelKind kind = label_kind(label);
  require(kind != LabelKind::kNone,
          "add_ft: label is not a multiplicative generator: " +
              label.to_text());
  const ProjGenerator& a = source_.generator(i);
  const ProjGenerator& b = target_.generator(j);
  const long long drop = kind == LabelKind::kGamma ? 1 : 2;
  require(b.q == a.q - drop && b.h == a.h,
          "add_ft: bigrading of " + b.id + " must be " +
              bigrading_text(a.q - drop, a.h));
  const std::size_t lm = alg.matching_index(label.left());
  const std::size_t rm = alg.matching_index(label.right());
  if (source_.side() == ModuleSide::kRight) {
    require(lm == b.idem && rm == a.idem, "add_ft: label idempotents");
  } else {
    require(lm == a.idem && rm == b.idem, "add_ft: label idempotents");
  }
  const std::size_t g = alg.basis_index(label);
  auto [it, inserted] = ft_.try_emplace({i, j, g}, coeff);
  if (!inserted) {
    it->second += coeff;
    if (it->second == 0) ft_.erase(it);
  }
}

ModuleElement ChainMap::apply(const ModuleElement& e) const {
  return apply_coeffs(source_.algebra(), source_.side(), f_, ft_, e);
}

bool ChainMap::operator==(const ChainMap& o) const {
  return source_ == o.source_ && target_ == o.target_ && f_ == o.f_ &&
         ft_ == o.ft_;
}

Homotopy::Homotopy(ProjComplex source, ProjComplex target)
    : source_(std::move(source)), target_(std::move(target)) {
  require(source_.algebra().n() == target_.algebra().n(),
          "Homotopy: source and target strand counts differ");
  require(source_.side() == target_.side(),
          "Homotopy: source and target sides differ");
}

void Homotopy::add_psi(std::size_t i, std::size_t j, const Int& coeff) {
  require(i < source_.size() && j < target_.size(),
          "add_psi: generator index");
  if (coeff == 0) return;
  const ProjGenerator& a = source_.generator(i);
  const ProjGenerator& b = target_.generator(j);
  require(a.idem == b.idem, "add_psi: idempotents differ");
  require(b.q == a.q && b.h == a.h - 1,
          "add_psi: bigrading of " + b.id + " must be " +
              bigrading_text(a.q, a.h - 1));
  auto [it, inserted] = psi_.try_emplace({i, j}, coeff);
  if (!inserted) {
    it->second += coeff;
    if (it->second == 0) psi_.erase(it);
  }
}

ModuleElement Homotopy::apply(const ModuleElement& e) const {
  return apply_coeffs(source_.algebra(), source_.side(), psi_, {}, e);
}

namespace {

MapReport report_difference(const ProjComplex& source,
                            const ProjComplex& target,
                            const std::map<Key4, Int>& difference,
                            const std::string& relation) {
  MapReport report;
  report.passed = difference.empty();
  if (report.passed) {
    report.detail = relation + " holds";
    return report;
  }
  const auto& [key, v] = *difference.begin();
  report.witness = CoeffWitness{std::get<0>(key), std::get<1>(key),
                                std::get<2>(key), std::get<3>(key), v};
  std::ostringstream out;
  out << relation << " fails: coefficient " << v << " from "
      << source.generator(report.witness->i).id << " * "
      << source.algebra().basis(report.witness->h).to_text() << " to "
      << target.generator(report.witness->k).id << " * "
      << target.algebra().basis(report.witness->h2).to_text();
  report.detail = out.str();
  return report;
}

}  // namespace

MapReport check_chain_map(const ChainMap& f) {
  const ProjComplex& source = f.source();
  const ProjComplex& target = f.target();
  std::map<Key4, Int> difference;
  for (const auto& [i, b] : source.module_basis()) {
    ModuleElement e;
    e.add(i, b, 1);
    ModuleElement lhs = target.apply_d(f.apply(e));
    ModuleElement rhs = f.apply(source.apply_d(e));
    lhs += rhs.negate();
    for (const auto& [key, v] : lhs.terms()) {
      difference[{i, b, key.first, key.second}] = v;
    }
  }
  prune_zeros(difference);
  return report_difference(source, target, difference, "d f = f d");
}

MapReport check_homotopy(const ChainMap& f, const ChainMap& g,
                         const Homotopy& psi) {
  require(f.source() == g.source() && f.source() == psi.source(),
          "check_homotopy: sources differ");
  require(f.target() == g.target() && f.target() == psi.target(),
          "check_homotopy: targets differ");
  const ProjComplex& source = f.source();
  const ProjComplex& target = f.target();
  std::map<Key4, Int> difference;
  for (const auto& [i, b] : source.module_basis()) {
    ModuleElement e;
    e.add(i, b, 1);
    ModuleElement lhs = f.apply(e);
    lhs += g.apply(e).negate();
    lhs += target.apply_d(psi.apply(e)).negate();
    lhs += psi.apply(source.apply_d(e)).negate();
    for (const auto& [key, v] : lhs.terms()) {
      difference[{i, b, key.first, key.second}] = v;
    }
  }
  prune_zeros(difference);
  return report_difference(source, target, difference,
                           "f - g = d psi + psi d");
}

ChainMap identity_map(const ProjComplex& m) {
  ChainMap id(m, m);
  for (std::size_t i = 0; i < m.size(); ++i) id.add_f(i, i, 1);
  return id;
}

ChainMap compose(const ChainMap& outer, const ChainMap& inner) {
  require(inner.target() == outer.source(),
          "compose: inner target differs from outer source");
  require(inner.is_plain() || outer.is_plain(),
          "compose: at least one factor must be plain, otherwise the "
          "composite has doubly-labeled terms");
  ChainMap out(inner.source(), outer.target());
  const ArcAlgebra& alg = inner.source().algebra();
  for (const auto& [ij, v1] : inner.f_entries()) {
    for (auto it = outer.f_entries().lower_bound({ij.second, 0});
         it != outer.f_entries().end() && it->first.first == ij.second; ++it) {
      out.add_f(ij.first, it->first.second, v1 * it->second);
    }
    for (auto it = outer.ft_entries().lower_bound({ij.second, 0, 0});
         it != outer.ft_entries().end() && std::get<0>(it->first) == ij.second;
         ++it) {
      out.add_ft(ij.first, std::get<1>(it->first),
                 alg.basis(std::get<2>(it->first)), v1 * it->second);
    }
  }
  for (const auto& [ijg, v1] : inner.ft_entries()) {
    const auto [i, j, g] = ijg;
    for (auto it = outer.f_entries().lower_bound({j, 0});
         it != outer.f_entries().end() && it->first.first == j; ++it) {
      out.add_ft(i, it->first.second, alg.basis(g), v1 * it->second);
    }
  }
  return out;
}

ZComplex underlying_z_complex(const ProjComplex& m) {
  ZComplex out;
  const auto basis = m.module_basis();
  std::map<Key2, std::size_t> index;
  for (const auto& [i, b] : basis) {
    const auto [q, h] = m.basis_bigrading(i, b);
    index[{i, b}] = out.add_gen(
        m.generator(i).id + "|" + std::to_string(b), h, 2 * q);
  }
  for (const auto& [i, b] : basis) {
    ModuleElement e;
    e.add(i, b, 1);
    const ModuleElement image = m.apply_d(e);
    for (const auto& [key, v] : image.terms()) {
      out.add_diff(index.at({i, b}), index.at(key), v);
    }
  }
  return out;
}

ZComplex tensor_over_Hn(const ProjComplex& m, const ProjComplex& n,
                        bool negate_intrinsic) {
  require(m.side() == ModuleSide::kRight && n.side() == ModuleSide::kLeft,
          "tensor_over_Hn: wants a right complex and a left complex");
  require(m.algebra().n() == n.algebra().n(),
          "tensor_over_Hn: strand counts differ");
  const ArcAlgebra& alg = m.algebra();

  ZComplex out;
  std::map<Key3, std::size_t> index;
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t b = 0; b < alg.basis_size(); ++b) {
      const SignedDiagram& d = alg.basis(b);
      if (alg.matching_index(d.left()) != m.generator(i).idem) continue;
      const std::size_t rm = alg.matching_index(d.right());
      for (std::size_t j = 0; j < n.size(); ++j) {
        if (n.generator(j).idem != rm) continue;
        const long long q =
            m.generator(i).q + degree(d) + n.generator(j).q;
        const long long h = m.generator(i).h + n.generator(j).h;
        index[{i, b, j}] = out.add_gen(
            m.generator(i).id + "|" + std::to_string(b) + "|" +
                n.generator(j).id,
            h, negate_intrinsic ? -2 * q : 2 * q);
      }
    }
  }

  for (const auto& [key, from] : index) {
    const auto [i, b, j] = key;
    const Int sign = (((n.generator(j).h % 2) + 2) % 2 == 0) ? 1 : -1;
    for (auto it = m.c_entries().lower_bound({i, 0});
         it != m.c_entries().end() && it->first.first == i; ++it) {
      out.add_diff(from, index.at({it->first.second, b, j}),
                   sign * it->second);
    }
    for (auto it = m.ct_entries().lower_bound({i, 0, 0});
         it != m.ct_entries().end() && std::get<0>(it->first) == i; ++it) {
      const std::size_t k = std::get<1>(it->first);
      const std::size_t g = std::get<2>(it->first);
      for (const auto& [h2, cc] : alg.multiply_basis(g, b)) {
        out.add_diff(from, index.at({k, h2, j}), sign * it->second * cc);
      }
    }
    for (auto it = n.c_entries().lower_bound({j, 0});
         it != n.c_entries().end() && it->first.first == j; ++it) {
      out.add_diff(from, index.at({i, b, it->first.second}), it->second);
    }
    for (auto it = n.ct_entries().lower_bound({j, 0, 0});
         it != n.ct_entries().end() && std::get<0>(it->first) == j; ++it) {
      const std::size_t l = std::get<1>(it->first);
      const std::size_t g = std::get<2>(it->first);
      for (const auto& [h2, cc] : alg.multiply_basis(b, g)) {
        out.add_diff(from, index.at({i, h2, l}), it->second * cc);
      }
    }
  }
  return out;
}

ProjComplex mirror_complex(const ProjComplex& m) {
  ProjComplex out(m.algebra_ptr(), m.side() == ModuleSide::kRight
                                       ? ModuleSide::kLeft
                                       : ModuleSide::kRight);
  const ArcAlgebra& alg = m.algebra();
  for (std::size_t i = 0; i < m.size(); ++i) {
    const ProjGenerator& g = m.generator(i);
    out.add_generator(g.id, alg.matchings()[g.idem], g.q, g.h);
  }
  for (const auto& [ij, v] : m.c_entries()) {
    out.add_d(ij.first, ij.second, v);
  }
  for (const auto& [ijg, v] : m.ct_entries()) {
    out.add_dt(std::get<0>(ijg), std::get<1>(ijg),
               mirror_diagram(alg.basis(std::get<2>(ijg))), v);
  }
  return out;
}

namespace {

struct ZCoords {
  std::map<Key2, Int> terms;  // (generator in the cancelled set, factor)
};

GaussianResult rejection(int item, std::string detail) {
  GaussianResult out;
  out.ok = false;
  out.violated_item = item;
  out.detail = std::move(detail);
  return out;
}

}  // namespace

GaussianResult gaussian_eliminate(
    const ProjComplex& m, const GaussianSplit& split,
    const std::map<std::pair<std::size_t, std::size_t>, Int>& psi_prime) {
  require(split.variant == 1 || split.variant == 2,
          "gaussian_eliminate: variant must be 1 or 2");
  require(split.variant == 2 || (split.tau.empty() && split.tau_tilde.empty()),
          "gaussian_eliminate: variant 1 takes no shift data");
  const ArcAlgebra& alg = m.algebra();

  std::set<std::size_t> kept;
  for (std::size_t i : split.keep) {
    require(i < m.size(), "gaussian_eliminate: keep index out of range");
    require(kept.insert(i).second, "gaussian_eliminate: duplicate keep index");
  }
  std::vector<std::size_t> comp;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (!kept.count(i)) comp.push_back(i);
  }
  for (const auto& [ij, v] : split.tau) {
    require(v != 0 && !kept.count(ij.first) && kept.count(ij.second) &&
                ij.first < m.size(),
            "gaussian_eliminate: shift entries go from a cancelled generator "
            "to a kept one");
  }
  for (const auto& [ijg, v] : split.tau_tilde) {
    require(v != 0 && !kept.count(std::get<0>(ijg)) &&
                kept.count(std::get<1>(ijg)) && std::get<0>(ijg) < m.size() &&
                std::get<2>(ijg) < alg.basis_size(),
            "gaussian_eliminate: labeled shift entries go from a cancelled "
            "generator to a kept one");
  }
  for (const auto& [ij, v] : psi_prime) {
    require(ij.first < m.size() && ij.second < m.size() && v != 0,
            "gaussian_eliminate: psi_prime index out of range or zero entry");
  }

  // Item 1: M is a complex.
  {
    const DSquaredReport d2 = check_d_squared(m);
    if (!d2.passed) return rejection(1, "d^2 != 0 on M: " + d2.detail);
  }

  // Item 2: the designated decomposition is well-formed.  In variant 2 each
  // z_i must be bigrading-homogeneous with the idempotent of x_i.
  if (split.variant == 2) {
    for (const auto& [ij, v] : split.tau) {
      const ProjGenerator& a = m.generator(ij.first);
      const ProjGenerator& b = m.generator(ij.second);
      if (a.idem != b.idem || a.q != b.q || a.h != b.h) {
        return rejection(2, "shift term " + b.id + " breaks homogeneity of z_" +
                                a.id);
      }
    }
    for (const auto& [ijg, v] : split.tau_tilde) {
      const ProjGenerator& a = m.generator(std::get<0>(ijg));
      const ProjGenerator& b = m.generator(std::get<1>(ijg));
      const SignedDiagram& label = alg.basis(std::get<2>(ijg));
      const LabelKind kind = label_kind(label);
      if (kind == LabelKind::kNone) {
        return rejection(2, "labeled shift term on z_" + a.id +
                                " is not a multiplicative generator");
      }
      const long long drop = kind == LabelKind::kGamma ? 1 : 2;
      const std::size_t lm = alg.matching_index(label.left());
      const std::size_t rm = alg.matching_index(label.right());
      const bool idems_ok = m.side() == ModuleSide::kRight
                                ? (lm == b.idem && rm == a.idem)
                                : (lm == a.idem && rm == b.idem);
      if (!idems_ok || b.q != a.q - drop || b.h != a.h) {
        return rejection(2, "labeled shift term " + b.id +
                                " breaks homogeneity of z_" + a.id);
      }
    }
  }

  auto idem_basis = [&](std::size_t gen) {
    return alg.idempotent(alg.matchings()[m.generator(gen).idem]);
  };

  // z_i in plain coordinates.
  auto z_elem = [&](std::size_t i) {
    ModuleElement e;
    e.add(i, idem_basis(i), 1);
    if (split.variant == 2) {
      for (auto it = split.tau.lower_bound({i, 0});
           it != split.tau.end() && it->first.first == i; ++it) {
        e.add(it->first.second, idem_basis(it->first.second), it->second);
      }
      for (auto it = split.tau_tilde.lower_bound({i, 0, 0});
           it != split.tau_tilde.end() && std::get<0>(it->first) == i; ++it) {
        e.add(std::get<1>(it->first), std::get<2>(it->first), it->second);
      }
    }
    return e;
  };

  // Rewrites an element as a combination of z_k * factor plus a remainder
  // supported on kept generators; the remainder must vanish for elements of
  // the cancelled summand.
  auto to_z_coords = [&](ModuleElement e) {
    ZCoords out;
    bool progress = true;
    while (progress) {
      progress = false;
      for (const auto& [key, v] : e.terms()) {
        if (kept.count(key.first)) continue;
        out.terms[key] += v;
        ModuleElement expansion;
        const auto [k, b] = key;
        expansion.add(k, b, v);
        if (split.variant == 2) {
          for (auto it = split.tau.lower_bound({k, 0});
               it != split.tau.end() && it->first.first == k; ++it) {
            expansion.add(it->first.second, b, v * it->second);
          }
          for (auto it = split.tau_tilde.lower_bound({k, 0, 0});
               it != split.tau_tilde.end() && std::get<0>(it->first) == k;
               ++it) {
            const std::size_t j = std::get<1>(it->first);
            const std::size_t g = std::get<2>(it->first);
            for (const auto& [h2, cc] :
                 label_product(alg, m.side(), g, b)) {
              expansion.add(j, h2, v * it->second * cc);
            }
          }
        }
        e += expansion.negate();
        progress = true;
        break;
      }
    }
    return std::pair<ZCoords, ModuleElement>(out, e);
  };

  // Item 3: the cancelled summand is a subcomplex.
  std::map<std::size_t, ZCoords> dz;
  for (std::size_t i : comp) {
    auto [zc, rem] = to_z_coords(m.apply_d(z_elem(i)));
    if (!rem.is_zero()) {
      const auto& [key, v] = *rem.terms().begin();
      return rejection(
          3, "d of the cancelled generator " + m.generator(i).id +
                 " leaks onto " + m.generator(key.first).id + " * " +
                 alg.basis(key.second).to_text() + " with coefficient " +
                 v.str());
    }
    dz[i] = std::move(zc);
  }

  // Item 4: psi_prime is a plain degree (0,-1) idempotent-compatible map of
  // the cancelled summand with  id = d psi_prime + psi_prime d.
  for (const auto& [ij, v] : psi_prime) {
    if (kept.count(ij.first) || kept.count(ij.second)) {
      return rejection(4, "psi_prime touches a kept generator");
    }
    const ProjGenerator& a = m.generator(ij.first);
    const ProjGenerator& b = m.generator(ij.second);
    if (a.idem != b.idem || b.q != a.q || b.h != a.h - 1) {
      return rejection(4, "psi_prime entry " + a.id + " -> " + b.id +
                              " is not a degree (0,-1) idempotent-compatible "
                              "term");
    }
  }
  auto apply_psi_prime = [&](const ZCoords& zc) {
    ZCoords out;
    for (const auto& [key, v] : zc.terms) {
      for (auto it = psi_prime.lower_bound({key.first, 0});
           it != psi_prime.end() && it->first.first == key.first; ++it) {
        out.terms[{it->first.second, key.second}] += v * it->second;
      }
    }
    return out;
  };
  for (std::size_t i : comp) {
    // d(psi_prime(z_i)) + psi_prime(d(z_i)) - z_i, all in z-coordinates.
    ZCoords total = apply_psi_prime(dz.at(i));
    for (auto it = psi_prime.lower_bound({i, 0});
         it != psi_prime.end() && it->first.first == i; ++it) {
      for (const auto& [key, v] : dz.at(it->first.second).terms) {
        total.terms[key] += it->second * v;
      }
    }
    total.terms[{i, idem_basis(i)}] -= 1;
    for (const auto& [key, v] : total.terms) {
      if (v != 0) {
        return rejection(
            4, "id = d psi' + psi' d fails on " + m.generator(i).id +
                   ": coefficient " + v.str() + " at " +
                   m.generator(key.first).id + " * " +
                   alg.basis(key.second).to_text());
      }
    }
  }

  if (split.variant == 2) {
    // Item 5: labeled arrows from kept generators avoid psi_prime sources.
    for (const auto& [ijg, vt] : m.ct_entries()) {
      const auto [i, j, g] = ijg;
      if (!kept.count(i) || kept.count(j)) continue;
      for (auto it = psi_prime.lower_bound({j, 0});
           it != psi_prime.end() && it->first.first == j; ++it) {
        return rejection(5, "labeled arrow " + m.generator(i).id + " -> " +
                                m.generator(j).id +
                                " meets psi_prime at the cancelled generator");
      }
    }
    // Item 6: labeled arrows avoid shifted generators.
    for (const auto& [ijg, vt] : m.ct_entries()) {
      const std::size_t j = std::get<1>(ijg);
      if (kept.count(j)) continue;
      const bool shifted =
          split.tau.lower_bound({j, 0}) != split.tau.end() &&
              split.tau.lower_bound({j, 0})->first.first == j;
      const bool shifted_labeled =
          split.tau_tilde.lower_bound({j, 0, 0}) != split.tau_tilde.end() &&
          std::get<0>(split.tau_tilde.lower_bound({j, 0, 0})->first) == j;
      if (shifted || shifted_labeled) {
        return rejection(6, "labeled arrow lands on the shifted generator " +
                                m.generator(j).id);
      }
    }
    // Item 7: psi_prime never reaches a shifted generator.
    for (const auto& [ij, v] : psi_prime) {
      const std::size_t j = ij.second;
      const bool shifted =
          split.tau.lower_bound({j, 0}) != split.tau.end() &&
              split.tau.lower_bound({j, 0})->first.first == j;
      const bool shifted_labeled =
          split.tau_tilde.lower_bound({j, 0, 0}) != split.tau_tilde.end() &&
          std::get<0>(split.tau_tilde.lower_bound({j, 0, 0})->first) == j;
      if (shifted || shifted_labeled) {
        return rejection(7, "psi_prime reaches the shifted generator " +
                                m.generator(j).id);
      }
    }
  }

  // Hypotheses hold; build the retained complex and the equivalence.
  GaussianResult out;
  out.ok = true;
  out.detail = "hypotheses verified";

  std::vector<std::size_t> keep_sorted(kept.begin(), kept.end());
  std::map<std::size_t, std::size_t> pos;
  ProjComplex m1(m.algebra_ptr(), m.side());
  for (std::size_t i : keep_sorted) {
    const ProjGenerator& g = m.generator(i);
    pos[i] = m1.add_generator(g.id, alg.matchings()[g.idem], g.q, g.h);
  }
  for (const auto& [ij, v] : m.c_entries()) {
    if (kept.count(ij.first) && kept.count(ij.second)) {
      m1.add_d(pos.at(ij.first), pos.at(ij.second), v);
    }
  }
  for (const auto& [ijg, v] : m.ct_entries()) {
    if (kept.count(std::get<0>(ijg)) && kept.count(std::get<1>(ijg))) {
      m1.add_dt(pos.at(std::get<0>(ijg)), pos.at(std::get<1>(ijg)),
                alg.basis(std::get<2>(ijg)), v);
    }
  }
  if (split.variant == 2) {
    // Corrections from rewriting plain arrows into cancelled generators
    // through the shifted basis: d(x_i) = ... + c[i][j] (z_j - tau terms).
    for (const auto& [ij, v] : m.c_entries()) {
      if (!kept.count(ij.first) || kept.count(ij.second)) continue;
      const std::size_t i = ij.first;
      const std::size_t j = ij.second;
      for (auto it = split.tau.lower_bound({j, 0});
           it != split.tau.end() && it->first.first == j; ++it) {
        m1.add_d(pos.at(i), pos.at(it->first.second), -v * it->second);
      }
      for (auto it = split.tau_tilde.lower_bound({j, 0, 0});
           it != split.tau_tilde.end() && std::get<0>(it->first) == j; ++it) {
        m1.add_dt(pos.at(i), pos.at(std::get<1>(it->first)),
                  alg.basis(std::get<2>(it->first)), -v * it->second);
      }
    }
  }

  ChainMap f(m, m1);
  for (std::size_t i : keep_sorted) f.add_f(i, pos.at(i), 1);
  if (split.variant == 2) {
    for (const auto& [ij, v] : split.tau) {
      f.add_f(ij.first, pos.at(ij.second), -v);
    }
    for (const auto& [ijg, v] : split.tau_tilde) {
      f.add_ft(std::get<0>(ijg), pos.at(std::get<1>(ijg)),
               alg.basis(std::get<2>(ijg)), -v);
    }
  }

  ChainMap g(m1, m);
  for (std::size_t i : keep_sorted) g.add_f(pos.at(i), i, 1);
  for (const auto& [ij, v] : m.c_entries()) {
    if (!kept.count(ij.first) || kept.count(ij.second)) continue;
    for (auto it = psi_prime.lower_bound({ij.second, 0});
         it != psi_prime.end() && it->first.first == ij.second; ++it) {
      g.add_f(pos.at(ij.first), it->first.second, -v * it->second);
    }
  }
  if (split.variant == 1) {
    for (const auto& [ijg, v] : m.ct_entries()) {
      const auto [i, j, gg] = ijg;
      if (!kept.count(i) || kept.count(j)) continue;
      for (auto it = psi_prime.lower_bound({j, 0});
           it != psi_prime.end() && it->first.first == j; ++it) {
        g.add_ft(pos.at(i), it->first.second, alg.basis(gg), -v * it->second);
      }
    }
  }

  Homotopy psi(m, m);
  for (const auto& [ij, v] : psi_prime) psi.add_psi(ij.first, ij.second, -v);

  // Certify every promised conclusion before handing the results out.
  const DSquaredReport d1 = check_d_squared(m1);
  const MapReport fr = check_chain_map(f);
  const MapReport gr = check_chain_map(g);
  const bool fg_identity = compose(f, g) == identity_map(m1);
  const MapReport hr = check_homotopy(compose(g, f), identity_map(m), psi);
  const bool plain_ok =
      split.variant == 1 ? f.is_plain() : g.is_plain();
  if (!d1.passed || !fr.passed || !gr.passed || !fg_identity || !hr.passed ||
      !plain_ok) {
    throw std::logic_error(
        "gaussian_eliminate: hypotheses verified but a conclusion failed "
        "certification: " +
        (!d1.passed ? d1.detail
                    : !fr.passed ? fr.detail
                                 : !gr.passed ? gr.detail
                                              : !hr.passed ? hr.detail
                                                           : "shape"));
  }

  out.m1 = std::move(m1);
  out.f = std::move(f);
  out.g = std::move(g);
  out.psi = std::move(psi);
  return out;
}

}  // namespace bkh
