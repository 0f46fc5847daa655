// Exact integer linear algebra over boost::multiprecision::cpp_int.

#include "bkh/zlinalg.hpp"

#include <json.hpp>

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace bkh {

namespace {

Int abs_int(const Int& x) { return x < 0 ? Int(-x) : x; }

// Floor division (quotient rounded toward negative infinity), b > 0.
Int floor_div(const Int& a, const Int& b) {
  Int q = a / b;
  if (a % b != 0 && ((a < 0) != (b < 0))) q -= 1;
  return q;
}

}  // namespace

IntMatrix IntMatrix::operator*(const IntMatrix& other) const {
  if (cols_ != other.rows_) throw std::invalid_argument("matrix size mismatch");
  IntMatrix out(rows_, other.cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = 0; k < cols_; ++k) {
      const Int& a = at(i, k);
      if (a == 0) continue;
      for (std::size_t j = 0; j < other.cols_; ++j) {
        const Int& b = other.at(k, j);
        if (b != 0) out.at(i, j) += a * b;
      }
    }
  return out;
}

IntMatrix IntMatrix::transposed() const {
  IntMatrix out(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out.at(j, i) = at(i, j);
  return out;
}

void IntMatrix::swap_rows(std::size_t a, std::size_t b) {
  if (a == b) return;
  for (std::size_t j = 0; j < cols_; ++j) std::swap(at(a, j), at(b, j));
}

void IntMatrix::swap_cols(std::size_t a, std::size_t b) {
  if (a == b) return;
  for (std::size_t i = 0; i < rows_; ++i) std::swap(at(i, a), at(i, b));
}

void IntMatrix::add_row(std::size_t a, std::size_t b, const Int& k) {
  if (k == 0) return;
  for (std::size_t j = 0; j < cols_; ++j) at(a, j) += k * at(b, j);
}

void IntMatrix::add_col(std::size_t a, std::size_t b, const Int& k) {
  if (k == 0) return;
  for (std::size_t i = 0; i < rows_; ++i) at(i, a) += k * at(i, b);
}

void IntMatrix::negate_row(std::size_t a) {
  for (std::size_t j = 0; j < cols_; ++j) at(a, j) = -at(a, j);
}

void IntMatrix::negate_col(std::size_t a) {
  for (std::size_t i = 0; i < rows_; ++i) at(i, a) = -at(i, a);
}

bool IntMatrix::is_zero() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](const Int& x) { return x == 0; });
}

Int det(const IntMatrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("det of non-square");
  std::size_t n = a.rows();
  if (n == 0) return 1;
  IntMatrix m = a;
  Int prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m.at(k, k) == 0) {
      std::size_t swap = n;
      for (std::size_t i = k + 1; i < n; ++i)
        if (m.at(i, k) != 0) {
          swap = i;
          break;
        }
      if (swap == n) return 0;
      m.swap_rows(k, swap);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j)
        m.at(i, j) = (m.at(i, j) * m.at(k, k) - m.at(i, k) * m.at(k, j)) / prev;
      m.at(i, k) = 0;
    }
    prev = m.at(k, k);
  }
  return sign * m.at(n - 1, n - 1);
}

std::size_t rank_of(const IntMatrix& a) {
  IntMatrix m = a;
  std::size_t rows = m.rows(), cols = m.cols();
  std::size_t r = 0;
  Int prev = 1;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t pivot = rows;
    for (std::size_t i = r; i < rows; ++i)
      if (m.at(i, c) != 0) {
        pivot = i;
        break;
      }
    if (pivot == rows) continue;
    m.swap_rows(r, pivot);
    for (std::size_t i = r + 1; i < rows; ++i) {
      for (std::size_t j = c + 1; j < cols; ++j)
        m.at(i, j) = (m.at(i, j) * m.at(r, c) - m.at(i, c) * m.at(r, j)) / prev;
      m.at(i, c) = 0;
    }
    prev = m.at(r, c);
    ++r;
  }
  return r;
}

HermiteForm hermite_normal_form(const IntMatrix& a) {
  HermiteForm f{a, IntMatrix::identity(a.rows()), {}};
  IntMatrix& h = f.h;
  IntMatrix& u = f.u;
  std::size_t rows = h.rows(), cols = h.cols();
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    // Euclid in column c over rows >= r until one nonzero entry remains.
    while (true) {
      std::size_t best = rows;
      for (std::size_t i = r; i < rows; ++i)
        if (h.at(i, c) != 0 &&
            (best == rows || abs_int(h.at(i, c)) < abs_int(h.at(best, c))))
          best = i;
      if (best == rows) break;
      h.swap_rows(r, best);
      u.swap_rows(r, best);
      bool clean = true;
      for (std::size_t i = r + 1; i < rows; ++i) {
        if (h.at(i, c) == 0) continue;
        Int q = h.at(i, c) / h.at(r, c);
        h.add_row(i, r, -q);
        u.add_row(i, r, -q);
        if (h.at(i, c) != 0) clean = false;
      }
      if (clean) break;
    }
    if (h.at(r, c) == 0) continue;
    if (h.at(r, c) < 0) {
      h.negate_row(r);
      u.negate_row(r);
    }
    for (std::size_t i = 0; i < r; ++i) {
      Int q = floor_div(h.at(i, c), h.at(r, c));
      h.add_row(i, r, -q);
      u.add_row(i, r, -q);
    }
    f.pivot_cols.push_back(c);
    ++r;
  }
  return f;
}

SmithForm smith_normal_form(const IntMatrix& a) {
  SmithForm s{IntMatrix::identity(a.rows()), a, IntMatrix::identity(a.cols()),
              {}};
  IntMatrix& d = s.d;
  IntMatrix& u = s.u;
  IntMatrix& v = s.v;
  std::size_t rows = d.rows(), cols = d.cols();
  std::size_t t = 0;
  while (t < rows && t < cols) {
    // Pick the nonzero entry of least absolute value as pivot.
    std::size_t pr = rows, pc = cols;
    for (std::size_t i = t; i < rows; ++i)
      for (std::size_t j = t; j < cols; ++j)
        if (d.at(i, j) != 0 &&
            (pr == rows || abs_int(d.at(i, j)) < abs_int(d.at(pr, pc)))) {
          pr = i;
          pc = j;
        }
    if (pr == rows) break;
    d.swap_rows(t, pr);
    u.swap_rows(t, pr);
    d.swap_cols(t, pc);
    v.swap_cols(t, pc);

    // Clear row t and column t; restart whenever a smaller remainder shows up.
    while (true) {
      bool swapped = false;
      for (std::size_t i = t + 1; i < rows && !swapped; ++i) {
        if (d.at(i, t) == 0) continue;
        Int q = d.at(i, t) / d.at(t, t);
        d.add_row(i, t, -q);
        u.add_row(i, t, -q);
        if (d.at(i, t) != 0) {
          d.swap_rows(t, i);
          u.swap_rows(t, i);
          swapped = true;
        }
      }
      if (swapped) continue;
      for (std::size_t j = t + 1; j < cols && !swapped; ++j) {
        if (d.at(t, j) == 0) continue;
        Int q = d.at(t, j) / d.at(t, t);
        d.add_col(j, t, -q);
        v.add_col(j, t, -q);
        if (d.at(t, j) != 0) {
          d.swap_cols(t, j);
          v.swap_cols(t, j);
          swapped = true;
        }
      }
      if (swapped) continue;

      // Row and column are clear; enforce divisibility of the residue block.
      bool fixed = false;
      for (std::size_t i = t + 1; i < rows && !fixed; ++i)
        for (std::size_t j = t + 1; j < cols && !fixed; ++j)
          if (d.at(i, j) % d.at(t, t) != 0) {
            d.add_row(t, i, 1);
            u.add_row(t, i, 1);
            fixed = true;
          }
      if (!fixed) break;
    }
    if (d.at(t, t) < 0) {
      d.negate_row(t);
      u.negate_row(t);
    }
    ++t;
  }
  for (std::size_t i = 0; i < t; ++i) s.divisors.push_back(d.at(i, i));
  return s;
}

bool smith_is_certified(const IntMatrix& a, const SmithForm& s) {
  if (s.u * a * s.v != s.d) return false;
  Int du = det(s.u), dv = det(s.v);
  if (du != 1 && du != -1) return false;
  if (dv != 1 && dv != -1) return false;
  for (std::size_t i = 0; i < s.d.rows(); ++i)
    for (std::size_t j = 0; j < s.d.cols(); ++j)
      if (i != j && s.d.at(i, j) != 0) return false;
  for (std::size_t i = 0; i < s.divisors.size(); ++i) {
    if (s.divisors[i] <= 0) return false;
    if (s.d.at(i, i) != s.divisors[i]) return false;
    if (i + 1 < s.divisors.size() && s.divisors[i + 1] % s.divisors[i] != 0)
      return false;
  }
  for (std::size_t i = s.divisors.size();
       i < std::min(s.d.rows(), s.d.cols()); ++i)
    if (s.d.at(i, i) != 0) return false;
  return true;
}

std::size_t ZComplex::add_gen(std::string name, long long h, long long q2) {
  gens_.push_back(Gen{std::move(name), h, q2});
  return gens_.size() - 1;
}

void ZComplex::add_diff(std::size_t from, std::size_t to, const Int& coeff) {
  if (from >= gens_.size() || to >= gens_.size())
    throw std::out_of_range("generator index");
  auto key = std::make_pair(from, to);
  auto it = diff_.find(key);
  if (it == diff_.end()) {
    if (coeff != 0) diff_.emplace(key, coeff);
  } else {
    it->second += coeff;
    if (it->second == 0) diff_.erase(it);
  }
}

Int ZComplex::diff_coeff(std::size_t from, std::size_t to) const {
  auto it = diff_.find({from, to});
  return it == diff_.end() ? Int(0) : it->second;
}

bool ZComplex::is_valid(std::string* why) const {
  for (const auto& [key, coeff] : diff_) {
    const Gen& a = gens_[key.first];
    const Gen& b = gens_[key.second];
    if (coeff == 0) continue;
    if (b.h != a.h + 1 || b.q2 != a.q2) {
      if (why)
        *why = "arrow " + a.name + " -> " + b.name + " violates bigrading";
      return false;
    }
  }
  // d(d(x)) per source generator.
  std::map<std::size_t, std::vector<std::pair<std::size_t, Int>>> out;
  for (const auto& [key, coeff] : diff_)
    out[key.first].emplace_back(key.second, coeff);
  for (const auto& [src, arrows] : out) {
    std::map<std::size_t, Int> acc;
    for (const auto& [mid, c1] : arrows) {
      auto it = out.find(mid);
      if (it == out.end()) continue;
      for (const auto& [dst, c2] : it->second) acc[dst] += c1 * c2;
    }
    for (const auto& [dst, c] : acc)
      if (c != 0) {
        if (why)
          *why = "d^2 != 0 from " + gens_[src].name + " to " +
                 gens_[dst].name;
        return false;
      }
  }
  return true;
}

BigradedHomology::BigradedHomology(std::vector<HomologyGroup> groups)
    : groups_(std::move(groups)) {
  std::sort(groups_.begin(), groups_.end(),
            [](const HomologyGroup& a, const HomologyGroup& b) {
              return std::tie(a.h, a.q2) < std::tie(b.h, b.q2);
            });
  std::erase_if(groups_, [](const HomologyGroup& g) {
    return g.free_rank == 0 && g.torsion.empty();
  });
}

std::string BigradedHomology::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& g : groups_) {
    nlohmann::json entry;
    entry["h"] = g.h;
    if (g.q2 % 2 == 0)
      entry["q"] = g.q2 / 2;
    else
      entry["q"] = static_cast<double>(g.q2) / 2.0;
    entry["free"] = g.free_rank;
    nlohmann::json tor = nlohmann::json::array();
    for (const Int& t : g.torsion) tor.push_back(t.convert_to<long long>());
    entry["torsion"] = tor;
    arr.push_back(entry);
  }
  return arr.dump();
}

std::string BigradedHomology::to_table() const {
  std::ostringstream os;
  for (const auto& g : groups_) {
    os << "h=" << g.h << " q=";
    if (g.q2 % 2 == 0)
      os << g.q2 / 2;
    else
      os << static_cast<double>(g.q2) / 2.0;
    os << " free=" << g.free_rank << " torsion=[";
    for (std::size_t i = 0; i < g.torsion.size(); ++i)
      os << (i ? "," : "") << g.torsion[i];
    os << "]\n";
  }
  return os.str();
}

BigradedHomology homology(const ZComplex& c) {
  std::string why;
  if (!c.is_valid(&why)) throw std::invalid_argument("invalid complex: " + why);

  // Slot generators per (q2, h).
  std::map<long long, std::map<long long, std::vector<std::size_t>>> pieces;
  for (std::size_t i = 0; i < c.size(); ++i)
    pieces[c.gen(i).q2][c.gen(i).h].push_back(i);

  std::vector<HomologyGroup> groups;
  for (const auto& [q2, by_h] : pieces) {
    std::map<std::size_t, std::size_t> slot;  // gen index -> slot in its h row
    for (const auto& [h, gens] : by_h)
      for (std::size_t s = 0; s < gens.size(); ++s) slot[gens[s]] = s;

    auto dim = [&](long long h) -> std::size_t {
      auto it = by_h.find(h);
      return it == by_h.end() ? 0 : it->second.size();
    };
    // Matrix of d: C_h -> C_{h+1}; rows = targets, cols = sources.
    auto boundary = [&](long long h) -> IntMatrix {
      IntMatrix m(dim(h + 1), dim(h));
      auto it = by_h.find(h);
      if (it == by_h.end()) return m;
      for (std::size_t j = 0; j < it->second.size(); ++j) {
        std::size_t src = it->second[j];
        for (const auto& [key, coeff] : c.diff()) {
          if (key.first != src) continue;
          if (c.gen(key.second).q2 != q2) continue;
          m.at(slot[key.second], j) = coeff;
        }
      }
      return m;
    };

    for (const auto& [h, gens] : by_h) {
      SmithForm out = smith_normal_form(boundary(h));
      SmithForm in = smith_normal_form(boundary(h - 1));
      HomologyGroup g;
      g.h = h;
      g.q2 = q2;
      g.free_rank = static_cast<long long>(gens.size()) -
                    static_cast<long long>(out.rank()) -
                    static_cast<long long>(in.rank());
      for (const Int& divisor : in.divisors)
        if (divisor > 1) g.torsion.push_back(divisor);
      groups.push_back(std::move(g));
    }
  }
  return BigradedHomology(std::move(groups));
}

bool complexes_equal_under_identification(
    const ZComplex& c1, const ZComplex& c2,
    const std::vector<std::size_t>& bijection, bool negate_intrinsic) {
  if (bijection.size() != c1.size() || c1.size() != c2.size())
    throw std::invalid_argument("bijection not total");
  std::vector<bool> hit(c2.size(), false);
  for (std::size_t i = 0; i < c1.size(); ++i) {
    if (bijection[i] >= c2.size() || hit[bijection[i]])
      throw std::invalid_argument("bijection not total");
    hit[bijection[i]] = true;
  }
  for (std::size_t i = 0; i < c1.size(); ++i) {
    const auto& a = c1.gen(i);
    const auto& b = c2.gen(bijection[i]);
    long long q2 = negate_intrinsic ? -a.q2 : a.q2;
    if (a.h != b.h || q2 != b.q2) return false;
  }
  if (c1.diff().size() != c2.diff().size()) return false;
  for (const auto& [key, coeff] : c1.diff())
    if (c2.diff_coeff(bijection[key.first], bijection[key.second]) != coeff)
      return false;
  return true;
}

}  // namespace bkh
