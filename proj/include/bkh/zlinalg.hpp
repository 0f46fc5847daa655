#pragma once
// Exact integer linear algebra: fraction-free rank/determinant, Hermite and
// Smith normal forms with certified unimodular transforms, and bigraded
// homology of finite Z-complexes (free ranks plus torsion divisor chains).

#include <boost/multiprecision/cpp_int.hpp>

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace bkh {

using Int = boost::multiprecision::cpp_int;

class IntMatrix {
 public:
  IntMatrix() = default;
  IntMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols) {}

  static IntMatrix identity(std::size_t n) {
    IntMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Int& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const Int& at(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  bool operator==(const IntMatrix&) const = default;

  IntMatrix operator*(const IntMatrix& other) const;
  IntMatrix transposed() const;

  void swap_rows(std::size_t a, std::size_t b);
  void swap_cols(std::size_t a, std::size_t b);
  // row[a] += k * row[b]; col[a] += k * col[b]; scale by -1 only.
  void add_row(std::size_t a, std::size_t b, const Int& k);
  void add_col(std::size_t a, std::size_t b, const Int& k);
  void negate_row(std::size_t a);
  void negate_col(std::size_t a);

  bool is_zero() const;

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<Int> data_;
};

// Fraction-free (Bareiss) determinant; square matrices only.
Int det(const IntMatrix& a);

// Rank over Q (= rank over Z of the row lattice), fraction-free elimination.
std::size_t rank_of(const IntMatrix& a);

// Row-style Hermite normal form: U * A = H with U unimodular, H in row
// echelon form, pivots positive, entries above each pivot reduced into
// [0, pivot).  pivot_cols[i] is the column of row i's pivot.
struct HermiteForm {
  IntMatrix h;
  IntMatrix u;
  std::vector<std::size_t> pivot_cols;
  std::size_t rank() const { return pivot_cols.size(); }
};
HermiteForm hermite_normal_form(const IntMatrix& a);

// Smith normal form: U * A * V = D diagonal with d1 | d2 | ..., U and V
// unimodular.  divisors holds the nonzero diagonal entries.
struct SmithForm {
  IntMatrix u;
  IntMatrix d;
  IntMatrix v;
  std::vector<Int> divisors;
  std::size_t rank() const { return divisors.size(); }
};
SmithForm smith_normal_form(const IntMatrix& a);

// Re-multiplies U*A*V, checks diagonality, the divisor chain, and that
// det(U), det(V) are +-1.  Used by test builds on every call site.
bool smith_is_certified(const IntMatrix& a, const SmithForm& s);

// A finite bigraded Z-complex.  The differential raises h by exactly 1 and
// preserves q2 (the doubled intrinsic grading, kept doubled so half-integer
// gradings stay exact).
class ZComplex {
 public:
  struct Gen {
    std::string name;
    long long h = 0;
    long long q2 = 0;
  };

  std::size_t add_gen(std::string name, long long h, long long q2);
  void add_diff(std::size_t from, std::size_t to, const Int& coeff);

  std::size_t size() const { return gens_.size(); }
  const Gen& gen(std::size_t i) const { return gens_[i]; }
  const std::map<std::pair<std::size_t, std::size_t>, Int>& diff() const {
    return diff_;
  }
  Int diff_coeff(std::size_t from, std::size_t to) const;

  // Checks grading compatibility of every stored arrow and d(d(x)) = 0.
  bool is_valid(std::string* why = nullptr) const;

 private:
  std::vector<Gen> gens_;
  std::map<std::pair<std::size_t, std::size_t>, Int> diff_;
};

struct HomologyGroup {
  long long h = 0;
  long long q2 = 0;
  long long free_rank = 0;
  std::vector<Int> torsion;  // invariant factors > 1, divisor chain order

  bool operator==(const HomologyGroup&) const = default;
};

class BigradedHomology {
 public:
  explicit BigradedHomology(std::vector<HomologyGroup> groups = {});

  const std::vector<HomologyGroup>& groups() const { return groups_; }
  bool operator==(const BigradedHomology&) const = default;

  // One JSON array of {"h":..,"q":..,"free":..,"torsion":[..]} entries;
  // q is emitted as an integer when q2 is even, as an exact .5 value else.
  std::string to_json() const;
  std::string to_table() const;

 private:
  std::vector<HomologyGroup> groups_;  // sorted by (h, q2), trivial dropped
};

// Cohomological convention: H^h = ker(d: C_h -> C_{h+1}) / im(d: C_{h-1} -> C_h),
// computed per q2 via Smith normal form.  Throws if the complex is invalid.
BigradedHomology homology(const ZComplex& c);

// True iff the bijection i -> bijection[i] identifies the two complexes:
// names ignored, bigradings must match (with c1's q2 negated when
// negate_intrinsic is set) and all differential coefficients must be equal.
bool complexes_equal_under_identification(const ZComplex& c1,
                                          const ZComplex& c2,
                                          const std::vector<std::size_t>& bijection,
                                          bool negate_intrinsic);

}  // namespace bkh
