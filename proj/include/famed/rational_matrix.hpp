#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "famed/rational.hpp"

namespace famed {

struct DimensionMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Dense matrix of exact rationals. All arithmetic is exact; no floating
/// point enters any code path in this header.
class RationalMatrix {
 public:
  RationalMatrix() : rows_(0), cols_(0) {}
  RationalMatrix(int rows, int cols) : rows_(rows), cols_(cols), a_(size_t(rows) * cols) {}

  static RationalMatrix identity(int n) {
    RationalMatrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = Rational(1);
    return m;
  }
  static RationalMatrix from_long(const std::vector<std::vector<long>>& v) {
    const int r = int(v.size());
    const int c = r ? int(v[0].size()) : 0;
    RationalMatrix m(r, c);
    for (int i = 0; i < r; ++i) {
      if (int(v[i].size()) != c) throw DimensionMismatch("from_long: ragged rows");
      for (int j = 0; j < c; ++j) m(i, j) = Rational(v[i][j]);
    }
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  Rational& operator()(int i, int j) { return a_[size_t(i) * cols_ + j]; }
  const Rational& operator()(int i, int j) const { return a_[size_t(i) * cols_ + j]; }

  friend bool operator==(const RationalMatrix& x, const RationalMatrix& y) {
    if (x.rows_ != y.rows_ || x.cols_ != y.cols_) return false;
    for (size_t k = 0; k < x.a_.size(); ++k)
      if (x.a_[k] != y.a_[k]) return false;
    return true;
  }
  friend bool operator!=(const RationalMatrix& x, const RationalMatrix& y) { return !(x == y); }

  friend RationalMatrix operator*(const RationalMatrix& x, const RationalMatrix& y) {
    if (x.cols_ != y.rows_) throw DimensionMismatch("matrix product shape");
    RationalMatrix r(x.rows_, y.cols_);
    for (int i = 0; i < x.rows_; ++i)
      for (int k = 0; k < x.cols_; ++k) {
        if (x(i, k).is_zero()) continue;
        for (int j = 0; j < y.cols_; ++j) {
          if (y(k, j).is_zero()) continue;
          r(i, j) += x(i, k) * y(k, j);
        }
      }
    return r;
  }
  friend RationalMatrix operator+(const RationalMatrix& x, const RationalMatrix& y) {
    if (x.rows_ != y.rows_ || x.cols_ != y.cols_) throw DimensionMismatch("matrix sum shape");
    RationalMatrix r(x.rows_, x.cols_);
    for (size_t k = 0; k < x.a_.size(); ++k) r.a_[k] = x.a_[k] + y.a_[k];
    return r;
  }
  friend RationalMatrix operator-(const RationalMatrix& x, const RationalMatrix& y) {
    if (x.rows_ != y.rows_ || x.cols_ != y.cols_) throw DimensionMismatch("matrix diff shape");
    RationalMatrix r(x.rows_, x.cols_);
    for (size_t k = 0; k < x.a_.size(); ++k) r.a_[k] = x.a_[k] - y.a_[k];
    return r;
  }

  RationalMatrix scaled(const Rational& s) const {
    RationalMatrix r(rows_, cols_);
    for (size_t k = 0; k < a_.size(); ++k) r.a_[k] = a_[k] * s;
    return r;
  }

  RationalMatrix transpose() const {
    RationalMatrix r(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
    return r;
  }

  RationalMatrix block(int i0, int j0, int nr, int nc) const {
    RationalMatrix r(nr, nc);
    for (int i = 0; i < nr; ++i)
      for (int j = 0; j < nc; ++j) r(i, j) = (*this)(i0 + i, j0 + j);
    return r;
  }

  static RationalMatrix hcat(const RationalMatrix& x, const RationalMatrix& y) {
    if (x.rows_ != y.rows_) throw DimensionMismatch("hcat row counts");
    RationalMatrix r(x.rows_, x.cols_ + y.cols_);
    for (int i = 0; i < x.rows_; ++i) {
      for (int j = 0; j < x.cols_; ++j) r(i, j) = x(i, j);
      for (int j = 0; j < y.cols_; ++j) r(i, x.cols_ + j) = y(i, j);
    }
    return r;
  }
  static RationalMatrix vcat(const RationalMatrix& x, const RationalMatrix& y) {
    if (x.cols_ != y.cols_) throw DimensionMismatch("vcat col counts");
    RationalMatrix r(x.rows_ + y.rows_, x.cols_);
    for (int i = 0; i < x.rows_; ++i)
      for (int j = 0; j < x.cols_; ++j) r(i, j) = x(i, j);
    for (int i = 0; i < y.rows_; ++i)
      for (int j = 0; j < x.cols_; ++j) r(x.rows_ + i, j) = y(i, j);
    return r;
  }

  bool is_zero() const {
    for (const auto& v : a_)
      if (!v.is_zero()) return false;
    return true;
  }

  std::string str() const {
    std::string s;
    for (int i = 0; i < rows_; ++i) {
      s += i == 0 ? "[" : " ";
      for (int j = 0; j < cols_; ++j) {
        s += (*this)(i, j).str();
        if (j + 1 < cols_) s += " ";
      }
      s += i + 1 < rows_ ? "\n" : "]";
    }
    return s;
  }

 private:
  int rows_, cols_;
  std::vector<Rational> a_;
};

/// Reduction to reduced row echelon form with the elementary-operation
/// product recorded: elem * input == rref holds exactly.
struct RrefWitness {
  RationalMatrix rref;
  RationalMatrix elem;       // invertible, product of the recorded row operations
  std::vector<int> pivots;   // pivot column per pivot row
  Rational det_elem;         // determinant of elem
  int rank() const { return int(pivots.size()); }
};

/// Gauss-Jordan with the pivot chosen as the first row carrying a nonzero
/// entry in the current column (deterministic, denominator growth is not a
/// concern at the sizes handled here).
inline RrefWitness rref_with_witness(const RationalMatrix& m) {
  RrefWitness w;
  w.rref = m;
  w.elem = RationalMatrix::identity(m.rows());
  w.det_elem = Rational(1);
  RationalMatrix& r = w.rref;
  RationalMatrix& e = w.elem;
  int pr = 0;
  for (int c = 0; c < m.cols() && pr < m.rows(); ++c) {
    int sel = -1;
    for (int i = pr; i < m.rows(); ++i)
      if (!r(i, c).is_zero()) {
        sel = i;
        break;
      }
    if (sel < 0) continue;
    if (sel != pr) {
      for (int j = 0; j < m.cols(); ++j) std::swap(r(sel, j), r(pr, j));
      for (int j = 0; j < m.rows(); ++j) std::swap(e(sel, j), e(pr, j));
      w.det_elem = -w.det_elem;
    }
    const Rational inv = r(pr, c).inverse();
    for (int j = 0; j < m.cols(); ++j) r(pr, j) *= inv;
    for (int j = 0; j < m.rows(); ++j) e(pr, j) *= inv;
    w.det_elem *= inv;
    for (int i = 0; i < m.rows(); ++i) {
      if (i == pr || r(i, c).is_zero()) continue;
      const Rational f = r(i, c);
      for (int j = 0; j < m.cols(); ++j) r(i, j) -= f * r(pr, j);
      for (int j = 0; j < m.rows(); ++j) e(i, j) -= f * e(pr, j);
    }
    w.pivots.push_back(c);
    ++pr;
  }
  return w;
}

inline int rank_of(const RationalMatrix& m) { return rref_with_witness(m).rank(); }
inline int nullity_of(const RationalMatrix& m) { return m.cols() - rank_of(m); }

inline bool row_equivalent(const RationalMatrix& a, const RationalMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionMismatch("row_equivalent: shapes differ");
  return rref_with_witness(a).rref == rref_with_witness(b).rref;
}

/// Invertible elem1, elem2 with elem1 * input * elem2 = [[Id_r, 0], [0, 0]].
struct TwoSidedWitness {
  RationalMatrix elem1;  // rows x rows
  RationalMatrix elem2;  // cols x cols
  int rank = 0;
};

/// When the input is invertible this degenerates to elem1 = input^{-1},
/// elem2 = Id, since Gauss-Jordan then leaves nothing for the column pass.
inline TwoSidedWitness two_sided_reduce(const RationalMatrix& m) {
  TwoSidedWitness w;
  RrefWitness rw = rref_with_witness(m);
  w.elem1 = rw.elem;
  w.rank = rw.rank();
  const int n = m.cols();
  w.elem2 = RationalMatrix::identity(n);
  RationalMatrix r = rw.rref;
  // Clear the non-pivot columns with column operations, then permute the
  // pivot columns to the front.
  for (int i = 0; i < w.rank; ++i) {
    const int pc = rw.pivots[i];
    for (int j = 0; j < n; ++j) {
      if (j == pc || r(i, j).is_zero()) continue;
      const Rational f = r(i, j);
      for (int k = 0; k < r.rows(); ++k) r(k, j) -= f * r(k, pc);
      for (int k = 0; k < n; ++k) w.elem2(k, j) -= f * w.elem2(k, pc);
    }
  }
  for (int i = 0; i < w.rank; ++i) {
    const int pc = rw.pivots[i];
    if (pc == i) continue;
    for (int k = 0; k < r.rows(); ++k) std::swap(r(k, i), r(k, pc));
    for (int k = 0; k < n; ++k) std::swap(w.elem2(k, i), w.elem2(k, pc));
    // keep later pivot bookkeeping consistent: pivots are increasing, so the
    // column that was at position i cannot itself be a pending pivot column
  }
  return w;
}

/// Basis of the rational kernel, one column vector per free column.
inline std::vector<std::vector<Rational>> kernel_basis(const RationalMatrix& m) {
  RrefWitness w = rref_with_witness(m);
  std::vector<bool> is_pivot(m.cols(), false);
  for (int c : w.pivots) is_pivot[c] = true;
  std::vector<std::vector<Rational>> basis;
  for (int free = 0; free < m.cols(); ++free) {
    if (is_pivot[free]) continue;
    std::vector<Rational> v(m.cols());
    v[free] = Rational(1);
    for (size_t i = 0; i < w.pivots.size(); ++i) v[w.pivots[i]] = -w.rref(int(i), free);
    basis.push_back(std::move(v));
  }
  return basis;
}

/// One rational solution of m x = b, or nullopt when inconsistent.
inline std::optional<std::vector<Rational>> solve_rational(const RationalMatrix& m,
                                                           const std::vector<Rational>& b) {
  if (int(b.size()) != m.rows()) throw DimensionMismatch("solve_rational rhs size");
  RationalMatrix aug(m.rows(), m.cols() + 1);
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) aug(i, j) = m(i, j);
    aug(i, m.cols()) = b[i];
  }
  RrefWitness w = rref_with_witness(aug);
  for (int c : w.pivots)
    if (c == m.cols()) return std::nullopt;
  std::vector<Rational> x(m.cols());
  for (size_t i = 0; i < w.pivots.size(); ++i) x[w.pivots[i]] = w.rref(int(i), m.cols());
  return x;
}

enum class IntegerSolveStatus { Solved, NoRationalSolution, NoIntegerSolution };

struct IntegerSolveResult {
  IntegerSolveStatus status = IntegerSolveStatus::NoRationalSolution;
  std::vector<Integer> x;
};

/// Integer solutions of m x = b for rational m, b: rows are scaled integral,
/// then a column Hermite reduction produces either a solution or an exact
/// divisibility obstruction.
inline IntegerSolveResult integer_solve(const RationalMatrix& m, const std::vector<Rational>& b) {
  if (int(b.size()) != m.rows()) throw DimensionMismatch("integer_solve rhs size");
  const int rows = m.rows(), cols = m.cols();
  // Scale each row by the lcm of its denominators (solution set unchanged).
  std::vector<std::vector<Integer>> A(rows, std::vector<Integer>(cols));
  std::vector<Integer> rhs(rows);
  for (int i = 0; i < rows; ++i) {
    Integer l(1);
    for (int j = 0; j < cols; ++j) l = Integer::lcm(l, m(i, j).den());
    l = Integer::lcm(l, b[i].den());
    const Rational s{l};
    for (int j = 0; j < cols; ++j) A[i][j] = (m(i, j) * s).num();
    rhs[i] = (b[i] * s).num();
  }
  // Column-style Hermite: U unimodular with A*U lower echelon.
  std::vector<std::vector<Integer>> U(cols, std::vector<Integer>(cols));
  for (int j = 0; j < cols; ++j) U[j][j] = Integer(1);
  auto col_combine = [&](int jk, int jl, const Integer& p, const Integer& q, const Integer& r,
                         const Integer& s) {
    // (col jk, col jl) <- (p*col jk + q*col jl, r*col jk + s*col jl)
    for (int i = 0; i < rows; ++i) {
      Integer nk = A[i][jk] * p + A[i][jl] * q;
      Integer nl = A[i][jk] * r + A[i][jl] * s;
      A[i][jk] = std::move(nk);
      A[i][jl] = std::move(nl);
    }
    for (int i = 0; i < cols; ++i) {
      Integer nk = U[i][jk] * p + U[i][jl] * q;
      Integer nl = U[i][jk] * r + U[i][jl] * s;
      U[i][jk] = std::move(nk);
      U[i][jl] = std::move(nl);
    }
  };
  int lead = 0;
  std::vector<std::pair<int, int>> pivot_at;  // (row, col) of echelon pivots
  for (int i = 0; i < rows && lead < cols; ++i) {
    int nz = -1;
    for (int j = lead; j < cols; ++j)
      if (!A[i][j].is_zero()) {
        nz = j;
        break;
      }
    if (nz < 0) continue;
    for (int j = nz + 1; j < cols; ++j) {
      if (A[i][j].is_zero()) continue;
      Integer s, t;
      Integer g = Integer::gcdext(A[i][nz], A[i][j], s, t);
      const Integer u = A[i][j].div_exact(g), v = A[i][nz].div_exact(g);
      // new col nz = s*nz + t*j carries g; new col j = -u*nz + v*j carries 0
      col_combine(nz, j, s, t, -u, v);
    }
    if (nz != lead) col_combine(lead, nz, Integer(0), Integer(1), Integer(1), Integer(0));
    pivot_at.emplace_back(i, lead);
    ++lead;
  }
  // Solve (A*U) y = rhs by forward substitution over the echelon columns.
  std::vector<Integer> y(cols);
  std::vector<bool> y_set(cols, false);
  IntegerSolveResult res;
  size_t pidx = 0;
  for (int i = 0; i < rows; ++i) {
    Integer acc(0);
    for (int j = 0; j < cols; ++j)
      if (y_set[j] && !A[i][j].is_zero()) acc += A[i][j] * y[j];
    Integer rem = rhs[i] - acc;
    if (pidx < pivot_at.size() && pivot_at[pidx].first == i) {
      const int pc = pivot_at[pidx].second;
      if (!rem.divisible_by(A[i][pc])) {
        // rationally consistent at this pivot, but no lattice point
        res.status = IntegerSolveStatus::NoIntegerSolution;
        return res;
      }
      y[pc] = rem.div_exact(A[i][pc]);
      y_set[pc] = true;
      ++pidx;
    } else if (!rem.is_zero()) {
      res.status = IntegerSolveStatus::NoRationalSolution;
      return res;
    }
  }
  res.status = IntegerSolveStatus::Solved;
  res.x.assign(cols, Integer(0));
  for (int i = 0; i < cols; ++i) {
    Integer acc(0);
    for (int j = 0; j < cols; ++j)
      if (y_set[j] && !U[i][j].is_zero()) acc += U[i][j] * y[j];
    res.x[i] = std::move(acc);
  }
  return res;
}

}  // namespace famed
