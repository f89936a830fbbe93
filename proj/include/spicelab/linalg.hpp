#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

namespace spicelab {

// Dense row-major matrix sized for cell-level MNA systems (tens of unknowns).
class DenseMatrix {
 public:
  explicit DenseMatrix(size_t n = 0) : n_(n), a_(n * n, 0.0) {}

  size_t size() const { return n_; }
  double& at(size_t r, size_t c) { return a_[r * n_ + c]; }
  double at(size_t r, size_t c) const { return a_[r * n_ + c]; }
  void clear() { std::fill(a_.begin(), a_.end(), 0.0); }

 private:
  size_t n_;
  std::vector<double> a_;
};

// In-place LU factorization with partial pivoting followed by solve.
// Returns the index of the first structurally singular column, if any.
inline std::optional<size_t> lu_solve(DenseMatrix& m, std::vector<double>& rhs) {
  const size_t n = m.size();
  std::vector<size_t> perm(n);
  for (size_t i = 0; i < n; ++i) perm[i] = i;

  for (size_t col = 0; col < n; ++col) {
    size_t pivot = col;
    double best = std::fabs(m.at(col, col));
    for (size_t r = col + 1; r < n; ++r) {
      double v = std::fabs(m.at(r, col));
      if (v > best) {
        best = v;
        pivot = r;
      }
    }
    if (!(best > 1e-300)) return col;
    if (pivot != col) {
      for (size_t c = 0; c < n; ++c) std::swap(m.at(pivot, c), m.at(col, c));
      std::swap(rhs[pivot], rhs[col]);
    }
    const double diag = m.at(col, col);
    for (size_t r = col + 1; r < n; ++r) {
      const double f = m.at(r, col) / diag;
      if (f == 0.0) continue;
      m.at(r, col) = 0.0;
      for (size_t c = col + 1; c < n; ++c) m.at(r, c) -= f * m.at(col, c);
      rhs[r] -= f * rhs[col];
    }
  }
  for (size_t ri = n; ri-- > 0;) {
    double acc = rhs[ri];
    for (size_t c = ri + 1; c < n; ++c) acc -= m.at(ri, c) * rhs[c];
    rhs[ri] = acc / m.at(ri, ri);
  }
  return std::nullopt;
}

}  // namespace spicelab
