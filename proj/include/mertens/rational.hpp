#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <vector>

#include "mertens/matrix.hpp"

namespace mertens {

inline constexpr std::size_t kRationalMaxDim = 512;

/// Square matrix of exact rationals.
class RationalMatrix {
 public:
  explicit RationalMatrix(std::size_t dim) : dim_(dim), entries_(dim * dim) {}

  /// Exact conversion; throws DomainError if any entry is not an integer.
  static RationalMatrix from_integer_matrix(const Matrix& m);

  std::size_t dim() const noexcept { return dim_; }
  mpq_class& operator()(std::size_t i, std::size_t j) { return entries_[i * dim_ + j]; }
  const mpq_class& operator()(std::size_t i, std::size_t j) const {
    return entries_[i * dim_ + j];
  }

 private:
  std::size_t dim_;
  std::vector<mpq_class> entries_;
};

struct RationalSolution {
  std::vector<mpq_class> x;
  mpq_class determinant;
};

/// Solves A x = b exactly by Bareiss fraction-free elimination.
/// Throws SingularMatrixError when det A = 0, CapacityError when dim > kRationalMaxDim.
RationalSolution rational_solve(const RationalMatrix& a, const std::vector<mpq_class>& b);

/// u^T A^{-1} u for the all-ones vector u.
mpq_class rational_solve_allones(const RationalMatrix& a);

}  // namespace mertens
