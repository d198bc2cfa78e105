#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mertens/matrix.hpp"

namespace mertens {

inline constexpr double kSingularPivot = 1e-300;
inline constexpr double kEigenResidualTol = 1e-10;

/// PA = LU with partial pivoting. Unit-lower L and U share `packed`.
class LuFactorization {
 public:
  std::size_t dim() const noexcept { return packed_.rows(); }
  const Matrix& packed() const noexcept { return packed_; }
  /// perm[i] is the row of A that ended up in row i of PA.
  std::span<const std::size_t> permutation() const noexcept { return perm_; }

  Matrix lower() const;
  Matrix upper() const;
  Matrix permutation_matrix() const;

 private:
  friend LuFactorization lu_factor(const Matrix&);
  Matrix packed_;
  std::vector<std::size_t> perm_;
};

/// Ties between equal-magnitude pivot candidates go to the smallest row index.
/// Throws SingularMatrixError when a pivot column is all below kSingularPivot.
LuFactorization lu_factor(const Matrix& a);
inline LuFactorization lu_factor(const SymmetricMatrix& a) { return lu_factor(a.matrix()); }

std::vector<double> solve(const LuFactorization& lu, std::span<const double> b);
Matrix solve(const LuFactorization& lu, const Matrix& b);

/// Eigenpairs ordered by decreasing |lambda| (signed values kept; among equal
/// magnitudes the positive one first). Each eigenvector has its largest-magnitude
/// entry made positive, ties resolved toward the lowest index.
struct SpectrumResult {
  std::size_t dim = 0;
  std::vector<double> eigenvalues;
  Matrix eigenvectors;  // dim x eigenvalues.size(), column k pairs with eigenvalues[k]
  std::vector<double> residuals;

  double residual_max() const noexcept;
};

/// Full symmetric eigendecomposition truncated to top_k. Throws ConvergenceError
/// if the QR iteration does not converge, DomainError if top_k > dim.
SpectrumResult sym_eig(const SymmetricMatrix& a, std::size_t top_k);

/// Eigenvalues only, ascending.
std::vector<double> sym_eigenvalues(const SymmetricMatrix& a);

double spectral_norm(const SymmetricMatrix& a);
double frobenius_norm(const Matrix& a);
inline double frobenius_norm(const SymmetricMatrix& a) { return frobenius_norm(a.matrix()); }

}  // namespace mertens
