#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mertens/matrix.hpp"
#include "mertens/sieve.hpp"

namespace mertens {

inline constexpr std::size_t kDefaultMaxDim = 4001;

/// Throws CapacityError when dim exceeds max_dim.
void check_dim(std::size_t dim, std::size_t max_dim);

/// Preconditioning vectors over S (ascending): d_k = sqrt(n)/k, w = d^{-1/2}, u = 1.
struct WeightVectors {
  std::vector<double> d;
  std::vector<double> w;
  std::vector<double> u;

  double w_norm_sq() const noexcept;
  /// Squared norm of w restricted to the small values 1..floor(sqrt n).
  double w_minus_norm_sq() const noexcept;
  std::size_t minus_count = 0;
};

/// Exact rational p/q with q > 0.
struct GridValue {
  std::uint64_t num;
  std::uint64_t den;
  double to_double() const noexcept {
    return static_cast<double>(num) / static_cast<double>(den);
  }
};

/// Samples of the profile f at i/(2r), i = 1..2r-1: r/i, then (2r-i)/r.
std::vector<GridValue> kernel_grid(std::uint64_t r);

/// U(i,j) = floor(n / (s_i s_j)) over S ascending.
SymmetricMatrix build_u(const DivisorValueSet& s, std::size_t max_dim = kDefaultMaxDim);

/// U(i,j) = floor(f(i/2r) f(j/2r)) for n = r^2, in exact integer arithmetic.
SymmetricMatrix build_u_kernel(std::uint64_t n, std::size_t max_dim = kDefaultMaxDim);

/// Ones on and above the antidiagonal: T(i,j) = 1 iff i + j <= dim - 1 (0-based).
SymmetricMatrix build_t(std::size_t dim);

SymmetricMatrix build_d(std::span<const double> d);

WeightVectors build_weights(const DivisorValueSet& s);

/// D^{-1/2} U D^{-1/2}.
SymmetricMatrix build_k(const SymmetricMatrix& u, std::span<const double> d);

/// D^{1/2} U^{-1} D^{1/2} from one LU factorization of U.
SymmetricMatrix build_k_inverse(const SymmetricMatrix& u, std::span<const double> d);

/// T U^{-1} T; the two products with T reduce to prefix sums.
SymmetricMatrix build_m(const SymmetricMatrix& u, const SymmetricMatrix& t);

/// All matrices of one perfect-square or general n, built once.
struct MatrixFamily {
  DivisorValueSet s;
  WeightVectors weights;
  SymmetricMatrix u;
  SymmetricMatrix t;
  SymmetricMatrix k;
  SymmetricMatrix k_inverse;
  SymmetricMatrix m;
};

MatrixFamily build_family(std::uint64_t n, std::size_t max_dim = kDefaultMaxDim);

}  // namespace mertens
