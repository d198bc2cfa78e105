#include "mertens/matrix_builder.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mertens/dense_linalg.hpp"
#include "mertens/errors.hpp"

namespace mertens {

namespace {

using u128 = unsigned __int128;

std::uint64_t require_square_root(std::uint64_t n) {
  const std::uint64_t r = isqrt(n);
  if (n == 0 || r * r != n) {
    throw DomainError(std::to_string(n) + " is not a positive perfect square");
  }
  return r;
}

void check_length(const SymmetricMatrix& a, std::span<const double> d) {
  if (a.dim() != d.size()) throw DomainError("weight vector length does not match matrix");
}

}  // namespace

void check_dim(std::size_t dim, std::size_t max_dim) {
  if (dim > max_dim) {
    throw CapacityError("matrix dimension " + std::to_string(dim) +
                        " exceeds configured maximum " + std::to_string(max_dim));
  }
}

double WeightVectors::w_norm_sq() const noexcept {
  double sum = 0.0;
  for (double x : w) sum += x * x;
  return sum;
}

double WeightVectors::w_minus_norm_sq() const noexcept {
  double sum = 0.0;
  for (std::size_t i = 0; i < minus_count; ++i) sum += w[i] * w[i];
  return sum;
}

std::vector<GridValue> kernel_grid(std::uint64_t r) {
  if (r == 0) throw DomainError("kernel grid needs r >= 1");
  std::vector<GridValue> grid;
  grid.reserve(2 * r - 1);
  for (std::uint64_t i = 1; i <= r; ++i) grid.push_back({r, i});
  for (std::uint64_t i = r + 1; i < 2 * r; ++i) grid.push_back({2 * r - i, r});
  return grid;
}

SymmetricMatrix build_u(const DivisorValueSet& s, std::size_t max_dim) {
  const std::size_t m = s.size();
  check_dim(m, max_dim);
  Matrix u(m, m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i; j < m; ++j) {
      const u128 denom = static_cast<u128>(s.values[i]) * s.values[j];
      const auto v = static_cast<double>(static_cast<std::uint64_t>(s.n / denom));
      u(i, j) = v;
      u(j, i) = v;
    }
  }
  return SymmetricMatrix::checked(std::move(u));
}

SymmetricMatrix build_u_kernel(std::uint64_t n, std::size_t max_dim) {
  const std::uint64_t r = require_square_root(n);
  const auto grid = kernel_grid(r);
  const std::size_t m = grid.size();
  check_dim(m, max_dim);
  Matrix u(m, m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i; j < m; ++j) {
      const u128 num = static_cast<u128>(grid[i].num) * grid[j].num;
      const u128 den = static_cast<u128>(grid[i].den) * grid[j].den;
      const auto v = static_cast<double>(static_cast<std::uint64_t>(num / den));
      u(i, j) = v;
      u(j, i) = v;
    }
  }
  return SymmetricMatrix::checked(std::move(u));
}

SymmetricMatrix build_t(std::size_t dim) {
  if (dim == 0) throw DomainError("T needs dim >= 1");
  Matrix t(dim, dim);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; i + j < dim; ++j) t(i, j) = 1.0;
  return SymmetricMatrix::checked(std::move(t));
}

SymmetricMatrix build_d(std::span<const double> d) {
  Matrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return SymmetricMatrix::checked(std::move(m));
}

WeightVectors build_weights(const DivisorValueSet& s) {
  const double root_n = std::sqrt(static_cast<double>(s.n));
  WeightVectors wv;
  wv.minus_count = s.s_minus.size();
  wv.d.reserve(s.size());
  wv.w.reserve(s.size());
  for (std::uint64_t v : s.values) {
    const double dk = root_n / static_cast<double>(v);
    wv.d.push_back(dk);
    wv.w.push_back(1.0 / std::sqrt(dk));
  }
  wv.u.assign(s.size(), 1.0);
  return wv;
}

SymmetricMatrix build_k(const SymmetricMatrix& u, std::span<const double> d) {
  check_length(u, d);
  const std::size_t m = u.dim();
  std::vector<double> root(m);
  for (std::size_t i = 0; i < m; ++i) root[i] = std::sqrt(d[i]);
  Matrix k(m, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) k(i, j) = u(i, j) / (root[i] * root[j]);
  return SymmetricMatrix::symmetrized(std::move(k));
}

SymmetricMatrix build_k_inverse(const SymmetricMatrix& u, std::span<const double> d) {
  check_length(u, d);
  const std::size_t m = u.dim();
  Matrix inv = solve(lu_factor(u), Matrix::identity(m));
  std::vector<double> root(m);
  for (std::size_t i = 0; i < m; ++i) root[i] = std::sqrt(d[i]);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) inv(i, j) *= root[i] * root[j];
  return SymmetricMatrix::symmetrized(std::move(inv));
}

SymmetricMatrix build_m(const SymmetricMatrix& u, const SymmetricMatrix& t) {
  if (u.dim() != t.dim()) throw DomainError("U and T dimensions differ");
  const std::size_t m = u.dim();
  if (!(t == build_t(m))) throw DomainError("T must be the antidiagonal ones pattern");
  const Matrix z = solve(lu_factor(u), Matrix::identity(m));

  // (Z T)(r, m-1-p) = sum_{i <= p} Z(r, i)
  Matrix zt(m, m);
  for (std::size_t r = 0; r < m; ++r) {
    double acc = 0.0;
    for (std::size_t p = 0; p < m; ++p) {
      acc += z(r, p);
      zt(r, m - 1 - p) = acc;
    }
  }
  // (T Y)(m-1-p, :) = sum_{i <= p} Y(i, :)
  Matrix out(m, m);
  std::vector<double> acc(m, 0.0);
  for (std::size_t p = 0; p < m; ++p) {
    auto yp = zt.row(p);
    for (std::size_t j = 0; j < m; ++j) acc[j] += yp[j];
    std::copy(acc.begin(), acc.end(), out.row(m - 1 - p).begin());
  }
  return SymmetricMatrix::symmetrized(std::move(out));
}

MatrixFamily build_family(std::uint64_t n, std::size_t max_dim) {
  MatrixFamily f;
  f.s = divisor_value_set(n);
  check_dim(f.s.size(), max_dim);
  f.weights = build_weights(f.s);
  f.u = build_u(f.s, max_dim);
  f.t = build_t(f.s.size());
  f.k = build_k(f.u, f.weights.d);
  f.k_inverse = build_k_inverse(f.u, f.weights.d);
  f.m = build_m(f.u, f.t);
  return f;
}

}  // namespace mertens
