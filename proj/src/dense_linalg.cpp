#include "mertens/dense_linalg.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mertens/errors.hpp"

namespace mertens {

namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<const RowMajor> as_eigen(const Matrix& m) {
  return {m.data().data(), static_cast<Eigen::Index>(m.rows()),
          static_cast<Eigen::Index>(m.cols())};
}

}  // namespace

Matrix LuFactorization::lower() const {
  const std::size_t n = dim();
  Matrix l(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) l(i, j) = packed_(i, j);
    l(i, i) = 1.0;
  }
  return l;
}

Matrix LuFactorization::upper() const {
  const std::size_t n = dim();
  Matrix u(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) u(i, j) = packed_(i, j);
  return u;
}

Matrix LuFactorization::permutation_matrix() const {
  const std::size_t n = dim();
  Matrix p(n, n);
  for (std::size_t i = 0; i < n; ++i) p(i, perm_[i]) = 1.0;
  return p;
}

LuFactorization lu_factor(const Matrix& a) {
  if (!a.is_square()) throw DomainError("LU factorization requires a square matrix");
  const std::size_t n = a.rows();
  LuFactorization lu;
  lu.packed_ = a;
  lu.perm_.resize(n);
  std::iota(lu.perm_.begin(), lu.perm_.end(), std::size_t{0});
  Matrix& m = lu.packed_;

  for (std::size_t k = 0; k < n; ++k) {
    std::size_t pivot = k;
    double best = std::abs(m(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      const double v = std::abs(m(i, k));
      if (v > best) {  // strict: keeps the smallest index on ties
        best = v;
        pivot = i;
      }
    }
    if (best < kSingularPivot) {
      throw SingularMatrixError("singular matrix: zero pivot column " + std::to_string(k));
    }
    if (pivot != k) {
      std::swap_ranges(m.row(k).begin(), m.row(k).end(), m.row(pivot).begin());
      std::swap(lu.perm_[k], lu.perm_[pivot]);
    }
    const double diag = m(k, k);
    auto rk = m.row(k);
    for (std::size_t i = k + 1; i < n; ++i) {
      auto ri = m.row(i);
      const double factor = ri[k] / diag;
      ri[k] = factor;
      if (factor == 0.0) continue;
      for (std::size_t j = k + 1; j < n; ++j) ri[j] -= factor * rk[j];
    }
  }
  return lu;
}

Matrix solve(const LuFactorization& lu, const Matrix& b) {
  const std::size_t n = lu.dim();
  if (b.rows() != n) throw DomainError("right-hand side has wrong row count");
  const Matrix& m = lu.packed();
  const std::size_t cols = b.cols();

  Matrix x(n, cols);
  for (std::size_t i = 0; i < n; ++i) {
    auto src = b.row(lu.permutation()[i]);
    std::copy(src.begin(), src.end(), x.row(i).begin());
  }
  for (std::size_t i = 0; i < n; ++i) {
    auto xi = x.row(i);
    for (std::size_t k = 0; k < i; ++k) {
      const double lik = m(i, k);
      if (lik == 0.0) continue;
      auto xk = x.row(k);
      for (std::size_t j = 0; j < cols; ++j) xi[j] -= lik * xk[j];
    }
  }
  for (std::size_t ii = n; ii-- > 0;) {
    auto xi = x.row(ii);
    for (std::size_t k = ii + 1; k < n; ++k) {
      const double uik = m(ii, k);
      if (uik == 0.0) continue;
      auto xk = x.row(k);
      for (std::size_t j = 0; j < cols; ++j) xi[j] -= uik * xk[j];
    }
    const double diag = m(ii, ii);
    for (std::size_t j = 0; j < cols; ++j) xi[j] /= diag;
  }
  return x;
}

std::vector<double> solve(const LuFactorization& lu, std::span<const double> b) {
  Matrix rhs(b.size(), 1);
  std::copy(b.begin(), b.end(), rhs.data().begin());
  Matrix x = solve(lu, rhs);
  return {x.data().begin(), x.data().end()};
}

double SpectrumResult::residual_max() const noexcept {
  double worst = 0.0;
  for (double r : residuals) worst = std::max(worst, r);
  return worst;
}

SpectrumResult sym_eig(const SymmetricMatrix& a, std::size_t top_k) {
  const std::size_t n = a.dim();
  if (top_k > n) {
    throw DomainError("top_k " + std::to_string(top_k) + " exceeds dimension " +
                      std::to_string(n));
  }
  Eigen::MatrixXd dense = as_eigen(a.matrix());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(dense, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    throw ConvergenceError("symmetric eigensolver did not converge (dim " + std::to_string(n) +
                           ")");
  }
  const Eigen::VectorXd& values = solver.eigenvalues();
  const Eigen::MatrixXd& vectors = solver.eigenvectors();

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    const double ax = std::abs(values[x]);
    const double ay = std::abs(values[y]);
    if (ax != ay) return ax > ay;
    return values[x] > values[y];
  });

  SpectrumResult result;
  result.dim = n;
  result.eigenvalues.resize(top_k);
  result.eigenvectors = Matrix(n, top_k);
  result.residuals.resize(top_k);
  for (std::size_t k = 0; k < top_k; ++k) {
    const auto src = static_cast<Eigen::Index>(order[k]);
    Eigen::VectorXd v = vectors.col(src);
    Eigen::Index lead = 0;
    for (Eigen::Index i = 1; i < v.size(); ++i) {
      if (std::abs(v[i]) > std::abs(v[lead])) lead = i;
    }
    if (n > 0 && v[lead] < 0) v = -v;
    const double lambda = values[src];
    result.eigenvalues[k] = lambda;
    for (std::size_t i = 0; i < n; ++i) result.eigenvectors(i, k) = v[static_cast<Eigen::Index>(i)];
    result.residuals[k] = (dense * v - lambda * v).norm();
  }
  return result;
}

std::vector<double> sym_eigenvalues(const SymmetricMatrix& a) {
  Eigen::MatrixXd dense = as_eigen(a.matrix());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(dense, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw ConvergenceError("symmetric eigensolver did not converge (dim " +
                           std::to_string(a.dim()) + ")");
  }
  return {solver.eigenvalues().begin(), solver.eigenvalues().end()};
}

double spectral_norm(const SymmetricMatrix& a) {
  if (a.dim() == 0) return 0.0;
  const auto values = sym_eigenvalues(a);
  return std::max(std::abs(values.front()), std::abs(values.back()));
}

double frobenius_norm(const Matrix& a) {
  double sum = 0.0;
  for (double v : a.data()) sum += v * v;
  return std::sqrt(sum);
}

}  // namespace mertens
