#include "mertens/rational.hpp"

#include <cmath>
#include <string>

#include "mertens/errors.hpp"

namespace mertens {

RationalMatrix RationalMatrix::from_integer_matrix(const Matrix& m) {
  if (!m.is_square()) throw DomainError("rational matrix must be square");
  RationalMatrix r(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      const double v = m(i, j);
      if (v != std::floor(v) || std::abs(v) > 9.007199254740992e15) {
        throw DomainError("entry (" + std::to_string(i) + "," + std::to_string(j) +
                          ") is not an exactly representable integer");
      }
      r(i, j) = mpq_class(mpz_class(static_cast<long>(v)));
    }
  }
  return r;
}

RationalSolution rational_solve(const RationalMatrix& a, const std::vector<mpq_class>& b) {
  const std::size_t n = a.dim();
  if (n > kRationalMaxDim) {
    throw CapacityError("rational solve limited to dim " + std::to_string(kRationalMaxDim));
  }
  if (b.size() != n) throw DomainError("right-hand side has wrong length");
  if (n == 0) return {{}, mpq_class(1)};

  // Scale each row of [A | b] to integers; the solution is unchanged and the
  // determinant picks up the product of the scales.
  std::vector<std::vector<mpz_class>> rows(n, std::vector<mpz_class>(n + 1));
  mpz_class scale_product = 1;
  for (std::size_t i = 0; i < n; ++i) {
    mpz_class l = 1;
    for (std::size_t j = 0; j < n; ++j) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), a(i, j).get_den_mpz_t());
    mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), b[i].get_den_mpz_t());
    for (std::size_t j = 0; j < n; ++j) rows[i][j] = a(i, j).get_num() * (l / a(i, j).get_den());
    rows[i][n] = b[i].get_num() * (l / b[i].get_den());
    scale_product *= l;
  }

  int sign = 1;
  mpz_class previous = 1;
  for (std::size_t k = 0; k < n; ++k) {
    if (rows[k][k] == 0) {
      std::size_t swap_with = k + 1;
      while (swap_with < n && rows[swap_with][k] == 0) ++swap_with;
      if (swap_with == n) throw SingularMatrixError("exactly singular matrix");
      std::swap(rows[k], rows[swap_with]);
      sign = -sign;
    }
    const mpz_class& pivot = rows[k][k];
    for (std::size_t i = k + 1; i < n; ++i) {
      const mpz_class factor = rows[i][k];
      for (std::size_t j = k + 1; j <= n; ++j) {
        mpz_class t = rows[i][j] * pivot - factor * rows[k][j];
        mpz_divexact(rows[i][j].get_mpz_t(), t.get_mpz_t(), previous.get_mpz_t());
      }
      rows[i][k] = 0;
    }
    previous = pivot;
  }

  RationalSolution out;
  out.determinant = mpq_class(mpz_class(sign * rows[n - 1][n - 1]), scale_product);
  out.determinant.canonicalize();

  out.x.resize(n);
  for (std::size_t ii = n; ii-- > 0;) {
    mpq_class acc(rows[ii][n]);
    for (std::size_t j = ii + 1; j < n; ++j) acc -= mpq_class(rows[ii][j]) * out.x[j];
    out.x[ii] = acc / mpq_class(rows[ii][ii]);
  }
  return out;
}

mpq_class rational_solve_allones(const RationalMatrix& a) {
  const std::vector<mpq_class> ones(a.dim(), mpq_class(1));
  const auto solution = rational_solve(a, ones);
  mpq_class sum = 0;
  for (const auto& v : solution.x) sum += v;
  return sum;
}

}  // namespace mertens
