#include "mertens/sieve.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mertens/errors.hpp"

namespace mertens {

namespace {

void check_limit(std::uint64_t limit, std::uint64_t max_limit) {
  if (limit > max_limit) {
    throw CapacityError("sieve limit " + std::to_string(limit) + " exceeds configured maximum " +
                        std::to_string(max_limit));
  }
}

std::vector<std::uint32_t> primes_up_to(std::uint64_t bound) {
  std::vector<std::uint32_t> primes;
  if (bound < 2) return primes;
  std::vector<bool> composite(bound + 1, false);
  for (std::uint64_t p = 2; p <= bound; ++p) {
    if (composite[p]) continue;
    primes.push_back(static_cast<std::uint32_t>(p));
    for (std::uint64_t q = p * p; q <= bound; q += p) composite[q] = true;
  }
  return primes;
}

}  // namespace

std::uint64_t isqrt(std::uint64_t n) noexcept {
  if (n == 0) return 0;
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<long double>(n)));
  // compare by division so r near 2^32 cannot overflow
  while (r > n / r) --r;
  while (r + 1 <= n / (r + 1)) ++r;
  return r;
}

int MertensTable::mu(std::uint64_t m) const {
  if (m == 0 || m > limit_) {
    throw DomainError("mu index " + std::to_string(m) + " outside 1.." + std::to_string(limit_));
  }
  return mu_[m];
}

std::int64_t MertensTable::mertens(std::uint64_t m) const {
  if (m > limit_) {
    throw DomainError("mertens index " + std::to_string(m) + " beyond table limit " +
                      std::to_string(limit_));
  }
  return mertens_[m];
}

MertensTable build_mertens_table(std::uint64_t limit, std::uint64_t max_limit) {
  if (limit == 0) throw DomainError("sieve limit must be positive");
  check_limit(limit, max_limit);

  MertensTable table;
  table.limit_ = limit;
  table.mu_.assign(limit + 1, 0);
  table.mertens_.assign(limit + 1, 0);

  // Linear sieve: every composite is struck exactly once, by its least prime factor.
  std::vector<std::uint32_t> primes;
  std::vector<bool> composite(limit + 1, false);
  table.mu_[1] = 1;
  for (std::uint64_t i = 2; i <= limit; ++i) {
    if (!composite[i]) {
      primes.push_back(static_cast<std::uint32_t>(i));
      table.mu_[i] = -1;
    }
    for (std::uint32_t p : primes) {
      const std::uint64_t m = i * p;
      if (m > limit) break;
      composite[m] = true;
      if (i % p == 0) {
        table.mu_[m] = 0;
        break;
      }
      table.mu_[m] = static_cast<std::int8_t>(-table.mu_[i]);
    }
  }

  std::int32_t acc = 0;
  for (std::uint64_t i = 1; i <= limit; ++i) {
    acc += table.mu_[i];
    table.mertens_[i] = acc;
  }
  return table;
}

std::int64_t mertens_at(std::uint64_t n, std::uint64_t max_limit) {
  check_limit(n, max_limit);
  if (n == 0) return 0;

  const std::uint64_t root = isqrt(n);
  const auto primes = primes_up_to(root);
  const std::uint64_t block = std::max<std::uint64_t>(root, 1u << 15);

  std::vector<std::int8_t> mu(block);
  std::vector<std::uint64_t> rest(block);
  std::int64_t acc = 0;
  for (std::uint64_t lo = 1; lo <= n; lo += block) {
    const std::uint64_t hi = std::min(n, lo + block - 1);
    const std::size_t len = hi - lo + 1;
    std::fill_n(mu.begin(), len, 1);
    for (std::size_t i = 0; i < len; ++i) rest[i] = lo + i;

    for (std::uint64_t p : primes) {
      for (std::uint64_t m = ((lo + p - 1) / p) * p; m <= hi; m += p) {
        mu[m - lo] = static_cast<std::int8_t>(-mu[m - lo]);
        rest[m - lo] /= p;
      }
      const std::uint64_t p2 = p * p;
      if (p2 > hi) continue;
      for (std::uint64_t m = ((lo + p2 - 1) / p2) * p2; m <= hi; m += p2) mu[m - lo] = 0;
    }
    for (std::size_t i = 0; i < len; ++i) {
      // At most one prime factor above sqrt(n) survives.
      if (rest[i] > 1) mu[i] = static_cast<std::int8_t>(-mu[i]);
      acc += mu[i];
    }
  }
  return acc;
}

std::int64_t mertens_at(std::uint64_t n, const MertensTable& table, std::uint64_t max_limit) {
  if (n <= table.limit()) return table.mertens(n);
  return mertens_at(n, max_limit);
}

std::size_t DivisorValueSet::index_of(std::uint64_t value) const {
  auto it = std::lower_bound(values.begin(), values.end(), value);
  if (it == values.end() || *it != value) {
    throw DomainError(std::to_string(value) + " is not of the form floor(" + std::to_string(n) +
                      "/k)");
  }
  return static_cast<std::size_t>(it - values.begin());
}

DivisorValueSet divisor_value_set(std::uint64_t n) {
  if (n == 0) throw DomainError("divisor value set requires n >= 1");
  DivisorValueSet set;
  set.n = n;
  set.root = isqrt(n);
  set.s_minus.reserve(set.root);
  set.s_plus.reserve(set.root);
  for (std::uint64_t j = 1; j <= set.root; ++j) set.s_minus.push_back(j);
  for (std::uint64_t j = set.root; j >= 1; --j) set.s_plus.push_back(n / j);

  set.values = set.s_minus;
  // floor(n/root) == root exactly when the two halves share their middle element.
  auto first_plus = set.s_plus.begin();
  if (*first_plus == set.root) ++first_plus;
  set.values.insert(set.values.end(), first_plus, set.s_plus.end());
  return set;
}

}  // namespace mertens
