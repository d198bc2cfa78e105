#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace mertens {

inline constexpr std::uint64_t kDefaultMaxSieveLimit = 100'000'000;

/// Möbius values and Mertens prefix sums on 1..limit.
///
/// Immutable after construction; concurrent reads are safe.
class MertensTable {
 public:
  std::uint64_t limit() const noexcept { return limit_; }

  /// mu(m) for 1 <= m <= limit.
  int mu(std::uint64_t m) const;

  /// M(m) for 0 <= m <= limit, with M(0) = 0.
  std::int64_t mertens(std::uint64_t m) const;

  /// Raw values; index 0 holds the M(0) = 0 / mu(0) = 0 sentinel.
  std::span<const std::int8_t> mu_values() const noexcept { return mu_; }
  std::span<const std::int32_t> mertens_values() const noexcept { return mertens_; }

 private:
  friend MertensTable build_mertens_table(std::uint64_t, std::uint64_t);
  std::uint64_t limit_ = 0;
  std::vector<std::int8_t> mu_;
  std::vector<std::int32_t> mertens_;
};

/// Linear sieve. Throws CapacityError when limit > max_limit, DomainError when limit == 0.
MertensTable build_mertens_table(std::uint64_t limit,
                                 std::uint64_t max_limit = kDefaultMaxSieveLimit);

/// M(n) by a segmented sieve holding only O(sqrt n) primes plus one block.
std::int64_t mertens_at(std::uint64_t n, std::uint64_t max_limit = kDefaultMaxSieveLimit);

/// Table lookup when n is covered, segmented sieve otherwise.
std::int64_t mertens_at(std::uint64_t n, const MertensTable& table,
                        std::uint64_t max_limit = kDefaultMaxSieveLimit);

std::uint64_t isqrt(std::uint64_t n) noexcept;

/// Distinct values floor(n/k), 1 <= k <= n, with the small/large split.
struct DivisorValueSet {
  std::uint64_t n = 0;
  std::uint64_t root = 0;               // floor(sqrt n)
  std::vector<std::uint64_t> values;    // strictly increasing
  std::vector<std::uint64_t> s_minus;   // 1..root
  std::vector<std::uint64_t> s_plus;    // floor(n/j), j = 1..root, increasing

  std::size_t size() const noexcept { return values.size(); }

  /// Position of value in `values`; throws DomainError when absent.
  std::size_t index_of(std::uint64_t value) const;
};

DivisorValueSet divisor_value_set(std::uint64_t n);

}  // namespace mertens
