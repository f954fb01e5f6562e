#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hardyop {

using u64 = std::uint64_t;

// Raised when an enumeration or lattice would exceed its representation.
class CapacityError : public std::overflow_error {
  public:
    using std::overflow_error::overflow_error;
};

bool is_prime(u64 n);

// Finite, strictly increasing set of primes.
class PrimeSupport {
  public:
    PrimeSupport() = default;
    explicit PrimeSupport(std::vector<u64> primes);

    const std::vector<u64>& primes() const { return primes_; }
    std::size_t size() const { return primes_.size(); }
    bool empty() const { return primes_.empty(); }
    u64 prime(std::size_t i) const { return primes_.at(i); }
    double log_prime(std::size_t i) const { return logs_.at(i); }
    bool contains(u64 p) const;
    std::size_t position(u64 p) const;
    // true if no prime of the support divides n
    bool coprime(u64 n) const;

    bool operator==(const PrimeSupport& o) const { return primes_ == o.primes_; }

  private:
    std::vector<u64> primes_;
    std::vector<double> logs_;
};

// n = prod p_i^exps[i]; exps has one entry per prime of the support.
struct SmoothIndex {
    std::vector<std::uint32_t> exps;

    auto operator<=>(const SmoothIndex&) const = default;
    bool is_one() const;
};

SmoothIndex unit_index(const PrimeSupport& support);
std::optional<SmoothIndex> factor_over(const PrimeSupport& support, u64 n);
SmoothIndex to_index(const PrimeSupport& support, u64 n);
std::optional<u64> index_value(const PrimeSupport& support, const SmoothIndex& idx);
double index_log(const PrimeSupport& support, const SmoothIndex& idx);
SmoothIndex index_product(const SmoothIndex& a, const SmoothIndex& b);
SmoothIndex index_power(const SmoothIndex& a, std::uint32_t c);
bool index_divides(const SmoothIndex& a, const SmoothIndex& b);
// b / a, assuming a | b
SmoothIndex index_quotient(const SmoothIndex& b, const SmoothIndex& a);
std::string index_string(const PrimeSupport& support, const SmoothIndex& idx);

// Upper limit on indices: either an exact integer N or a bound on log n.
class IndexBound {
  public:
    static IndexBound at_most(u64 n);
    static IndexBound log_at_most(double log_n);

    std::optional<u64> exact() const { return exact_; }
    double log_limit() const { return log_; }
    bool admits(double log_m, std::optional<u64> value) const;
    bool admits(const PrimeSupport& support, const SmoothIndex& idx) const;
    // bound scaled by a factor e^{log_factor} (exact when possible)
    IndexBound widened(double log_factor) const;

  private:
    IndexBound(std::optional<u64> exact, double log) : exact_(exact), log_(log) {}
    std::optional<u64> exact_;
    double log_ = 0.0;
};

struct SmoothIndexList {
    PrimeSupport support;
    u64 bound = 1;
    std::vector<u64> indices;
};

SmoothIndexList enumerate_smooth(const PrimeSupport& support, u64 N,
                                 std::size_t max_count = std::size_t(1) << 28);
std::vector<u64> enumerate_coprime(const PrimeSupport& support, u64 J,
                                   std::size_t max_count = std::size_t(1) << 28);
double partial_zeta(const PrimeSupport& support, double nu);

// checked arithmetic
std::optional<u64> mul_checked(u64 a, u64 b);
std::optional<u64> pow_checked(u64 base, std::uint32_t e);

}  // namespace hardyop
