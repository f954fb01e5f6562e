#include "hardyop/indexcore.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace hardyop {

namespace {

u64 mulmod(u64 a, u64 b, u64 m) {
    return static_cast<u64>((static_cast<unsigned __int128>(a) * b) % m);
}

u64 powmod(u64 a, u64 e, u64 m) {
    u64 r = 1;
    a %= m;
    while (e) {
        if (e & 1) r = mulmod(r, a, m);
        a = mulmod(a, a, m);
        e >>= 1;
    }
    return r;
}

}  // namespace

bool is_prime(u64 n) {
    if (n < 2) return false;
    static const u64 small[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
    for (u64 p : small) {
        if (n % p == 0) return n == p;
    }
    u64 d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    // these bases are deterministic below 3.3e24
    for (u64 a : small) {
        u64 x = powmod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int r = 1; r < s; ++r) {
            x = mulmod(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

std::optional<u64> mul_checked(u64 a, u64 b) {
    u64 r;
    if (__builtin_mul_overflow(a, b, &r)) return std::nullopt;
    return r;
}

std::optional<u64> pow_checked(u64 base, std::uint32_t e) {
    u64 r = 1;
    for (std::uint32_t i = 0; i < e; ++i) {
        auto next = mul_checked(r, base);
        if (!next) return std::nullopt;
        r = *next;
    }
    return r;
}

PrimeSupport::PrimeSupport(std::vector<u64> primes) : primes_(std::move(primes)) {
    for (std::size_t i = 0; i < primes_.size(); ++i) {
        if (!is_prime(primes_[i]))
            throw std::invalid_argument("PrimeSupport: " + std::to_string(primes_[i]) + " is not prime");
        if (i > 0 && primes_[i] <= primes_[i - 1])
            throw std::invalid_argument("PrimeSupport: primes must be strictly increasing");
        logs_.push_back(std::log(static_cast<double>(primes_[i])));
    }
}

bool PrimeSupport::contains(u64 p) const {
    return std::binary_search(primes_.begin(), primes_.end(), p);
}

std::size_t PrimeSupport::position(u64 p) const {
    auto it = std::lower_bound(primes_.begin(), primes_.end(), p);
    if (it == primes_.end() || *it != p)
        throw std::invalid_argument("prime " + std::to_string(p) + " not in support");
    return static_cast<std::size_t>(it - primes_.begin());
}

bool PrimeSupport::coprime(u64 n) const {
    for (u64 p : primes_)
        if (n % p == 0) return false;
    return true;
}

bool SmoothIndex::is_one() const {
    return std::all_of(exps.begin(), exps.end(), [](std::uint32_t e) { return e == 0; });
}

SmoothIndex unit_index(const PrimeSupport& support) {
    return SmoothIndex{std::vector<std::uint32_t>(support.size(), 0)};
}

std::optional<SmoothIndex> factor_over(const PrimeSupport& support, u64 n) {
    if (n == 0) throw std::invalid_argument("factor_over: n must be positive");
    SmoothIndex idx = unit_index(support);
    for (std::size_t i = 0; i < support.size() && n > 1; ++i) {
        u64 p = support.prime(i);
        while (n % p == 0) {
            n /= p;
            ++idx.exps[i];
        }
    }
    if (n != 1) return std::nullopt;
    return idx;
}

SmoothIndex to_index(const PrimeSupport& support, u64 n) {
    auto idx = factor_over(support, n);
    if (!idx) throw std::invalid_argument(std::to_string(n) + " does not factor over the support");
    return *idx;
}

std::optional<u64> index_value(const PrimeSupport& support, const SmoothIndex& idx) {
    u64 r = 1;
    for (std::size_t i = 0; i < idx.exps.size(); ++i) {
        auto pk = pow_checked(support.prime(i), idx.exps[i]);
        if (!pk) return std::nullopt;
        auto next = mul_checked(r, *pk);
        if (!next) return std::nullopt;
        r = *next;
    }
    return r;
}

double index_log(const PrimeSupport& support, const SmoothIndex& idx) {
    double s = 0.0;
    for (std::size_t i = 0; i < idx.exps.size(); ++i) s += idx.exps[i] * support.log_prime(i);
    return s;
}

SmoothIndex index_product(const SmoothIndex& a, const SmoothIndex& b) {
    if (a.exps.size() != b.exps.size()) throw std::invalid_argument("index_product: support mismatch");
    SmoothIndex r = a;
    for (std::size_t i = 0; i < r.exps.size(); ++i) r.exps[i] += b.exps[i];
    return r;
}

SmoothIndex index_power(const SmoothIndex& a, std::uint32_t c) {
    SmoothIndex r = a;
    for (auto& e : r.exps) e *= c;
    return r;
}

bool index_divides(const SmoothIndex& a, const SmoothIndex& b) {
    for (std::size_t i = 0; i < a.exps.size(); ++i)
        if (a.exps[i] > b.exps[i]) return false;
    return true;
}

SmoothIndex index_quotient(const SmoothIndex& b, const SmoothIndex& a) {
    SmoothIndex r = b;
    for (std::size_t i = 0; i < r.exps.size(); ++i) r.exps[i] -= a.exps[i];
    return r;
}

std::string index_string(const PrimeSupport& support, const SmoothIndex& idx) {
    if (auto v = index_value(support, idx)) return std::to_string(*v);
    std::ostringstream os;
    bool first = true;
    for (std::size_t i = 0; i < idx.exps.size(); ++i) {
        if (!idx.exps[i]) continue;
        if (!first) os << '*';
        os << support.prime(i) << '^' << idx.exps[i];
        first = false;
    }
    return os.str();
}

IndexBound IndexBound::at_most(u64 n) {
    if (n == 0) throw std::invalid_argument("IndexBound: bound must be positive");
    return IndexBound(n, std::log(static_cast<double>(n)));
}

IndexBound IndexBound::log_at_most(double log_n) {
    if (!(log_n >= 0.0) || !std::isfinite(log_n))
        throw std::invalid_argument("IndexBound: log bound must be finite and nonnegative");
    return IndexBound(std::nullopt, log_n);
}

bool IndexBound::admits(double log_m, std::optional<u64> value) const {
    if (exact_) {
        if (value) return *value <= *exact_;
        return false;
    }
    return log_m <= log_ * (1.0 + 1e-13) + 1e-12;
}

bool IndexBound::admits(const PrimeSupport& support, const SmoothIndex& idx) const {
    if (exact_) return admits(0.0, index_value(support, idx));
    return admits(index_log(support, idx), std::nullopt);
}

IndexBound IndexBound::widened(double log_factor) const {
    if (exact_ && log_factor >= 0.0) {
        double f = std::exp(log_factor);
        double r = std::round(f);
        if (std::abs(f - r) < 1e-9 * r) {
            if (auto v = mul_checked(*exact_, static_cast<u64>(r))) return at_most(*v);
        }
    }
    return log_at_most(std::max(0.0, log_ + log_factor));
}

SmoothIndexList enumerate_smooth(const PrimeSupport& support, u64 N, std::size_t max_count) {
    if (N == 0) throw std::invalid_argument("enumerate_smooth: N must be positive");
    SmoothIndexList out{support, N, {1}};
    const std::size_t d = support.size();
    if (d == 0) return out;
    constexpr u64 kInf = std::numeric_limits<u64>::max();
    std::vector<std::size_t> pos(d, 0);
    std::vector<u64> next(d);
    for (std::size_t i = 0; i < d; ++i) next[i] = support.prime(i);
    for (;;) {
        u64 m = *std::min_element(next.begin(), next.end());
        if (m > N || m == kInf) break;
        if (out.indices.size() >= max_count)
            throw CapacityError("enumerate_smooth: more than " + std::to_string(max_count) + " indices");
        out.indices.push_back(m);
        for (std::size_t i = 0; i < d; ++i) {
            if (next[i] != m) continue;
            ++pos[i];
            auto v = mul_checked(out.indices[pos[i]], support.prime(i));
            next[i] = v ? *v : kInf;
        }
    }
    return out;
}

std::vector<u64> enumerate_coprime(const PrimeSupport& support, u64 J, std::size_t max_count) {
    if (J == 0) throw std::invalid_argument("enumerate_coprime: J must be positive");
    std::vector<u64> out;
    for (u64 j = 1; j <= J; ++j) {
        if (!support.coprime(j)) continue;
        if (out.size() >= max_count)
            throw CapacityError("enumerate_coprime: more than " + std::to_string(max_count) + " indices");
        out.push_back(j);
        if (j == std::numeric_limits<u64>::max()) break;
    }
    return out;
}

double partial_zeta(const PrimeSupport& support, double nu) {
    if (!(nu > 0.0)) throw std::domain_error("partial_zeta: nu must be positive");
    double r = 1.0;
    for (std::size_t i = 0; i < support.size(); ++i)
        r /= -std::expm1(-nu * support.log_prime(i));
    return r;
}

}  // namespace hardyop
