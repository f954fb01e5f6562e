#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "hardyop/indexcore.hpp"

using namespace hardyop;

namespace {

// trial division oracle
bool smooth_by_division(const std::vector<u64>& ps, u64 n) {
    for (u64 p : ps)
        while (n % p == 0) n /= p;
    return n == 1;
}

}  // namespace

TEST_CASE("primality and support construction") {
    CHECK(is_prime(2));
    CHECK(is_prime(97));
    CHECK(!is_prime(1));
    CHECK(!is_prime(91));
    CHECK(is_prime(18446744073709551557ULL));
    CHECK_THROWS(PrimeSupport({2, 4}));
    CHECK_THROWS(PrimeSupport({3, 2}));
    CHECK_THROWS(PrimeSupport({2, 2}));
    PrimeSupport empty;
    CHECK(empty.empty());
    CHECK(PrimeSupport({2, 3}).contains(3));
}

TEST_CASE("enumerate_smooth examples") {
    CHECK(enumerate_smooth(PrimeSupport{}, 10).indices == std::vector<u64>{1});
    CHECK(enumerate_smooth(PrimeSupport({2}), 10).indices == std::vector<u64>{1, 2, 4, 8});
    CHECK(enumerate_smooth(PrimeSupport({2, 3}), 12).indices == std::vector<u64>{1, 2, 3, 4, 6, 8, 9, 12});
    CHECK_THROWS_AS(enumerate_smooth(PrimeSupport({2, 3}), 1000, 5), CapacityError);
    CHECK_THROWS(enumerate_smooth(PrimeSupport({2}), 0));
}

TEST_CASE("enumerate_smooth agrees with trial division, prefix and counting properties") {
    const std::vector<u64> ps{2, 3, 7};
    PrimeSupport P(ps);
    auto big = enumerate_smooth(P, 5000).indices;
    std::vector<u64> brute;
    for (u64 n = 1; n <= 5000; ++n)
        if (smooth_by_division(ps, n)) brute.push_back(n);
    CHECK(big == brute);

    auto small = enumerate_smooth(P, 700).indices;
    REQUIRE(small.size() <= big.size());
    CHECK(std::equal(small.begin(), small.end(), big.begin()));

    std::size_t not_smooth = 0;
    for (u64 n = 1; n <= 5000; ++n)
        if (!factor_over(P, n)) ++not_smooth;
    CHECK(big.size() + not_smooth == 5000);
}

TEST_CASE("large smooth enumeration stays exact near the 64-bit limit") {
    PrimeSupport P({2});
    auto l = enumerate_smooth(P, ~u64(0));
    CHECK(l.indices.size() == 64);
    CHECK(l.indices.back() == (u64(1) << 63));
}

TEST_CASE("enumerate_coprime examples and density") {
    CHECK(enumerate_coprime(PrimeSupport({2}), 10) == std::vector<u64>{1, 3, 5, 7, 9});
    CHECK(enumerate_coprime(PrimeSupport{}, 4) == std::vector<u64>{1, 2, 3, 4});
    CHECK(enumerate_coprime(PrimeSupport({2, 3}), 15) == std::vector<u64>{1, 5, 7, 11, 13});

    auto js = enumerate_coprime(PrimeSupport({2, 3}), 1000000);
    double density = double(js.size()) / 1e6;
    double expected = (1.0 - 1.0 / 2) * (1.0 - 1.0 / 3);
    CHECK(std::abs(density / expected - 1.0) < 0.02);
    for (std::size_t i = 0; i < 1000; ++i) CHECK(std::gcd(js[i], u64(6)) == 1);
}

TEST_CASE("factor_over") {
    PrimeSupport P({2, 3});
    auto f = factor_over(P, 12);
    REQUIRE(f);
    CHECK(f->exps == std::vector<std::uint32_t>{2, 1});
    auto one = factor_over(PrimeSupport({2}), 1);
    REQUIRE(one);
    CHECK(one->is_one());
    CHECK(!factor_over(PrimeSupport({2}), 6));
    CHECK(index_value(P, *f) == std::optional<u64>(12));
    CHECK(index_log(P, *f) == doctest::Approx(std::log(12.0)).epsilon(1e-15));
    CHECK(index_divides(to_index(P, 6), to_index(P, 12)));
    CHECK(!index_divides(to_index(P, 4), to_index(P, 6)));
    CHECK(index_quotient(to_index(P, 12), to_index(P, 3)) == to_index(P, 4));
    CHECK(index_power(to_index(P, 6), 3) == to_index(P, 216));
}

TEST_CASE("checked arithmetic refuses to wrap") {
    CHECK(!mul_checked(u64(1) << 40, u64(1) << 30));
    CHECK(mul_checked(3, 5) == std::optional<u64>(15));
    CHECK(!pow_checked(3, 41));
    CHECK(pow_checked(3, 40) == std::optional<u64>(12157665459056928801ULL));
    PrimeSupport P({2, 3});
    SmoothIndex huge{{70, 0}};
    CHECK(!index_value(P, huge));
}

TEST_CASE("partial zeta") {
    CHECK(partial_zeta(PrimeSupport({2}), 1.0) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(partial_zeta(PrimeSupport({2, 3}), 1.0) == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(partial_zeta(PrimeSupport({2}), 0.5) == doctest::Approx(1.0 / (1.0 - std::pow(2.0, -0.5))).epsilon(1e-15));
    CHECK(partial_zeta(PrimeSupport{}, 0.7) == 1.0);
    CHECK_THROWS(partial_zeta(PrimeSupport({2}), 0.0));
    PrimeSupport P({2, 3, 5});
    double prev = partial_zeta(P, 0.1);
    for (double nu = 0.2; nu < 5.0; nu += 0.1) {
        double cur = partial_zeta(P, nu);
        CHECK(cur < prev);
        prev = cur;
    }
}

TEST_CASE("index bounds") {
    auto b = IndexBound::at_most(10);
    CHECK(b.admits(std::log(10.0), u64(10)));
    CHECK(!b.admits(std::log(11.0), u64(11)));
    auto l = IndexBound::log_at_most(std::log(10.0));
    CHECK(l.admits(PrimeSupport({2}), SmoothIndex{{3}}));
    CHECK(!l.admits(PrimeSupport({2}), SmoothIndex{{4}}));
}
