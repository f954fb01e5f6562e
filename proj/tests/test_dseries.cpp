#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <numbers>
#include <random>

#include "hardyop/dseries.hpp"

using namespace hardyop;

namespace {

using IntSeries = std::map<u64, Complex>;

IntSeries as_ints(const DirichletPolynomial& f) {
    IntSeries out;
    for (const auto& [idx, c] : f.coeffs()) out[*index_value(f.support(), idx)] = c;
    return out;
}

// Dirichlet convolution on integer keys
IntSeries convolve(const IntSeries& a, const IntSeries& b, u64 N) {
    IntSeries out;
    for (const auto& [k, x] : a)
        for (const auto& [l, y] : b)
            if (k * l <= N) out[k * l] += x * y;
    return out;
}

double max_diff(const IntSeries& a, const IntSeries& b) {
    double m = 0.0;
    for (const auto& [k, x] : a) {
        auto it = b.find(k);
        m = std::max(m, std::abs(x - (it == b.end() ? Complex{} : it->second)));
    }
    for (const auto& [k, y] : b)
        if (!a.count(k)) m = std::max(m, std::abs(y));
    return m;
}

// sum_r f^r / r! by repeated convolution, R from the l1 tail bound
IntSeries exp_partial_sums(const IntSeries& f, u64 N) {
    double l1 = 0.0;
    for (const auto& [k, c] : f) l1 += std::abs(c);
    int R = 1;
    double tail = l1 * l1 / 2.0;
    while (tail >= 1e-14) {
        ++R;
        tail *= l1 / double(R + 1);
    }
    IntSeries sum{{1, 1.0}}, term{{1, 1.0}};
    for (int r = 1; r <= R; ++r) {
        term = convolve(term, f, N);
        for (auto& [k, c] : term) c /= double(r);
        for (const auto& [k, c] : term) sum[k] += c;
    }
    return sum;
}

DirichletPolynomial random_poly(const PrimeSupport& P, u64 N, std::mt19937_64& rng, int count) {
    auto idx = enumerate_smooth(P, N).indices;
    std::uniform_int_distribution<std::size_t> pick(0, idx.size() - 1);
    std::normal_distribution<double> g;
    std::vector<std::pair<u64, Complex>> t;
    for (int i = 0; i < count; ++i) t.emplace_back(idx[pick(rng)], Complex(g(rng), g(rng)));
    DirichletPolynomial f(P, IndexBound::at_most(N));
    for (auto& [n, c] : t) f.add(to_index(P, n), c);
    return f;
}

}  // namespace

TEST_CASE("multiply examples") {
    PrimeSupport P2({2});
    auto a = DirichletPolynomial::from_terms(P2, {{1, 1.0}, {2, 1.0}});
    auto sq = as_ints(multiply(a, a, u64(4)));
    CHECK(max_diff(sq, IntSeries{{1, 1.0}, {2, 2.0}, {4, 1.0}}) == 0.0);

    auto one = DirichletPolynomial::constant(P2, 1.0);
    CHECK(max_diff(as_ints(multiply(a, one, u64(4))), as_ints(a)) == 0.0);

    PrimeSupport P23({2, 3});
    auto b = DirichletPolynomial::from_terms(P23, {{2, 1.0}, {3, 1.0}});
    auto b2 = as_ints(multiply(b, b, u64(9)));
    CHECK(max_diff(b2, IntSeries{{4, 1.0}, {6, 2.0}, {9, 1.0}}) < 1e-15);

    CHECK_THROWS(multiply(a, b, u64(9)));
}

TEST_CASE("multiply matches brute-force convolution; commutative and associative") {
    std::mt19937_64 rng(7);
    PrimeSupport P({2, 3, 5});
    const u64 N = 400;
    for (int trial = 0; trial < 5; ++trial) {
        auto f = random_poly(P, N, rng, 12), g = random_poly(P, N, rng, 12), h = random_poly(P, N, rng, 8);
        auto fg = multiply(f, g, N);
        CHECK(max_diff(as_ints(fg), convolve(as_ints(f), as_ints(g), N)) < 1e-12);
        CHECK(max_diff(as_ints(fg), as_ints(multiply(g, f, N))) < 1e-12);
        CHECK(max_diff(as_ints(multiply(fg, h, N)), as_ints(multiply(f, multiply(g, h, N), N))) < 1e-12);
    }
}

TEST_CASE("exp_series") {
    PrimeSupport P2({2});
    auto zero = DirichletPolynomial(P2, IndexBound::at_most(64));
    auto e0 = as_ints(exp_series(zero, u64(64)));
    CHECK(max_diff(e0, IntSeries{{1, 1.0}}) == 0.0);

    const Complex a(0.7, -0.4);
    auto chain = as_ints(exp_series(DirichletPolynomial::from_terms(P2, {{2, a}}), u64(1) << 20));
    double fact = 1.0;
    for (int k = 0; k <= 20; ++k) {
        if (k) fact *= k;
        CHECK(std::abs(chain[u64(1) << k] - std::pow(a, k) / fact) < 1e-15);
    }

    PrimeSupport P23({2, 3});
    auto f = DirichletPolynomial::from_terms(P23, {{2, 1.0}, {3, 1.0}});
    auto rec = as_ints(exp_series(f, u64(36)));
    auto oracle = exp_partial_sums(as_ints(f), 36);
    CHECK(max_diff(rec, oracle) < 1e-14);

    auto bad = DirichletPolynomial::from_terms(P2, {{1, 0.5}, {2, 1.0}});
    CHECK_THROWS(exp_series(bad, u64(8)));
}

TEST_CASE("exp_series of a random polynomial matches the partial-sum oracle") {
    std::mt19937_64 rng(11);
    PrimeSupport P({2, 3, 5});
    const u64 N = 900;
    auto f = random_poly(P, 60, rng, 6);
    f.set(unit_index(P), 0.0);
    for (auto& [idx, c] : f.coeffs()) (void)idx, (void)c;
    auto scaled = scale(f, 0.5);
    auto oracle = exp_partial_sums(as_ints(scaled), N);
    CHECK(max_diff(as_ints(exp_series(scaled, N)), oracle) < 1e-12);
}

TEST_CASE("exp of a sum over disjoint primes is the product") {
    PrimeSupport P({2, 3});
    auto f = DirichletPolynomial::from_terms(P, {{2, Complex(0.3, 0.2)}, {4, -0.5}});
    auto g = DirichletPolynomial::from_terms(P, {{3, Complex(-0.8, 0.1)}, {9, 0.25}});
    const u64 N = 3000;
    auto lhs = exp_series(add(f, g), N);
    auto rhs = multiply(exp_series(f, N), exp_series(g, N), N);
    CHECK(max_diff(as_ints(lhs), as_ints(rhs)) < 1e-10);
}

TEST_CASE("power_symbol") {
    PrimeSupport P2({2});
    auto phi0 = DirichletPolynomial::from_terms(P2, {{1, Complex(0.5, 0.2)}, {2, 0.3}});
    auto one = as_ints(power_symbol(1, phi0, u64(64)));
    CHECK(max_diff(one, IntSeries{{1, 1.0}}) == 0.0);

    const Complex c1(1.25, -0.5);
    auto cst = DirichletPolynomial::constant(P2, c1);
    auto pc = as_ints(power_symbol(7, cst, u64(64)));
    CHECK(max_diff(pc, IntSeries{{1, std::pow(7.0, -c1)}}) < 1e-15);

    auto phi = DirichletPolynomial::from_terms(P2, {{2, 1.0}});
    auto p2 = as_ints(power_symbol(2, phi, u64(1) << 16));
    double fact = 1.0;
    for (int k = 0; k <= 16; ++k) {
        if (k) fact *= k;
        CHECK(std::abs(p2[u64(1) << k] - std::pow(-std::log(2.0), k) / fact) < 1e-15);
    }
}

TEST_CASE("power_symbol is completely multiplicative in n") {
    PrimeSupport P({2, 3});
    auto phi0 = DirichletPolynomial::from_terms(P, {{1, 1.5}, {2, Complex(0.4, 0.3)}, {3, -0.5}, {6, 0.1}});
    const u64 N = 5000;
    for (auto [m, n] : {std::pair<u64, u64>{2, 3}, {5, 7}, {10, 12}}) {
        auto lhs = power_symbol(m * n, phi0, N);
        auto rhs = multiply(power_symbol(m, phi0, N), power_symbol(n, phi0, N), N);
        CHECK(max_diff(as_ints(lhs), as_ints(rhs)) < 1e-10);
    }
}

TEST_CASE("evaluate and derivative") {
    PrimeSupport P2({2});
    CHECK(evaluate(DirichletPolynomial::constant(P2, 1.0), Complex(0.3, 4.0)) == Complex(1.0));
    auto e2 = DirichletPolynomial::from_terms(P2, {{2, 1.0}});
    CHECK(std::abs(evaluate(e2, 1.0) - 0.5) < 1e-16);
    CHECK(std::abs(evaluate_derivative(e2, 0.0) + std::log(2.0)) < 1e-15);

    // finite differences
    PrimeSupport P({2, 3});
    auto f = DirichletPolynomial::from_terms(P, {{1, 0.2}, {2, Complex(1, 1)}, {9, -0.7}, {12, 0.3}});
    Complex s(0.4, 1.3);
    double h = 1e-5;
    Complex fd = (evaluate(f, s + h) - evaluate(f, s - h)) / (2 * h);
    CHECK(std::abs(fd - evaluate_derivative(f, s)) < 1e-8);
}

TEST_CASE("twist") {
    PrimeSupport P({2, 3});
    auto f = DirichletPolynomial::from_terms(P, {{1, 0.2}, {2, Complex(1, 1)}, {6, -0.7}, {9, 0.3}});
    auto same = twist(f, Character::trivial(P));
    CHECK(max_diff(as_ints(same), as_ints(f)) == 0.0);
    Complex s(0.7, -2.0);
    CHECK(std::abs(evaluate(same, s) - evaluate(f, s)) < 1e-15);

    PrimeSupport P2({2});
    auto g = twist(DirichletPolynomial::from_terms(P2, {{2, 1.0}}), Character{{std::numbers::pi}});
    CHECK(std::abs(g.coeff(u64(2)) + 1.0) < 1e-15);

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 2 * std::numbers::pi);
    for (int t = 0; t < 20; ++t) {
        Character chi{{u(rng), u(rng)}};
        auto tw = twist(f, chi);
        for (const auto& [idx, c] : f.coeffs()) CHECK(std::abs(std::abs(tw.coeff(idx)) - std::abs(c)) < 1e-15);
    }
    CHECK_THROWS(twist(f, Character{{0.1}}));
}

TEST_CASE("strip average over one period equals the weighted coefficient sum") {
    // f in H^2_3 over P = {2}: f = 3^{-s} g(s)
    PrimeSupport P2({2});
    BlockFunction f{3, DirichletPolynomial::from_terms(P2, {{1, 1.0}, {2, Complex(0.5, -0.25)}, {8, 0.75},
                                                            {32, Complex(0, 0.3)}})};
    const double sigma = 0.3;
    const double period = 2 * std::numbers::pi / std::log(2.0);
    const int M = 256;
    double avg = 0.0;
    for (int i = 0; i < M; ++i) avg += std::norm(f.value(Complex(sigma, period * i / M)));
    avg /= M;
    double expect = 0.0;
    for (const auto& [idx, c] : f.g.coeffs()) {
        double m = double(3 * *index_value(P2, idx));
        expect += std::norm(c) * std::pow(m, -2 * sigma);
    }
    CHECK(std::abs(avg - expect) < 1e-10);
}

TEST_CASE("canonical form and bounds") {
    PrimeSupport P({2});
    DirichletPolynomial f(P, IndexBound::at_most(8));
    f.set(to_index(P, 2), 1e-31);
    CHECK(f.size() == 0);
    f.add(to_index(P, 4), 1.0);
    f.add(to_index(P, 4), -1.0);
    CHECK(f.size() == 0);
    CHECK_THROWS(f.set(to_index(P, 16), 1.0));
    CHECK_THROWS(DirichletPolynomial::from_terms(P, {{3, 1.0}}));
}
