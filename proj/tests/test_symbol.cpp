#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hardyop/symbol.hpp"

using namespace hardyop;

namespace {

Character random_character(std::size_t d, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 2 * std::numbers::pi);
    Character chi;
    for (std::size_t i = 0; i < d; ++i) chi.angles.push_back(u(rng));
    return chi;
}

}  // namespace

TEST_CASE("affine constructor") {
    CHECK(make_affine(2, 1.0, {}).vartheta() == 1.0);
    CHECK(make_affine(1, 1.0, {{2, 0.5}}).vartheta() == 0.5);
    const double g = 1.7;
    auto s = make_affine(1, g, {{2, -g}});
    CHECK(s.vartheta() == 0.0);
    CHECK(s.kind() == SymbolKind::affine);
    CHECK_THROWS(make_affine(1, 0.4, {{2, 0.5}}));
    CHECK_THROWS(make_affine(0, 1.0, {}));
    CHECK_THROWS(make_affine(1, 1.0, {{4, 0.1}}));
    // phi = c0 s + phi0
    auto t = make_affine(2, Complex(1.0, 0.5), {{3, Complex(0.2, 0.1)}});
    Complex z(0.3, 2.0);
    CHECK(std::abs(t.phi(z) - (2.0 * z + Complex(1.0, 0.5) + Complex(0.2, 0.1) * std::pow(3.0, -z))) < 1e-14);
}

TEST_CASE("angle map Taylor coefficients") {
    auto t = angle_taylor(0.5, 10);
    CHECK(t[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(t[1] == doctest::Approx(-1.0).epsilon(1e-15));
    // finite differences of ((1-z)/(1+z))^alpha at 0
    for (double a : {0.25, 0.5, 0.8}) {
        auto c = angle_taylor(a, 4);
        const double h = 1e-3;
        auto F = [a](double z) { return std::pow((1 - z) / (1 + z), a); };
        double d1 = (F(h) - F(-h)) / (2 * h);
        double d2 = (F(h) - 2 * F(0) + F(-h)) / (h * h);
        CHECK(std::abs(d1 - c[1]) < 1e-5);
        CHECK(std::abs(d2 / 2 - c[2]) < 1e-5);
        CHECK(c[1] == doctest::Approx(-2 * a).epsilon(1e-14));
    }
    // series against the closed form inside the disc
    auto big = angle_taylor(0.5, 400);
    Complex z(0.3, -0.4);
    Complex acc = 0.0, zk = 1.0;
    for (double c : big) {
        acc += c * zk;
        zk *= z;
    }
    CHECK(std::abs(acc - angle_phi(0.5, z)) < 1e-13);
}

TEST_CASE("angle symbol") {
    auto s = make_angle(AngleParams{0.5, 0.3, 2, 0}, 1);
    CHECK(s.kind() == SymbolKind::angle);
    CHECK(s.vartheta() == 0.3);
    CHECK(std::abs(s.c1() - Complex(1.3)) < 1e-12);
    auto est = estimate_vartheta(s, 10000);
    CHECK(std::abs(est.value - 0.3) < 1e-3);
    CHECK_THROWS_AS(make_angle(AngleParams{0.5, 0.0, 2, 10}, 1), TaylorOrderError);
    try {
        make_angle(AngleParams{0.5, 0.0, 2, 10}, 1);
    } catch (const TaylorOrderError& e) {
        CHECK(e.required() > 10);
    }
    CHECK_THROWS(make_angle(AngleParams{1.5, 0.0, 2, 0}, 1));
    CHECK_THROWS(make_angle(AngleParams{0.5, 0.0, 4, 0}, 1));
}

TEST_CASE("boundary values") {
    PrimeSupport P({2});
    const Complex c1(0.7, 0.2);
    auto cst = DirichletPolynomial::constant(P, c1);
    std::mt19937_64 rng(5);
    for (int i = 0; i < 10; ++i) CHECK(boundary_value(cst, random_character(1, rng)) == c1);
    auto f = DirichletPolynomial::from_terms(P, {{1, 1.0}, {2, -1.0}});
    for (double th : {0.0, 0.5, 2.0, 4.0}) {
        Complex expect = 1.0 - std::exp(Complex(0, th));
        CHECK(std::abs(boundary_value(f, Character{{th}}) - expect) < 1e-15);
    }
}

TEST_CASE("boundary real part never drops below vartheta") {
    std::mt19937_64 rng(9);
    std::vector<Symbol> syms{make_affine(1, 1.5, {{2, 0.5}, {3, Complex(0.3, 0.4)}}),
                             make_affine(2, 1.0, {{2, -1.0}}), make_angle(AngleParams{0.5, 0.2, 2, 0}, 1),
                             make_angle(AngleParams{0.3, 0.0, 3, 0}, 2)};
    for (const auto& s : syms)
        for (int i = 0; i < 1000; ++i) {
            auto chi = random_character(s.support().size(), rng);
            CHECK(s.boundary_value(chi).real() >= s.vartheta() - 1e-9);
        }
}

TEST_CASE("estimate_vartheta") {
    auto a = make_affine(1, 2.0, {{2, 0.5}, {3, Complex(0.3, 0.4)}});
    auto e = estimate_vartheta(a, 64);
    CHECK(e.value >= a.vartheta() - 1e-12);
    CHECK(e.value - a.vartheta() <= e.spacing * e.spacing);

    PrimeSupport P({2});
    auto cst = make_custom(1, DirichletPolynomial::constant(P, 0.8));
    CHECK(estimate_vartheta(cst, 4).value == 0.8);

    auto ang = make_angle(AngleParams{0.5, 0.0, 2, 0}, 1);
    double prev = 1e300;
    for (int g : {64, 256, 1024}) {
        double v = estimate_vartheta(ang, g).value;
        CHECK(v >= 0.0);
        CHECK(v <= prev);
        prev = v;
    }
    CHECK(prev < 0.05);
}

TEST_CASE("vartheta estimate is invariant under a grid-aligned twist") {
    auto s = make_affine(1, 2.0, {{2, Complex(0.5, 0.2)}, {3, Complex(-0.3, 0.4)}});
    const int g = 48;
    Character chi{{2 * std::numbers::pi * 5 / g, 2 * std::numbers::pi * 17 / g}};
    auto t = twist(s, chi);
    CHECK(std::abs(estimate_vartheta(s, g).value - estimate_vartheta(t, g).value) < 1e-12);
    CHECK(t.vartheta() == s.vartheta());
}

TEST_CASE("custom symbols are validated on the boundary") {
    PrimeSupport P({2, 3});
    auto ok = DirichletPolynomial::from_terms(P, {{1, 1.0}, {2, 0.4}, {3, 0.3}, {6, 0.2}});
    auto s = make_custom(1, ok);
    double brute = 1e300;
    for (int a = 0; a < 600; ++a)
        for (int b = 0; b < 600; ++b) {
            Complex x = std::polar(1.0, 2 * std::numbers::pi * a / 600), y = std::polar(1.0, 2 * std::numbers::pi * b / 600);
            brute = std::min(brute, (1.0 + 0.4 * x + 0.3 * y + 0.2 * x * y).real());
        }
    CHECK(std::abs(s.vartheta() - brute) < 1e-3);
    auto bad = DirichletPolynomial::from_terms(P, {{1, 0.5}, {2, 0.4}, {3, 0.3}});
    CHECK_THROWS(make_custom(1, bad));
    // pure imaginary constant: vertical translation
    auto tau = make_custom(1, DirichletPolynomial::constant(P, Complex(0, 2.0)));
    CHECK(tau.vartheta() == 0.0);
}

TEST_CASE("angle sector bound is finite") {
    auto s = make_angle(AngleParams{0.5, 0.0, 2, 0}, 1);
    auto b = angle_sector_bound(s);
    CHECK(std::isfinite(b.B));
    CHECK(b.beta0 > 0.0);
    CHECK(b.beta0 < 1.0);
}

TEST_CASE("json round trip is exact") {
    std::vector<Symbol> syms{make_affine(2, Complex(1.0 / 3, 0.1), {{2, Complex(0.1, 1.0 / 7)}}),
                             make_angle(AngleParams{0.5, 0.3, 2, 0}, 1)};
    for (const auto& s : syms) {
        auto j = to_json(s);
        auto back = symbol_from_json(nlohmann::json::parse(j.dump()));
        CHECK(back.c0() == s.c0());
        CHECK(back.kind() == s.kind());
        CHECK(back.vartheta() == s.vartheta());
        REQUIRE(back.phi0().size() == s.phi0().size());
        for (const auto& [idx, c] : s.phi0().coeffs()) CHECK(back.phi0().coeff(idx) == c);
        CHECK(symbol_hash(back) == symbol_hash(s));
    }
    CHECK(symbol_hash(syms[0]) != symbol_hash(syms[1]));
    CHECK_THROWS(symbol_from_json(nlohmann::json{{"c0", 1}, {"kind", "affine"}, {"bogus", 1}}));
}
