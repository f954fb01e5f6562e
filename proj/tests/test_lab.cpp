#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "hardyop/lab.hpp"

using namespace hardyop;
using nlohmann::json;

namespace {

double i0_series(double x) {
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < 400; ++k) {
        term *= (x / 2) * (x / 2) / (double(k) * k);
        sum += term;
        if (term < 1e-18 * sum) break;
    }
    return sum;
}

}  // namespace

TEST_CASE("power-log fit recovers a synthetic exponent") {
    std::vector<std::pair<double, double>> v;
    for (double n : log_spaced(10, 1e6, 40)) v.emplace_back(n, std::pow(n, -0.5) * std::pow(std::log(n), -0.25));
    auto f = fit_power_log(v, 0.5);
    CHECK(std::abs(f.gamma_hat - 0.25) < 1e-6);
    CHECK(f.r_squared == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(f.r_squared <= 1.0);
    CHECK(f.n_min == 10);
    CHECK(f.n_max == 1e6);
    CHECK_THROWS(fit_power_log({{10, 1.0}, {20, 1.0}, {30, 1.0}}, 0.0));
    CHECK_THROWS(fit_power_log({{1, 1.0}, {20, 1.0}, {30, 1.0}, {40, 1.0}}, 0.0));
    CHECK_THROWS(fit_power_log({{10, 1.0}, {20, -1.0}, {30, 1.0}, {40, 1.0}}, 0.0));
}

TEST_CASE("stretched fit recovers a synthetic constant") {
    std::vector<std::pair<double, double>> v;
    for (double n : log_spaced(1e3, 1e9, 30)) v.emplace_back(n, std::pow(n, -0.2) * std::exp(-1.7 * std::sqrt(std::log(n))));
    auto f = fit_stretched(v, 0.2, 2.0);
    CHECK(std::abs(f.gamma_hat - 1.7) < 1e-6);
    CHECK(f.model == DecayModel::stretched_exp);
    CHECK_THROWS(fit_stretched(v, 0.2, 1.0));
    CHECK_THROWS(fit_stretched({{2, 1.0}, {20, 1.0}, {30, 1.0}, {40, 1.0}}, 0.0, 2.0));
}

TEST_CASE("norm exponent on the closed form") {
    auto s = make_affine(1, 1.5, {{2, 1.0}});
    std::vector<std::pair<double, double>> v;
    for (double n : log_spaced(1e3, 1e6, 31)) v.emplace_back(n, affine_norm_closed_form(s, std::log(n)));
    CHECK(std::abs(fit_power_log(v, 0.5).gamma_hat - 0.25) < 0.05);
}

TEST_CASE("Bessel bounds") {
    auto rows = bessel_bounds({0.125, 1.0});
    CHECK(rows[0].value == doctest::Approx(0.7910).epsilon(1e-4));
    CHECK(rows[0].lower == doctest::Approx(0.386).epsilon(1e-3));
    CHECK(rows[0].upper == 1.0);
    CHECK(rows[0].contained);
    CHECK(rows[1].value == doctest::Approx(0.3085).epsilon(1e-3));
    CHECK(rows[1].lower == doctest::Approx(1.0 / (std::numbers::pi * std::sqrt(2 * std::numbers::e))).epsilon(1e-14));
    CHECK(rows[1].upper == doctest::Approx(0.443).epsilon(1e-3));
    CHECK(rows[1].contained);
    for (const auto& r : bessel_bounds({0.125, 0.25, 0.5, 1, 2, 5, 10, 50})) {
        CHECK(r.contained);
        CHECK(std::abs(r.value - r.oracle) < 1e-12);
        CHECK(std::abs(r.oracle - std::exp(-2 * r.x) * i0_series(2 * r.x)) < 1e-12);
    }
    CHECK_THROWS(bessel_bounds({0.1}));
}

TEST_CASE("scaled I0 is continuous across the asymptotic switch") {
    for (double x : {0.0, 0.5, 3.0, 40.0, 200.0}) CHECK(scaled_i0(x) == doctest::Approx(std::exp(-x) * i0_series(x)).epsilon(1e-13));
    for (double x : {600.5, 650.0, 700.0})
        CHECK(scaled_i0(x) == doctest::Approx(std::exp(-x) * std::cyl_bessel_i(0.0, x)).epsilon(1e-13));
    CHECK(scaled_i0(1e8) == doctest::Approx(1.0 / std::sqrt(2 * std::numbers::pi * 1e8)).epsilon(1e-8));
}

TEST_CASE("closed forms agree with the coefficient route") {
    auto a = make_affine(1, 1.0, {{2, 0.25}, {3, Complex(0.1, 0.2)}});
    auto g = make_angle(AngleParams{0.5, 0.3, 2, 0}, 1);
    for (u64 n : {2, 10, 1000}) {
        double L = std::log(double(n));
        CHECK(affine_norm_closed_form(a, L) == doctest::Approx(norm_en(a, n, NormMethod::coeff)).epsilon(1e-10));
        // the truncated Taylor symbol differs from the exact map near the cusp at z = 1
        CHECK(angle_norm_exact(g, L) == doctest::Approx(norm_en(g, n, NormMethod::coeff)).epsilon(1e-2));
    }
    // dense trapezoid over theta with Re Phi = cos(pi/4) |tan(theta/2)|^{1/2}
    for (double n : {10.0, 1e4}) {
        const int M = 1 << 20;
        double acc = 0.0;
        for (int i = 0; i < M; ++i) {
            double th = 2 * std::numbers::pi * (i + 0.5) / M - std::numbers::pi;
            double re = std::cos(std::numbers::pi / 4) * std::sqrt(std::abs(std::tan(th / 2)));
            acc += std::pow(n, -2 * re);
        }
        double want = std::pow(n, -0.3) * std::sqrt(acc / M);
        CHECK(angle_norm_exact(g, std::log(n)) == doctest::Approx(want).epsilon(1e-6));
    }
    CHECK_THROWS(affine_norm_closed_form(g, 1.0));
    CHECK_THROWS(angle_norm_exact(a, 1.0));
}

TEST_CASE("stretched product") {
    const double L = std::log(1e6);
    double direct = 0.0;
    for (int j = 1; j <= 6; ++j) {
        double x = 2 * L / std::pow(double(j), 1.5);
        direct += std::log(std::exp(-x) * i0_series(x));
    }
    CHECK(stretched_log_product(L, 1.5, 6) == doctest::Approx(direct).epsilon(1e-12));
    CHECK(stretched_log_product(L, 2.0, 6) > stretched_log_product(L, 1.5, 6));
}

TEST_CASE("log-spaced grid") {
    auto g = log_spaced(1e3, 1e6, 61);
    CHECK(g.front() == 1e3);
    CHECK(g.back() == 1e6);
    CHECK(g.size() == 61);
    for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] > g[i - 1]);
    CHECK_THROWS(log_spaced(0, 10, 5));
}

TEST_CASE("config parsing is strict") {
    auto c = parse_suite_config(json::parse(R"({"suite":["diagonal","bessel"],"caps":{"J":64,"K":128,"quad":16},
        "n_max":50,"sigmas":[0.1,0.05],"tolerances":{"diagonal_abs":1e-9}})"));
    CHECK(c.suites.size() == 2);
    CHECK(c.caps->J == 64);
    CHECK(c.quad == 16);
    CHECK(c.n_max == 50);
    CHECK(c.tol("diagonal_abs", 1.0) == 1e-9);
    CHECK(c.tol("envelope_abs", 0.5) == 0.5);
    for (const char* bad : {R"({"bogus":1})", R"({"suite":"nope"})", R"({"caps":{"L":3}})", R"({"caps":{"quad":4}})",
                            R"({"sigmas":[0.1,0.2]})", R"({"sigmas":[-0.1]})", R"({"tolerances":{"made_up":1}})",
                            R"({"n_max":0})", R"({"symbol":{"c0":1}})", R"([1,2])"})
        CHECK_THROWS_AS(parse_suite_config(json::parse(bad)), ConfigError);
    CHECK_THROWS_AS(load_suite_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("empty suite list gives an empty passing report") {
    auto reports = run_suites(parse_suite_config(json::parse(R"({"suite":[]})")));
    CHECK(reports.empty());
}

TEST_CASE("diagonal suite passes and is deterministic") {
    auto cfg = parse_suite_config(json::parse(R"({"suite":"diagonal"})"));
    auto r = run_suite("diagonal", cfg);
    CHECK(r.passed());
    CHECK(!r.checks.empty());
    CHECK(r.runtime < 1.0);
    auto j = to_json(r);
    for (const auto& ch : j.at("checks")) {
        CHECK(ch.contains("measured"));
        CHECK(ch.contains("tolerance"));
    }
    auto again = run_suite("diagonal", cfg);
    CHECK(again.tables == r.tables);
    CHECK(again.symbol_hash == r.symbol_hash);
}

TEST_CASE("a failing tolerance fails the suite without throwing") {
    auto cfg = parse_suite_config(json::parse(R"({"suite":"bessel","tolerances":{"bessel_identity":0}})"));
    auto r = run_suite("bessel", cfg);
    CHECK(!r.passed());
}

TEST_CASE("spectrum csv and number formatting") {
    auto s = approximation_numbers(make_affine(2, 1.0, {}), 5, SpectrumCaps{});
    std::ostringstream os;
    write_spectrum_csv(os, s);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "n,a_n,block_j,rank_in_block");
    std::getline(is, line);
    CHECK(line == "1,1,1,1");
    std::getline(is, line);
    CHECK(line == "2,0.5,2,1");
    CHECK(format_double(1.0 / 3) == "0.33333333333333331");
    CHECK(std::stod(format_double(0.1 + 0.2)) == 0.1 + 0.2);
    auto side = spectrum_sidecar(s, make_affine(2, 1.0, {}));
    CHECK(side.contains("drift"));
    CHECK(side.contains("symbol_hash"));
}
