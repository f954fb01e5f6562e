#include "hardyop/lab.hpp"

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <boost/math/quadrature/exp_sinh.hpp>

namespace hardyop {

std::string to_string(DecayModel m) { return m == DecayModel::power_log ? "power_log" : "stretched_exp"; }

namespace {

struct LineFit {
    double a = 0.0, b = 0.0, r2 = 0.0;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = double(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("fit: abscissae are all equal");
    LineFit f;
    f.b = sxy / sxx;
    f.a = my - f.b * mx;
    double ss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double r = y[i] - f.a - f.b * x[i];
        ss += r * r;
    }
    f.r2 = syy == 0.0 ? 1.0 : std::clamp(1.0 - ss / syy, 0.0, 1.0);
    return f;
}

DecayFit fit_generic(const std::vector<std::pair<double, double>>& values, double theta, double n_floor,
                     DecayModel model, double beta) {
    if (values.size() < 4) throw std::invalid_argument("fit: at least 4 points are needed");
    std::vector<double> x, y;
    DecayFit out;
    out.model = model;
    out.theta_hat = theta;
    out.n_min = values.front().first;
    out.n_max = values.front().first;
    for (const auto& [n, v] : values) {
        if (!(n >= n_floor)) throw std::invalid_argument("fit: n must be at least " + format_double(n_floor));
        if (!(v > 0.0)) throw std::invalid_argument("fit: values must be positive");
        double L = std::log(n);
        x.push_back(model == DecayModel::power_log ? std::log(L) : std::pow(L, 1.0 / beta));
        y.push_back(std::log(v) + theta * L);
        out.n_min = std::min(out.n_min, n);
        out.n_max = std::max(out.n_max, n);
    }
    auto f = least_squares(x, y);
    out.gamma_hat = -f.b;
    out.intercept = f.a;
    out.r_squared = f.r2;
    return out;
}

}  // namespace

DecayFit fit_power_log(const std::vector<std::pair<double, double>>& values, double theta) {
    return fit_generic(values, theta, 2.0, DecayModel::power_log, 1.0);
}

DecayFit fit_stretched(const std::vector<std::pair<double, double>>& values, double theta, double beta) {
    if (!(beta > 1.0)) throw std::invalid_argument("fit_stretched: beta must exceed 1");
    return fit_generic(values, theta, 3.0, DecayModel::stretched_exp, beta);
}

double bessel_integral(double x) {
    // mean of e^{-4x sin^2(t/2)} over the circle; trapezoid is spectrally accurate here
    auto mean = [x](std::size_t M) {
        double acc = 0.0;
        for (std::size_t i = 0; i < M; ++i) {
            double s = std::sin(std::numbers::pi * double(i) / double(M));
            acc += std::exp(-4.0 * x * s * s);
        }
        return acc / double(M);
    };
    std::size_t M = 16;
    double prev = mean(M);
    for (;;) {
        M *= 2;
        double cur = mean(M);
        if (std::abs(cur - prev) <= 1e-15 * cur || M >= (std::size_t(1) << 20)) return cur;
        prev = cur;
    }
}

std::vector<BesselRow> bessel_bounds(const std::vector<double>& xs) {
    std::vector<BesselRow> out;
    const double c_low = 1.0 / (std::numbers::pi * std::sqrt(2.0 * std::numbers::e));
    const double c_up = std::sqrt(std::numbers::pi) / 4.0;
    for (double x : xs) {
        if (!(x >= 0.125)) throw std::invalid_argument("bessel_bounds: x must be at least 1/8");
        BesselRow r;
        r.x = x;
        r.lower = c_low / std::sqrt(x);
        r.upper = std::min(1.0, c_up / std::sqrt(x));
        r.value = bessel_integral(x);
        r.oracle = scaled_i0(2.0 * x);
        r.contained = r.lower < r.value && r.value < r.upper;
        out.push_back(r);
    }
    return out;
}

double scaled_i0(double x) {
    x = std::abs(x);
    if (x < 600.0) return std::cyl_bessel_i(0.0, x) * std::exp(-x);
    // asymptotic series, terms ((2k-1)!!)^2 / (k! (8x)^k)
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < 30; ++k) {
        term *= (2.0 * k - 1.0) * (2.0 * k - 1.0) / (double(k) * 8.0 * x);
        sum += term;
        if (term < 1e-17 * sum) break;
    }
    return sum / std::sqrt(2.0 * std::numbers::pi * x);
}

double affine_norm_closed_form(const Symbol& sym, double log_n) {
    if (sym.kind() != SymbolKind::affine) throw std::invalid_argument("affine_norm_closed_form: affine symbol needed");
    double lg = -2.0 * sym.c1().real() * log_n;
    for (const auto& [idx, c] : sym.phi0().coeffs()) {
        if (idx.is_one()) continue;
        double x = 2.0 * std::abs(c) * log_n;
        lg += x + std::log(scaled_i0(x));
    }
    return std::exp(0.5 * lg);
}

double angle_norm_exact(const Symbol& sym, double log_n) {
    if (sym.kind() != SymbolKind::angle || !sym.angle())
        throw std::invalid_argument("angle_norm_exact: angle symbol needed");
    const double alpha = sym.angle()->alpha;
    const double a = 2.0 * log_n * std::cos(alpha * std::numbers::pi / 2.0);
    const double q = 1.0 / alpha;
    auto f = [&](double v) {
        if (v <= 0.0) return 0.0;
        double lv = std::log(v);
        double num = std::exp(-a * v + (q - 1.0) * lv);
        return num / (1.0 + std::exp(2.0 * q * lv));
    };
    boost::math::quadrature::exp_sinh<double> integrator;
    double I = integrator.integrate(f, 1e-14);
    double mean = 2.0 / (std::numbers::pi * alpha) * I;
    return std::exp(-sym.vartheta() * log_n) * std::sqrt(mean);
}

double stretched_log_product(double log_n, double beta, std::size_t terms) {
    double acc = 0.0;
    for (std::size_t j = 1; j <= terms; ++j) acc += std::log(scaled_i0(2.0 * log_n / std::pow(double(j), beta)));
    return acc;
}

std::vector<double> log_spaced(double lo, double hi, std::size_t count) {
    if (!(lo > 0.0 && hi >= lo) || count < 2) throw std::invalid_argument("log_spaced: bad range");
    std::vector<double> out;
    for (std::size_t i = 0; i < count; ++i) {
        double v = std::round(std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * double(i) / double(count - 1)));
        if (out.empty() || v > out.back()) out.push_back(v);
    }
    return out;
}

// ---- config ----

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names{
        "diagonal", "affine-d1", "envelope", "norm-oracles", "bessel",      "ratio",     "exponent",
        "littlewood", "stanton", "compactness", "hilbert-schmidt", "block-law", "stretched", "schatten"};
    return names;
}

const std::vector<std::string>& tolerance_keys() {
    static const std::vector<std::string> keys{
        "diagonal_abs",     "diagonal_runtime", "envelope_abs",     "envelope_runtime",  "norm_route_rel",
        "norm_closed_rel",  "bessel_identity",  "bessel_runtime",   "ratio_low",         "ratio_high",
        "ratio_spread",     "drift",            "ratio_runtime",    "exponent_norm",     "exponent_coarse",
        "exponent_angle",   "littlewood_slack", "littlewood_runtime", "stanton_residual", "stanton_floor",
        "stanton_runtime",  "slope",            "affine_floor",     "compactness_runtime", "block_low",
        "block_high",       "block_spread",     "block_runtime",    "r_squared",         "schatten_slope"};
    return keys;
}

double SuiteConfig::tol(const std::string& key, double fallback) const {
    auto it = tolerances.find(key);
    return it == tolerances.end() ? fallback : it->second;
}

namespace {

template <class T>
T get_as(const nlohmann::json& j, const std::string& what) {
    try {
        return j.get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError("config: bad value for " + what);
    }
}

u64 positive_integer(const nlohmann::json& j, const std::string& what) {
    if (!j.is_number_integer() || j.get<long long>() <= 0) throw ConfigError("config: " + what + " must be a positive integer");
    return j.get<u64>();
}

}  // namespace

SuiteConfig parse_suite_config(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("config: top level must be an object");
    static const std::set<std::string> allowed{"suite", "symbol", "caps", "n_max", "sigmas", "tolerances"};
    SuiteConfig cfg;
    for (const auto& [key, val] : j.items()) {
        if (!allowed.count(key)) throw ConfigError("config: unknown field '" + key + "'");
    }
    if (j.contains("suite")) {
        const auto& s = j.at("suite");
        std::vector<std::string> ids;
        if (s.is_string())
            ids.push_back(s.get<std::string>());
        else if (s.is_array())
            for (const auto& e : s) ids.push_back(get_as<std::string>(e, "suite"));
        else
            throw ConfigError("config: suite must be a string or a list");
        for (const auto& id : ids) {
            const auto& names = suite_names();
            if (std::find(names.begin(), names.end(), id) == names.end())
                throw ConfigError("config: unknown suite '" + id + "'");
        }
        cfg.suites = ids;
    }
    if (j.contains("symbol")) {
        try {
            (void)symbol_from_json(j.at("symbol"));
        } catch (const std::exception& e) {
            throw ConfigError(std::string("config: invalid symbol: ") + e.what());
        }
        cfg.symbol = j.at("symbol");
    }
    if (j.contains("caps")) {
        const auto& c = j.at("caps");
        if (!c.is_object()) throw ConfigError("config: caps must be an object");
        SpectrumCaps caps;
        for (const auto& [key, val] : c.items()) {
            if (key == "J")
                caps.J = positive_integer(val, "caps.J");
            else if (key == "K")
                caps.K = positive_integer(val, "caps.K");
            else if (key == "quad") {
                u64 q = positive_integer(val, "caps.quad");
                if (q < 8 || q > (u64(1) << 20)) throw ConfigError("config: caps.quad must lie in [8, 2^20]");
                cfg.quad = int(q);
            } else
                throw ConfigError("config: unknown field 'caps." + key + "'");
        }
        cfg.caps = caps;
    }
    if (j.contains("n_max")) cfg.n_max = std::size_t(positive_integer(j.at("n_max"), "n_max"));
    if (j.contains("sigmas")) {
        const auto& s = j.at("sigmas");
        if (!s.is_array()) throw ConfigError("config: sigmas must be a list");
        for (const auto& e : s) {
            if (!e.is_number()) throw ConfigError("config: sigmas must be numbers");
            double v = e.get<double>();
            if (!(v > 0.0)) throw ConfigError("config: sigmas must be positive");
            if (!cfg.sigmas.empty() && !(v < cfg.sigmas.back())) throw ConfigError("config: sigmas must be descending");
            cfg.sigmas.push_back(v);
        }
    }
    if (j.contains("tolerances")) {
        const auto& t = j.at("tolerances");
        if (!t.is_object()) throw ConfigError("config: tolerances must be an object");
        const auto& keys = tolerance_keys();
        for (const auto& [key, val] : t.items()) {
            if (std::find(keys.begin(), keys.end(), key) == keys.end())
                throw ConfigError("config: unknown tolerance '" + key + "'");
            if (!val.is_number() || !(val.get<double>() >= 0.0))
                throw ConfigError("config: tolerance '" + key + "' must be a nonnegative number");
            cfg.tolerances[key] = val.get<double>();
        }
    }
    return cfg;
}

SuiteConfig load_suite_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: parse error: ") + e.what());
    }
    return parse_suite_config(j);
}

// ---- reports ----

bool SuiteReport::passed() const {
    for (const auto& c : checks)
        if (c.asserted && !c.pass) return false;
    return true;
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

nlohmann::json number(double v) {
    if (std::isfinite(v)) return v;
    return format_double(v);
}

}  // namespace

nlohmann::json to_json(const CheckResult& c) {
    nlohmann::json j;
    j["name"] = c.name;
    j["pass"] = c.pass;
    j["measured"] = number(c.measured);
    j["tolerance"] = number(c.tolerance);
    j["relation"] = c.relation;
    j["coarse"] = c.coarse;
    j["asserted"] = c.asserted;
    if (!c.detail.empty()) j["detail"] = c.detail;
    return j;
}

nlohmann::json to_json(const SuiteReport& r) {
    nlohmann::json j;
    j["suite"] = r.suite;
    j["symbol_hash"] = r.symbol_hash;
    j["passed"] = r.passed();
    j["runtime_s"] = r.runtime;
    j["caps"] = r.caps;
    j["checks"] = nlohmann::json::array();
    for (const auto& c : r.checks) j["checks"].push_back(to_json(c));
    return j;
}

void write_spectrum_csv(std::ostream& os, const SingularSpectrum& s) {
    os << "n,a_n,block_j,rank_in_block\n";
    for (std::size_t i = 0; i < s.values.size(); ++i)
        os << i + 1 << ',' << format_double(s.values[i]) << ',' << s.provenance[i].first << ','
           << s.provenance[i].second << '\n';
}

nlohmann::json spectrum_sidecar(const SingularSpectrum& s, const Symbol& sym) {
    nlohmann::json j;
    j["symbol_hash"] = symbol_hash(sym);
    j["caps"] = {{"J", s.J}, {"K", s.K}};
    j["converged"] = s.converged;
    j["drift"] = number(s.drift);
    j["vartheta"] = s.vartheta;
    j["blocks"] = s.blocks;
    j["last_block"] = s.last_block;
    j["row_tail"] = s.row_tail;
    j["count"] = s.values.size();
    return j;
}

void write_profile_csv(std::ostream& os, const CompactnessProfile& p) {
    os << "sigma,t,value,zero_count,residual_max\n";
    for (const auto& s : p.samples)
        os << format_double(s.sigma) << ',' << format_double(s.t) << ',' << format_double(s.value) << ','
           << s.zero_count << ',' << format_double(s.residual_max) << '\n';
}

}  // namespace hardyop
