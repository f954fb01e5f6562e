#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "hardyop/composition.hpp"
#include "hardyop/counting.hpp"
#include "hardyop/symbol.hpp"

namespace hardyop {

class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

enum class DecayModel { power_log, stretched_exp };
std::string to_string(DecayModel m);

struct DecayFit {
    double theta_hat = 0.0;
    double gamma_hat = 0.0;  // (log n)-exponent, or C for the stretched model
    DecayModel model = DecayModel::power_log;
    double r_squared = 0.0;
    double n_min = 0.0;
    double n_max = 0.0;
    double intercept = 0.0;
};

// log(v n^theta) = intercept - gamma log log n
DecayFit fit_power_log(const std::vector<std::pair<double, double>>& values, double theta);
// log(v n^theta) = intercept - C (log n)^{1/beta}
DecayFit fit_stretched(const std::vector<std::pair<double, double>>& values, double theta, double beta);

struct BesselRow {
    double x = 0.0;
    double lower = 0.0;
    double value = 0.0;  // periodic trapezoid
    double upper = 0.0;  // min(1, sqrt(pi)/4 x^{-1/2})
    double oracle = 0.0;  // e^{-2x} I0(2x)
    bool contained = false;
};
double bessel_integral(double x);
std::vector<BesselRow> bessel_bounds(const std::vector<double>& xs);

// e^{-x} I0(x), stable for large x
double scaled_i0(double x);
// ||C e_n|| for an affine symbol, from the Bessel product
double affine_norm_closed_form(const Symbol& sym, double log_n);
// ||C e_n|| for an angle symbol, by quadrature of the exact map on the circle
double angle_norm_exact(const Symbol& sym, double log_n);
// prod_j e^{-2L/j^beta} I0(2L/j^beta), j = 1..terms, as a logarithm
double stretched_log_product(double log_n, double beta, std::size_t terms);

// deterministic n-grid, geometric in n, rounded to integers
std::vector<double> log_spaced(double lo, double hi, std::size_t count);

struct CheckResult {
    std::string name;
    bool pass = false;
    double measured = 0.0;
    double tolerance = 0.0;
    std::string relation;  // how measured is compared with tolerance
    bool coarse = false;
    bool asserted = true;  // diagnostics do not affect the suite outcome
    std::string detail;
};

struct SuiteConfig {
    std::vector<std::string> suites;
    std::optional<nlohmann::json> symbol;
    std::optional<SpectrumCaps> caps;
    int quad = 0;  // quadrature resolution, 0 = default
    std::size_t n_max = 0;
    std::vector<double> sigmas;
    std::map<std::string, double> tolerances;
    std::uint64_t seed = 1;
    int threads = 1;

    double tol(const std::string& key, double fallback) const;
};

// strict: unknown fields and tolerance keys raise ConfigError
SuiteConfig parse_suite_config(const nlohmann::json& j);
SuiteConfig load_suite_config(const std::string& path);
const std::vector<std::string>& suite_names();
const std::vector<std::string>& tolerance_keys();

struct SuiteReport {
    std::string suite;
    std::string symbol_hash;
    std::vector<CheckResult> checks;
    double runtime = 0.0;
    nlohmann::json caps = nlohmann::json::object();
    // named CSV tables produced by the suite
    std::map<std::string, std::string> tables;

    bool passed() const;
};

SuiteReport run_suite(const std::string& id, const SuiteConfig& cfg);
std::vector<SuiteReport> run_suites(const SuiteConfig& cfg);

nlohmann::json to_json(const CheckResult& c);
nlohmann::json to_json(const SuiteReport& r);

// n,a_n,block_j,rank_in_block
void write_spectrum_csv(std::ostream& os, const SingularSpectrum& s);
nlohmann::json spectrum_sidecar(const SingularSpectrum& s, const Symbol& sym);
// sigma,t,value,zero_count,residual_max
void write_profile_csv(std::ostream& os, const CompactnessProfile& p);
// 17 significant digits
std::string format_double(double v);

}  // namespace hardyop
