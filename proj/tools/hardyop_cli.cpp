#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "hardyop/lab.hpp"

using namespace hardyop;
namespace fs = std::filesystem;

namespace {

struct Common {
    std::string config;
    std::string out = ".";
    std::uint64_t seed = 1;
    int threads = 1;
};

void add_common(CLI::App* app, Common& c) {
    app->add_option("--config", c.config, "JSON config");
    app->add_option("--out", c.out, "output directory");
    app->add_option("--seed", c.seed, "seed for sampled grids");
    app->add_option("--threads", c.threads, "worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
}

SuiteConfig load(const Common& c) {
    SuiteConfig cfg = c.config.empty() ? SuiteConfig{} : load_suite_config(c.config);
    cfg.seed = c.seed;
    cfg.threads = c.threads;
    return cfg;
}

void write_file(const Common& c, const std::string& name, const std::string& text) {
    fs::create_directories(c.out);
    std::ofstream os(fs::path(c.out) / name);
    if (!os) throw std::runtime_error("cannot write " + name);
    os << text;
    std::cout << (fs::path(c.out) / name).string() << '\n';
}

Symbol config_symbol(const SuiteConfig& cfg, Symbol fallback) {
    return cfg.symbol ? symbol_from_json(*cfg.symbol) : fallback;
}

// console only; files keep full precision
std::string brief(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

int emit_reports(const Common& c, const std::vector<SuiteReport>& reports, const std::string& name) {
    nlohmann::json all = nlohmann::json::array();
    bool ok = true;
    for (const auto& r : reports) {
        all.push_back(to_json(r));
        ok = ok && r.passed();
        for (const auto& [file, text] : r.tables) write_file(c, file, text);
        for (const auto& ch : r.checks)
            std::cout << r.suite << ": " << (!ch.asserted ? "info" : (ch.pass ? "PASS" : "FAIL")) << "  " << ch.name
                      << "  measured " << brief(ch.measured) << ' ' << ch.relation << ' ' << brief(ch.tolerance)
                      << '\n';
    }
    write_file(c, name, all.dump(2) + "\n");
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Composition operators on Dirichlet series: spectra, norms, counting functions"};
    app.require_subcommand(1);
    Common c;

    auto* approx = app.add_subcommand("approx", "approximation numbers (spectrum CSV)");
    auto* norms = app.add_subcommand("norms", "norm table ||C e_n||");
    auto* counting = app.add_subcommand("counting", "compactness profile CSV");
    auto* stanton = app.add_subcommand("stanton", "Stanton identity residuals");
    auto* fit = app.add_subcommand("fit", "decay exponent fits");
    auto* suite = app.add_subcommand("suite", "run the suites listed in the config");
    auto* bessel = app.add_subcommand("bessel", "Bessel bound table");
    for (auto* s : {approx, norms, counting, stanton, fit, suite, bessel}) add_common(s, c);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        SuiteConfig cfg = load(c);
        if (approx->parsed()) {
            Symbol sym = config_symbol(cfg, make_affine(1, 0.75, {{2, 0.25}}));
            SpectrumOptions opts;
            opts.threads = cfg.threads;
            auto s = approximation_numbers(sym, cfg.n_max ? cfg.n_max : 100, cfg.caps.value_or(SpectrumCaps{}), opts);
            std::ostringstream os;
            write_spectrum_csv(os, s);
            write_file(c, "spectrum.csv", os.str());
            write_file(c, "spectrum.json", spectrum_sidecar(s, sym).dump(2) + "\n");
            return 0;
        }
        if (norms->parsed()) {
            Symbol sym = config_symbol(cfg, make_affine(1, 0.75, {{2, 0.25}}));
            const int quad = cfg.quad ? cfg.quad : 8;
            std::ostringstream os;
            os << "n,coeff,quadrature\n";
            for (u64 n = 1; n <= (cfg.n_max ? cfg.n_max : 32); ++n)
                os << n << ',' << format_double(norm_en(sym, n, NormMethod::coeff)) << ','
                   << format_double(norm_en(sym, n, NormMethod::quadrature, quad)) << '\n';
            write_file(c, "norms.csv", os.str());
            return 0;
        }
        if (counting->parsed()) {
            Symbol sym = config_symbol(cfg, make_affine(1, 1.0, {{2, -1.0}}));
            auto sig = cfg.sigmas.empty() ? std::vector<double>{0.1, 0.05, 0.025, 0.0125} : cfg.sigmas;
            auto p = compactness_profile(sym, sig, 64, true, cfg.threads);
            std::ostringstream os;
            write_profile_csv(os, p);
            write_file(c, "profile.csv", os.str());
            for (std::size_t i = 0; i < sig.size(); ++i)
                std::cout << "sigma " << brief(sig[i]) << "  sup N/sigma " << brief(p.ratios[i]) << '\n';
            return 0;
        }
        if (stanton->parsed()) return emit_reports(c, {run_suite("stanton", cfg)}, "stanton.json");
        if (fit->parsed())
            return emit_reports(c, {run_suite("exponent", cfg), run_suite("stretched", cfg)}, "fit.json");
        if (bessel->parsed()) return emit_reports(c, {run_suite("bessel", cfg)}, "bessel.json");
        if (suite->parsed()) return emit_reports(c, run_suites(cfg), "report.json");
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
