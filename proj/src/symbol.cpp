#include "hardyop/symbol.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <set>

namespace hardyop {

using nlohmann::json;

std::string to_string(SymbolKind k) {
    switch (k) {
        case SymbolKind::affine: return "affine";
        case SymbolKind::angle: return "angle";
        case SymbolKind::custom: return "custom";
    }
    return "custom";
}

SymbolKind symbol_kind_from_string(const std::string& s) {
    if (s == "affine") return SymbolKind::affine;
    if (s == "angle") return SymbolKind::angle;
    if (s == "custom") return SymbolKind::custom;
    throw std::invalid_argument("unknown symbol kind '" + s + "'");
}

Symbol::Symbol(int c0, DirichletPolynomial phi0, double vartheta, SymbolKind kind, std::optional<AngleParams> angle)
    : c0_(c0), phi0_(std::move(phi0)), vartheta_(vartheta), kind_(kind), angle_(angle) {
    if (c0_ < 1) throw std::invalid_argument("Symbol: c0 must be a positive integer");
    if (!(vartheta_ >= 0.0)) throw std::invalid_argument("Symbol: vartheta must be nonnegative");
    if (kind_ == SymbolKind::angle && (!angle_ || phi0_.support().size() != 1))
        throw std::invalid_argument("Symbol: angle kind needs angle parameters and one prime");
    for (const auto& [k, c] : phi0_.coeffs()) terms_.emplace_back(index_log(phi0_.support(), k), c);
}

Complex angle_phi(double alpha, Complex z) {
    return std::exp(alpha * std::log((1.0 - z) / (1.0 + z)));
}

Complex Symbol::phi0_at(Complex s) const {
    if (angle_) {
        Complex z = std::exp(-s * std::log(double(angle_->prime)));
        return angle_->theta_shift + angle_phi(angle_->alpha, z);
    }
    Complex acc{};
    for (const auto& [L, c] : terms_) acc += c * std::exp(-s * L);
    return acc;
}

Complex Symbol::dphi0_at(Complex s) const {
    if (angle_) {
        double lp = std::log(double(angle_->prime));
        Complex z = std::exp(-s * lp);
        Complex Phi = angle_phi(angle_->alpha, z);
        return Phi * (-2.0 * angle_->alpha / (1.0 - z * z)) * (-lp * z);
    }
    Complex acc{};
    for (const auto& [L, c] : terms_) acc -= c * L * std::exp(-s * L);
    return acc;
}

Complex boundary_value(const DirichletPolynomial& phi0, const Character& chi) {
    Complex acc{};
    for (const auto& [k, c] : phi0.coeffs()) acc += c * chi.value(k);
    return acc;
}

Complex Symbol::boundary_value(const Character& chi) const {
    if (angle_) {
        Complex z = std::polar(1.0, chi.angles.at(0));
        if (std::abs(1.0 + z) < 1e-300) return {std::numeric_limits<double>::infinity(), 0.0};
        return angle_->theta_shift + angle_phi(angle_->alpha, z);
    }
    return hardyop::boundary_value(phi0_, chi);
}

double Symbol::imag_bound(double re_limit) const {
    if (angle_) return std::tan(angle_->alpha * std::numbers::pi / 2) * std::max(re_limit, 0.0);
    double b = std::abs(c1().imag());
    for (const auto& [k, c] : phi0_.coeffs())
        if (!k.is_one()) b += std::abs(c);
    return b;
}

Symbol make_affine(int c0, Complex c1, const std::vector<std::pair<u64, Complex>>& coeffs) {
    std::vector<u64> primes;
    for (const auto& [p, c] : coeffs) primes.push_back(p);
    std::sort(primes.begin(), primes.end());
    if (std::adjacent_find(primes.begin(), primes.end()) != primes.end())
        throw std::invalid_argument("make_affine: repeated prime");
    PrimeSupport support(primes);
    std::vector<std::pair<u64, Complex>> terms{{1, c1}};
    double sum = 0.0;
    for (const auto& [p, c] : coeffs) {
        terms.emplace_back(p, c);
        sum += std::abs(c);
    }
    double vartheta = c1.real() - sum;
    if (vartheta < 0.0)
        throw std::invalid_argument("make_affine: Re c1 must be at least the sum of |c_p|");
    u64 top = primes.empty() ? 1 : primes.back();
    auto phi0 = DirichletPolynomial::from_terms(support, terms, IndexBound::at_most(top));
    return Symbol(c0, std::move(phi0), vartheta, SymbolKind::affine);
}

std::vector<double> angle_taylor(double alpha, std::size_t K) {
    // (1 - z^2) Phi' = -2 alpha Phi
    std::vector<double> t(K + 1, 0.0);
    t[0] = 1.0;
    if (K >= 1) t[1] = -2.0 * alpha;
    for (std::size_t k = 1; k < K; ++k)
        t[k + 1] = (-2.0 * alpha * t[k] + double(k - 1) * t[k - 1]) / double(k + 1);
    return t;
}

std::size_t angle_taylor_order(double alpha, double radius, double tol) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("angle map: alpha must lie in (0,1)");
    if (!(radius > 0.0 && radius < 1.0)) throw std::invalid_argument("angle map: radius must lie in (0,1)");
    std::size_t kmax = std::size_t(std::ceil(std::log(1e-40) / std::log(radius))) + 100;
    auto t = angle_taylor(alpha, kmax);
    // |t_k| is eventually decreasing, so the remainder is bounded geometrically
    double tail = std::abs(t[kmax]) * std::pow(radius, double(kmax + 1)) / (1.0 - radius);
    for (std::size_t K = kmax; K-- > 0;) {
        double next = tail + std::abs(t[K + 1]) * std::pow(radius, double(K + 1));
        if (next >= tol) return K + 1;
        tail = next;
    }
    return 1;
}

Symbol make_angle(const AngleParams& params, int c0) {
    if (!(params.alpha > 0.0 && params.alpha < 1.0))
        throw std::invalid_argument("make_angle: alpha must lie in (0,1)");
    if (!(params.theta_shift >= 0.0)) throw std::invalid_argument("make_angle: theta_shift must be nonnegative");
    std::size_t required = angle_taylor_order(params.alpha);
    AngleParams p = params;
    if (p.taylor_order == 0) p.taylor_order = required;
    if (p.taylor_order < required)
        throw TaylorOrderError("make_angle: taylor_order " + std::to_string(p.taylor_order) +
                                   " too small, need at least " + std::to_string(required),
                               required);
    PrimeSupport support({p.prime});
    auto t = angle_taylor(p.alpha, p.taylor_order);
    DirichletPolynomial phi0(support, IndexBound::log_at_most(double(p.taylor_order) * support.log_prime(0)));
    for (std::size_t k = 0; k <= p.taylor_order; ++k) {
        double c = t[k] + (k == 0 ? p.theta_shift : 0.0);
        phi0.set(SmoothIndex{{std::uint32_t(k)}}, c);
    }
    return Symbol(c0, std::move(phi0), p.theta_shift, SymbolKind::angle, p);
}

namespace {

// min of Re phi0* over a uniform grid with n points per prime
double grid_min_re(const Symbol& sym, int n) {
    const std::size_t d = sym.support().size();
    if (d == 0) return sym.c1().real();
    std::vector<int> c(d, 0);
    Character chi{std::vector<double>(d, 0.0)};
    double best = std::numeric_limits<double>::infinity();
    for (;;) {
        for (std::size_t i = 0; i < d; ++i) chi.angles[i] = 2.0 * std::numbers::pi * c[i] / n;
        best = std::min(best, sym.boundary_value(chi).real());
        std::size_t i = d;
        while (i-- > 0) {
            if (++c[i] < n) break;
            c[i] = 0;
        }
        if (i == std::size_t(-1)) break;
    }
    return best;
}

}  // namespace

Symbol make_custom(int c0, const DirichletPolynomial& phi0) {
    const std::size_t d = phi0.support().size();
    bool constant = phi0.size() == 0 || (phi0.size() == 1 && phi0.coeffs().begin()->first.is_one());
    if (constant) {
        double re = phi0.constant_term().real();
        if (re < 0.0) throw std::invalid_argument("make_custom: constant phi0 needs Re >= 0");
        return Symbol(c0, phi0, re, SymbolKind::custom);
    }
    int n = int(std::ceil(std::pow(1e4, 1.0 / double(d))));
    Symbol probe(c0, phi0, 0.0, SymbolKind::custom);
    double m = grid_min_re(probe, n);
    if (m < -1e-9)
        throw std::invalid_argument("make_custom: Re phi0 takes negative boundary values (min " +
                                    std::to_string(m) + ")");
    return Symbol(c0, phi0, std::max(0.0, m), SymbolKind::custom);
}

Symbol twist(const Symbol& sym, const Character& chi) {
    auto phi0 = twist(sym.phi0(), chi);
    SymbolKind kind = sym.kind() == SymbolKind::affine ? SymbolKind::affine : SymbolKind::custom;
    return Symbol(sym.c0(), std::move(phi0), sym.vartheta(), kind);
}

VarthetaEstimate estimate_vartheta(const Symbol& sym, int grid_size) {
    if (grid_size < 2) throw std::invalid_argument("estimate_vartheta: grid_size must be at least 2");
    if (sym.support().empty()) return {sym.c1().real(), 0.0};
    return {grid_min_re(sym, grid_size), 2.0 * std::numbers::pi / grid_size};
}

SectorBound angle_sector_bound(const Symbol& sym, int samples) {
    if (sym.support().size() != 1) throw std::invalid_argument("angle_sector_bound: single prime only");
    const double half = std::numbers::pi / sym.support().log_prime(0);
    double B = 0.0;
    for (int i = 1; i < samples; ++i) {
        double t = -half + 2.0 * half * i / samples;
        if (std::abs(t) < 1e-12) continue;
        Complex v = sym.phi(Complex(0.0, t));
        if (!(v.real() > 0.0)) throw std::domain_error("angle_sector_bound: boundary value leaves the half-plane");
        B = std::max(B, std::abs(v.imag()) / v.real());
    }
    return {B, 2.0 / std::numbers::pi * std::atan(B)};
}

namespace {

json index_json(const PrimeSupport& sup, const SmoothIndex& k) {
    if (auto v = index_value(sup, k)) return *v;
    return json(k.exps);
}

SmoothIndex index_from_json(const PrimeSupport& sup, const json& j) {
    if (j.is_number_unsigned() || j.is_number_integer()) {
        auto v = j.get<long long>();
        if (v < 1) throw std::invalid_argument("symbol json: index must be positive");
        return to_index(sup, u64(v));
    }
    if (j.is_array()) {
        auto e = j.get<std::vector<std::uint32_t>>();
        if (e.size() != sup.size()) throw std::invalid_argument("symbol json: exponent array length mismatch");
        return SmoothIndex{e};
    }
    throw std::invalid_argument("symbol json: index must be an integer or exponent array");
}

}  // namespace

json to_json(const Symbol& sym) {
    json j;
    j["c0"] = sym.c0();
    j["kind"] = to_string(sym.kind());
    j["support"] = sym.support().primes();
    json coeffs = json::array();
    for (const auto& [k, c] : sym.phi0().coeffs())
        coeffs.push_back(json::array({index_json(sym.support(), k), c.real(), c.imag()}));
    j["coefficients"] = coeffs;
    j["vartheta"] = sym.vartheta();
    json meta = json::object();
    const auto& b = sym.phi0().bound();
    if (b.exact())
        meta["bound"] = *b.exact();
    else
        meta["log_bound"] = b.log_limit();
    if (const auto& a = sym.angle()) {
        meta["alpha"] = a->alpha;
        meta["theta_shift"] = a->theta_shift;
        meta["prime"] = a->prime;
        meta["taylor_order"] = a->taylor_order;
    }
    j["meta"] = meta;
    return j;
}

Symbol symbol_from_json(const json& j) {
    if (!j.is_object()) throw std::invalid_argument("symbol json: expected an object");
    static const std::set<std::string> allowed{"c0", "kind", "support", "coefficients", "vartheta", "meta"};
    for (const auto& [k, v] : j.items())
        if (!allowed.count(k)) throw std::invalid_argument("symbol json: unknown field '" + k + "'");
    int c0 = j.at("c0").get<int>();
    SymbolKind kind = symbol_kind_from_string(j.at("kind").get<std::string>());
    json meta = j.value("meta", json::object());
    if (kind == SymbolKind::angle) {
        AngleParams p;
        p.alpha = meta.at("alpha").get<double>();
        p.theta_shift = meta.value("theta_shift", 0.0);
        p.prime = meta.value("prime", u64(2));
        p.taylor_order = meta.value("taylor_order", std::size_t(0));
        return make_angle(p, c0);
    }
    std::vector<u64> primes;
    if (j.contains("support")) {
        primes = j.at("support").get<std::vector<u64>>();
    } else {
        for (const auto& t : j.at("coefficients")) {
            u64 n = t.at(0).get<u64>();
            if (n > 1) primes.push_back(n);
        }
        std::sort(primes.begin(), primes.end());
        primes.erase(std::unique(primes.begin(), primes.end()), primes.end());
    }
    PrimeSupport sup(primes);
    if (kind == SymbolKind::affine) {
        Complex c1{};
        std::vector<std::pair<u64, Complex>> cp;
        for (const auto& t : j.at("coefficients")) {
            auto idx = index_from_json(sup, t.at(0));
            Complex c(t.at(1).get<double>(), t.at(2).get<double>());
            auto v = index_value(sup, idx);
            if (idx.is_one())
                c1 = c;
            else if (v && is_prime(*v))
                cp.emplace_back(*v, c);
            else
                throw std::invalid_argument("symbol json: affine coefficients must sit at 1 or at primes");
        }
        for (u64 p : primes) {
            bool seen = std::any_of(cp.begin(), cp.end(), [p](const auto& e) { return e.first == p; });
            if (!seen) cp.emplace_back(p, Complex{});
        }
        return make_affine(c0, c1, cp);
    }
    IndexBound bound = meta.contains("log_bound") ? IndexBound::log_at_most(meta.at("log_bound").get<double>())
                                                  : IndexBound::at_most(1);
    std::vector<std::pair<SmoothIndex, Complex>> terms;
    double top = 0.0;
    for (const auto& t : j.at("coefficients")) {
        auto idx = index_from_json(sup, t.at(0));
        terms.emplace_back(idx, Complex(t.at(1).get<double>(), t.at(2).get<double>()));
        top = std::max(top, index_log(sup, idx));
    }
    if (meta.contains("bound")) {
        bound = IndexBound::at_most(meta.at("bound").get<u64>());
    } else if (!meta.contains("log_bound")) {
        u64 m = 1;
        for (const auto& [idx, c] : terms) {
            auto v = index_value(sup, idx);
            if (!v) {
                m = 0;
                break;
            }
            m = std::max(m, *v);
        }
        bound = m ? IndexBound::at_most(m) : IndexBound::log_at_most(top);
    }
    DirichletPolynomial phi0(sup, bound);
    for (const auto& [idx, c] : terms) phi0.add(idx, c);
    return make_custom(c0, phi0);
}

std::string symbol_hash(const Symbol& sym) {
    std::string s = to_json(sym).dump();
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace hardyop
