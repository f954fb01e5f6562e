#include "hardyop/dseries.hpp"

#include <algorithm>
#include <cmath>

#include "lattice.hpp"

namespace hardyop {

DirichletPolynomial::DirichletPolynomial(PrimeSupport support, IndexBound bound)
    : support_(std::move(support)), bound_(bound) {}

DirichletPolynomial DirichletPolynomial::constant(const PrimeSupport& support, Complex c) {
    DirichletPolynomial p(support, IndexBound::at_most(1));
    p.set(unit_index(support), c);
    return p;
}

DirichletPolynomial DirichletPolynomial::from_terms(const PrimeSupport& support,
                                                    const std::vector<std::pair<u64, Complex>>& terms) {
    u64 top = 1;
    for (const auto& [n, c] : terms) top = std::max(top, n);
    return from_terms(support, terms, IndexBound::at_most(top));
}

DirichletPolynomial DirichletPolynomial::from_terms(const PrimeSupport& support,
                                                    const std::vector<std::pair<u64, Complex>>& terms,
                                                    IndexBound bound) {
    DirichletPolynomial p(support, bound);
    for (const auto& [n, c] : terms) p.add(to_index(support, n), c);
    return p;
}

Complex DirichletPolynomial::coeff(const SmoothIndex& idx) const {
    auto it = coeffs_.find(idx);
    return it == coeffs_.end() ? Complex{} : it->second;
}

Complex DirichletPolynomial::coeff(u64 n) const {
    auto idx = factor_over(support_, n);
    return idx ? coeff(*idx) : Complex{};
}

Complex DirichletPolynomial::constant_term() const { return coeff(unit_index(support_)); }

void DirichletPolynomial::set(const SmoothIndex& idx, Complex c) {
    if (idx.exps.size() != support_.size())
        throw std::invalid_argument("DirichletPolynomial: index does not match the support");
    if (!bound_.admits(support_, idx))
        throw std::invalid_argument("DirichletPolynomial: index " + index_string(support_, idx) +
                                    " exceeds the truncation bound");
    if (std::abs(c) < kPruneThreshold)
        coeffs_.erase(idx);
    else
        coeffs_[idx] = c;
}

void DirichletPolynomial::add(const SmoothIndex& idx, Complex c) { set(idx, coeff(idx) + c); }

double DirichletPolynomial::l1_norm() const {
    double s = 0.0;
    for (const auto& [k, c] : coeffs_) s += std::abs(c);
    return s;
}

double DirichletPolynomial::l2_norm_squared() const {
    double s = 0.0;
    for (const auto& [k, c] : coeffs_) s += std::norm(c);
    return s;
}

double DirichletPolynomial::max_log_index() const {
    double m = 0.0;
    for (const auto& [k, c] : coeffs_) m = std::max(m, index_log(support_, k));
    return m;
}

Character Character::trivial(const PrimeSupport& support) {
    return Character{std::vector<double>(support.size(), 0.0)};
}

Complex Character::value(const SmoothIndex& idx) const {
    if (idx.exps.size() != angles.size()) throw std::invalid_argument("Character: support mismatch");
    double a = 0.0;
    for (std::size_t i = 0; i < angles.size(); ++i) a += idx.exps[i] * angles[i];
    return std::polar(1.0, a);
}

DirichletPolynomial multiply(const DirichletPolynomial& f, const DirichletPolynomial& g, IndexBound bound) {
    if (!(f.support() == g.support())) throw std::invalid_argument("multiply: mismatched supports");
    const auto& sup = f.support();
    DirichletPolynomial::Coeffs acc;
    for (const auto& [a, fa] : f.coeffs()) {
        for (const auto& [b, gb] : g.coeffs()) {
            SmoothIndex m = index_product(a, b);
            bool ok = bound.exact() ? bound.admits(0.0, index_value(sup, m))
                                    : bound.admits(index_log(sup, m), std::nullopt);
            if (ok) acc[m] += fa * gb;
        }
    }
    DirichletPolynomial out(sup, bound);
    for (const auto& [k, c] : acc) out.set(k, c);
    return out;
}

DirichletPolynomial multiply(const DirichletPolynomial& f, const DirichletPolynomial& g, u64 N) {
    return multiply(f, g, IndexBound::at_most(N));
}

DirichletPolynomial add(const DirichletPolynomial& f, const DirichletPolynomial& g) {
    if (!(f.support() == g.support())) throw std::invalid_argument("add: mismatched supports");
    IndexBound b = f.bound().log_limit() >= g.bound().log_limit() ? f.bound() : g.bound();
    DirichletPolynomial out(f.support(), b);
    for (const auto& [k, c] : f.coeffs()) out.add(k, c);
    for (const auto& [k, c] : g.coeffs()) out.add(k, c);
    return out;
}

DirichletPolynomial scale(const DirichletPolynomial& f, Complex c) {
    DirichletPolynomial out(f.support(), f.bound());
    for (const auto& [k, v] : f.coeffs()) out.set(k, v * c);
    return out;
}

DirichletPolynomial exp_series(const DirichletPolynomial& f, IndexBound bound) {
    if (std::abs(f.constant_term()) != 0.0)
        throw std::invalid_argument("exp_series: constant coefficient must vanish");
    auto lat = detail::make_lattice(f.support(), bound);
    std::vector<detail::Term> terms;
    for (const auto& [k, c] : f.coeffs()) terms.push_back({k, c});
    return detail::to_polynomial(lat, detail::lattice_exp(lat, terms));
}

DirichletPolynomial exp_series(const DirichletPolynomial& f, u64 N) {
    return exp_series(f, IndexBound::at_most(N));
}

DirichletPolynomial power_symbol_log(double log_n, const DirichletPolynomial& phi0, IndexBound bound) {
    auto lat = detail::make_lattice(phi0.support(), bound);
    return detail::to_polynomial(lat, detail::lattice_power_symbol(lat, log_n, phi0));
}

DirichletPolynomial power_symbol(u64 n, const DirichletPolynomial& phi0, IndexBound bound) {
    if (n == 0) throw std::invalid_argument("power_symbol: n must be positive");
    return power_symbol_log(std::log(static_cast<double>(n)), phi0, bound);
}

DirichletPolynomial power_symbol(u64 n, const DirichletPolynomial& phi0, u64 N) {
    return power_symbol(n, phi0, IndexBound::at_most(N));
}

Complex evaluate(const DirichletPolynomial& f, Complex s) {
    Complex acc{};
    for (const auto& [k, c] : f.coeffs()) acc += c * std::exp(-s * index_log(f.support(), k));
    return acc;
}

Complex evaluate_derivative(const DirichletPolynomial& f, Complex s) {
    Complex acc{};
    for (const auto& [k, c] : f.coeffs()) {
        double L = index_log(f.support(), k);
        acc -= c * L * std::exp(-s * L);
    }
    return acc;
}

DirichletPolynomial twist(const DirichletPolynomial& f, const Character& chi) {
    if (chi.angles.size() != f.support().size()) throw std::invalid_argument("twist: support mismatch");
    DirichletPolynomial out(f.support(), f.bound());
    for (const auto& [k, c] : f.coeffs()) out.set(k, c * chi.value(k));
    return out;
}

Complex BlockFunction::value(Complex s) const {
    return std::exp(-s * std::log(static_cast<double>(j))) * evaluate(g, s);
}

Complex BlockFunction::derivative(Complex s) const {
    double lj = std::log(static_cast<double>(j));
    return std::exp(-s * lj) * (evaluate_derivative(g, s) - lj * evaluate(g, s));
}

Complex BlockFunction::at_infinity() const { return j == 1 ? g.constant_term() : Complex{}; }

namespace detail {

bool Lattice::in_box(const SmoothIndex& idx) const {
    for (std::size_t i = 0; i < dims.size(); ++i)
        if (idx.exps[i] >= dims[i]) return false;
    return true;
}

std::size_t Lattice::offset(const SmoothIndex& idx) const {
    std::size_t off = 0;
    for (std::size_t i = 0; i < dims.size(); ++i) off += idx.exps[i] * strides[i];
    return off;
}

SmoothIndex Lattice::index_at(std::size_t pos) const {
    const std::size_t d = dims.size();
    return SmoothIndex{std::vector<std::uint32_t>(coords.begin() + pos * d, coords.begin() + (pos + 1) * d)};
}

Lattice make_lattice(const PrimeSupport& support, const IndexBound& bound, std::size_t capacity) {
    Lattice lat;
    lat.support = support;
    lat.bound = bound;
    const std::size_t d = support.size();
    lat.dims.resize(d);
    std::size_t size = 1;
    for (std::size_t i = 0; i < d; ++i) {
        std::uint32_t e = 0;
        for (;;) {
            double lg = (e + 1) * support.log_prime(i);
            std::optional<u64> v = bound.exact() ? pow_checked(support.prime(i), e + 1) : std::nullopt;
            if (!bound.admits(lg, v)) break;
            ++e;
        }
        lat.dims[i] = e + 1;
        if (size > capacity / lat.dims[i])
            throw CapacityError("lattice exceeds capacity of " + std::to_string(capacity) + " positions");
        size *= lat.dims[i];
    }
    lat.size = size;
    lat.strides.assign(d, 1);
    for (std::size_t i = d; i-- > 1;) lat.strides[i - 1] = lat.strides[i] * lat.dims[i];
    lat.logs.assign(size, 0.0);
    lat.inside.assign(size, 0);
    lat.coords.assign(size * d, 0);

    const double lim = bound.log_limit();
    std::vector<std::uint32_t> c(d, 0);
    for (std::size_t pos = 0; pos < size; ++pos) {
        double lg = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            lat.coords[pos * d + i] = c[i];
            lg += c[i] * support.log_prime(i);
        }
        lat.logs[pos] = lg;
        bool in;
        if (bound.exact()) {
            if (lg > lim + 1e-9)
                in = false;
            else if (lg < lim - 1e-9)
                in = true;
            else
                in = bound.admits(support, SmoothIndex{c});
        } else {
            in = bound.admits(lg, std::nullopt);
        }
        lat.inside[pos] = in;
        for (std::size_t i = d; i-- > 0;) {
            if (++c[i] < lat.dims[i]) break;
            c[i] = 0;
        }
    }
    return lat;
}

std::vector<Complex> lattice_exp(const Lattice& lat, const std::vector<Term>& f) {
    const std::size_t d = lat.dim();
    struct W {
        std::size_t off;
        std::size_t idx_pos;
        Complex w;
    };
    std::vector<W> terms;
    for (const auto& t : f) {
        if (t.idx.is_one()) throw std::invalid_argument("lattice_exp: constant term must vanish");
        if (!lat.in_box(t.idx)) continue;
        std::size_t off = lat.offset(t.idx);
        terms.push_back({off, off, t.c * lat.logs[off]});
    }
    std::sort(terms.begin(), terms.end(), [](const W& a, const W& b) { return a.off < b.off; });

    std::vector<Complex> g(lat.size, Complex{});
    g[0] = 1.0;
    if (d == 1) {
        for (std::size_t pos = 1; pos < lat.size; ++pos) {
            if (!lat.inside[pos]) continue;
            Complex acc{};
            for (const auto& t : terms) {
                if (t.off > pos) break;
                acc += t.w * g[pos - t.off];
            }
            g[pos] = acc / lat.logs[pos];
        }
        return g;
    }
    for (std::size_t pos = 1; pos < lat.size; ++pos) {
        if (!lat.inside[pos]) continue;
        const std::uint32_t* cp = &lat.coords[pos * d];
        Complex acc{};
        for (const auto& t : terms) {
            if (t.off > pos) break;
            const std::uint32_t* ct = &lat.coords[t.idx_pos * d];
            bool ok = true;
            for (std::size_t i = 0; i < d; ++i) {
                if (ct[i] > cp[i]) {
                    ok = false;
                    break;
                }
            }
            if (ok) acc += t.w * g[pos - t.off];
        }
        g[pos] = acc / lat.logs[pos];
    }
    return g;
}

std::vector<Complex> lattice_power_symbol(const Lattice& lat, double log_n, const DirichletPolynomial& phi0) {
    if (!(lat.support == phi0.support())) throw std::invalid_argument("power_symbol: support mismatch");
    if (log_n < 0.0) throw std::invalid_argument("power_symbol: n must be positive");
    std::vector<Term> terms;
    Complex c1{};
    for (const auto& [k, c] : phi0.coeffs()) {
        if (k.is_one())
            c1 = c;
        else
            terms.push_back({k, -log_n * c});
    }
    std::vector<Complex> g;
    if (log_n == 0.0) {
        g.assign(lat.size, Complex{});
        g[0] = 1.0;
        return g;
    }
    g = lattice_exp(lat, terms);
    Complex scale = std::exp(-c1 * log_n);
    for (auto& v : g) v *= scale;
    return g;
}

std::shared_ptr<const Lattice> cached_lattice(const PrimeSupport& support, double log_bound, std::size_t capacity) {
    thread_local std::vector<std::shared_ptr<const Lattice>> cache;
    for (const auto& lat : cache) {
        if (lat->bound.log_limit() == log_bound && !lat->bound.exact() && lat->support == support) {
            if (lat->size > capacity)
                throw CapacityError("lattice exceeds capacity of " + std::to_string(capacity) + " positions");
            return lat;
        }
    }
    auto lat = std::make_shared<const Lattice>(make_lattice(support, IndexBound::log_at_most(log_bound), capacity));
    if (cache.size() >= 8) cache.erase(cache.begin());
    cache.push_back(lat);
    return lat;
}

AdaptiveSeries adaptive_power_symbol(double log_n, const DirichletPolynomial& phi0, double tol, bool relative,
                                     std::size_t capacity, double start_bound) {
    const auto& sup = phi0.support();
    bool constant = phi0.size() == 0 || (phi0.size() == 1 && phi0.coeffs().begin()->first.is_one());
    if (sup.empty() || constant || log_n == 0.0) {
        AdaptiveSeries out;
        out.lattice = cached_lattice(sup, 0.0, capacity);
        out.coeffs = lattice_power_symbol(*out.lattice, log_n, phi0);
        out.total = std::norm(out.coeffs[0]);
        out.resolved = true;
        return out;
    }
    double pmax = 0.0;
    for (std::size_t i = 0; i < sup.size(); ++i) pmax = std::max(pmax, sup.log_prime(i));
    double LB = 16.0 * pmax;
    while (LB < start_bound) LB *= 2.0;
    AdaptiveSeries best;
    bool have = false;
    for (;;) {
        std::shared_ptr<const Lattice> lat;
        try {
            lat = cached_lattice(sup, LB, capacity);
        } catch (const CapacityError&) {
            if (!have) throw;
            return best;
        }
        AdaptiveSeries cur;
        cur.coeffs = lattice_power_symbol(*lat, log_n, phi0);
        double total = 0.0, shell = 0.0;
        for (std::size_t pos = 0; pos < lat->size; ++pos) {
            double m = std::norm(cur.coeffs[pos]);
            total += m;
            if (lat->logs[pos] > 0.5 * LB) shell += m;
        }
        cur.lattice = std::move(lat);
        cur.log_bound = LB;
        cur.total = total;
        cur.tail = shell;
        double limit = relative ? tol * total : tol;
        // the shell must also be past the bulk of the mass
        cur.resolved = shell <= limit && (shell <= 1e-2 * total || shell == 0.0);
        best = std::move(cur);
        have = true;
        if (best.resolved) return best;
        LB *= 2.0;
    }
}

DirichletPolynomial to_polynomial(const Lattice& lat, const std::vector<Complex>& coeffs) {
    DirichletPolynomial out(lat.support, lat.bound);
    for (std::size_t pos = 0; pos < lat.size; ++pos) {
        if (!lat.inside[pos] || std::abs(coeffs[pos]) < kPruneThreshold) continue;
        out.set(lat.index_at(pos), coeffs[pos]);
    }
    return out;
}

}  // namespace detail

}  // namespace hardyop
