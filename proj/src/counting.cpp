#include "hardyop/counting.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "hardyop/composition.hpp"
#include "parallel.hpp"

namespace hardyop {

double StripSpec::half_width() const { return std::numbers::pi / std::log(double(prime)); }
double StripSpec::center() const { return 2.0 * std::numbers::pi * double(k) / std::log(double(prime)); }

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Rect {
    double x0, x1, y0, y1;
    Complex corner(int i) const {
        switch (i) {
            case 0: return {x0, y0};
            case 1: return {x1, y0};
            case 2: return {x1, y1};
            default: return {x0, y1};
        }
    }
    bool contains(Complex s, double slack) const {
        return s.real() >= x0 - slack && s.real() <= x1 + slack && s.imag() >= y0 - slack &&
               s.imag() <= y1 + slack;
    }
};

struct Winding {
    int count = 0;
    bool near_edge = false;
    int edge = -1;  // 0 bottom, 1 right, 2 top, 3 left
    Complex where;
};

class Solver {
  public:
    Solver(const Symbol& sym, Complex w, const SolverOptions& opts) : sym_(sym), w_(w), opts_(opts) {}

    Complex F(Complex s) const { return sym_.phi(s) - w_; }
    Complex dF(Complex s) const { return sym_.dphi(s); }
    double tol() const { return opts_.newton_tol * (1.0 + std::abs(w_)); }

    Winding winding(const Rect& r) const {
        Winding out;
        std::array<Complex, 4> c, Fc;
        for (int i = 0; i < 4; ++i) {
            c[i] = r.corner(i);
            Fc[i] = F(c[i]);
        }
        double total = 0.0;
        for (int e = 0; e < 4; ++e) {
            int f = (e + 1) % 4;
            Complex where;
            if (!segment(c[e], c[f], Fc[e], Fc[f], total, where)) {
                out.near_edge = true;
                out.edge = e;
                out.where = where;
                return out;
            }
        }
        double turns = total / kTwoPi;
        double rounded = std::round(turns);
        if (std::abs(turns - rounded) > 0.25)
            throw SolverError("argument principle: non-integer winding " + std::to_string(turns));
        out.count = int(rounded);
        return out;
    }

    std::optional<Complex> newton(Complex s, int iters = 80) const {
        for (int it = 0; it < iters; ++it) {
            Complex Fs = F(s);
            Complex d = dF(s);
            if (!std::isfinite(std::abs(Fs)) || std::abs(d) == 0.0) return std::nullopt;
            Complex step = Fs / d;
            s -= step;
            if (std::abs(step) < 1e-15 * (1.0 + std::abs(s))) break;
        }
        if (!(std::abs(F(s)) <= tol())) return std::nullopt;
        return s;
    }

    void solve(const Rect& r, int m, int depth, PreimageResult& out) const {
        if (m <= 0) return;
        const double scale = std::max(r.x1 - r.x0, r.y1 - r.y0);
        if (m == 1) {
            Complex mid(0.5 * (r.x0 + r.x1), 0.5 * (r.y0 + r.y1));
            if (auto s = newton(mid); s && r.contains(*s, 1e-12 * (1.0 + scale))) {
                record(*s, 1, out);
                return;
            }
        }
        if (scale < opts_.min_size || depth > 400) {
            Complex mid(0.5 * (r.x0 + r.x1), 0.5 * (r.y0 + r.y1));
            record(mid, m, out);
            out.warnings.push_back("unsplittable rectangle treated as a root of multiplicity " + std::to_string(m));
            return;
        }
        static const double fractions[] = {0.5, 0.4713, 0.5287, 0.4371, 0.5629, 0.3917, 0.6083, 0.3};
        for (double f : fractions) {
            Rect a = r, b = r;
            if (r.x1 - r.x0 >= r.y1 - r.y0) {
                double x = r.x0 + f * (r.x1 - r.x0);
                a.x1 = x;
                b.x0 = x;
            } else {
                double y = r.y0 + f * (r.y1 - r.y0);
                a.y1 = y;
                b.y0 = y;
            }
            Winding wa, wb;
            try {
                wa = winding(a);
                if (wa.near_edge) continue;
                wb = winding(b);
                if (wb.near_edge) continue;
            } catch (const SolverError&) {
                continue;
            }
            if (wa.count + wb.count != m || wa.count < 0 || wb.count < 0) continue;
            ++out.subdivisions;
            solve(a, wa.count, depth + 1, out);
            solve(b, wb.count, depth + 1, out);
            return;
        }
        throw SolverError("preimages: could not split a rectangle consistently");
    }

  private:
    // accumulates the argument change of F along [a,b]; false if a zero sits on it
    bool segment(Complex a, Complex b, Complex Fa, Complex Fb, double& acc, Complex& where) const {
        if (Fa == 0.0) {
            where = a;
            return false;
        }
        if (Fb == 0.0) {
            where = b;
            return false;
        }
        Complex m = 0.5 * (a + b);
        Complex Fm = F(m);
        double h = std::abs(b - a);
        if (Fm != 0.0) {
            double d1 = std::arg(Fm / Fa), d2 = std::arg(Fb / Fm);
            if (std::abs(d1) < 0.5 && std::abs(d2) < 0.5 && h * std::abs(dF(m)) < std::abs(Fm)) {
                acc += d1 + d2;
                return true;
            }
        }
        if (h < opts_.edge_tol) {
            where = m;
            return false;
        }
        return segment(a, m, Fa, Fm, acc, where) && segment(m, b, Fm, Fb, acc, where);
    }

    void record(Complex s, int m, PreimageResult& out) const {
        double res = std::abs(F(s));
        out.roots.push_back({s, m, res});
        out.residual_max = std::max(out.residual_max, res);
    }

    const Symbol& sym_;
    Complex w_;
    SolverOptions opts_;
};

void require_single_prime(const Symbol& sym) {
    if (sym.support().size() != 1) throw std::invalid_argument("counting: single-prime symbols only");
}

}  // namespace

PreimageResult preimages(const Symbol& sym, Complex w, const StripSpec& strip, double re_cap,
                         const SolverOptions& opts) {
    require_single_prime(sym);
    if (strip.prime != sym.support().prime(0)) throw std::invalid_argument("preimages: strip prime mismatch");
    if (!(w.real() > 0.0)) throw std::domain_error("preimages: Re w must be positive");
    PreimageResult out;
    if (!(re_cap > 0.0)) return out;
    Solver solver(sym, w, opts);
    Rect R{opts.eps, re_cap + opts.eps, strip.lower(), strip.upper()};
    Winding W;
    for (int attempt = 0;; ++attempt) {
        W = solver.winding(R);
        if (!W.near_edge) break;
        if (attempt >= 6) throw SolverError("preimages: roots keep landing on the rectangle boundary");
        Complex s = solver.newton(W.where).value_or(W.where);
        switch (W.edge) {
            case 0:
                R.y0 += s.imag() >= strip.lower() ? -opts.perturb : opts.perturb;
                break;
            case 1:
                R.x1 += opts.perturb;
                break;
            case 2:
                R.y1 += s.imag() < strip.upper() ? opts.perturb : -opts.perturb;
                break;
            default:
                R.x0 += opts.perturb;
                break;
        }
        out.warnings.push_back("root near the rectangle boundary; edge " + std::to_string(W.edge) + " moved by " +
                               std::to_string(opts.perturb));
    }
    if (W.count < 0) throw SolverError("preimages: negative winding number");
    out.zero_count = W.count;
    solver.solve(R, W.count, 0, out);
    int found = 0;
    for (const auto& r : out.roots) found += r.multiplicity;
    if (found != out.zero_count) throw SolverError("preimages: root count does not match the winding number");
    std::sort(out.roots.begin(), out.roots.end(), [](const Root& a, const Root& b) {
        return a.s.imag() != b.s.imag() ? a.s.imag() < b.s.imag() : a.s.real() < b.s.real();
    });
    return out;
}

namespace {

CountingValue counting_on(const Symbol& sym, Complex w_solve, Complex w_report, long k, double re_cap,
                          const SolverOptions& opts) {
    StripSpec strip{sym.support().prime(0), k};
    auto r = preimages(sym, w_solve, strip, re_cap, opts);
    CountingValue out;
    out.w = w_report;
    for (const auto& root : r.roots) out.value += root.multiplicity * root.s.real();
    out.zero_count = r.zero_count;
    out.residual_max = r.residual_max;
    out.subdivisions = r.subdivisions;
    return out;
}

double period(const Symbol& sym) { return double(sym.c0()) * kTwoPi / sym.support().log_prime(0); }

}  // namespace

CountingValue restricted_counting(const Symbol& sym, Complex w, long k, const SolverOptions& opts) {
    require_single_prime(sym);
    Complex shifted = w - Complex(0.0, period(sym) * double(k));
    return counting_on(sym, shifted, w, 0, w.real() / sym.c0(), opts);
}

CountingValue restricted_counting_direct(const Symbol& sym, Complex w, long k, const SolverOptions& opts) {
    require_single_prime(sym);
    return counting_on(sym, w, w, k, w.real() / sym.c0(), opts);
}

NevanlinnaValue nevanlinna(const Symbol& sym, Complex w, int k_range, const SolverOptions& opts) {
    require_single_prime(sym);
    if (!(w.real() > 0.0)) throw std::domain_error("nevanlinna: Re w must be positive");
    if (k_range < 0) throw std::invalid_argument("nevanlinna: k_range must be nonnegative");
    NevanlinnaValue out;
    const double P = period(sym);
    out.k_center = long(std::lround(w.imag() / P));
    std::vector<std::pair<long, double>> values;
    for (long k = out.k_center - k_range; k <= out.k_center + k_range; ++k) {
        auto v = restricted_counting(sym, w, k, opts);
        out.partial += v.value;
        out.residual_max = std::max(out.residual_max, v.residual_max);
        double dist = w.imag() - P * double(k);
        out.envelope_constant = std::max(out.envelope_constant, v.value * (1.0 + dist * dist) / w.real());
    }
    // strips whose image band misses w contribute nothing
    const double band = 0.5 * P + sym.imag_bound(w.real());
    if (out.envelope_constant > 0.0) {
        for (long side : {-1L, 1L}) {
            for (long k = out.k_center + side * (k_range + 1);; k += side) {
                double dist = w.imag() - P * double(k);
                if (std::abs(dist) > band) break;
                out.tail_bound += out.envelope_constant * w.real() / (1.0 + dist * dist);
            }
        }
    }
    out.littlewood_ok = out.partial + out.tail_bound <= w.real() / sym.c0() + 1e-8;
    return out;
}

CompactnessProfile compactness_profile(const Symbol& sym, const std::vector<double>& sigmas, int n_t, bool refine,
                                       int threads, const SolverOptions& opts) {
    require_single_prime(sym);
    if (n_t < 2) throw std::invalid_argument("compactness_profile: n_t must be at least 2");
    for (std::size_t i = 0; i < sigmas.size(); ++i) {
        if (!(sigmas[i] > 0.0)) throw std::invalid_argument("compactness_profile: sigmas must be positive");
        if (i > 0 && !(sigmas[i] < sigmas[i - 1]))
            throw std::invalid_argument("compactness_profile: sigmas must be descending");
    }
    if (n_t % 2) ++n_t;
    const double P = period(sym);
    CompactnessProfile out;
    out.sigmas = sigmas;
    for (double sigma : sigmas) {
        std::vector<ProfileSample> row(static_cast<std::size_t>(n_t));
        detail::parallel_for(row.size(), threads, [&](std::size_t i) {
            double t = -0.5 * P + P * double(i) / double(n_t);
            auto v = restricted_counting(sym, Complex(sigma, t), 0, opts);
            row[i] = {sigma, t, v.value, v.zero_count, v.residual_max};
        });
        std::size_t best = 0;
        for (std::size_t i = 1; i < row.size(); ++i)
            if (row[i].value > row[best].value) best = i;
        double sup = row[best].value, t_sup = row[best].t;
        if (refine && sup > 0.0) {
            const double step = P / double(n_t);
            double a = row[best].t - step, b = row[best].t + step;
            const double g = 0.5 * (std::sqrt(5.0) - 1.0);
            auto val = [&](double t) { return restricted_counting(sym, Complex(sigma, t), 0, opts).value; };
            double c = b - g * (b - a), d = a + g * (b - a);
            double fc = val(c), fd = val(d);
            for (int it = 0; it < 40; ++it) {
                if (fc > fd) {
                    b = d;
                    d = c;
                    fd = fc;
                    c = b - g * (b - a);
                    fc = val(c);
                } else {
                    a = c;
                    c = d;
                    fc = fd;
                    d = a + g * (b - a);
                    fd = val(d);
                }
            }
            for (auto [t, v] : {std::pair{c, fc}, std::pair{d, fd}}) {
                if (v > sup) {
                    sup = v;
                    t_sup = t;
                }
            }
        }
        out.ratios.push_back(sup / sigma);
        out.t_at_sup.push_back(t_sup);
        out.samples.insert(out.samples.end(), row.begin(), row.end());
    }
    return out;
}

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 15>;

// constants for the bound |f'(w)|^2 <= M^2 n_min^{-2 Re w}
void derivative_envelope(const BlockFunction& f, double& M, double& lam) {
    const auto& sup = f.g.support();
    const double lj = std::log(double(f.j));
    M = 0.0;
    double lmin = std::numeric_limits<double>::infinity();
    for (const auto& [k, c] : f.g.coeffs()) {
        double L = lj + index_log(sup, k);
        if (L <= 0.0) continue;
        M += std::abs(c) * L;
        lmin = std::min(lmin, L);
    }
    lam = 2.0 * lmin;
}

// integral of sigma |f'|^2 in sigma over [0, smax], panels refined toward 0
template <class G>
double sigma_integral(G&& g, double smax, const QuadOptions& q) {
    double acc = 0.0;
    double hi = smax;
    for (int i = 0; i < 12; ++i) {
        double lo = i == 11 ? 0.0 : 0.5 * hi;
        acc += GK::integrate(g, lo, hi, unsigned(q.max_depth), q.rel_tol);
        hi = lo;
    }
    return acc;
}

}  // namespace

double verify_littlewood_paley(const BlockFunction& f, const QuadOptions& quad) {
    const auto& sup = f.g.support();
    if (sup.size() != 1) throw std::invalid_argument("verify_littlewood_paley: single-prime support only");
    if (f.j == 0 || !sup.coprime(f.j)) throw std::invalid_argument("verify_littlewood_paley: j must be coprime");
    const double lp = sup.log_prime(0);
    const double lhs = f.norm_squared();
    double M, lam;
    derivative_envelope(f, M, lam);
    double rhs = std::norm(f.at_infinity());
    if (M > 0.0) {
        // tail: M^2 ∫_{smax}^∞ e^{-lam s} s ds < 1e-15
        double smax = 1.0;
        auto tail = [&](double s) { return M * M * std::exp(-lam * s) * (s / lam + 1.0 / (lam * lam)); };
        while (tail(smax) > 1e-15) smax *= 1.25;
        const int n = std::max(quad.t_nodes, 8);
        const double width = 2.0 * std::numbers::pi / lp;
        double acc = 0.0;
        for (int i = 0; i < n; ++i) {
            double t = -0.5 * width + width * double(i) / double(n);
            auto g = [&](double s) { return std::norm(f.derivative(Complex(s, t))) * s; };
            acc += sigma_integral(g, smax, quad);
        }
        acc *= width / double(n);
        rhs += 2.0 * lp / std::numbers::pi * acc;
    }
    return std::abs(lhs - rhs);
}

StantonResult verify_stanton(const Symbol& sym, const BlockFunction& f, const QuadOptions& quad) {
    require_single_prime(sym);
    const auto& sup = sym.support();
    if (!(f.g.support() == sup)) throw std::invalid_argument("verify_stanton: f must live over the symbol's support");
    const double lp = sup.log_prime(0);
    StantonResult out;

    // left side through the block of f
    u64 top = 1;
    for (const auto& [k, c] : f.g.coeffs()) {
        auto v = index_value(sup, k);
        if (!v) throw std::invalid_argument("verify_stanton: index of f too large");
        top = std::max(top, *v);
    }
    auto B = build_block(sym, f.j, top);
    Eigen::VectorXcd x = Eigen::VectorXcd::Zero(Eigen::Index(B.cols.size()));
    for (std::size_t c = 0; c < B.cols.size(); ++c) x(Eigen::Index(c)) = f.g.coeff(B.cols[c]);
    out.lhs = (B.entries * x).squaredNorm();

    double M, lam;
    derivative_envelope(f, M, lam);
    out.rhs = std::norm(f.at_infinity());
    if (M > 0.0) {
        const double c0 = sym.c0();
        const double h = c0 * std::numbers::pi / lp;
        auto band = [&](double s) { return h + sym.imag_bound(s); };
        auto tail = [&](double s) {
            return 2.0 * band(s) * M * M / c0 * std::exp(-lam * s) * (s / lam + 1.0 / (lam * lam));
        };
        double smax = 1.0;
        while (tail(smax) > 1e-12) smax *= 1.25;
        out.sigma_max = smax;
        out.t_max = band(smax);
        long evals = 0;
        auto inner = [&](double t) {
            auto g = [&](double s) {
                if (s <= 0.0) return 0.0;
                ++evals;
                double n = restricted_counting(sym, Complex(s, t), 0, quad.solver).value;
                return n == 0.0 ? 0.0 : std::norm(f.derivative(Complex(s, t))) * n;
            };
            return sigma_integral(g, smax, quad);
        };
        const double T = out.t_max;
        std::vector<double> cuts{-T};
        if (T > h) {
            cuts.push_back(-h);
            cuts.push_back(h);
        }
        cuts.push_back(T);
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
            acc += GK::integrate(inner, cuts[i], cuts[i + 1], unsigned(quad.max_depth), quad.rel_tol);
        out.evaluations = evals;
        out.rhs += 2.0 * lp / std::numbers::pi * acc;
    }
    out.residual = std::abs(out.lhs - out.rhs) / out.lhs;
    return out;
}

}  // namespace hardyop
