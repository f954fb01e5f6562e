#include "hardyop/composition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/SVD>

#include "lattice.hpp"
#include "parallel.hpp"

namespace hardyop {

namespace {

std::vector<SmoothIndex> column_indices(const PrimeSupport& sup, const IndexBound& cap) {
    auto lat = detail::make_lattice(sup, cap);
    std::vector<std::pair<double, SmoothIndex>> cols;
    for (std::size_t pos = 0; pos < lat.size; ++pos)
        if (lat.inside[pos]) cols.emplace_back(lat.logs[pos], lat.index_at(pos));
    std::sort(cols.begin(), cols.end());
    std::vector<SmoothIndex> out;
    for (auto& c : cols) out.push_back(std::move(c.second));
    return out;
}

}  // namespace

BlockMatrix build_block(const Symbol& sym, u64 j, const IndexBound& col_cap, const RowPolicy& rows) {
    const auto& sup = sym.support();
    if (j == 0 || !sup.coprime(j))
        throw std::invalid_argument("build_block: j = " + std::to_string(j) + " is not coprime to the support");
    BlockMatrix B;
    B.j = j;
    B.support = sup;
    B.cols = column_indices(sup, col_cap);
    const double lj = std::log(double(j));
    const auto c0 = std::uint32_t(sym.c0());

    const std::size_t d = sup.size();
    std::vector<detail::AdaptiveSeries> series(B.cols.size());
    double start = 0.0;  // columns come in increasing log order
    for (std::size_t c = 0; c < B.cols.size(); ++c) {
        series[c] = detail::adaptive_power_symbol(lj + index_log(sup, B.cols[c]), sym.phi0(), rows.tail_tol, false,
                                                  rows.capacity, start);
        start = series[c].log_bound;
        B.row_tail = std::max(B.row_tail, series[c].tail);
        B.rows_resolved = B.rows_resolved && series[c].resolved;
    }
    // rows get a mixed-radix code over the exponent box they can reach
    std::vector<u64> radix(d, 1);
    for (std::size_t c = 0; c < B.cols.size(); ++c)
        for (std::size_t i = 0; i < d; ++i)
            radix[i] = std::max<u64>(radix[i], u64(c0) * B.cols[c].exps[i] + series[c].lattice->dims[i]);
    std::vector<u64> stride(d, 1);
    for (std::size_t i = d; i-- > 1;) {
        if (stride[i] > (u64(1) << 62) / radix[i]) throw CapacityError("build_block: row box too large");
        stride[i - 1] = stride[i] * radix[i];
    }
    struct Entry {
        u64 code;
        std::size_t col;
        Complex v;
    };
    std::vector<Entry> entries;
    std::vector<u64> codes;
    for (std::size_t c = 0; c < B.cols.size(); ++c) {
        const auto& lat = *series[c].lattice;
        u64 base = 0;
        for (std::size_t i = 0; i < d; ++i) base += u64(c0) * B.cols[c].exps[i] * stride[i];
        for (std::size_t pos = 0; pos < lat.size; ++pos) {
            if (!lat.inside[pos] || std::abs(series[c].coeffs[pos]) < kPruneThreshold) continue;
            u64 code = base;
            for (std::size_t i = 0; i < d; ++i) code += lat.coords[pos * d + i] * stride[i];
            codes.push_back(code);
            entries.push_back({code, c, series[c].coeffs[pos]});
        }
    }
    std::sort(codes.begin(), codes.end());
    codes.erase(std::unique(codes.begin(), codes.end()), codes.end());
    for (u64 code : codes) {
        SmoothIndex r;
        r.exps.resize(d);
        for (std::size_t i = 0; i < d; ++i) r.exps[i] = std::uint32_t((code / stride[i]) % radix[i]);
        B.rows.push_back(std::move(r));
    }
    B.entries = Eigen::MatrixXcd::Zero(Eigen::Index(codes.size()), Eigen::Index(B.cols.size()));
    for (const auto& e : entries) {
        auto row = std::lower_bound(codes.begin(), codes.end(), e.code) - codes.begin();
        B.entries(Eigen::Index(row), Eigen::Index(e.col)) = e.v;
    }
    return B;
}

BlockMatrix build_block(const Symbol& sym, u64 j, u64 K, const RowPolicy& rows) {
    return build_block(sym, j, IndexBound::at_most(K), rows);
}

std::vector<double> singular_values(const Eigen::MatrixXcd& A) {
    if (A.size() == 0) return {};
    Eigen::VectorXd s;
    if (A.rows() >= 2 * A.cols()) {
        // tall blocks: A = QR has the singular values of R
        Eigen::HouseholderQR<Eigen::MatrixXcd> qr(A);
        Eigen::MatrixXcd R = qr.matrixQR().topRows(A.cols()).triangularView<Eigen::Upper>();
        s = Eigen::BDCSVD<Eigen::MatrixXcd>(R).singularValues();
    } else {
        s = Eigen::BDCSVD<Eigen::MatrixXcd>(A).singularValues();
    }
    std::vector<double> out(s.data(), s.data() + s.size());
    std::sort(out.begin(), out.end(), std::greater<>());
    return out;
}

std::vector<double> singular_values(const BlockMatrix& B) { return singular_values(B.entries); }

namespace {

struct Entry {
    double v;
    u64 j;
    std::size_t rank;
};

bool before(const Entry& a, const Entry& b) {
    if (a.v != b.v) return a.v > b.v;
    if (a.j != b.j) return a.j < b.j;
    return a.rank < b.rank;
}

SingularSpectrum spectrum_at(const Symbol& sym, std::size_t n_max, u64 J, u64 K, const SpectrumOptions& opts) {
    const auto& sup = sym.support();
    const double vt = sym.vartheta();
    const IndexBound cap = IndexBound::at_most(K);
    std::vector<Entry> top;
    SingularSpectrum out;
    out.J = J;
    out.K = K;
    out.vartheta = vt;

    auto threshold = [&]() {
        return top.size() >= n_max ? top[n_max - 1].v : -1.0;
    };
    const int threads = detail::resolve_threads(opts.threads);
    const std::size_t batch = std::size_t(std::max(4, 4 * threads));
    u64 j = 1;
    bool done = false;
    while (!done && j <= J) {
        std::vector<u64> js;
        while (js.size() < batch && j <= J) {
            if (sup.coprime(j)) js.push_back(j);
            ++j;
        }
        std::vector<std::vector<double>> vals(js.size());
        std::vector<double> tails(js.size(), 0.0);
        std::vector<char> skipped(js.size(), 0);
        const double thr0 = threshold();
        detail::parallel_for(js.size(), threads, [&](std::size_t i) {
            // envelope ||C_{phi,j}|| <= j^{-vartheta}
            if (thr0 >= 0.0 && std::pow(double(js[i]), -vt) <= thr0) {
                skipped[i] = 1;
                return;
            }
            auto B = build_block(sym, js[i], cap, opts.rows);
            vals[i] = singular_values(B);
            tails[i] = B.row_tail;
        });
        for (std::size_t i = 0; i < js.size(); ++i) {
            double thr = threshold();
            if (thr >= 0.0 && std::pow(double(js[i]), -vt) <= thr) {
                done = true;
                break;
            }
            if (skipped[i]) {
                done = true;
                break;
            }
            ++out.blocks;
            out.last_block = js[i];
            out.row_tail = std::max(out.row_tail, tails[i]);
            for (std::size_t r = 0; r < vals[i].size(); ++r) top.push_back({vals[i][r], js[i], r + 1});
            std::sort(top.begin(), top.end(), before);
            if (top.size() > n_max) top.resize(n_max);
            // block norms decrease along j
            double a1 = vals[i].empty() ? 0.0 : vals[i][0];
            if (top.size() >= n_max && a1 <= top[n_max - 1].v && js[i] > 1) {
                done = true;
                break;
            }
        }
    }
    for (const auto& e : top) {
        out.values.push_back(e.v);
        out.provenance.emplace_back(e.j, e.rank);
    }
    return out;
}

}  // namespace

SingularSpectrum approximation_numbers(const Symbol& sym, std::size_t n_max, const SpectrumCaps& caps,
                                       const SpectrumOptions& opts) {
    if (n_max == 0) throw std::invalid_argument("approximation_numbers: n_max must be positive");
    if (caps.J == 0 || caps.K == 0) throw std::invalid_argument("approximation_numbers: caps must be positive");
    if (!opts.check_drift) {
        auto s = spectrum_at(sym, n_max, caps.J, caps.K, opts);
        s.converged = s.values.size() >= n_max;
        s.drift = std::numeric_limits<double>::quiet_NaN();
        return s;
    }
    auto coarse = spectrum_at(sym, n_max, caps.J, caps.K, opts);
    u64 J2 = caps.J > std::numeric_limits<u64>::max() / 2 ? caps.J : 2 * caps.J;
    u64 K2 = caps.K > std::numeric_limits<u64>::max() / 2 ? caps.K : 2 * caps.K;
    auto fine = spectrum_at(sym, n_max, J2, K2, opts);
    double drift = 0.0;
    for (std::size_t i = 0; i < n_max; ++i) {
        double a = i < coarse.values.size() ? coarse.values[i] : 0.0;
        double b = i < fine.values.size() ? fine.values[i] : 0.0;
        drift = std::max(drift, std::abs(a - b));
    }
    fine.drift = drift;
    fine.converged = fine.values.size() >= n_max && drift < opts.drift_tol;
    return fine;
}

BasisImage apply_to_basis(const DirichletPolynomial& phi0, int c0, u64 n, double tol) {
    if (n == 0) throw std::invalid_argument("apply_to_basis: n must be positive");
    if (c0 < 0) throw std::invalid_argument("apply_to_basis: c0 must be nonnegative");
    const auto& sup = phi0.support();
    u64 rest = n;
    SmoothIndex k = unit_index(sup);
    for (std::size_t i = 0; i < sup.size(); ++i) {
        while (rest % sup.prime(i) == 0) {
            rest /= sup.prime(i);
            ++k.exps[i];
        }
    }
    auto series = detail::adaptive_power_symbol(std::log(double(n)), phi0, tol, true, std::size_t(1) << 18);
    BasisImage out;
    out.tail = series.tail;
    out.resolved = series.resolved;
    SmoothIndex shift = index_power(k, std::uint32_t(c0));
    const auto& lat = *series.lattice;
    for (std::size_t pos = 0; pos < lat.size; ++pos) {
        if (!lat.inside[pos] || std::abs(series.coeffs[pos]) < kPruneThreshold) continue;
        out.coeffs.emplace(index_product(shift, lat.index_at(pos)), series.coeffs[pos]);
    }
    return out;
}

namespace {

double image_mass(const BasisImage& im) {
    double s = 0.0;
    for (const auto& [k, c] : im.coeffs) s += std::norm(c);
    return s;
}

// mean of n^{-2 Re phi0*} over an M^d grid of the torus
double torus_mean(const DirichletPolynomial& phi0, double log_n, std::size_t M) {
    const auto& sup = phi0.support();
    const std::size_t d = sup.size();
    std::vector<double> cs(M), sn(M);
    for (std::size_t i = 0; i < M; ++i) {
        double a = 2.0 * std::numbers::pi * double(i) / double(M);
        cs[i] = std::cos(a);
        sn[i] = std::sin(a);
    }
    struct T {
        std::vector<std::uint32_t> e;
        double re, im;
    };
    std::vector<T> terms;
    for (const auto& [k, c] : phi0.coeffs()) {
        T t{k.exps, c.real(), c.imag()};
        for (auto& x : t.e) x = std::uint32_t(x % M);
        terms.push_back(std::move(t));
    }
    std::size_t nodes = 1;
    for (std::size_t i = 0; i < d; ++i) nodes *= M;
    std::vector<std::size_t> idx(d, 0);
    double acc = 0.0;
    for (std::size_t node = 0; node < nodes; ++node) {
        double re = 0.0;
        for (const auto& t : terms) {
            std::size_t ph = 0;
            for (std::size_t i = 0; i < d; ++i) ph += std::size_t(t.e[i]) * idx[i];
            ph %= M;
            re += t.re * cs[ph] - t.im * sn[ph];
        }
        acc += std::exp(-2.0 * log_n * re);
        for (std::size_t i = d; i-- > 0;) {
            if (++idx[i] < M) break;
            idx[i] = 0;
        }
    }
    return acc / double(nodes);
}

}  // namespace

NormDetail norm_en_detail(const Symbol& sym, u64 n, NormMethod method, int resolution) {
    if (n == 0) throw std::invalid_argument("norm_en: n must be positive");
    NormDetail out;
    if (n == 1) {
        out.value = 1.0;
        return out;
    }
    const double L = std::log(double(n));
    if (method == NormMethod::coeff) {
        auto im = apply_to_basis(sym.phi0(), sym.c0(), n);
        double total = image_mass(im);
        if (!im.resolved && im.tail > 1e-9 * total)
            throw TruncationError("norm_en: coefficient tail " + std::to_string(im.tail / total) +
                                  " exceeds 1e-9; raise the truncation");
        out.value = std::sqrt(total);
        out.error = im.tail;
        out.work = im.coeffs.size();
        return out;
    }
    if (resolution < 8) throw std::invalid_argument("norm_en: quadrature resolution must be at least 8");
    const auto& sup = sym.support();
    const std::size_t d = sup.size();
    if (d == 0) {
        out.value = std::exp(-L * sym.c1().real());
        return out;
    }
    std::uint32_t deg = 0;
    for (const auto& [k, c] : sym.phi0().coeffs())
        for (auto e : k.exps) deg = std::max(deg, e);
    std::size_t M = 8;
    while (M < std::size_t(resolution) || M < 4 * std::size_t(deg)) M *= 2;
    const std::size_t max_nodes = std::size_t(1) << 24;
    double prev = -1.0;
    for (;;) {
        std::size_t nodes = 1;
        for (std::size_t i = 0; i < d; ++i) {
            if (nodes > max_nodes / M) throw TruncationError("norm_en: torus quadrature did not converge");
            nodes *= M;
        }
        double v = torus_mean(sym.phi0(), L, M);
        if (prev >= 0.0 && std::abs(v - prev) <= 1e-12 * v) {
            out.value = std::sqrt(v);
            out.error = std::abs(v - prev);
            out.work = M;
            return out;
        }
        prev = v;
        M *= 2;
    }
}

double norm_en(const Symbol& sym, u64 n, NormMethod method, int resolution) {
    return norm_en_detail(sym, n, method, resolution).value;
}

std::pair<double, double> hilbert_schmidt_terms(const Symbol& sym, u64 n) {
    auto with_c0 = apply_to_basis(sym.phi0(), sym.c0(), n);
    auto alone = apply_to_basis(sym.phi0(), 0, n);
    return {image_mass(with_c0), image_mass(alone)};
}

SchattenResult schatten(const SingularSpectrum& spectrum, double q) {
    if (!(q >= 1.0)) throw std::invalid_argument("schatten: q must be at least 1");
    SchattenResult r;
    for (double v : spectrum.values) r.partial += std::pow(v, q);
    const double e = q * spectrum.vartheta;
    const double N = double(spectrum.values.size());
    if (e <= 1.0) {
        r.divergent = true;
        r.tail_bound = std::numeric_limits<double>::infinity();
        r.estimate = std::numeric_limits<double>::infinity();
        r.norm = std::numeric_limits<double>::infinity();
        return r;
    }
    r.tail_bound = N > 0 ? std::pow(N, 1.0 - e) / (e - 1.0) : std::numeric_limits<double>::infinity();
    r.estimate = r.partial + r.tail_bound;
    r.norm = std::pow(r.estimate, 1.0 / q);
    return r;
}

KernelProbe kernel_probe_detail(const Symbol& sym, Complex w) {
    const auto& sup = sym.support();
    if (sup.size() != 1) throw std::invalid_argument("kernel_probe: single-prime symbols only");
    if (!(w.real() > 0.0)) throw std::domain_error("kernel_probe: Re w must be positive");
    const double lp = sup.log_prime(0);
    const Complex a = std::exp(-std::conj(w) * lp);
    const std::size_t c0 = std::size_t(sym.c0());
    const double norm = -std::expm1(-2.0 * w.real() * lp);
    KernelProbe out;
    std::size_t B = 64;
    const std::size_t max_B = std::size_t(1) << 15;
    for (;;) {
        auto lat = detail::make_lattice(sup, IndexBound::log_at_most(double(B) * lp * (1.0 + 1e-12)));
        auto E = detail::lattice_power_symbol(lat, lp, sym.phi0());
        const std::size_t n = lat.size;
        // G = sum_k a^k z^{k c0} E^k, i.e. G (1 - a z^{c0} E) = 1
        std::vector<Complex> G(n, Complex{});
        G[0] = 1.0;
        for (std::size_t m = c0; m < n; ++m) {
            Complex acc{};
            for (std::size_t i = 0; i + c0 <= m; ++i) acc += E[i] * G[m - c0 - i];
            G[m] = a * acc;
        }
        double total = 0.0, shell = 0.0;
        for (std::size_t m = 0; m < n; ++m) {
            double v = std::norm(G[m]);
            total += v;
            if (2 * m > n) shell += v;
        }
        if (shell <= 1e-14 * total || B >= max_B) {
            out.value = std::sqrt(norm * total);
            out.tail = norm * shell;
            out.terms = n;
            return out;
        }
        B *= 2;
    }
}

double kernel_probe(const Symbol& sym, Complex w) { return kernel_probe_detail(sym, w).value; }

}  // namespace hardyop
