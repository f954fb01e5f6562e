#pragma once

#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "hardyop/symbol.hpp"

namespace hardyop {

// A truncation could not reach the requested accuracy.
class TruncationError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct RowPolicy {
    double tail_tol = 1e-18;                   // per-column dropped mass sum |d_m|^2
    std::size_t capacity = std::size_t(1) << 20;  // lattice positions per column
};

// Matrix of C_{phi,j}: H^2_j -> H^2_{j^c0} in the bases e_{jk}, e_{j^c0 k'}.
struct BlockMatrix {
    u64 j = 1;
    PrimeSupport support;
    std::vector<SmoothIndex> cols;
    std::vector<SmoothIndex> rows;
    Eigen::MatrixXcd entries;
    double row_tail = 0.0;  // largest per-column truncated mass estimate
    bool rows_resolved = true;
};

BlockMatrix build_block(const Symbol& sym, u64 j, const IndexBound& col_cap, const RowPolicy& rows = {});
BlockMatrix build_block(const Symbol& sym, u64 j, u64 K, const RowPolicy& rows = {});

std::vector<double> singular_values(const Eigen::MatrixXcd& A);
std::vector<double> singular_values(const BlockMatrix& B);

struct SpectrumCaps {
    u64 J = u64(1) << 20;  // largest block index
    u64 K = u64(1) << 40;  // largest column index within a block
};

struct SpectrumOptions {
    double drift_tol = 1e-8;
    bool check_drift = true;
    int threads = 1;
    RowPolicy rows;
};

struct SingularSpectrum {
    std::vector<double> values;
    std::vector<std::pair<u64, std::size_t>> provenance;  // (block j, rank from 1)
    u64 J = 0;
    u64 K = 0;
    bool converged = false;
    double drift = 0.0;
    double vartheta = 0.0;
    std::size_t blocks = 0;
    u64 last_block = 0;
    double row_tail = 0.0;
};

SingularSpectrum approximation_numbers(const Symbol& sym, std::size_t n_max, const SpectrumCaps& caps,
                                       const SpectrumOptions& opts = {});

// Image of e_n under f -> n^{-c0 s} n^{-phi0(s)}, keyed by the M(P) part of
// the target index (the factor n^{c0} is implicit when n is not P-smooth).
struct BasisImage {
    std::map<SmoothIndex, Complex> coeffs;
    double tail = 0.0;
    bool resolved = true;
};
BasisImage apply_to_basis(const DirichletPolynomial& phi0, int c0, u64 n, double tol = 1e-14);

enum class NormMethod { coeff, quadrature };

struct NormDetail {
    double value = 0.0;      // ||C e_n||
    double error = 0.0;      // tail mass or last change
    std::size_t work = 0;    // coefficients or nodes per dimension
};

double norm_en(const Symbol& sym, u64 n, NormMethod method, int resolution = 8);
NormDetail norm_en_detail(const Symbol& sym, u64 n, NormMethod method, int resolution = 8);
// ||C_{phi0} e_n||^2 summed over the image with c0 = 0 and with the symbol's c0
std::pair<double, double> hilbert_schmidt_terms(const Symbol& sym, u64 n);

struct SchattenResult {
    double partial = 0.0;
    double tail_bound = 0.0;
    double estimate = 0.0;
    double norm = 0.0;  // estimate^{1/q}
    bool divergent = false;
};
SchattenResult schatten(const SingularSpectrum& spectrum, double q);

struct KernelProbe {
    double value = 0.0;
    double tail = 0.0;
    std::size_t terms = 0;
};
// ||C_phi K_w|| for the normalized kernel of H^2_1 at w
KernelProbe kernel_probe_detail(const Symbol& sym, Complex w);
double kernel_probe(const Symbol& sym, Complex w);

}  // namespace hardyop
