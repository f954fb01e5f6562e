#pragma once

// Dense exponent-box storage for series over M(P). Positions are mixed-radix
// offsets of the exponent vector, so every divisor of an index sits at a
// smaller offset and recursions can run in linear order.

#include <complex>
#include <memory>
#include <vector>

#include "hardyop/dseries.hpp"

namespace hardyop::detail {

inline constexpr std::size_t kLatticeCapacity = std::size_t(1) << 22;

struct Lattice {
    PrimeSupport support;
    IndexBound bound = IndexBound::at_most(1);
    std::vector<std::uint32_t> dims;
    std::vector<std::size_t> strides;
    std::size_t size = 1;
    std::vector<double> logs;
    std::vector<std::uint8_t> inside;
    std::vector<std::uint32_t> coords;  // size * d

    std::size_t dim() const { return dims.size(); }
    bool in_box(const SmoothIndex& idx) const;
    std::size_t offset(const SmoothIndex& idx) const;
    SmoothIndex index_at(std::size_t pos) const;
};

Lattice make_lattice(const PrimeSupport& support, const IndexBound& bound,
                     std::size_t capacity = kLatticeCapacity);

struct Term {
    SmoothIndex idx;
    Complex c;
};

// exp of sum_t c_t idx_t^{-s} (no constant term) on the lattice
std::vector<Complex> lattice_exp(const Lattice& lat, const std::vector<Term>& f);

// n^{-phi0} on the lattice, with log n given
std::vector<Complex> lattice_power_symbol(const Lattice& lat, double log_n, const DirichletPolynomial& phi0);

// shared and reused for repeated log bounds on the same support
std::shared_ptr<const Lattice> cached_lattice(const PrimeSupport& support, double log_bound,
                                              std::size_t capacity = kLatticeCapacity);

struct AdaptiveSeries {
    std::shared_ptr<const Lattice> lattice;
    double log_bound = 0.0;
    std::vector<Complex> coeffs;
    double total = 0.0;  // sum |c|^2
    double tail = 0.0;   // mass in the outer half of the log range
    bool resolved = false;
};

// Grows a log bound by doubling until the outer-shell mass is below tol
// (relative to the total when relative is set). start_bound, when larger
// than the default start, skips the smaller bounds.
AdaptiveSeries adaptive_power_symbol(double log_n, const DirichletPolynomial& phi0, double tol,
                                     bool relative, std::size_t capacity = kLatticeCapacity,
                                     double start_bound = 0.0);

DirichletPolynomial to_polynomial(const Lattice& lat, const std::vector<Complex>& coeffs);

}  // namespace hardyop::detail
