#pragma once

#include <complex>
#include <map>
#include <vector>

#include "hardyop/indexcore.hpp"

namespace hardyop {

using Complex = std::complex<double>;

// Coefficients below this magnitude are dropped.
inline constexpr double kPruneThreshold = 1e-30;

// Finitely supported series sum_n b_n n^{-s} over M(P), all indices within bound().
class DirichletPolynomial {
  public:
    using Coeffs = std::map<SmoothIndex, Complex>;

    DirichletPolynomial(PrimeSupport support, IndexBound bound);

    static DirichletPolynomial constant(const PrimeSupport& support, Complex c);
    // terms given by integer index; bound defaults to the largest index
    static DirichletPolynomial from_terms(const PrimeSupport& support,
                                          const std::vector<std::pair<u64, Complex>>& terms);
    static DirichletPolynomial from_terms(const PrimeSupport& support,
                                          const std::vector<std::pair<u64, Complex>>& terms,
                                          IndexBound bound);

    const PrimeSupport& support() const { return support_; }
    const IndexBound& bound() const { return bound_; }
    const Coeffs& coeffs() const { return coeffs_; }
    std::size_t size() const { return coeffs_.size(); }

    Complex coeff(const SmoothIndex& idx) const;
    Complex coeff(u64 n) const;
    Complex constant_term() const;
    void set(const SmoothIndex& idx, Complex c);
    void add(const SmoothIndex& idx, Complex c);

    double l1_norm() const;
    double l2_norm_squared() const;
    double max_log_index() const;

  private:
    PrimeSupport support_;
    IndexBound bound_;
    Coeffs coeffs_;
};

// One unimodular value e^{i theta_p} per prime of the support.
struct Character {
    std::vector<double> angles;

    static Character trivial(const PrimeSupport& support);
    Complex value(const SmoothIndex& idx) const;
};

DirichletPolynomial multiply(const DirichletPolynomial& f, const DirichletPolynomial& g, IndexBound bound);
DirichletPolynomial multiply(const DirichletPolynomial& f, const DirichletPolynomial& g, u64 N);
DirichletPolynomial add(const DirichletPolynomial& f, const DirichletPolynomial& g);
DirichletPolynomial scale(const DirichletPolynomial& f, Complex c);

// exp(f) for f with vanishing constant term, via g_m log m = sum_{kl=m,k>1} f_k log k g_l
DirichletPolynomial exp_series(const DirichletPolynomial& f, IndexBound bound);
DirichletPolynomial exp_series(const DirichletPolynomial& f, u64 N);

// coefficients of n^{-phi0(s)}; n itself need not lie in M(P)
DirichletPolynomial power_symbol(u64 n, const DirichletPolynomial& phi0, IndexBound bound);
DirichletPolynomial power_symbol(u64 n, const DirichletPolynomial& phi0, u64 N);
DirichletPolynomial power_symbol_log(double log_n, const DirichletPolynomial& phi0, IndexBound bound);

Complex evaluate(const DirichletPolynomial& f, Complex s);
Complex evaluate_derivative(const DirichletPolynomial& f, Complex s);

DirichletPolynomial twist(const DirichletPolynomial& f, const Character& chi);

// f = j^{-s} g(s) with g over M(P) and j coprime to P: an element of H^2_j.
struct BlockFunction {
    u64 j = 1;
    DirichletPolynomial g;

    Complex value(Complex s) const;
    Complex derivative(Complex s) const;
    // f(+infinity)
    Complex at_infinity() const;
    double norm_squared() const { return g.l2_norm_squared(); }
};

}  // namespace hardyop
