#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hardyop/dseries.hpp"

namespace hardyop {

enum class SymbolKind { affine, angle, custom };

std::string to_string(SymbolKind k);
SymbolKind symbol_kind_from_string(const std::string& s);

struct AngleParams {
    double alpha = 0.5;
    double theta_shift = 0.0;
    u64 prime = 2;
    std::size_t taylor_order = 0;  // 0 picks the smallest admissible order
};

class TaylorOrderError : public std::invalid_argument {
  public:
    TaylorOrderError(const std::string& what, std::size_t required)
        : std::invalid_argument(what), required_(required) {}
    std::size_t required() const { return required_; }

  private:
    std::size_t required_;
};

// phi(s) = c0 s + phi0(s)
class Symbol {
  public:
    Symbol(int c0, DirichletPolynomial phi0, double vartheta, SymbolKind kind,
           std::optional<AngleParams> angle = std::nullopt);

    int c0() const { return c0_; }
    const DirichletPolynomial& phi0() const { return phi0_; }
    double vartheta() const { return vartheta_; }
    SymbolKind kind() const { return kind_; }
    const std::optional<AngleParams>& angle() const { return angle_; }
    const PrimeSupport& support() const { return phi0_.support(); }
    Complex c1() const { return phi0_.constant_term(); }

    // phi0 and its derivative; angle symbols use the closed form of Phi_alpha
    Complex phi0_at(Complex s) const;
    Complex dphi0_at(Complex s) const;
    Complex phi(Complex s) const { return double(c0_) * s + phi0_at(s); }
    Complex dphi(Complex s) const { return double(c0_) + dphi0_at(s); }

    // phi0*(chi): value on the distinguished boundary
    Complex boundary_value(const Character& chi) const;
    // sup |Im phi0(s)| over Re phi0(s) <= re_limit, Re s >= 0 (upper bound)
    double imag_bound(double re_limit) const;

  private:
    int c0_;
    DirichletPolynomial phi0_;
    double vartheta_;
    SymbolKind kind_;
    std::optional<AngleParams> angle_;
    std::vector<std::pair<double, Complex>> terms_;  // (log n, b_n)
};

Symbol make_affine(int c0, Complex c1, const std::vector<std::pair<u64, Complex>>& coeffs);
Symbol make_angle(const AngleParams& params, int c0);
// Generic phi0; membership in the class is checked on 10^4 boundary samples.
Symbol make_custom(int c0, const DirichletPolynomial& phi0);
// phi twisted by chi; unitarily equivalent operator
Symbol twist(const Symbol& sym, const Character& chi);

// Taylor coefficients of ((1-z)/(1+z))^alpha up to order K
std::vector<double> angle_taylor(double alpha, std::size_t K);
std::size_t angle_taylor_order(double alpha, double radius = 0.99, double tol = 1e-10);
Complex angle_phi(double alpha, Complex z);

Complex boundary_value(const DirichletPolynomial& phi0, const Character& chi);

struct VarthetaEstimate {
    double value;
    double spacing;
};
VarthetaEstimate estimate_vartheta(const Symbol& sym, int grid_size);

// Sector containment of the angle map on the imaginary axis: B = sup |Im phi|/Re phi
// over the boundary parametrization, beta0 = (2/pi) arctan B.
struct SectorBound {
    double B;
    double beta0;
};
SectorBound angle_sector_bound(const Symbol& sym, int samples = 20000);

nlohmann::json to_json(const Symbol& sym);
Symbol symbol_from_json(const nlohmann::json& j);
std::string symbol_hash(const Symbol& sym);

}  // namespace hardyop
