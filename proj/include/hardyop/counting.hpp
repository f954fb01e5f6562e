#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "hardyop/symbol.hpp"

namespace hardyop {

class SolverError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Im s in [2 pi k/log p - pi/log p, 2 pi k/log p + pi/log p), Re s > 0
struct StripSpec {
    u64 prime = 2;
    long k = 0;

    double half_width() const;
    double center() const;
    double lower() const { return center() - half_width(); }
    double upper() const { return center() + half_width(); }
};

struct SolverOptions {
    double eps = 1e-6;          // left edge of the search rectangle
    double newton_tol = 1e-10;  // residual target, scaled by 1 + |w|
    double min_size = 1e-8;     // rectangles below this are not split further
    double edge_tol = 1e-8;     // closer roots count as lying on an edge
    double perturb = 1e-6;      // edge shift applied to such roots
};

struct Root {
    Complex s;
    int multiplicity = 1;
    double residual = 0.0;
};

struct PreimageResult {
    std::vector<Root> roots;
    int zero_count = 0;
    double residual_max = 0.0;
    int subdivisions = 0;
    std::vector<std::string> warnings;
};

// Solutions of phi(s) = w in the strip with 0 < Re s <= re_cap.
PreimageResult preimages(const Symbol& sym, Complex w, const StripSpec& strip, double re_cap,
                         const SolverOptions& opts = {});

struct CountingValue {
    Complex w;
    double value = 0.0;
    int zero_count = 0;
    double residual_max = 0.0;
    int subdivisions = 0;
};

// N_{phi,k}(w), evaluated on strip 0 through the shift identity
CountingValue restricted_counting(const Symbol& sym, Complex w, long k, const SolverOptions& opts = {});
// N_{phi,k}(w) solved directly on strip k
CountingValue restricted_counting_direct(const Symbol& sym, Complex w, long k, const SolverOptions& opts = {});

struct NevanlinnaValue {
    double partial = 0.0;
    double tail_bound = 0.0;
    double envelope_constant = 0.0;  // calibrated C of the strip envelope
    long k_center = 0;
    bool littlewood_ok = false;
    double residual_max = 0.0;
};

NevanlinnaValue nevanlinna(const Symbol& sym, Complex w, int k_range, const SolverOptions& opts = {});

struct ProfileSample {
    double sigma = 0.0;
    double t = 0.0;
    double value = 0.0;  // N_{phi,0}(sigma + it)
    int zero_count = 0;
    double residual_max = 0.0;
};

struct CompactnessProfile {
    std::vector<double> sigmas;
    std::vector<double> ratios;  // sup_t N_{phi,0}(sigma + it) / sigma
    std::vector<double> t_at_sup;
    std::vector<ProfileSample> samples;
};

CompactnessProfile compactness_profile(const Symbol& sym, const std::vector<double>& sigmas, int n_t = 64,
                                       bool refine = true, int threads = 1, const SolverOptions& opts = {});

struct QuadOptions {
    double rel_tol = 1e-8;
    int max_depth = 15;
    int t_nodes = 64;  // periodic trapezoid nodes (Littlewood-Paley)
    SolverOptions solver;
};

// |‖f‖^2 - (|f(+inf)|^2 + (2 log p/pi) ∫∫ |f'|^2 sigma)|
double verify_littlewood_paley(const BlockFunction& f, const QuadOptions& quad = {});

struct StantonResult {
    double lhs = 0.0;
    double rhs = 0.0;
    double residual = 0.0;
    double sigma_max = 0.0;
    double t_max = 0.0;
    long evaluations = 0;
};

StantonResult verify_stanton(const Symbol& sym, const BlockFunction& f, const QuadOptions& quad = {});

}  // namespace hardyop
