#pragma once

#include "cscb/elliptic.hpp"
#include "cscb/fiber_geometry.hpp"

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cscb::join {

/// Parameters of a fiberwise join of two sphere bundles UE1, UE2 over a
/// homogeneous base: fiber dimensions k_i >= 1 and O'Neill norms a_i >= 0.
struct JoinParams {
  geometry::BaseGeometry base;
  int k1 = 1;
  int k2 = 1;
  double a1 = 0.0;
  double a2 = 0.0;

  /// Throws std::invalid_argument unless k1, k2 >= 1 and a1, a2 >= 0.
  void validate() const;
  geometry::SubmersionConstants constants() const { return {k1, k2, a1, a2}; }
  /// (k2, k1, a2, a1): the same bundle written as U(E2 + E1).
  JoinParams swapped() const { return {base, k2, k1, a2, a1}; }
};

enum class Branch {
  Flat,           // a1 = a2 = 0, k = 0: locally a product with a round sphere
  Case1,          // a1 > a2, elliptic, k^2 in (0, 1)
  Case2Round,     // a1 = a2 > 0, k = 0, gamma free
  Case2Elliptic,  // a1 = a2 > 0, elliptic, k^2 in (0, 1)
  Case3,          // 0 < a1 < a2, elliptic, k^2 in (1 - a1^2/a2^2, 1)
};

std::string_view to_string(Branch b);
bool is_elliptic(Branch b);

/// Raised when a1^2 - (1 - k^2) a2^2 <= 0, i.e. the parameter equation has
/// no positive gamma. Carries the admissible open interval of k^2 (empty
/// when lo >= hi).
class InadmissibleModulus : public std::domain_error {
 public:
  InadmissibleModulus(double k_sq, double k_sq_lo, double k_sq_hi);
  double k_sq_lo() const noexcept { return lo_; }
  double k_sq_hi() const noexcept { return hi_; }

 private:
  double lo_;
  double hi_;
};

/// One admissible branch for the given operand order. Elliptic branches
/// cover the open interval (k_sq_lo, k_sq_hi); k = 0 branches have
/// k_sq_lo = k_sq_hi = 0 and a free gamma.
struct BranchRange {
  Branch branch;
  double k_sq_lo;
  double k_sq_hi;
};

/// A constant scalar curvature solution: modulus, scale gamma, parameter
/// length T = K(k)/gamma and the resulting scalar curvature R.
struct WarpSolution {
  elliptic::Modulus k{0.0};
  double gamma = 1.0;
  double T = 0.0;
  double scal_total = 0.0;
  Branch family = Branch::Flat;
};

/// Clamp applied to k when sampling elliptic branches.
inline constexpr double kBranchModulusMin = 1e-8;
inline constexpr double kBranchModulusMax = 1.0 - 1e-10;

/// Residual of (k1+k2)(k1+k2+3) gamma^4 k^2 (1-k^2) = a1^2 - (1-k^2) a2^2.
double parameter_equation_residual(const JoinParams& p, elliptic::Modulus k,
                                   double gamma);

/// gamma = [(a1^2 - (1-k^2) a2^2) / ((k1+k2)(k1+k2+3) k^2 (1-k^2))]^(1/4).
/// Throws InadmissibleModulus if the numerator is not positive and
/// std::domain_error if k = 0.
double gamma_from_modulus(const JoinParams& p, elliptic::Modulus k);

/// Branches admissible for the operand order as given (no swap).
std::vector<BranchRange> admissible_modulus_range(const JoinParams& p);

/// R = R_B - 2(k1+k2)(k1+1) gamma^2 k^2 + (k1+k2)(k1+k2+1) gamma^2
///     - a2^2 / gamma^2. Throws std::domain_error if gamma <= 0.
double scalar_from_solution(const JoinParams& p, elliptic::Modulus k,
                            double gamma);

/// Formula-level R - R_B from k^2 and 1 - k^2 given separately, for
/// probing limits closer to k = 1 than elliptic::kMaxModulus allows.
double scalar_gap_formula(const JoinParams& p, double k_sq, double kc_sq);

/// Elliptic branch solution at modulus k (gamma from the parameter equation).
WarpSolution elliptic_solution(const JoinParams& p, elliptic::Modulus k);

/// k = 0 solution at the given gamma. Throws std::domain_error unless
/// a1 = a2 and gamma > 0.
WarpSolution round_solution(const JoinParams& p, double gamma);

/// Solution with an explicitly given (k, gamma), not required to satisfy
/// the parameter equation; R is still evaluated by the closed form. Used to
/// check that perturbed parameters are detected.
WarpSolution raw_solution(const JoinParams& p, elliptic::Modulus k,
                          double gamma);

/// f1(t) = cn(gamma t) / (gamma sqrt(1-k^2)), f2(t) = sn(gamma t) / gamma on
/// (0, K(k)/gamma), with closed-form derivatives.
geometry::ProfilePair build_profiles(const WarpSolution& sol);

struct ResidualReport {
  double max_deviation = 0.0;
  double min_value = 0.0;
  double max_value = 0.0;
  int grid_size = 0;
};

/// Evaluates the join scalar curvature on a uniform grid of grid_size points
/// in [T/100, T - T/100] and compares against sol.scal_total.
/// Throws std::invalid_argument if grid_size < 2.
ResidualReport verify_residual(const JoinParams& p, const WarpSolution& sol,
                               int grid_size);

struct ConservationReport {
  double value = 0.0;       // max |(1-k^2) f1^2 + f2^2 - 1/gamma^2|
  double derivative = 0.0;  // max |(1-k^2) f1 f1' + f2 f2'|
};

ConservationReport conservation_residuals(const WarpSolution& sol,
                                          int grid_size);

struct FamilyRow {
  double k;
  double gamma;
  double T;
  double scal_total;
  double parameter_residual;
};

/// A sampled one-parameter family. `swapped` marks families found in the
/// operand order (k2, k1, a2, a1); `params` is the order they solve.
struct Family {
  Branch branch;
  bool swapped = false;
  JoinParams params;
  std::vector<FamilyRow> rows;
};

/// Samples every one-parameter family of the bundle. Both operand orders
/// are searched; when a1 = a2 the swapped order adds nothing new.
/// Rows are sorted by k (flat branches by gamma).
/// Throws std::invalid_argument if n_points < 2.
std::vector<Family> family_scan(const JoinParams& p, int n_points,
                                double gamma_min = 0.25,
                                double gamma_max = 4.0);

enum class Endpoint { Upper, Lower };

enum class LimitTrend { PositiveInfinity, Zero, NegativeInfinity, Undetermined };

std::string_view to_string(LimitTrend t);

struct LimitSample {
  double k;
  double gap;  // R - R_B
};

struct LimitProbe {
  Branch branch;
  Endpoint endpoint;
  std::vector<LimitSample> samples;  // ordered toward the endpoint
  LimitTrend predicted;
  LimitTrend observed;
};

/// Samples R - R_B along a geometric sequence of moduli approaching the
/// branch endpoint (distance 10^-1 ... 10^-steps). The upper endpoint is
/// k -> 1; the lower one is k -> 0 (Case 1, Case 2) or
/// k^2 -> 1 - a1^2/a2^2 (Case 3). Throws std::invalid_argument for a k = 0
/// branch.
LimitProbe limit_probe(const JoinParams& p, Branch branch, Endpoint endpoint,
                       int steps = 15);

}  // namespace cscb::join
