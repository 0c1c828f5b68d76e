#pragma once

#include <utility>
#include <vector>

namespace cscb::yamabe {

/// a_n = 4(n-1)/(n-2) and p_n = 2n/(n-2) of the Yamabe operator.
struct YamabeConstants {
  double a;
  double p;
};

/// Throws std::domain_error if n < 3.
YamabeConstants yamabe_constants(int n);

/// Subcritical problem -a_N Lap v + R v = R v^(p_N - 1) on the round
/// sphere S^d(r) (a circle of radius r when d = 1), N > d.
struct YamabeProblem {
  int n = 3;
  double R = 1.0;
  int d = 1;
  double r = 1.0;

  /// Throws std::domain_error if R <= 0 (only constant solutions exist),
  /// and std::invalid_argument if n < 3, d < 1, n <= d or r <= 0.
  void validate() const;
};

/// A strict or non-strict inequality together with its slack; the margin
/// is positive (or zero for a non-strict inequality) exactly when it holds.
struct Predicate {
  bool holds;
  double margin;
};

/// d = 1: 1/r^2 >= R/(N-1); d >= 2: the Ricci bound (d-1)/r^2 >=
/// ((d-1)/d) R/(N-1), i.e. d/r^2 >= R/(N-1). When it holds v = 1 is the
/// only solution.
Predicate uniqueness_predicate(const YamabeProblem& prob);

/// lambda_l = l(l+d-1)/r^2 < R/(N-1). When it holds there are at least
/// l+1 solutions invariant under SO(d). Throws std::invalid_argument if
/// l < 1.
Predicate multiplicity_predicate(const YamabeProblem& prob, int l);

/// 1 + the largest l with multiplicity_predicate true (l = 0 when none).
int guaranteed_lower_bound(const YamabeProblem& prob);

/// Product S^m x S^k(r) with g(r) = g_m + r^2 g_k.
struct ProductThresholds {
  Predicate uniqueness_fiber;     // (m-1) r^2 <= k
  Predicate uniqueness_base;      // (k-1) / r^2 <= m
  Predicate multiplicity_fiber;   // m(m-1) r^2 > l(l+k-1)(m+k-1) - k(k-1)
  Predicate multiplicity_base;    // k(k-1)/r^2 > l(l+m-1)(m+k-1) - m(m-1)
  double scal;                    // m(m-1) + k(k-1)/r^2
};

/// Throws std::invalid_argument unless m + k >= 3, r > 0 and l >= 1.
ProductThresholds product_thresholds(int m, int k, double r, int l);

/// Sphere bundle over S^m(1) with fibers S^k(r) and O'Neill constant a.
struct BundleThresholds {
  Predicate uniqueness_fiber_gradient;  // -(a^2/m) r^4 + (m-1) r^2 <= k
  Predicate uniqueness_base;            // -(a^2/k) r^2 + (k-1)/r^2 <= m
  Predicate multiplicity_base;          // -a^2 r^2 + k(k-1)/r^2 > l(l+m-1)(m+k-1) - m(m-1)
  double scal;                          // m(m-1) + k(k-1)/r^2 - a^2 r^2
};

/// Throws std::invalid_argument unless m + k >= 3, a >= 0, r > 0, l >= 1.
BundleThresholds bundle_thresholds(int m, int k, double a, double r, int l);

struct IntegratorOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  /// Maximum step as a fraction of the pole-to-pole length pi r.
  double max_step_fraction = 1.0 / 200.0;
  /// d >= 2: integration starts this fraction of pi r away from the pole
  /// where v(0) = alpha is prescribed ...
  double start_fraction = 1e-6;
  /// ... and stops this fraction short of the antipodal pole, where the
  /// regular expansion is matched.
  double end_fraction = 1e-2;
  /// Values above this are treated as blow-up.
  double blowup = 1e6;
};

enum class ShotOutcome { Reached, Crashed, BlewUp };

struct ShotResult {
  double alpha = 0.0;
  ShotOutcome outcome = ShotOutcome::Reached;
  /// Estimate of v'(pi r); meaningful only when the far end was reached.
  double mismatch = 0.0;
  /// Estimate of v(pi r).
  double far_value = 0.0;
  std::vector<std::pair<double, double>> samples;  // (t, v)
  int steps = 0;

  /// Mismatch with early terminations mapped to -inf (v hit 0 while
  /// decreasing) and +inf (v blew up).
  double signed_mismatch() const;
};

/// Integrates the radial equation
///   v'' + ((d-1)/r) cot(t/r) v' + (R/a_N)(v^(p_N-1) - v) = 0
/// on (0, pi r) from v(0) = alpha, v'(0) = 0.
ShotResult shoot(const YamabeProblem& prob, double alpha,
                 const IntegratorOptions& opts = {});

struct RadialSolution {
  double alpha = 0.0;
  std::vector<std::pair<double, double>> samples;
  double boundary_residual = 0.0;  // |v'(pi r)|
  /// |v'(pi r)| recomputed with both integrator tolerances halved.
  double recheck_residual = 0.0;
  double far_value = 0.0;          // v(pi r)
  bool is_constant = false;
  /// Index of the solution v(pi r - t) in the report (itself when
  /// symmetric), or -1 if it was not found in the scan.
  int reflection_partner = -1;
};

struct CountOptions {
  double alpha_min = 0.05;
  double alpha_max = 5.0;
  int n_scan = 400;
  int max_bisections = 60;
  double match_tol = 1e-9;
  double dedup_tol = 1e-7;
  double pair_tol = 1e-5;
  IntegratorOptions integrator;
};

struct CountReport {
  int count = 0;
  int reflection_collapsed_count = 0;
  std::vector<RadialSolution> solutions;  // sorted by alpha
  std::pair<double, double> scan_range;
  int guaranteed_lower_bound = 1;
  /// Scan points whose integration crashed or blew up.
  std::vector<double> excluded_alphas;
  /// Sign changes whose bisection did not converge to a matching solution.
  std::vector<std::pair<double, double>> rejected_brackets;
  /// Sign changes of the far-pole mismatch over the scan.
  std::vector<std::pair<double, double>> brackets;
};

/// Shooting scan over alpha = v(0) with bisection refinement of every sign
/// change of the far-pole mismatch; v = 1 is always included. Throws
/// std::invalid_argument on an empty scan range or n_scan < 10.
CountReport count_radial_solutions(const YamabeProblem& prob,
                                   const CountOptions& opts = {});

}  // namespace cscb::yamabe
