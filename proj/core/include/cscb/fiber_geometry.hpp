#pragma once

#include <Eigen/Dense>

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace cscb::geometry {

/// Homogeneous base (B, g_B): dimension and its constant scalar curvature.
struct BaseGeometry {
  int m = 1;
  double scal = 0.0;
};

/// Fiber dimensions of the two sphere factors of the join and the
/// (constant) O'Neill norms a_i = |A^i| of the two sphere bundles.
struct SubmersionConstants {
  int k1 = 1;
  int k2 = 1;
  double a1 = 0.0;
  double a2 = 0.0;

  /// Throws std::invalid_argument if k1 + k2 < 1 or a negative constant.
  void validate() const;
};

/// Warping functions and their first two derivatives at one parameter t.
struct ProfileSample {
  double f1;
  double df1;
  double d2f1;
  double f2;
  double df2;
  double d2f2;
};

/// Warping profiles (f1, f2) of the doubly warped join metric
///   f1(t)^2 g_{S^k1} + dt^2 + f2(t)^2 g_{S^k2},   t in (0, T),
/// carrying closed-form first and second derivatives.
struct ProfilePair {
  double T = 0.0;
  std::function<ProfileSample(double)> eval;

  ProfileSample operator()(double t) const { return eval(t); }
};

/// Evaluation window [T/100, T - T/100]; the curvature functional is
/// singular where a profile vanishes.
inline constexpr double kEndpointFraction = 0.01;

/// Scalar curvature of the doubly warped metric on S^k1 x (0,T) x S^k2:
///   -2k1 f1''/f1 + k1(k1-1)(1 - f1'^2)/f1^2
///   -2k2 f2''/f2 + k2(k2-1)(1 - f2'^2)/f2^2 - 2 k1 k2 f1' f2'/(f1 f2).
/// Throws std::domain_error if a profile value is not positive.
double scal_doubly_warped(int k1, int k2, const ProfileSample& s);

/// As above, evaluating the profiles at t. Throws std::domain_error unless
/// 0 < t < T.
double scal_doubly_warped(int k1, int k2, const ProfilePair& p, double t);

/// Scalar curvature of the join connection metric pulled back to
/// (0,T) x (UE1 x_B UE2): base scalar + fiber scalar - |A|^2.
double scal_join_total(const BaseGeometry& base, const SubmersionConstants& c,
                       const ProfilePair& p, double t);

/// Scalar curvature of the fiber-rescaled connection metric g_B + c g_F:
/// scal_base + scal_fiber / c - c |A|^2. Throws std::domain_error if c <= 0.
double oneill_rescaled(double scal_base, double scal_fiber, double a_sq,
                       double c);

/// Scalar curvature R_B + k(k-1)/r^2 - a^2 r^2 of the unit sphere bundle
/// with fibers S^k(r). Throws std::domain_error if r <= 0.
double sphere_bundle_scalar(const BaseGeometry& base, int k, double a,
                            double r);

/// Curvature 2-form of a metric connection in an orthonormal frame: for
/// each ordered pair (i, j) of base directions a skew (k+1)x(k+1) matrix,
/// with F(i,j) = -F(j,i).
class SkewFamily {
 public:
  /// All-zero (flat) family.
  SkewFamily(int dim_base, int dim_fiber);

  /// Builds the family from its upper-triangular blocks, indexed
  /// row-major over pairs i < j (size m(m-1)/2). Throws
  /// std::invalid_argument on shape mismatch or a non-skew block.
  static SkewFamily from_upper(int dim_base, int dim_fiber,
                               const std::vector<Eigen::MatrixXd>& upper);

  /// Sets F(i,j) = block and F(j,i) = -block (0-based, i != j).
  void set(int i, int j, const Eigen::MatrixXd& block);

  const Eigen::MatrixXd& operator()(int i, int j) const {
    return blocks_[static_cast<std::size_t>(i * dim_base_ + j)];
  }

  int dim_base() const noexcept { return dim_base_; }
  int dim_fiber() const noexcept { return dim_fiber_; }

  SkewFamily scaled(double lambda) const;

 private:
  int dim_base_;
  int dim_fiber_;
  std::vector<Eigen::MatrixXd> blocks_;
};

/// xi(s, s) = sum over ordered pairs (i, j) of |F(i,j) s|^2.
/// Throws std::invalid_argument on a dimension mismatch.
double xi_form(const SkewFamily& fam, std::span<const double> s);

/// |A|^2(s) = xi(s, s) / 4 on the unit sphere bundle. Throws
/// std::invalid_argument unless |s| = 1 within 1e-12.
double oneill_norm_from_xi(const SkewFamily& fam, std::span<const double> s);

/// |A|^2 = a1^2 f1^2 + a2^2 f2^2 of the join submersion at t in (0, T).
double oneill_norm_join(const SubmersionConstants& c, const ProfilePair& p,
                        double t);

struct BoundaryCondition {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

struct BoundaryReport {
  std::vector<BoundaryCondition> conditions;
  bool passed = true;

  /// Condition by name, or nullptr.
  const BoundaryCondition* find(const std::string& name) const;
};

struct BoundaryOptions {
  double tolerance = 1e-10;
  /// Orders 3 and 4 use central differences of the closed-form f''.
  double fd_step = 1e-4;
  double fd_tolerance = 1e-5;
};

/// Smoothness conditions at the two ends of the join parameter interval:
///   f1(0) > 0, f1^(odd)(0) = 0, f1(T) = 0, f1'(T) = -1, f1^(even)(T) = 0,
///   f2(T) > 0, f2^(odd)(T) = 0, f2(0) = 0, f2'(0) = 1, f2^(even)(0) = 0,
/// checked through derivative order `order` (1..4). Positivity conditions
/// report residual 0 when satisfied and the shortfall otherwise.
/// Throws std::invalid_argument unless 1 <= order <= 4.
BoundaryReport check_boundary(const ProfilePair& p, int order = 2,
                              const BoundaryOptions& opts = {});

struct DichotomyRow {
  double c;
  double spread;  // max - min of the rescaled scalar curvature
  bool constant;
};

struct DichotomyReport {
  bool a_sq_constant = false;
  /// Scalar curvature of the unscaled metric (c = 1) is constant.
  bool scal_constant = false;
  std::vector<DichotomyRow> rows;
  /// Either every row is constant (|A| constant) or none is.
  bool holds = false;
};

/// Checks, on sampled values, that the rescaled scalar curvature is
/// constant for every c exactly when |A|^2 is constant. Throws
/// std::invalid_argument on length mismatch or c <= 0 or c == 1.
DichotomyReport dichotomy_check(std::span<const double> scal_base,
                                std::span<const double> scal_fiber,
                                std::span<const double> a_sq,
                                std::span<const double> cs,
                                double tolerance = 1e-10);

}  // namespace cscb::geometry
