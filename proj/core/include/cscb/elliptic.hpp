#pragma once

#include <numbers>

namespace cscb::elliptic {

/// Largest modulus accepted for evaluation. Beyond this the complementary
/// modulus sqrt(1 - k^2) drops below ~1.4e-6 and cn/(gamma*sqrt(1-k^2))
/// loses roughly half of the available digits.
inline constexpr double kMaxModulus = 1.0 - 1e-12;

/// The elliptic modulus k (not the parameter k^2), restricted to
/// [0, kMaxModulus].
class Modulus {
 public:
  /// Throws std::domain_error when k is not in [0, kMaxModulus].
  explicit Modulus(double k);

  /// Builds the modulus from k^2, keeping 1 - k^2 exact for inputs near 1.
  static Modulus from_squared(double k_sq);

  double value() const noexcept { return k_; }
  double squared() const noexcept { return k_sq_; }
  /// 1 - k^2, computed without cancellation.
  double complement_squared() const noexcept { return kc_sq_; }
  /// sqrt(1 - k^2).
  double complement() const noexcept { return kc_; }

 private:
  Modulus(double k, double k_sq, double kc_sq);

  double k_;
  double k_sq_;
  double kc_sq_;
  double kc_;
};

struct JacobiValues {
  double t;
  double cn;
  double sn;
  double dn;
};

struct JacobiDerivatives {
  double cn_d1;
  double cn_d2;
  double sn_d1;
  double sn_d2;
};

/// Complete elliptic integral of the first kind K(k) by the arithmetic-
/// geometric mean, K = pi / (2 AGM(1, sqrt(1 - k^2))).
double quarter_period(Modulus k);

/// cn, sn, dn at t via the descending Landen (AGM) ladder.
JacobiValues jacobi(double t, Modulus k);

/// Closed-form derivatives: cn' = -sn dn, sn' = cn dn and
///   cn'' = -2k^2 cn^3 - (1 - 2k^2) cn,
///   sn'' =  2k^2 sn^3 - (1 + k^2) sn.
JacobiDerivatives jacobi_derivatives(double t, Modulus k);
JacobiDerivatives jacobi_derivatives(const JacobiValues& v, Modulus k);

}  // namespace cscb::elliptic
