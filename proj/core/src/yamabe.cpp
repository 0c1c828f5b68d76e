#include "cscb/yamabe.hpp"

#include "cscb/fiber_geometry.hpp"

#include <stdexcept>
#include <string>

namespace cscb::yamabe {

YamabeConstants yamabe_constants(int n) {
  if (n < 3) {
    throw std::domain_error("Yamabe constants need n >= 3, got " +
                            std::to_string(n));
  }
  const double dn = n;
  return {4.0 * (dn - 1.0) / (dn - 2.0), 2.0 * dn / (dn - 2.0)};
}

void YamabeProblem::validate() const {
  if (!(R > 0.0)) {
    throw std::domain_error("only constant solutions when R(g) <= 0");
  }
  if (n < 3) throw std::invalid_argument("total dimension n must be >= 3");
  if (d < 1) throw std::invalid_argument("sphere dimension d must be >= 1");
  if (n <= d) throw std::invalid_argument("subcritical problem needs n > d");
  if (!(r > 0.0)) throw std::invalid_argument("radius r must be > 0");
}

Predicate uniqueness_predicate(const YamabeProblem& prob) {
  prob.validate();
  const double lhs = double(prob.d) / (prob.r * prob.r);
  const double rhs = prob.R / double(prob.n - 1);
  return {lhs >= rhs, lhs - rhs};
}

Predicate multiplicity_predicate(const YamabeProblem& prob, int l) {
  prob.validate();
  if (l < 1) throw std::invalid_argument("eigenvalue index l must be >= 1");
  const double lambda = double(l) * double(l + prob.d - 1) / (prob.r * prob.r);
  const double rhs = prob.R / double(prob.n - 1);
  return {lambda < rhs, rhs - lambda};
}

int guaranteed_lower_bound(const YamabeProblem& prob) {
  int l = 0;
  while (multiplicity_predicate(prob, l + 1).holds) ++l;
  return l + 1;
}

namespace {

void check_product_args(int m, int k, double r, int l) {
  if (m < 0 || k < 0 || m + k < 3) {
    throw std::invalid_argument("product thresholds need m + k >= 3");
  }
  if (!(r > 0.0)) throw std::invalid_argument("radius r must be > 0");
  if (l < 1) throw std::invalid_argument("eigenvalue index l must be >= 1");
}

Predicate at_most(double lhs, double rhs) { return {lhs <= rhs, rhs - lhs}; }
Predicate greater(double lhs, double rhs) { return {lhs > rhs, lhs - rhs}; }

}  // namespace

ProductThresholds product_thresholds(int m, int k, double r, int l) {
  check_product_args(m, k, r, l);
  const double dm = m;
  const double dk = k;
  const double dl = l;
  const double r2 = r * r;
  ProductThresholds t{};
  t.uniqueness_fiber = at_most((dm - 1.0) * r2, dk);
  t.uniqueness_base = at_most((dk - 1.0) / r2, dm);
  t.multiplicity_fiber = greater(dm * (dm - 1.0) * r2,
                                 dl * (dl + dk - 1.0) * (dm + dk - 1.0) - dk * (dk - 1.0));
  t.multiplicity_base = greater(dk * (dk - 1.0) / r2,
                                dl * (dl + dm - 1.0) * (dm + dk - 1.0) - dm * (dm - 1.0));
  t.scal = dm * (dm - 1.0) + dk * (dk - 1.0) / r2;
  return t;
}

BundleThresholds bundle_thresholds(int m, int k, double a, double r, int l) {
  check_product_args(m, k, r, l);
  if (!(a >= 0.0)) throw std::invalid_argument("O'Neill constant a must be >= 0");
  const double dm = m;
  const double dk = k;
  const double dl = l;
  const double r2 = r * r;
  const double a2 = a * a;
  BundleThresholds t{};
  t.uniqueness_fiber_gradient = at_most(-(a2 / dm) * r2 * r2 + (dm - 1.0) * r2, dk);
  t.uniqueness_base = at_most(-(a2 / dk) * r2 + (dk - 1.0) / r2, dm);
  t.multiplicity_base = greater(-a2 * r2 + dk * (dk - 1.0) / r2,
                                dl * (dl + dm - 1.0) * (dm + dk - 1.0) - dm * (dm - 1.0));
  t.scal = geometry::sphere_bundle_scalar({m, dm * (dm - 1.0)}, k, a, r);
  return t;
}

}  // namespace cscb::yamabe
