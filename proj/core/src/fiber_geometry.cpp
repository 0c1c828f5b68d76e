#include "cscb/fiber_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace cscb::geometry {

void SubmersionConstants::validate() const {
  if (k1 < 0 || k2 < 0 || k1 + k2 < 1) {
    throw std::invalid_argument("fiber dimensions must satisfy k1, k2 >= 0 and k1 + k2 >= 1");
  }
  if (!(a1 >= 0.0) || !(a2 >= 0.0)) {
    throw std::invalid_argument("O'Neill constants a1, a2 must be >= 0");
  }
}

double scal_doubly_warped(int k1, int k2, const ProfileSample& s) {
  if (!(s.f1 > 0.0) || !(s.f2 > 0.0)) {
    throw std::domain_error("warping profiles must be strictly positive");
  }
  const double dk1 = k1;
  const double dk2 = k2;
  return -2.0 * dk1 * s.d2f1 / s.f1 +
         dk1 * (dk1 - 1.0) * (1.0 - s.df1 * s.df1) / (s.f1 * s.f1) -
         2.0 * dk2 * s.d2f2 / s.f2 +
         dk2 * (dk2 - 1.0) * (1.0 - s.df2 * s.df2) / (s.f2 * s.f2) -
         2.0 * dk1 * dk2 * s.df1 * s.df2 / (s.f1 * s.f2);
}

namespace {

void require_interior(const ProfilePair& p, double t) {
  if (!(t > 0.0 && t < p.T)) {
    throw std::domain_error("join parameter t = " + std::to_string(t) +
                            " outside (0, " + std::to_string(p.T) + ")");
  }
}

}  // namespace

double scal_doubly_warped(int k1, int k2, const ProfilePair& p, double t) {
  require_interior(p, t);
  return scal_doubly_warped(k1, k2, p(t));
}

double scal_join_total(const BaseGeometry& base, const SubmersionConstants& c,
                       const ProfilePair& p, double t) {
  require_interior(p, t);
  const ProfileSample s = p(t);
  return base.scal + scal_doubly_warped(c.k1, c.k2, s) -
         c.a1 * c.a1 * s.f1 * s.f1 - c.a2 * c.a2 * s.f2 * s.f2;
}

double oneill_rescaled(double scal_base, double scal_fiber, double a_sq,
                       double c) {
  if (!(c > 0.0)) throw std::domain_error("fiber scale c must be > 0");
  return scal_base + scal_fiber / c - c * a_sq;
}

double sphere_bundle_scalar(const BaseGeometry& base, int k, double a,
                            double r) {
  if (!(r > 0.0)) throw std::domain_error("fiber radius r must be > 0");
  return base.scal + double(k) * double(k - 1) / (r * r) - a * a * r * r;
}

SkewFamily::SkewFamily(int dim_base, int dim_fiber)
    : dim_base_(dim_base), dim_fiber_(dim_fiber) {
  if (dim_base < 1 || dim_fiber < 1) {
    throw std::invalid_argument("SkewFamily dimensions must be >= 1");
  }
  blocks_.assign(static_cast<std::size_t>(dim_base * dim_base),
                 Eigen::MatrixXd::Zero(dim_fiber, dim_fiber));
}

SkewFamily SkewFamily::from_upper(int dim_base, int dim_fiber,
                                  const std::vector<Eigen::MatrixXd>& upper) {
  SkewFamily fam(dim_base, dim_fiber);
  const std::size_t expected =
      static_cast<std::size_t>(dim_base * (dim_base - 1) / 2);
  if (upper.size() != expected) {
    throw std::invalid_argument("expected " + std::to_string(expected) +
                                " upper-triangular blocks");
  }
  std::size_t idx = 0;
  for (int i = 0; i < dim_base; ++i) {
    for (int j = i + 1; j < dim_base; ++j) fam.set(i, j, upper[idx++]);
  }
  return fam;
}

void SkewFamily::set(int i, int j, const Eigen::MatrixXd& block) {
  if (i < 0 || j < 0 || i >= dim_base_ || j >= dim_base_ || i == j) {
    throw std::invalid_argument("SkewFamily index out of range");
  }
  if (block.rows() != dim_fiber_ || block.cols() != dim_fiber_) {
    throw std::invalid_argument("SkewFamily block has wrong shape");
  }
  const double scale = std::max(1.0, block.cwiseAbs().maxCoeff());
  if ((block + block.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw std::invalid_argument("curvature block is not skew-symmetric");
  }
  blocks_[static_cast<std::size_t>(i * dim_base_ + j)] = block;
  blocks_[static_cast<std::size_t>(j * dim_base_ + i)] = -block;
}

SkewFamily SkewFamily::scaled(double lambda) const {
  SkewFamily out = *this;
  for (auto& b : out.blocks_) b *= lambda;
  return out;
}

double xi_form(const SkewFamily& fam, std::span<const double> s) {
  if (static_cast<int>(s.size()) != fam.dim_fiber()) {
    throw std::invalid_argument("xi_form: vector has dimension " +
                                std::to_string(s.size()) + ", fiber has " +
                                std::to_string(fam.dim_fiber()));
  }
  const Eigen::Map<const Eigen::VectorXd> v(s.data(),
                                            static_cast<Eigen::Index>(s.size()));
  double sum = 0.0;
  for (int i = 0; i < fam.dim_base(); ++i) {
    for (int j = 0; j < fam.dim_base(); ++j) {
      if (i != j) sum += (fam(i, j) * v).squaredNorm();
    }
  }
  return sum;
}

double oneill_norm_from_xi(const SkewFamily& fam, std::span<const double> s) {
  double norm_sq = 0.0;
  for (double x : s) norm_sq += x * x;
  if (std::abs(std::sqrt(norm_sq) - 1.0) > 1e-12) {
    throw std::invalid_argument("oneill_norm_from_xi requires a unit vector");
  }
  return 0.25 * xi_form(fam, s);
}

double oneill_norm_join(const SubmersionConstants& c, const ProfilePair& p,
                        double t) {
  require_interior(p, t);
  const ProfileSample s = p(t);
  return c.a1 * c.a1 * s.f1 * s.f1 + c.a2 * c.a2 * s.f2 * s.f2;
}

const BoundaryCondition* BoundaryReport::find(const std::string& name) const {
  for (const auto& c : conditions) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

BoundaryReport check_boundary(const ProfilePair& p, int order,
                              const BoundaryOptions& opts) {
  if (order < 1 || order > 4) {
    throw std::invalid_argument("check_boundary supports orders 1..4");
  }
  BoundaryReport report;
  auto add = [&](std::string name, double residual, double tol) {
    const bool ok = std::isfinite(residual) && residual <= tol;
    report.conditions.push_back({std::move(name), residual, tol, ok});
    report.passed = report.passed && ok;
  };
  auto positive = [](double v) { return v > 0.0 ? 0.0 : -v; };

  const ProfileSample s0 = p(0.0);
  const ProfileSample sT = p(p.T);
  const double tol = opts.tolerance;

  add("f1(0)>0", positive(s0.f1), 0.0);
  add("f1'(0)=0", std::abs(s0.df1), tol);
  add("f1(T)=0", std::abs(sT.f1), tol);
  add("f1'(T)=-1", std::abs(sT.df1 + 1.0), tol);
  add("f2(T)>0", positive(sT.f2), 0.0);
  add("f2'(T)=0", std::abs(sT.df2), tol);
  add("f2(0)=0", std::abs(s0.f2), tol);
  add("f2'(0)=1", std::abs(s0.df2 - 1.0), tol);
  if (order >= 2) {
    add("f1''(T)=0", std::abs(sT.d2f1), tol);
    add("f2''(0)=0", std::abs(s0.d2f2), tol);
  }
  if (order >= 3) {
    // Central differences of the closed-form second derivative; the
    // profiles are evaluated slightly outside [0, T] by their analytic
    // extension.
    const double h = opts.fd_step;
    auto third = [&](double t, bool first) {
      const ProfileSample a = p(t + h);
      const ProfileSample b = p(t - h);
      return first ? (a.d2f1 - b.d2f1) / (2.0 * h)
                   : (a.d2f2 - b.d2f2) / (2.0 * h);
    };
    add("f1'''(0)=0", std::abs(third(0.0, true)), opts.fd_tolerance);
    add("f2'''(T)=0", std::abs(third(p.T, false)), opts.fd_tolerance);
  }
  if (order >= 4) {
    const double h = opts.fd_step;
    auto fourth = [&](double t, bool first) {
      const ProfileSample a = p(t + h);
      const ProfileSample m = p(t);
      const ProfileSample b = p(t - h);
      return first ? (a.d2f1 - 2.0 * m.d2f1 + b.d2f1) / (h * h)
                   : (a.d2f2 - 2.0 * m.d2f2 + b.d2f2) / (h * h);
    };
    add("f1''''(T)=0", std::abs(fourth(p.T, true)), opts.fd_tolerance);
    add("f2''''(0)=0", std::abs(fourth(0.0, false)), opts.fd_tolerance);
  }
  return report;
}

namespace {

double spread(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
  return *hi - *lo;
}

double magnitude(std::span<const double> xs) {
  double m = 1.0;
  for (double x : xs) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

DichotomyReport dichotomy_check(std::span<const double> scal_base,
                                std::span<const double> scal_fiber,
                                std::span<const double> a_sq,
                                std::span<const double> cs, double tolerance) {
  if (scal_base.size() != scal_fiber.size() || scal_base.size() != a_sq.size()) {
    throw std::invalid_argument("dichotomy_check: sample lengths differ");
  }
  for (double c : cs) {
    if (!(c > 0.0) || c == 1.0) {
      throw std::invalid_argument("dichotomy_check: scales must satisfy c > 0, c != 1");
    }
  }
  DichotomyReport report;
  report.a_sq_constant = spread(a_sq) <= tolerance * magnitude(a_sq);

  std::vector<double> values(scal_base.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] = scal_base[i] + scal_fiber[i] - a_sq[i];
  }
  report.scal_constant = spread(values) <= tolerance * magnitude(values);

  bool all_constant = true;
  bool none_constant = true;
  for (double c : cs) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      values[i] = oneill_rescaled(scal_base[i], scal_fiber[i], a_sq[i], c);
    }
    const double sp = spread(values);
    const bool constant = sp <= tolerance * magnitude(values);
    report.rows.push_back({c, sp, constant});
    all_constant = all_constant && constant;
    none_constant = none_constant && !constant;
  }
  report.holds = report.a_sq_constant ? all_constant : none_constant;
  return report;
}

}  // namespace cscb::geometry
