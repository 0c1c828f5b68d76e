#include "cscb/fiber_geometry.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

namespace {

using namespace cscb::geometry;
constexpr double kPi = std::numbers::pi;

ProfilePair round_profiles(double gamma) {
  return {kPi / (2.0 * gamma), [gamma](double t) {
            const double c = std::cos(gamma * t), s = std::sin(gamma * t);
            return ProfileSample{c / gamma, -s, -gamma * c, s / gamma, c, -gamma * s};
          }};
}

Eigen::MatrixXd rotation_generator() {
  Eigen::MatrixXd J(2, 2);
  J << 0.0, -1.0, 1.0, 0.0;
  return J;
}

TEST(ScalDoublyWarped, RoundSpheres) {
  const ProfilePair unit = round_profiles(1.0);
  EXPECT_NEAR(scal_doubly_warped(1, 1, unit, kPi / 4), 6.0, 1e-12);
  EXPECT_NEAR(scal_doubly_warped(2, 3, unit, kPi / 3), 30.0, 1e-12);
}

TEST(ScalDoublyWarped, RoundJoinReduction) {
  for (double gamma : {0.5, 1.0, 2.5}) {
    const ProfilePair p = round_profiles(gamma);
    for (int k1 = 1; k1 <= 3; ++k1) {
      for (int k2 = 1; k2 <= 3; ++k2) {
        const double expect = (k1 + k2) * (k1 + k2 + 1) * gamma * gamma;
        for (int i = 1; i < 50; ++i) {
          EXPECT_NEAR(scal_doubly_warped(k1, k2, p, p.T * i / 50.0), expect, 1e-9);
        }
      }
    }
  }
}

TEST(ScalDoublyWarped, SwapSymmetry) {
  const ProfileSample s{0.7, -0.3, 0.1, 1.3, 0.4, -0.2};
  const ProfileSample w{s.f2, s.df2, s.d2f2, s.f1, s.df1, s.d2f1};
  EXPECT_NEAR(scal_doubly_warped(2, 5, s), scal_doubly_warped(5, 2, w), 1e-12);
}

TEST(ScalDoublyWarped, ZeroDimensionDropsTerms) {
  const ProfileSample s{0.7, -0.3, 0.1, 1.3, 0.4, -0.2};
  const double expect = -2.0 * 3 * s.d2f2 / s.f2 +
                        3.0 * 2.0 * (1 - s.df2 * s.df2) / (s.f2 * s.f2);
  EXPECT_NEAR(scal_doubly_warped(0, 3, s), expect, 1e-12);
}

TEST(ScalDoublyWarped, Preconditions) {
  const ProfilePair p = round_profiles(1.0);
  EXPECT_THROW(scal_doubly_warped(1, 1, p, 0.0), std::domain_error);
  EXPECT_THROW(scal_doubly_warped(1, 1, p, p.T), std::domain_error);
  EXPECT_THROW(scal_doubly_warped(1, 1, ProfileSample{-1, 0, 0, 1, 0, 0}),
               std::domain_error);
}

TEST(ScalJoinTotal, AffineInBaseAndFlatReduction) {
  const ProfilePair p = round_profiles(1.3);
  const SubmersionConstants flat{2, 1, 0.0, 0.0};
  const SubmersionConstants c{2, 1, 0.7, 1.1};
  const double t = 0.4;
  EXPECT_NEAR(scal_join_total({3, 0.0}, flat, p, t), scal_doubly_warped(2, 1, p, t), 1e-12);
  EXPECT_NEAR(scal_join_total({3, 2.5}, c, p, t) - scal_join_total({3, 0.0}, c, p, t), 2.5,
              1e-12);
  const auto s = p(t);
  EXPECT_NEAR(scal_join_total({3, 0.0}, c, p, t),
              scal_doubly_warped(2, 1, p, t) - 0.49 * s.f1 * s.f1 - 1.21 * s.f2 * s.f2,
              1e-12);
}

TEST(OneillRescaled, Values) {
  EXPECT_DOUBLE_EQ(oneill_rescaled(2, 6, 1, 1), 7.0);
  EXPECT_DOUBLE_EQ(oneill_rescaled(2, 6, 1, 4), -0.5);
  EXPECT_THROW(oneill_rescaled(2, 6, 1, 0), std::domain_error);
}

TEST(SphereBundleScalar, Values) {
  EXPECT_DOUBLE_EQ(sphere_bundle_scalar({2, 2.0}, 3, 0.0, 1.0), 8.0);
  EXPECT_DOUBLE_EQ(sphere_bundle_scalar({2, 2.0}, 3, 1.0, 1.0), 7.0);
  for (int m = 1; m <= 4; ++m) {
    for (double r : {0.3, 1.0, 2.0}) {
      EXPECT_NEAR(sphere_bundle_scalar({m, m * (m - 1.0)}, 3, 0.0, r),
                  m * (m - 1.0) + 6.0 / (r * r), 1e-12);
    }
  }
  EXPECT_THROW(sphere_bundle_scalar({2, 2.0}, 3, 1.0, 0.0), std::domain_error);
}

TEST(SkewFamily, RejectsNonSkewBlocks) {
  SkewFamily fam(2, 2);
  Eigen::MatrixXd bad(2, 2);
  bad << 1.0, 0.0, 0.0, 0.0;
  EXPECT_THROW(fam.set(0, 1, bad), std::invalid_argument);
  EXPECT_THROW(SkewFamily::from_upper(3, 2, {rotation_generator()}), std::invalid_argument);
  fam.set(0, 1, rotation_generator());
  EXPECT_TRUE(fam(1, 0).isApprox(-rotation_generator()));
}

TEST(XiForm, Examples) {
  const std::array<double, 2> s{1.0, 0.0};
  EXPECT_DOUBLE_EQ(xi_form(SkewFamily(2, 2), s), 0.0);
  SkewFamily fam(2, 2);
  fam.set(0, 1, rotation_generator());
  EXPECT_NEAR(xi_form(fam, s), 2.0, 1e-15);
  EXPECT_NEAR(xi_form(fam.scaled(3.0), s), 9.0 * xi_form(fam, s), 1e-12);
  const std::array<double, 3> wrong{1.0, 0.0, 0.0};
  EXPECT_THROW(xi_form(fam, wrong), std::invalid_argument);
}

TEST(XiForm, DirectSummationOracle) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  const int m = 3, n = 4;
  std::vector<Eigen::MatrixXd> upper;
  for (int b = 0; b < m * (m - 1) / 2; ++b) {
    Eigen::MatrixXd M(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) M(i, j) = g(rng);
    upper.push_back(M - M.transpose());
  }
  const SkewFamily fam = SkewFamily::from_upper(m, n, upper);
  std::vector<double> s(n);
  for (auto& x : s) x = g(rng);
  double oracle = 0.0;
  for (const auto& B : upper) {
    for (int i = 0; i < n; ++i) {
      double row = 0.0;
      for (int j = 0; j < n; ++j) row += B(i, j) * s[j];
      oracle += 2.0 * row * row;  // (i,j) and (j,i)
    }
  }
  EXPECT_NEAR(xi_form(fam, s), oracle, 1e-12 * oracle);
  std::vector<double> s2(s);
  for (auto& x : s2) x *= 1.7;
  EXPECT_NEAR(xi_form(fam, s2), 1.7 * 1.7 * xi_form(fam, s), 1e-12 * oracle * 3);
}

TEST(OneillNorm, RotationFamily) {
  SkewFamily fam(2, 2);
  fam.set(0, 1, rotation_generator());
  for (int n = 1; n <= 3; ++n) {
    const SkewFamily scaled = fam.scaled(n / 2.0);
    for (int i = 0; i < 50; ++i) {
      const double th = 2.0 * kPi * i / 50.0;
      const std::array<double, 2> s{std::cos(th), std::sin(th)};
      EXPECT_NEAR(oneill_norm_from_xi(scaled, s), n * n / 8.0, 1e-12);
    }
  }
  const std::array<double, 2> s{1.0, 0.0};
  EXPECT_DOUBLE_EQ(oneill_norm_from_xi(SkewFamily(2, 2), s), 0.0);
  const std::array<double, 2> not_unit{1.0, 1e-5};
  EXPECT_THROW(oneill_norm_from_xi(fam, not_unit), std::invalid_argument);
}

TEST(OneillNormJoin, RoundnessCriterion) {
  const double gamma = 1.4;
  const ProfilePair p = round_profiles(gamma);
  const SubmersionConstants eq{1, 2, 0.8, 0.8};
  const SubmersionConstants ne{1, 2, 0.8, 1.5};
  const SubmersionConstants zero{1, 2, 0.0, 0.0};
  double lo = 1e300, hi = -1e300;
  for (int i = 1; i < 100; ++i) {
    const double t = p.T * i / 100.0;
    EXPECT_NEAR(oneill_norm_join(eq, p, t), 0.64 / (gamma * gamma), 1e-14);
    EXPECT_DOUBLE_EQ(oneill_norm_join(zero, p, t), 0.0);
    const double v = oneill_norm_join(ne, p, t);
    EXPECT_GT(v, 0.0);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  EXPECT_GT(hi - lo, 0.1);
}

TEST(CheckBoundary, TrigonometricProfiles) {
  const ProfilePair p = round_profiles(1.0);
  for (int order = 1; order <= 4; ++order) {
    const BoundaryReport r = check_boundary(p, order);
    EXPECT_TRUE(r.passed) << order;
  }
  const BoundaryReport r = check_boundary(p, 2);
  EXPECT_EQ(r.conditions.size(), 10u);
  for (const auto& c : r.conditions) EXPECT_LT(c.residual, 1e-12) << c.name;
  EXPECT_EQ(check_boundary(p, 1).conditions.size(), 8u);
  EXPECT_EQ(check_boundary(p, 4).conditions.size(), 14u);
  EXPECT_THROW(check_boundary(p, 0), std::invalid_argument);
}

TEST(CheckBoundary, FlagsWrongSlope) {
  ProfilePair p = round_profiles(1.0);
  p.eval = [](double t) {
    return ProfileSample{std::cos(t), -std::sin(t), -std::cos(t),
                         2 * std::sin(t), 2 * std::cos(t), -2 * std::sin(t)};
  };
  const BoundaryReport r = check_boundary(p, 2);
  EXPECT_FALSE(r.passed);
  const BoundaryCondition* c = r.find("f2'(0)=1");
  ASSERT_NE(c, nullptr);
  EXPECT_FALSE(c->passed);
  EXPECT_NEAR(c->residual, 1.0, 1e-15);
  EXPECT_TRUE(r.find("f1'(T)=-1")->passed);
}

TEST(FiniteDifferences, ProfilesAgree) {
  const ProfilePair p = round_profiles(1.7);
  const double h = 1e-5;
  for (int i = 1; i < 20; ++i) {
    const double t = p.T * i / 20.0;
    const auto s = p(t), a = p(t + h), b = p(t - h);
    EXPECT_NEAR(s.df1, (a.f1 - b.f1) / (2 * h), 1e-6);
    EXPECT_NEAR(s.df2, (a.f2 - b.f2) / (2 * h), 1e-6);
    EXPECT_NEAR(s.d2f1, (a.f1 - 2 * s.f1 + b.f1) / (h * h), 1e-4);
    EXPECT_NEAR(s.d2f1, (a.df1 - b.df1) / (2 * h), 1e-6);
    EXPECT_NEAR(s.d2f2, (a.df2 - b.df2) / (2 * h), 1e-6);
  }
}

TEST(Dichotomy, ConstantInputs) {
  const std::vector<double> base(20, 2.0), fiber(20, 6.0), a_sq(20, 1.0);
  const std::vector<double> cs{0.5, 2.0, 10.0};
  const DichotomyReport r = dichotomy_check(base, fiber, a_sq, cs);
  EXPECT_TRUE(r.a_sq_constant);
  EXPECT_TRUE(r.holds);
  for (const auto& row : r.rows) EXPECT_TRUE(row.constant);
}

TEST(Dichotomy, VaryingTensorBreaksRescaledConstancy) {
  std::vector<double> base(20, 2.0), fiber(20), a_sq(20);
  for (int i = 0; i < 20; ++i) {
    a_sq[i] = 1.0 + 0.1 * i;
    fiber[i] = 5.0 + a_sq[i];  // unscaled scalar stays 7
  }
  const std::vector<double> cs{2.0};
  const DichotomyReport r = dichotomy_check(base, fiber, a_sq, cs);
  EXPECT_FALSE(r.a_sq_constant);
  EXPECT_TRUE(r.scal_constant);
  EXPECT_FALSE(r.rows[0].constant);
  EXPECT_TRUE(r.holds);
}

TEST(Dichotomy, RejectsUnitScale) {
  const std::vector<double> v(3, 1.0), cs{1.0};
  EXPECT_THROW(dichotomy_check(v, v, v, cs), std::invalid_argument);
}

}  // namespace
