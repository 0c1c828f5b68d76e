#include "cscb/join_solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cscb::join {

using elliptic::Modulus;

void JoinParams::validate() const {
  if (k1 < 1 || k2 < 1) {
    throw std::invalid_argument("join fiber dimensions must satisfy k1, k2 >= 1");
  }
  if (!(a1 >= 0.0) || !(a2 >= 0.0)) {
    throw std::invalid_argument("O'Neill constants a1, a2 must be >= 0");
  }
}

std::string_view to_string(Branch b) {
  switch (b) {
    case Branch::Flat: return "flat";
    case Branch::Case1: return "case1";
    case Branch::Case2Round: return "case2-round";
    case Branch::Case2Elliptic: return "case2-elliptic";
    case Branch::Case3: return "case3";
  }
  return "unknown";
}

bool is_elliptic(Branch b) {
  return b == Branch::Case1 || b == Branch::Case2Elliptic || b == Branch::Case3;
}

std::string_view to_string(LimitTrend t) {
  switch (t) {
    case LimitTrend::PositiveInfinity: return "+inf";
    case LimitTrend::Zero: return "0";
    case LimitTrend::NegativeInfinity: return "-inf";
    case LimitTrend::Undetermined: return "undetermined";
  }
  return "undetermined";
}

namespace {

std::string inadmissible_message(double k_sq, double lo, double hi) {
  std::ostringstream os;
  os.precision(17);
  os << "inadmissible modulus: k^2 = " << k_sq;
  if (lo < hi) {
    os << " outside admissible interval (" << lo << ", " << hi << ")";
  } else {
    os << "; no elliptic branch exists for these O'Neill constants";
  }
  return os.str();
}

// Open interval of k^2 on which a1^2 - (1 - k^2) a2^2 > 0.
BranchRange elliptic_interval(const JoinParams& p) {
  if (p.a1 > p.a2) return {Branch::Case1, 0.0, 1.0};
  if (p.a1 == p.a2 && p.a1 > 0.0) return {Branch::Case2Elliptic, 0.0, 1.0};
  if (p.a1 > 0.0) {
    return {Branch::Case3, 1.0 - (p.a1 * p.a1) / (p.a2 * p.a2), 1.0};
  }
  return {Branch::Flat, 1.0, 0.0};  // empty
}

double dim_sum(const JoinParams& p) { return double(p.k1 + p.k2); }

// gamma^2 from the parameter equation with its right-hand side supplied.
double gamma_sq_from(const JoinParams& p, double k_sq, double kc_sq,
                     double rhs) {
  const double n = dim_sum(p);
  return std::sqrt(rhs / (n * (n + 3.0))) / std::sqrt(k_sq * kc_sq);
}

double gap_from(const JoinParams& p, double k_sq, double gamma_sq) {
  const double n = dim_sum(p);
  return -2.0 * n * (p.k1 + 1.0) * gamma_sq * k_sq +
         n * (n + 1.0) * gamma_sq - p.a2 * p.a2 / gamma_sq;
}

}  // namespace

InadmissibleModulus::InadmissibleModulus(double k_sq, double lo, double hi)
    : std::domain_error(inadmissible_message(k_sq, lo, hi)), lo_(lo), hi_(hi) {}

double parameter_equation_residual(const JoinParams& p, Modulus k,
                                   double gamma) {
  const double n = dim_sum(p);
  const double g4 = gamma * gamma * gamma * gamma;
  return n * (n + 3.0) * g4 * k.squared() * k.complement_squared() -
         (p.a1 * p.a1 - k.complement_squared() * p.a2 * p.a2);
}

double gamma_from_modulus(const JoinParams& p, Modulus k) {
  p.validate();
  if (k.value() == 0.0) {
    throw std::domain_error(
        "gamma is free on the k = 0 branch; use round_solution");
  }
  const double rhs = p.a1 * p.a1 - k.complement_squared() * p.a2 * p.a2;
  if (!(rhs > 0.0)) {
    const BranchRange r = elliptic_interval(p);
    throw InadmissibleModulus(k.squared(), r.k_sq_lo, r.k_sq_hi);
  }
  return std::sqrt(gamma_sq_from(p, k.squared(), k.complement_squared(), rhs));
}

std::vector<BranchRange> admissible_modulus_range(const JoinParams& p) {
  p.validate();
  std::vector<BranchRange> out;
  if (p.a1 == p.a2) {
    out.push_back({p.a1 == 0.0 ? Branch::Flat : Branch::Case2Round, 0.0, 0.0});
  }
  const BranchRange e = elliptic_interval(p);
  if (e.k_sq_lo < e.k_sq_hi) out.push_back(e);
  return out;
}

double scalar_from_solution(const JoinParams& p, Modulus k, double gamma) {
  if (!(gamma > 0.0)) throw std::domain_error("gamma must be > 0");
  return p.base.scal + gap_from(p, k.squared(), gamma * gamma);
}

double scalar_gap_formula(const JoinParams& p, double k_sq, double kc_sq) {
  const double rhs = p.a1 * p.a1 - kc_sq * p.a2 * p.a2;
  return gap_from(p, k_sq, gamma_sq_from(p, k_sq, kc_sq, rhs));
}

WarpSolution elliptic_solution(const JoinParams& p, Modulus k) {
  const double gamma = gamma_from_modulus(p, k);
  WarpSolution sol;
  sol.k = k;
  sol.gamma = gamma;
  sol.T = elliptic::quarter_period(k) / gamma;
  sol.scal_total = scalar_from_solution(p, k, gamma);
  sol.family = elliptic_interval(p).branch;
  return sol;
}

WarpSolution round_solution(const JoinParams& p, double gamma) {
  p.validate();
  if (p.a1 != p.a2) {
    throw std::domain_error("the k = 0 branch requires a1 = a2");
  }
  if (!(gamma > 0.0)) throw std::domain_error("gamma must be > 0");
  WarpSolution sol;
  sol.k = Modulus(0.0);
  sol.gamma = gamma;
  sol.T = elliptic::quarter_period(sol.k) / gamma;
  sol.scal_total = scalar_from_solution(p, sol.k, gamma);
  sol.family = p.a1 == 0.0 ? Branch::Flat : Branch::Case2Round;
  return sol;
}

WarpSolution raw_solution(const JoinParams& p, Modulus k, double gamma) {
  p.validate();
  WarpSolution sol;
  sol.k = k;
  sol.gamma = gamma;
  sol.T = elliptic::quarter_period(k) / gamma;
  sol.scal_total = scalar_from_solution(p, k, gamma);
  const BranchRange e = elliptic_interval(p);
  sol.family = k.value() == 0.0
                   ? (p.a1 == 0.0 && p.a2 == 0.0 ? Branch::Flat : Branch::Case2Round)
                   : e.branch;
  return sol;
}

geometry::ProfilePair build_profiles(const WarpSolution& sol) {
  const Modulus k = sol.k;
  const double gamma = sol.gamma;
  const double scale1 = 1.0 / (gamma * k.complement());
  geometry::ProfilePair pair;
  pair.T = sol.T;
  pair.eval = [k, gamma, scale1](double t) {
    const elliptic::JacobiValues v = elliptic::jacobi(gamma * t, k);
    const elliptic::JacobiDerivatives d = elliptic::jacobi_derivatives(v, k);
    return geometry::ProfileSample{
        v.cn * scale1,
        d.cn_d1 * gamma * scale1,
        d.cn_d2 * gamma * gamma * scale1,
        v.sn / gamma,
        d.sn_d1,
        d.sn_d2 * gamma,
    };
  };
  return pair;
}

namespace {

template <typename F>
void for_each_grid_point(double T, int grid_size, F&& f) {
  const double lo = geometry::kEndpointFraction * T;
  const double hi = T - lo;
  for (int i = 0; i < grid_size; ++i) {
    f(lo + (hi - lo) * double(i) / double(grid_size - 1));
  }
}

}  // namespace

ResidualReport verify_residual(const JoinParams& p, const WarpSolution& sol,
                               int grid_size) {
  if (grid_size < 2) throw std::invalid_argument("grid_size must be >= 2");
  const geometry::ProfilePair prof = build_profiles(sol);
  const geometry::SubmersionConstants c = p.constants();
  ResidualReport rep;
  rep.grid_size = grid_size;
  rep.min_value = INFINITY;
  rep.max_value = -INFINITY;
  for_each_grid_point(sol.T, grid_size, [&](double t) {
    const double v = geometry::scal_join_total(p.base, c, prof, t);
    rep.min_value = std::min(rep.min_value, v);
    rep.max_value = std::max(rep.max_value, v);
    rep.max_deviation = std::max(rep.max_deviation, std::abs(v - sol.scal_total));
  });
  return rep;
}

ConservationReport conservation_residuals(const WarpSolution& sol,
                                          int grid_size) {
  if (grid_size < 2) throw std::invalid_argument("grid_size must be >= 2");
  const geometry::ProfilePair prof = build_profiles(sol);
  const double kc_sq = sol.k.complement_squared();
  const double inv_g2 = 1.0 / (sol.gamma * sol.gamma);
  ConservationReport rep;
  for_each_grid_point(sol.T, grid_size, [&](double t) {
    const geometry::ProfileSample s = prof(t);
    rep.value = std::max(rep.value,
                         std::abs(kc_sq * s.f1 * s.f1 + s.f2 * s.f2 - inv_g2));
    rep.derivative = std::max(
        rep.derivative, std::abs(kc_sq * s.f1 * s.df1 + s.f2 * s.df2));
  });
  return rep;
}

namespace {

Family sample_branch(const JoinParams& p, const BranchRange& range,
                     bool swapped, int n_points, double gamma_min,
                     double gamma_max) {
  Family fam{range.branch, swapped, p, {}};
  fam.rows.reserve(static_cast<std::size_t>(n_points));
  if (!is_elliptic(range.branch)) {
    const double ratio = std::log(gamma_max / gamma_min);
    for (int i = 0; i < n_points; ++i) {
      const double g = gamma_min * std::exp(ratio * double(i) / double(n_points - 1));
      const WarpSolution s = round_solution(p, g);
      fam.rows.push_back({0.0, g, s.T, s.scal_total,
                          parameter_equation_residual(p, s.k, g)});
    }
    return fam;
  }
  const double k_lo = std::max(std::sqrt(range.k_sq_lo), kBranchModulusMin);
  const double k_hi = std::min(std::sqrt(range.k_sq_hi), kBranchModulusMax);
  for (int i = 0; i < n_points; ++i) {
    const double k = k_lo + (k_hi - k_lo) * (double(i) + 0.5) / double(n_points);
    const WarpSolution s = elliptic_solution(p, Modulus(k));
    fam.rows.push_back({k, s.gamma, s.T, s.scal_total,
                        parameter_equation_residual(p, s.k, s.gamma)});
  }
  return fam;
}

}  // namespace

std::vector<Family> family_scan(const JoinParams& p, int n_points,
                                double gamma_min, double gamma_max) {
  if (n_points < 2) throw std::invalid_argument("n_points must be >= 2");
  if (!(gamma_min > 0.0 && gamma_max > gamma_min)) {
    throw std::invalid_argument("gamma range must satisfy 0 < min < max");
  }
  std::vector<Family> out;
  for (const BranchRange& r : admissible_modulus_range(p)) {
    out.push_back(sample_branch(p, r, false, n_points, gamma_min, gamma_max));
  }
  if (p.a1 != p.a2) {
    const JoinParams q = p.swapped();
    for (const BranchRange& r : admissible_modulus_range(q)) {
      out.push_back(sample_branch(q, r, true, n_points, gamma_min, gamma_max));
    }
  }
  return out;
}

LimitProbe limit_probe(const JoinParams& p, Branch branch, Endpoint endpoint,
                       int steps) {
  p.validate();
  if (!is_elliptic(branch)) {
    throw std::invalid_argument("limit_probe needs an elliptic branch");
  }
  if (steps < 5) throw std::invalid_argument("limit_probe needs >= 5 steps");
  const BranchRange range = elliptic_interval(p);
  if (range.branch != branch) {
    throw std::invalid_argument("branch " + std::string(to_string(branch)) +
                                " is not admissible for these constants");
  }

  LimitProbe probe{branch, endpoint, {}, LimitTrend::Undetermined,
                   LimitTrend::Undetermined};
  const double a1s = p.a1 * p.a1;
  const double a2s = p.a2 * p.a2;
  for (int j = 1; j <= steps; ++j) {
    const double d = std::pow(10.0, -double(j));
    double k_sq = 0.0;
    double kc_sq = 0.0;
    double rhs = 0.0;
    if (endpoint == Endpoint::Upper) {
      k_sq = (1.0 - d) * (1.0 - d);
      kc_sq = d * (2.0 - d);
      rhs = a1s - kc_sq * a2s;
    } else if (branch == Branch::Case3) {
      // k^2 = lo + delta with lo = 1 - a1^2/a2^2; rhs = delta a2^2 exactly.
      const double delta = d * (range.k_sq_hi - range.k_sq_lo);
      k_sq = range.k_sq_lo + delta;
      kc_sq = a1s / a2s - delta;
      rhs = delta * a2s;
    } else {
      k_sq = d * d;
      kc_sq = (1.0 - d) * (1.0 + d);
      rhs = a1s - kc_sq * a2s;
    }
    const double g2 = gamma_sq_from(p, k_sq, kc_sq, rhs);
    probe.samples.push_back({std::sqrt(k_sq), gap_from(p, k_sq, g2)});
  }

  if (endpoint == Endpoint::Upper) {
    probe.predicted = p.k2 > p.k1 + 1   ? LimitTrend::PositiveInfinity
                      : p.k2 == p.k1 + 1 ? LimitTrend::Zero
                                         : LimitTrend::NegativeInfinity;
  } else {
    probe.predicted = branch == Branch::Case3 ? LimitTrend::NegativeInfinity
                                              : LimitTrend::PositiveInfinity;
  }

  // Compare the tail against the sample four decades earlier: divergent
  // tails grow by at least 10x, convergent ones shrink by at least 10x.
  const double last = probe.samples.back().gap;
  const double ref = probe.samples[probe.samples.size() - 5].gap;
  if (std::abs(last) >= 10.0 * std::abs(ref)) {
    probe.observed = last > 0.0 ? LimitTrend::PositiveInfinity
                                : LimitTrend::NegativeInfinity;
  } else if (10.0 * std::abs(last) <= std::abs(ref)) {
    probe.observed = LimitTrend::Zero;
  }
  return probe;
}

}  // namespace cscb::join
