// Radial reduction of the subcritical Yamabe-type equation on S^d(r).
//
// For v depending only on the polar distance t in [0, pi r] from a pole,
// the Laplacian of the round sphere of radius r is
//   Lap v = v'' + ((d-1)/r) cot(t/r) v',
// so -a Lap v + R v = R v^(p-1) becomes
//   v'' + ((d-1)/r) cot(t/r) v' + g(v) = 0,   g(v) = (R/a)(v^(p-1) - v).
// A smooth solution is even about both poles: v'(0) = v'(pi r) = 0.
//
// Near a pole, with s the distance to it, v = beta + b2 s^2 + b4 s^4 + ...
// where (using (1/r) cot(s/r) = 1/s - s/(3r^2) + O(s^3))
//   b2 = -g(beta) / (2d),
//   b4 = b2 (2(d-1)/(3r^2) - g'(beta)) / (4(d+2)).
// The start data at t0 use this expansion around alpha; at the far end the
// same expansion predicts the slope of the regular solution through the
// final state, and the mismatch is the difference to the integrated slope.
// For d = 1 there is no cot term and the interval [0, pi r] is integrated
// exactly, with Neumann conditions at both ends.

#include "cscb/yamabe.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace cscb::yamabe {
namespace {

using State = std::array<double, 2>;
namespace odeint = boost::numeric::odeint;

struct RadialEquation {
  int d;
  double r;
  double c;  // R / a_N
  double q;  // p_N - 1

  // Odd extension of v^q keeps the right-hand side finite if a trial stage
  // dips below zero; such trajectories are terminated anyway.
  double g(double v) const {
    return c * (std::copysign(std::pow(std::abs(v), q), v) - v);
  }
  double dg(double v) const {
    return c * (q * std::pow(std::abs(v), q - 1.0) - 1.0);
  }

  void operator()(const State& x, State& dxdt, double t) const {
    dxdt[0] = x[1];
    double damping = 0.0;
    if (d > 1) damping = double(d - 1) / (r * std::tan(t / r)) * x[1];
    dxdt[1] = -damping - g(x[0]);
  }

  double b2(double beta) const { return -g(beta) / (2.0 * d); }
  double b4(double beta) const {
    return b2(beta) * (2.0 * (d - 1) / (3.0 * r * r) - dg(beta)) /
           (4.0 * (d + 2));
  }
};

}  // namespace

double ShotResult::signed_mismatch() const {
  switch (outcome) {
    case ShotOutcome::Crashed: return -std::numeric_limits<double>::infinity();
    case ShotOutcome::BlewUp: return std::numeric_limits<double>::infinity();
    case ShotOutcome::Reached: break;
  }
  return mismatch;
}

ShotResult shoot(const YamabeProblem& prob, double alpha,
                 const IntegratorOptions& opts) {
  prob.validate();
  if (!(alpha > 0.0)) throw std::invalid_argument("initial value must be > 0");
  const YamabeConstants yc = yamabe_constants(prob.n);
  const RadialEquation eq{prob.d, prob.r, prob.R / yc.a, yc.p - 1.0};
  const double length = std::numbers::pi * prob.r;

  ShotResult res;
  res.alpha = alpha;

  double t = 0.0;
  double t_end = length;
  State x{alpha, 0.0};
  if (prob.d > 1) {
    t = opts.start_fraction * length;
    const double v2 = 2.0 * eq.b2(alpha);  // v''(0)
    x = {alpha + 0.5 * v2 * t * t, v2 * t};
    t_end = length * (1.0 - opts.end_fraction);
  }
  res.samples.emplace_back(0.0, alpha);

  auto stepper = odeint::make_controlled(opts.abs_tol, opts.rel_tol,
                                         odeint::runge_kutta_dopri5<State>());
  const double max_step = opts.max_step_fraction * length;
  double dt = std::min(max_step, 1e-3 * length);
  constexpr int kMaxTries = 2'000'000;

  for (int tries = 0; t < t_end && tries < kMaxTries; ++tries) {
    dt = std::min({dt, max_step, t_end - t});
    if (stepper.try_step(eq, x, t, dt) != odeint::success) continue;
    ++res.steps;
    res.samples.emplace_back(t, x[0]);
    if (!(x[0] > 0.0)) {
      res.outcome = ShotOutcome::Crashed;
      return res;
    }
    if (x[0] > opts.blowup || !std::isfinite(x[1])) {
      res.outcome = ShotOutcome::BlewUp;
      return res;
    }
  }
  if (t < t_end) {
    // Step-size collapse: treat like blow-up in the direction of motion.
    res.outcome = x[1] < 0.0 ? ShotOutcome::Crashed : ShotOutcome::BlewUp;
    return res;
  }

  if (prob.d == 1) {
    res.mismatch = x[1];
    res.far_value = x[0];
    return res;
  }
  const double s = length - t;
  double beta = x[0];
  for (int i = 0; i < 4; ++i) {
    beta = x[0] - eq.b2(beta) * s * s - eq.b4(beta) * s * s * s * s;
  }
  const double regular_slope =
      -(2.0 * eq.b2(beta) * s + 4.0 * eq.b4(beta) * s * s * s);
  res.mismatch = x[1] - regular_slope;
  res.far_value = beta;
  res.samples.emplace_back(length, beta);
  return res;
}

namespace {

bool same_sign(double a, double b) { return (a > 0.0) == (b > 0.0); }

struct Refined {
  ShotResult shot;
  bool converged;
};

Refined bisect(const YamabeProblem& prob, double lo, double hi, double m_lo,
               const CountOptions& opts) {
  ShotResult best;
  bool have_best = false;
  for (int i = 0; i < opts.max_bisections; ++i) {
    const double mid = 0.5 * (lo + hi);
    ShotResult shot = shoot(prob, mid, opts.integrator);
    const double m = shot.signed_mismatch();
    if (shot.outcome == ShotOutcome::Reached &&
        (!have_best || std::abs(m) < std::abs(best.mismatch))) {
      best = shot;
      have_best = true;
    }
    if (have_best && std::abs(best.mismatch) < opts.match_tol) break;
    if (m == 0.0) break;
    if (same_sign(m, m_lo)) {
      lo = mid;
      m_lo = m;
    } else {
      hi = mid;
    }
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) break;
  }
  const bool ok = have_best && std::abs(best.mismatch) < opts.match_tol;
  return {std::move(best), ok};
}

RadialSolution to_solution(const YamabeProblem& prob, ShotResult&& shot,
                           const CountOptions& opts) {
  IntegratorOptions finer = opts.integrator;
  finer.rel_tol *= 0.5;
  finer.abs_tol *= 0.5;
  const ShotResult again = shoot(prob, shot.alpha, finer);
  RadialSolution sol;
  sol.alpha = shot.alpha;
  sol.boundary_residual = std::abs(shot.mismatch);
  sol.recheck_residual = again.outcome == ShotOutcome::Reached
                             ? std::abs(again.mismatch)
                             : std::numeric_limits<double>::infinity();
  sol.far_value = shot.far_value;
  sol.is_constant = std::abs(shot.alpha - 1.0) < opts.dedup_tol;
  sol.samples = std::move(shot.samples);
  return sol;
}

}  // namespace

CountReport count_radial_solutions(const YamabeProblem& prob,
                                   const CountOptions& opts) {
  prob.validate();
  if (!(opts.alpha_min > 0.0 && opts.alpha_max > opts.alpha_min)) {
    throw std::invalid_argument("empty scan range for the initial value");
  }
  if (opts.n_scan < 10) throw std::invalid_argument("n_scan must be >= 10");

  CountReport rep;
  rep.scan_range = {opts.alpha_min, opts.alpha_max};
  rep.guaranteed_lower_bound = guaranteed_lower_bound(prob);

  std::vector<double> alphas(static_cast<std::size_t>(opts.n_scan));
  std::vector<double> mism(alphas.size());
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    alphas[i] = opts.alpha_min + (opts.alpha_max - opts.alpha_min) * double(i) /
                                     double(opts.n_scan - 1);
    const ShotResult shot = shoot(prob, alphas[i], opts.integrator);
    mism[i] = shot.signed_mismatch();
    if (shot.outcome != ShotOutcome::Reached) rep.excluded_alphas.push_back(alphas[i]);
  }

  std::vector<RadialSolution> found;
  auto add = [&](RadialSolution&& s) {
    for (const auto& f : found) {
      if (std::abs(f.alpha - s.alpha) < opts.dedup_tol) return;
    }
    found.push_back(std::move(s));
  };

  // v = 1 solves the equation identically.
  add(to_solution(prob, shoot(prob, 1.0, opts.integrator), opts));

  for (std::size_t i = 0; i + 1 < alphas.size(); ++i) {
    if (mism[i] == 0.0) {
      add(to_solution(prob, shoot(prob, alphas[i], opts.integrator), opts));
      continue;
    }
    if (mism[i + 1] == 0.0 || same_sign(mism[i], mism[i + 1])) continue;
    rep.brackets.emplace_back(alphas[i], alphas[i + 1]);
    Refined r = bisect(prob, alphas[i], alphas[i + 1], mism[i], opts);
    if (!r.converged) {
      rep.rejected_brackets.emplace_back(alphas[i], alphas[i + 1]);
      continue;
    }
    add(to_solution(prob, std::move(r.shot), opts));
  }
  if (mism.back() == 0.0) {
    add(to_solution(prob, shoot(prob, alphas.back(), opts.integrator), opts));
  }

  std::sort(found.begin(), found.end(),
            [](const RadialSolution& a, const RadialSolution& b) {
              return a.alpha < b.alpha;
            });

  // v(pi r - t) is a solution with initial value v(pi r).
  std::vector<int> klass(found.size(), -1);
  int classes = 0;
  for (std::size_t i = 0; i < found.size(); ++i) {
    const double target = found[i].far_value;
    for (std::size_t j = 0; j < found.size(); ++j) {
      if (std::abs(found[j].alpha - target) <
          opts.pair_tol * std::max(1.0, target)) {
        found[i].reflection_partner = static_cast<int>(j);
        break;
      }
    }
    const int partner = found[i].reflection_partner;
    if (partner >= 0 && static_cast<std::size_t>(partner) < i) {
      klass[i] = klass[static_cast<std::size_t>(partner)];
    } else {
      klass[i] = classes++;
    }
  }
  rep.reflection_collapsed_count = classes;
  rep.count = static_cast<int>(found.size());
  rep.solutions = std::move(found);
  return rep;
}

}  // namespace cscb::yamabe
