#include "semicoupling/integrator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "semicoupling/error.hpp"

namespace semicoupling {

namespace {

// Dormand-Prince coefficients.
constexpr std::array<double, 7> kC{0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
constexpr double kA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
constexpr std::array<double, 7> kB5{35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84, 0.0};
constexpr std::array<double, 7> kB4{5179.0 / 57600,    0.0,           7571.0 / 16695, 393.0 / 640,
                                    -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};

struct Step {
  bool ok = false;
  Vector x;
  double err = 0.0;
};

Step dopri_step(const FlowSystem& sys, const Vector& x, const Vector& k1, double h, double rel, double length) {
  std::array<Vector, 7> k;
  k[0] = k1;
  Step out;
  try {
    for (int s = 1; s < 7; ++s) {
      Vector xs = x;
      for (int j = 0; j < s; ++j)
        if (kA[s][j] != 0.0) xs += h * kA[s][j] * k[j];
      k[s] = sys.velocity(xs);
      if (!k[s].allFinite()) return out;
    }
  } catch (const DomainError&) {
    return out;
  }
  Vector x5 = x;
  Vector e = Vector::Zero(x.size());
  for (int s = 0; s < 7; ++s) {
    x5 += h * kB5[s] * k[s];
    e += h * (kB5[s] - kB4[s]) * k[s];
  }
  const double scale = rel * std::max({x.lpNorm<Eigen::Infinity>(), x5.lpNorm<Eigen::Infinity>(), length});
  out.ok = x5.allFinite();
  out.x = std::move(x5);
  out.err = e.lpNorm<Eigen::Infinity>() / scale;
  return out;
}

/// Rate at which the gap closes along v, per unit time.
double closing_rate(const FlowSystem& sys, const Vector& x, const Vector& v, double g) {
  const double speed = v.norm();
  if (!(speed > 0.0)) return 0.0;
  const double delta = 1e-4 * g / speed;
  const double ahead = sys.gap(x + delta * v);
  return std::isfinite(ahead) ? (g - ahead) / delta : 0.0;
}

double step_cap(const FlowSystem& sys, const Vector& x, const Vector& v, double g, double fraction) {
  const double rate = closing_rate(sys, x, v, g);
  // Without a usable rate fall back to gap / |v|.
  if (!(rate > 0.0)) return fraction * g / std::max(v.norm(), 1e-300);
  return fraction * g / rate;
}

Vector apply_projection(const FlowSystem& sys, const Vector& x) { return sys.project ? sys.project(x) : x; }

}  // namespace

std::string to_string(Termination t) {
  switch (t) {
    case Termination::pole_reached: return "pole_reached";
    case Termination::max_time: return "max_time";
    case Termination::field_vanished: return "field_vanished";
  }
  return "unknown";
}

Termination termination_from_string(const std::string& name) {
  if (name == "pole_reached") return Termination::pole_reached;
  if (name == "max_time") return Termination::max_time;
  if (name == "field_vanished") return Termination::field_vanished;
  throw ValidationError("unknown termination '" + name + "'");
}

Trajectory integrate(const FlowSystem& sys, const VectorRef& x0, const IntegratorOptions& opt) {
  Trajectory traj;
  traj.seed = x0;
  Vector x = apply_projection(sys, Vector(x0));
  double g = sys.gap(x);
  double t = 0.0;

  auto finish = [&](Termination why) {
    traj.terminated_by = why;
    traj.omega = traj.samples.back().t;
    traj.endpoint = traj.samples.back().x;
    return traj;
  };

  if (g <= opt.eps_stop) {
    traj.samples.push_back({0.0, x, g, Vector::Zero(x.size())});
    return finish(Termination::pole_reached);
  }
  Vector v;
  try {
    v = sys.velocity(x);
  } catch (const DomainError&) {
    v = Vector::Zero(x.size());
  }
  traj.samples.push_back({0.0, x, g, v});
  if (!(v.norm() >= opt.eps_field)) return finish(Termination::field_vanished);

  // The controller works on theta = h / cap. The cap follows the time scale
  // on which the gap closes, which shrinks as the field steepens near the
  // pole, so theta stays steady where h itself would lag behind.
  double cap = step_cap(sys, x, v, g, opt.cap_fraction);
  double theta = 1.0;
  int steps = 0;
  bool rejected = false;  // no growth right after a rejection
  while (true) {
    if (t >= opt.max_time || steps >= opt.max_steps) return finish(Termination::max_time);
    ++steps;
    const double h = std::min(theta * cap, opt.max_time - t);
    if (!(h > 0.0) || t + h == t) {
      // The time the gap needs to close is within a few dozen ulps of t, so
      // omega is known to rounding and only the endpoint is left to refine.
      // Far from the pole an unresolvable step is a stall.
      if (cap / opt.cap_fraction <= 64 * std::numeric_limits<double>::epsilon() * t) break;
      return finish(Termination::field_vanished);
    }

    Step st = dopri_step(sys, x, v, h, opt.rel_err, opt.length_scale);
    if (!st.ok) {
      rejected = true;
      ++traj.rejected_steps;
      theta *= 0.25;
      continue;
    }
    if (st.err > 1.0) {
      rejected = true;
      ++traj.rejected_steps;
      theta *= std::max(0.2, 0.9 * std::pow(st.err, -0.2));
      continue;
    }
    const double drift = sys.drift ? sys.drift(st.x) : 0.0;
    Vector xn = apply_projection(sys, st.x);
    const double gn = sys.gap(xn);
    if (!(gn < g) || !(gn > 0.0)) {
      rejected = true;
      ++traj.rejected_steps;
      theta *= 0.5;
      continue;
    }
    Vector vn;
    try {
      vn = sys.velocity(xn);
    } catch (const DomainError&) {
      rejected = true;
      ++traj.rejected_steps;
      theta *= 0.5;
      continue;
    }
    t += h;
    x = std::move(xn);
    g = gn;
    v = std::move(vn);
    traj.max_drift = std::max(traj.max_drift, drift);
    ++traj.accepted_steps;
    traj.samples.push_back({t, x, g, v});

    if (g <= opt.eps_stop) break;
    if (!(v.norm() >= opt.eps_field)) return finish(Termination::field_vanished);
    const double grow = rejected ? 1.0 : 5.0;
    theta *= st.err > 0.0 ? std::min(grow, std::max(0.2, 0.9 * std::pow(st.err, -0.2))) : grow;
    theta = std::min(theta, 1.0);
    rejected = false;
    cap = step_cap(sys, x, v, g, opt.cap_fraction);
  }

  // Refine along the last velocity ray to a gap in (0, eps_stop / 10].
  const double target = opt.eps_stop / 10.0;
  if (g > target) {
    const Vector dir = v / v.norm();
    const double rate = closing_rate(sys, x, v, g) / v.norm();
    double lo = 0.0;
    double hi = rate > 0.0 ? g / rate : g;
    Vector found;
    double found_gap = 0.0;
    auto probe = [&](double lambda, Vector& at) {
      at = apply_projection(sys, Vector(x + lambda * dir));
      return sys.gap(at);
    };
    Vector at;
    for (int k = 0; k < 60; ++k) {
      const double gh = probe(hi, at);
      if (gh <= target) {
        if (gh > 0.0) {
          found = at;
          found_gap = gh;
        }
        break;
      }
      lo = hi;
      hi *= 2.0;
    }
    for (int k = 0; k < 200 && found.size() == 0; ++k) {
      const double mid = 0.5 * (lo + hi);
      const double gm = probe(mid, at);
      if (gm > 0.0 && gm <= target) {
        found = at;
        found_gap = gm;
      } else if (gm > target) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    if (found.size() != 0) {
      Vector vend;
      try {
        vend = sys.velocity(found);
      } catch (const DomainError&) {
        vend = v;
      }
      const double len = (found - x).norm();
      const double dt = 0.5 * len * (1.0 / v.norm() + 1.0 / std::max(vend.norm(), 1e-300));
      traj.samples.push_back({t + dt, found, found_gap, vend});
    }
  }
  return finish(Termination::pole_reached);
}

}  // namespace semicoupling
