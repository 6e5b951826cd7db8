#include "semicoupling/dual_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "cost_table.hpp"
#include "semicoupling/error.hpp"

namespace semicoupling {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct Evaluation {
  std::vector<double> masses;
  double active_mass = 0.0;
  double dual_value = 0.0;
  double residual = 0.0;
};

/// Cells whose best scores agree up to float noise, keyed by the tied target
/// set (and whether the inactive floor is among them). Their mass may be
/// split freely among the members; floor groups need not place all of it.
struct TieGroup {
  std::vector<int> members;
  bool floor = false;
  double mass = 0.0;
  std::vector<double> alloc;
};

struct Assignment {
  std::vector<double> full;   // mass of cells won outright, per target
  std::vector<int> owner;     // per cell: sole winner, or -1
  std::vector<int> group;     // per cell: tie group, or -1
  std::vector<double> phi;    // per cell: max(score), -inf when no finite score
  std::vector<TieGroup> groups;
  std::vector<double> masses;  // full plus group allocations
};

/// Water-filling of one group's mass against the current residuals:
/// a_i = max(0, lambda - b_i) with sum a = mass, lambda capped at 0 when the
/// floor can take the rest.
void rebalance(TieGroup& g, std::vector<double>& masses, const std::vector<double>& tau) {
  const std::size_t k = g.members.size();
  std::vector<double> b(k);
  for (std::size_t j = 0; j < k; ++j) {
    const int i = g.members[j];
    masses[i] -= g.alloc[j];
    b[j] = masses[i] - tau[i];
  }
  std::vector<double> sorted = b;
  std::sort(sorted.begin(), sorted.end());
  double lambda = 0.0;
  double prefix = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    prefix += sorted[j];
    const double candidate = (g.mass + prefix) / static_cast<double>(j + 1);
    if (j + 1 == k || candidate <= sorted[j + 1]) {
      lambda = candidate;
      break;
    }
  }
  if (g.floor) lambda = std::min(lambda, 0.0);
  for (std::size_t j = 0; j < k; ++j) {
    g.alloc[j] = std::max(0.0, lambda - b[j]);
    masses[g.members[j]] += g.alloc[j];
  }
}

Assignment assign(const Problem& problem, const detail::CostTable& table, const Vector& psi) {
  const int n = table.targets();
  const auto& source = problem.source();
  const auto& tau = problem.target().masses();
  const std::size_t cells = table.cells();
  const double eps = 64.0 * std::numeric_limits<double>::epsilon() *
                     (psi.cwiseAbs().maxCoeff() + table.max_abs_cost() + 1.0);
  Assignment a;
  a.full.assign(static_cast<std::size_t>(n), 0.0);
  a.owner.assign(cells, -1);
  a.group.assign(cells, -1);
  a.phi.assign(cells, kNegInf);
  std::map<std::pair<std::vector<int>, bool>, int> index;
  std::vector<int> tied;
  for (std::size_t cell = 0; cell < cells; ++cell) {
    double phi = kNegInf;
    for (int i = 0; i < n; ++i) phi = std::max(phi, psi[i] - table.cost(cell, i));
    a.phi[cell] = phi;
    const double w = source.cell_mass(cell);
    if (!(phi >= -eps) || w == 0.0) continue;
    tied.clear();
    for (int i = 0; i < n; ++i)
      if (psi[i] - table.cost(cell, i) >= phi - eps) tied.push_back(i);
    const bool floor = phi <= eps;
    if (tied.size() == 1 && !floor) {
      a.owner[cell] = tied.front();
      a.full[tied.front()] += w;
      continue;
    }
    auto [it, inserted] = index.try_emplace({tied, floor}, static_cast<int>(a.groups.size()));
    if (inserted) a.groups.push_back({tied, floor, 0.0, std::vector<double>(tied.size(), 0.0)});
    a.groups[it->second].mass += w;
    a.group[cell] = it->second;
  }
  a.masses = a.full;
  for (auto& g : a.groups) {
    if (g.floor) continue;
    for (std::size_t j = 0; j < g.members.size(); ++j) {
      g.alloc[j] = g.mass / static_cast<double>(g.members.size());
      a.masses[g.members[j]] += g.alloc[j];
    }
  }
  // Block coordinate descent on the squared residual; each block is exact.
  double total = 0.0;
  for (const auto& g : a.groups) total += g.mass;
  for (int pass = 0; pass < 2000 && !a.groups.empty(); ++pass) {
    double change = 0.0;
    for (auto& g : a.groups) {
      const std::vector<double> before = g.alloc;
      rebalance(g, a.masses, tau);
      for (std::size_t j = 0; j < before.size(); ++j) change = std::max(change, std::abs(g.alloc[j] - before[j]));
    }
    if (change <= 1e-15 * std::max(total, 1.0)) break;
  }
  return a;
}

/// Mass, dual and residual for one potential over the cached table. Tied
/// cells are split to match the target masses as closely as possible, which
/// picks the smallest subgradient of the discrete dual.
Evaluation evaluate(const Problem& problem, const detail::CostTable& table, const Vector& psi) {
  const int n = table.targets();
  const auto& source = problem.source();
  const auto& tau = problem.target().masses();
  const Assignment a = assign(problem, table, psi);
  Evaluation ev;
  double floor_integral = 0.0;
  for (std::size_t cell = 0; cell < table.cells(); ++cell)
    if (a.phi[cell] > 0.0) floor_integral += source.cell_mass(cell) * a.phi[cell];
  ev.masses = a.masses;
  double linear = 0.0;
  for (int i = 0; i < n; ++i) {
    ev.active_mass += ev.masses[i];
    linear += psi[i] * tau[i];
    ev.residual = std::max(ev.residual, std::abs(ev.masses[i] - tau[i]));
  }
  ev.dual_value = linear - floor_integral;
  return ev;
}

/// Cost of a plan with exactly the target marginals, built from the
/// assignment at psi: over-full targets shed mass from their cells nearest
/// the floor, short targets take free mass in order of their cost. By weak
/// duality its cost is at least the dual value.
double feasible_primal(const Problem& problem, const detail::CostTable& table, const Vector& psi) {
  const int n = table.targets();
  const auto& source = problem.source();
  const auto& tau = problem.target().masses();
  const std::size_t cells = table.cells();
  const Assignment a = assign(problem, table, psi);
  // used[cell * n + i]: mass of cell sent to target i.
  std::vector<double> used(cells * static_cast<std::size_t>(n), 0.0);
  std::vector<double> free(cells, 0.0);
  std::vector<double> masses(static_cast<std::size_t>(n), 0.0);
  for (std::size_t cell = 0; cell < cells; ++cell) {
    const double w = source.cell_mass(cell);
    free[cell] = w;
    if (a.owner[cell] >= 0) {
      used[cell * n + a.owner[cell]] = w;
      free[cell] = 0.0;
    } else if (a.group[cell] >= 0) {
      const auto& g = a.groups[static_cast<std::size_t>(a.group[cell])];
      for (std::size_t j = 0; j < g.members.size(); ++j) {
        const double share = w * g.alloc[j] / g.mass;
        used[cell * n + g.members[j]] += share;
        free[cell] -= share;
      }
      free[cell] = std::max(free[cell], 0.0);
    }
    for (int i = 0; i < n; ++i) masses[i] += used[cell * n + i];
  }
  std::vector<std::pair<double, std::size_t>> order;
  for (int i = 0; i < n; ++i) {
    if (masses[i] <= tau[i]) continue;
    order.clear();
    for (std::size_t cell = 0; cell < cells; ++cell)
      if (used[cell * n + i] > 0.0) order.emplace_back(a.phi[cell], cell);
    std::sort(order.begin(), order.end());
    double excess = masses[i] - tau[i];
    for (const auto& [p, cell] : order) {
      if (excess <= 0.0) break;
      const double take = std::min(excess, used[cell * n + i]);
      used[cell * n + i] -= take;
      free[cell] += take;
      excess -= take;
    }
    masses[i] = tau[i] + std::max(excess, 0.0);
  }
  for (int i = 0; i < n; ++i) {
    if (masses[i] >= tau[i]) continue;
    order.clear();
    for (std::size_t cell = 0; cell < cells; ++cell)
      if (free[cell] > 0.0 && std::isfinite(table.cost(cell, i))) order.emplace_back(table.cost(cell, i), cell);
    std::sort(order.begin(), order.end());
    double deficit = tau[i] - masses[i];
    for (const auto& [c, cell] : order) {
      if (deficit <= 0.0) break;
      const double take = std::min(deficit, free[cell]);
      used[cell * n + i] += take;
      free[cell] -= take;
      deficit -= take;
    }
  }
  double primal = 0.0;
  for (std::size_t cell = 0; cell < cells; ++cell)
    for (int i = 0; i < n; ++i)
      if (used[cell * n + i] > 0.0) primal += used[cell * n + i] * table.cost(cell, i);
  return primal;
}


/// Jacobian of the cell masses in psi. Face integrals
/// int_face sigma / |grad f| are approximated by a hat-kernel delta of
/// half-width 1.5 h |grad f| in f, where f is the score difference across
/// the face (or the score itself on the free boundary).
Matrix mass_jacobian(const Problem& problem, const detail::CostTable& table, const Vector& psi) {
  const int n = table.targets();
  const int d = table.dimension();
  const auto& source = problem.source();
  const double h = problem.grid().max_spacing();
  Matrix jac = Matrix::Zero(n, n);
  std::vector<double> s(static_cast<std::size_t>(n));
  for (std::size_t cell = 0; cell < table.cells(); ++cell) {
    const double w = source.cell_mass(cell);
    if (w == 0.0) continue;
    int a = -1;
    double phi = kNegInf;
    for (int i = 0; i < n; ++i) {
      s[i] = psi[i] - table.cost(cell, i);
      if (s[i] > phi) {
        phi = s[i];
        a = i;
      }
    }
    if (a < 0) continue;
    const double* ga = table.grad(cell, a);
    const double ga_norm = std::sqrt(std::inner_product(ga, ga + d, ga, 0.0));
    if (ga_norm > 0.0) {
      const double eps = 1.5 * h * ga_norm;
      const double g = std::abs(phi);
      if (g < eps) jac(a, a) += w * (1.0 - g / eps) / eps;
    }
    if (phi < 0.0) continue;
    for (int k = 0; k < n; ++k) {
      if (k == a || !std::isfinite(s[k])) continue;
      const double g = phi - s[k];
      const double* gk = table.grad(cell, k);
      double diff2 = 0.0;
      for (int c = 0; c < d; ++c) diff2 += (ga[c] - gk[c]) * (ga[c] - gk[c]);
      const double eps = 1.5 * h * std::sqrt(diff2);
      if (!(eps > 0.0) || g >= eps) continue;
      const double face = w * (1.0 - g / eps) / eps;
      jac(a, a) += face;
      jac(k, k) += face;
      jac(a, k) -= face;
      jac(k, a) -= face;
    }
  }
  return jac;
}

/// Exact maximization of the dual objective in coordinate i with the other
/// entries fixed. The mass of cell i is a step function of psi_i whose
/// jumps sit at thresholds c(x, y_i) + max(0, max_{k != i} score_k(x)); the
/// maximizer is the threshold where the accumulated mass first reaches tau_i.
double coordinate_optimum(const Problem& problem, const detail::CostTable& table, const Vector& psi,
                          int i) {
  const int n = table.targets();
  const auto& source = problem.source();
  const double tau = problem.target().masses()[i];
  std::vector<std::pair<double, double>> thresholds;
  thresholds.reserve(table.cells() / 4);
  for (std::size_t cell = 0; cell < table.cells(); ++cell) {
    const double w = source.cell_mass(cell);
    const double ci = table.cost(cell, i);
    if (w == 0.0 || !std::isfinite(ci)) continue;
    double rival = 0.0;
    for (int k = 0; k < n; ++k)
      if (k != i) rival = std::max(rival, psi[k] - table.cost(cell, k));
    thresholds.emplace_back(ci + rival, w);
  }
  if (thresholds.empty()) return psi[i];
  std::sort(thresholds.begin(), thresholds.end());
  double below = 0.0;
  for (std::size_t j = 0; j < thresholds.size();) {
    const double t = thresholds[j].first;
    std::size_t k = j;
    for (; k < thresholds.size() && thresholds[k].first == t; ++k) below += thresholds[k].second;
    // The objective has slope tau - mass in psi_i; it changes sign here.
    if (below >= tau) return t;
    j = k;
  }
  return thresholds.back().first + 1.0;
}

Vector initial_potential(const Problem& problem, const detail::CostTable& table) {
  const int n = table.targets();
  // Each target alone against the inactive floor: others pushed to -inf.
  Vector isolated = Vector::Constant(n, -std::numeric_limits<double>::max() / 4);
  Vector psi(n);
  for (int i = 0; i < n; ++i) psi[i] = coordinate_optimum(problem, table, isolated, i);
  return psi;
}


/// Maximizes the concave, piecewise linear dual along psi + alpha dir.
/// Brackets from alpha0 by halving or doubling, then narrows by golden
/// section. Returns false when no step improves on the current value.
bool line_maximize(const Problem& problem, const detail::CostTable& table, Vector& psi, Evaluation& ev,
                   const Vector& dir, double alpha0, double& alpha_out) {
  auto at = [&](double a) { return evaluate(problem, table, psi + a * dir); };
  double a = alpha0;
  Evaluation best = at(a);
  int halvings = 0;
  while (!(best.dual_value > ev.dual_value) && halvings < 40) {
    a *= 0.5;
    best = at(a);
    ++halvings;
  }
  if (!(best.dual_value > ev.dual_value)) return false;
  double lo = 0.0;
  double hi = 2.0 * a;
  if (halvings == 0) {
    for (int k = 0; k < 30; ++k) {
      Evaluation next = at(2.0 * a);
      if (!(next.dual_value > best.dual_value)) break;
      lo = a;
      a *= 2.0;
      best = std::move(next);
    }
    hi = 2.0 * a;
    lo = std::max(lo, 0.5 * a);
    if (lo == 0.5 * a && a == alpha0) lo = 0.0;
  }
  // Golden section keeping one interior point between rounds.
  constexpr double kGolden = 0.6180339887498949;
  double best_a = a;
  double left = hi - kGolden * (hi - lo);
  double right = lo + kGolden * (hi - lo);
  Evaluation el = at(left);
  Evaluation er = at(right);
  for (int k = 0; k < 48 && hi - lo > 1e-9 * hi; ++k) {
    if (el.dual_value >= er.dual_value) {
      hi = right;
      right = left;
      er = std::move(el);
      left = hi - kGolden * (hi - lo);
      el = at(left);
    } else {
      lo = left;
      left = right;
      el = std::move(er);
      right = lo + kGolden * (hi - lo);
      er = at(right);
    }
  }
  for (Evaluation* e : {&el, &er}) {
    if (e->dual_value > best.dual_value) {
      best_a = e == &el ? left : right;
      best = std::move(*e);
    }
  }
  psi += best_a * dir;
  ev = std::move(best);
  alpha_out = best_a;
  return true;
}

}  // namespace

double DualSolution::relative_gap() const {
  return primal_value != 0.0 ? gap() / std::abs(primal_value) : gap();
}

std::vector<double> cell_masses(const Problem& problem, const Potential& potential) {
  detail::CostTable table(problem, false);
  return evaluate(problem, table, potential.psi()).masses;
}

double active_mass(const Problem& problem, const Potential& potential) {
  detail::CostTable table(problem, false);
  return evaluate(problem, table, potential.psi()).active_mass;
}

double dual_functional(const Problem& problem, const Potential& potential) {
  detail::CostTable table(problem, false);
  return evaluate(problem, table, potential.psi()).dual_value;
}

Vector dual_gradient(const Problem& problem, const Potential& potential) {
  detail::CostTable table(problem, false);
  const auto masses = evaluate(problem, table, potential.psi()).masses;
  const auto& tau = problem.target().masses();
  Vector g(potential.size());
  for (int i = 0; i < potential.size(); ++i) g[i] = tau[i] - masses[i];
  return g;
}

double primal_cost(const Problem& problem, const Potential& potential) {
  detail::CostTable table(problem, false);
  return feasible_primal(problem, table, potential.psi());
}

DualSolution solve_dual(const Problem& problem, const SolverOptions& options) {
  const detail::CostTable table(problem, true);
  const int n = table.targets();
  const auto& tau = problem.target().masses();
  const double tol = problem.tolerances().tol_mass;
  const double floor_mass = problem.source().max_cell_mass();

  Vector psi = options.initial_psi ? *options.initial_psi : initial_potential(problem, table);
  if (psi.size() != n) throw ValidationError("solve_dual: initial potential has the wrong size");
  Evaluation ev = evaluate(problem, table, psi);

  DualSolution out;
  out.log.push_back({0, ev.dual_value, ev.residual, 0.0, "init"});

  auto gradient = [&](const Evaluation& e) {
    Vector g(n);
    for (int i = 0; i < n; ++i) g[i] = tau[i] - e.masses[i];
    return g;
  };

  Vector best_psi = psi;
  Evaluation best = ev;
  int polish_left = options.polish_iters;
  int iter = 0;
  while (true) {
    if (ev.residual <= tol) {
      if (ev.residual < best.residual || best.residual > tol) {
        best = ev;
        best_psi = psi;
      }
      if (polish_left-- <= 0 || ev.residual <= floor_mass) break;
    }
    if (iter >= options.max_iters) break;
    ++iter;

    const Vector g = gradient(ev);
    Matrix jac = mass_jacobian(problem, table, psi);
    const double scale = std::max(jac.diagonal().maxCoeff(), 1e-300);
    for (int i = 0; i < n; ++i) {
      if (jac(i, i) <= 1e-12 * scale) jac(i, i) = scale;
      jac(i, i) += 1e-10 * scale;
    }
    const Vector dir = jac.ldlt().solve(g);
    const double slope = g.dot(dir);

    bool accepted = false;
    double alpha = 0.0;
    if (dir.allFinite() && slope > 0.0 && line_maximize(problem, table, psi, ev, dir, 1.0, alpha)) {
      out.log.push_back({iter, ev.dual_value, ev.residual, alpha, "newton"});
      accepted = true;
    }
    // The smallest supergradient is always an ascent direction.
    if (!accepted && g.norm() > 0.0 &&
        line_maximize(problem, table, psi, ev, g, 1.0 / scale, alpha)) {
      out.log.push_back({iter, ev.dual_value, ev.residual, alpha, "gradient"});
      accepted = true;
    }
    if (!accepted) {
      for (int i = 0; i < n; ++i) psi[i] = coordinate_optimum(problem, table, psi, i);
      Evaluation tev = evaluate(problem, table, psi);
      ev = std::move(tev);
      out.log.push_back({iter, ev.dual_value, ev.residual, 1.0, "coordinate"});
    }
  }

  if (best.residual > tol) {
    throw ConvergenceError("solve_dual: mass residual above tol_mass", iter, ev.residual);
  }
  out.potential = Potential(best_psi);
  out.cell_masses = best.masses;
  out.dual_value = best.dual_value;
  out.primal_value = feasible_primal(problem, table, best_psi);
  out.residual = best.residual;
  out.active_mass = best.active_mass;
  out.iterations = iter;
  return out;
}

}  // namespace semicoupling
