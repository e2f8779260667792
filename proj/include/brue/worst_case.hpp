#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "equilibrium.hpp"
#include "network.hpp"
#include "polynomial.hpp"

namespace brue {

struct WorstBrueOptions {
  int starts = 32;                     // multi-start budget for nonconvex supports
  std::uint64_t seed = 0;
  bool certify = true;                 // cross-check against the grid oracle when cheap
  std::optional<double> support_tol;   // defaults to 1e-9 * total demand
  int max_support_paths = 20;          // support enumeration refuses larger path sets
};

enum class WorstBrueMethod { support_enum, grid_oracle };

struct WorstBrueResult {
  double psi_eps = 0.0;
  PathFlow witness;
  std::vector<int> support;   // paths carrying flow above the support tolerance
  WorstBrueMethod method = WorstBrueMethod::support_enum;
  bool certified = false;
};

namespace detail {

inline double threshold_of_values(const Network& net, const PathSet& paths,
                                  const std::vector<double>& values, double support_tol) {
  std::vector<double> f(static_cast<std::size_t>(net.edge_count()), 0.0);
  for (int p = 0; p < paths.count(); ++p) {
    const double v = values[static_cast<std::size_t>(p)];
    if (v == 0.0) continue;
    for (int e : paths.path(p).edges) f[static_cast<std::size_t>(e)] += v;
  }
  const auto costs = edge_costs(net, f);
  double worst = 0.0;
  for (int t = 0; t < net.trip_count(); ++t) {
    auto [b, e] = paths.range(t);
    double cmin = std::numeric_limits<double>::infinity();
    double cmax_used = -std::numeric_limits<double>::infinity();
    for (int p = b; p < e; ++p) {
      const double c = path_cost_from_edge_costs(paths, p, costs);
      cmin = std::min(cmin, c);
      if (values[static_cast<std::size_t>(p)] > support_tol) cmax_used = std::max(cmax_used, c);
    }
    if (cmax_used > -std::numeric_limits<double>::infinity())
      worst = std::max(worst, cmax_used - cmin);
  }
  return std::max(worst, 0.0);
}

inline double social_cost_of_values(const Network& net, const PathSet& paths,
                                    const std::vector<double>& values) {
  std::vector<double> f(static_cast<std::size_t>(net.edge_count()), 0.0);
  for (int p = 0; p < paths.count(); ++p) {
    const double v = values[static_cast<std::size_t>(p)];
    if (v == 0.0) continue;
    for (int e : paths.path(p).edges) f[static_cast<std::size_t>(e)] += v;
  }
  return social_cost(net, f);
}

// Polynomial restriction of the instance to the line g0 + t * dir in path
// space: per-edge flows are affine in t, so every cost and the social cost
// restrict to univariate polynomials.
struct LineGeometry {
  std::vector<double> A, B;            // edge flow = A_e + B_e t
  std::vector<Poly> edge_cost;         // c_e(A_e + B_e t)
  Poly objective;                      // sum_e (A_e + B_e t) c_e(...)
  std::vector<Poly> path_cost;         // built on demand; empty poly = not built
  std::vector<char> path_cost_ready;

  const Poly& path_poly(const PathSet& paths, int p) {
    if (!path_cost_ready[static_cast<std::size_t>(p)]) {
      Poly sum;
      for (int e : paths.path(p).edges) sum += edge_cost[static_cast<std::size_t>(e)];
      path_cost[static_cast<std::size_t>(p)] = std::move(sum);
      path_cost_ready[static_cast<std::size_t>(p)] = 1;
    }
    return path_cost[static_cast<std::size_t>(p)];
  }
};

inline LineGeometry line_geometry(const Network& net, const PathSet& paths,
                                  const std::vector<double>& g0, const std::vector<double>& dir) {
  LineGeometry lg;
  const std::size_t E = static_cast<std::size_t>(net.edge_count());
  lg.A.assign(E, 0.0);
  lg.B.assign(E, 0.0);
  for (int p = 0; p < paths.count(); ++p) {
    const double a = g0[static_cast<std::size_t>(p)];
    const double b = dir[static_cast<std::size_t>(p)];
    if (a == 0.0 && b == 0.0) continue;
    for (int e : paths.path(p).edges) {
      lg.A[static_cast<std::size_t>(e)] += a;
      lg.B[static_cast<std::size_t>(e)] += b;
    }
  }
  lg.edge_cost.resize(E);
  for (std::size_t e = 0; e < E; ++e) {
    lg.edge_cost[e] = net.edge(static_cast<int>(e)).cost.as_poly().composed_affine(lg.A[e], lg.B[e]);
    lg.objective += lg.edge_cost[e].times_affine(lg.A[e], lg.B[e]);
  }
  lg.path_cost.resize(static_cast<std::size_t>(paths.count()));
  lg.path_cost_ready.assign(static_cast<std::size_t>(paths.count()), 0);
  return lg;
}

struct LineMax {
  bool feasible = false;
  double t = 0.0;
  double value = -std::numeric_limits<double>::infinity();
};

// Maximize social cost along g0 + t dir over t in [t_lo, t_hi] subject to the
// band constraints c_P - c_Q <= eps for every P in band_paths against every
// alternative Q of P's trip.  Candidate points are the interval ends, the
// constraint roots and the stationary points of the objective, which is
// exhaustive because the feasible set is a union of intervals delimited by
// constraint roots.
inline LineMax maximize_on_line_banded(const Network& net, const PathSet& paths,
                                       const std::vector<double>& g0,
                                       const std::vector<double>& dir, double t_lo, double t_hi,
                                       double eps, const std::vector<int>& band_paths) {
  LineGeometry lg = line_geometry(net, paths, g0, dir);
  std::vector<Poly> constraints;
  for (int p : band_paths) {
    auto [b, e] = paths.range(paths.path(p).trip);
    for (int q = b; q < e; ++q) {
      if (q == p) continue;
      Poly h = lg.path_poly(paths, p);
      h -= lg.path_poly(paths, q);
      if (h.c.empty()) h.c.push_back(0.0);
      h.c[0] -= eps;
      constraints.push_back(std::move(h));
    }
  }

  std::vector<double> candidates{t_lo, t_hi};
  for (const Poly& h : constraints)
    for (double r : h.real_roots_in(t_lo, t_hi)) candidates.push_back(r);
  for (double r : lg.objective.derivative().real_roots_in(t_lo, t_hi)) candidates.push_back(r);

  const double band_tol = 1e-9 * (1.0 + std::fabs(eps));
  LineMax best;
  for (double t : candidates) {
    bool ok = true;
    for (const Poly& h : constraints)
      if (h.eval(t) > band_tol) {
        ok = false;
        break;
      }
    if (!ok) continue;
    const double v = lg.objective.eval(t);
    if (!best.feasible || v > best.value) best = {true, t, v};
  }
  return best;
}

// Same line maximization, but feasibility is the true indifference threshold
// of the reconstructed flow.  Support changes along the line are handled by
// adding the zero crossings of every moving path flow to the candidate set.
inline LineMax maximize_on_line_true(const Network& net, const PathSet& paths,
                                     const std::vector<double>& g0,
                                     const std::vector<double>& dir, double t_lo, double t_hi,
                                     double eps, double support_tol) {
  LineGeometry lg = line_geometry(net, paths, g0, dir);

  // Paths whose usage can influence the threshold along the line.
  std::vector<int> relevant;
  for (int p = 0; p < paths.count(); ++p)
    if (g0[static_cast<std::size_t>(p)] > support_tol || dir[static_cast<std::size_t>(p)] != 0.0)
      relevant.push_back(p);

  std::vector<double> candidates{t_lo, t_hi};
  for (int p : relevant) {
    auto [b, e] = paths.range(paths.path(p).trip);
    for (int q = b; q < e; ++q) {
      if (q == p) continue;
      Poly h = lg.path_poly(paths, p);
      h -= lg.path_poly(paths, q);
      if (h.c.empty()) h.c.push_back(0.0);
      h.c[0] -= eps;
      for (double r : h.real_roots_in(t_lo, t_hi)) candidates.push_back(r);
    }
    const double b0 = dir[static_cast<std::size_t>(p)];
    if (b0 != 0.0) {
      const double tz = -g0[static_cast<std::size_t>(p)] / b0;  // flow hits zero
      if (tz >= t_lo && tz <= t_hi) candidates.push_back(tz);
    }
  }
  for (double r : lg.objective.derivative().real_roots_in(t_lo, t_hi)) candidates.push_back(r);

  const double feas_tol = 1e-9 * (1.0 + std::fabs(eps));
  std::vector<double> values(g0.size());
  LineMax best;
  for (double t : candidates) {
    for (std::size_t p = 0; p < g0.size(); ++p)
      values[p] = std::max(g0[p] + t * dir[p], 0.0);
    if (threshold_of_values(net, paths, values, support_tol) > eps + feas_tol) continue;
    const double v = lg.objective.eval(t);
    if (!best.feasible || v > best.value) best = {true, t, v};
  }
  return best;
}

// Scaled simplex projection: argmin ||z - y||_2 with z >= 0, sum z = d.
inline void project_simplex(std::vector<double>& y, double d) {
  const std::size_t n = y.size();
  std::vector<double> u = y;
  std::sort(u.begin(), u.end(), std::greater<double>());
  double cum = 0.0, theta = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    cum += u[k];
    const double cand = (cum - d) / static_cast<double>(k + 1);
    if (u[k] - cand > 0.0) theta = cand;
  }
  for (double& v : y) v = std::max(v - theta, 0.0);
}

}  // namespace detail

namespace detail {

// Per-support smooth subproblem for two or more free dimensions: maximize the
// social cost over the support's product of simplices under the band
// constraints, by multi-start projected gradient ascent with an augmented
// Lagrangian on the bands, then an exact pairwise-transfer polish.
struct SupportProblem {
  const Network& net;
  const PathSet& paths;
  std::vector<int> support;                 // global path ids, ascending
  std::vector<std::vector<int>> by_trip;    // positions into `support`, per trip
  double eps;
  double support_tol;
  // Band constraints c_P - c_Q <= eps, one per supported P and other path Q of
  // its trip.  The pairwise form is smooth, unlike c_P - min_Q c_Q.
  std::vector<std::pair<int, int>> bands;   // (support position, global path id)

  void build_bands() {
    bands.clear();
    for (std::size_t i = 0; i < support.size(); ++i) {
      auto [b, e] = paths.range(paths.path(support[i]).trip);
      for (int q = b; q < e; ++q)
        if (q != support[i]) bands.emplace_back(static_cast<int>(i), q);
    }
  }

  std::vector<double> full_values(const std::vector<double>& z) const {
    std::vector<double> values(static_cast<std::size_t>(paths.count()), 0.0);
    for (std::size_t i = 0; i < support.size(); ++i)
      values[static_cast<std::size_t>(support[i])] = z[i];
    return values;
  }

  std::vector<double> edge_flows(const std::vector<double>& z) const {
    std::vector<double> f(static_cast<std::size_t>(net.edge_count()), 0.0);
    for (std::size_t i = 0; i < support.size(); ++i)
      for (int e : paths.path(support[i]).edges) f[static_cast<std::size_t>(e)] += z[i];
    return f;
  }

  // Social cost, band residuals h = c_P - c_Q - eps, and their gradients in
  // the support coordinates.
  struct Eval {
    double psi = 0.0;
    std::vector<double> grad_psi;
    std::vector<double> h;
    std::vector<std::vector<double>> grad_h;
  };

  Eval evaluate(const std::vector<double>& z) const {
    Eval ev;
    const auto f = edge_flows(z);
    std::vector<double> c(f.size()), slope(f.size());
    for (std::size_t e = 0; e < f.size(); ++e) {
      c[e] = net.edge(static_cast<int>(e)).cost(f[e]);
      slope[e] = net.edge(static_cast<int>(e)).cost.slope(f[e]);
      ev.psi += f[e] * c[e];
    }
    ev.grad_psi.assign(support.size(), 0.0);
    for (std::size_t i = 0; i < support.size(); ++i)
      for (int e : paths.path(support[i]).edges)
        ev.grad_psi[i] += c[static_cast<std::size_t>(e)] +
                          f[static_cast<std::size_t>(e)] * slope[static_cast<std::size_t>(e)];

    ev.h.assign(bands.size(), 0.0);
    ev.grad_h.assign(bands.size(), std::vector<double>(support.size(), 0.0));
    std::vector<double> edge_diff(f.size(), 0.0);
    for (std::size_t k = 0; k < bands.size(); ++k) {
      const int p = support[static_cast<std::size_t>(bands[k].first)];
      const int q = bands[k].second;
      ev.h[k] =
          path_cost_from_edge_costs(paths, p, c) - path_cost_from_edge_costs(paths, q, c) - eps;
      std::fill(edge_diff.begin(), edge_diff.end(), 0.0);
      for (int e2 : paths.path(p).edges) edge_diff[static_cast<std::size_t>(e2)] += 1.0;
      for (int e2 : paths.path(q).edges) edge_diff[static_cast<std::size_t>(e2)] -= 1.0;
      for (std::size_t j = 0; j < support.size(); ++j) {
        double g = 0.0;
        for (int e2 : paths.path(support[j]).edges)
          g += slope[static_cast<std::size_t>(e2)] * edge_diff[static_cast<std::size_t>(e2)];
        ev.grad_h[k][j] = g;
      }
    }
    return ev;
  }

  void project(std::vector<double>& z) const {
    for (std::size_t t = 0; t < by_trip.size(); ++t) {
      const auto& idx = by_trip[t];
      std::vector<double> y(idx.size());
      for (std::size_t k = 0; k < idx.size(); ++k) y[k] = z[static_cast<std::size_t>(idx[k])];
      project_simplex(y, net.trip(static_cast<int>(t)).demand);
      for (std::size_t k = 0; k < idx.size(); ++k) z[static_cast<std::size_t>(idx[k])] = y[k];
    }
  }

  // One run of the augmented-Lagrangian ascent from a feasible-simplex start.
  std::vector<double> ascend(std::vector<double> z) const {
    project(z);
    std::vector<double> lambda(bands.size(), 0.0);
    double rho = 10.0;
    double prev_viol = std::numeric_limits<double>::infinity();

    auto merit = [&](const Eval& ev) {
      double m = -ev.psi;
      for (std::size_t i = 0; i < bands.size(); ++i) {
        const double s = std::max(0.0, lambda[i] / rho + ev.h[i]);
        m += 0.5 * rho * s * s;
      }
      return m;
    };
    auto merit_grad = [&](const Eval& ev) {
      std::vector<double> g(support.size(), 0.0);
      for (std::size_t j = 0; j < support.size(); ++j) g[j] = -ev.grad_psi[j];
      for (std::size_t i = 0; i < bands.size(); ++i) {
        const double s = std::max(0.0, lambda[i] / rho + ev.h[i]);
        if (s <= 0.0) continue;
        for (std::size_t j = 0; j < support.size(); ++j) g[j] += rho * s * ev.grad_h[i][j];
      }
      return g;
    };

    for (int outer = 0; outer < 12; ++outer) {
      double alpha = 1.0;
      for (int inner = 0; inner < 300; ++inner) {
        const Eval ev = evaluate(z);
        const double m0 = merit(ev);
        const auto g = merit_grad(ev);
        bool moved = false;
        for (int bt = 0; bt < 40; ++bt) {
          std::vector<double> zn = z;
          for (std::size_t j = 0; j < z.size(); ++j) zn[j] -= alpha * g[j];
          project(zn);
          double step = 0.0, descent = 0.0;
          for (std::size_t j = 0; j < z.size(); ++j) {
            const double dz = zn[j] - z[j];
            step = std::max(step, std::fabs(dz));
            descent += g[j] * dz;
          }
          if (step == 0.0) break;
          const Eval evn = evaluate(zn);
          if (merit(evn) <= m0 + 1e-4 * descent) {
            z = std::move(zn);
            moved = step > 1e-13 * (1.0 + net.total_demand());
            alpha = std::min(alpha * 2.0, 1e6);
            break;
          }
          alpha *= 0.5;
        }
        if (!moved) break;
      }
      const Eval ev = evaluate(z);
      double viol = 0.0;
      for (std::size_t i = 0; i < bands.size(); ++i) {
        lambda[i] = std::max(0.0, lambda[i] + rho * ev.h[i]);
        viol = std::max(viol, ev.h[i]);
      }
      if (viol <= 1e-11) break;
      if (viol > 0.5 * prev_viol) rho = std::min(rho * 5.0, 1e9);
      prev_viol = viol;
    }
    return z;
  }

  // Exact pairwise-transfer polish under the band constraints.
  void polish(std::vector<double>& values) const {
    for (int sweep = 0; sweep < 20; ++sweep) {
      bool improved = false;
      for (std::size_t t = 0; t < by_trip.size(); ++t) {
        const auto& idx = by_trip[t];
        for (std::size_t a = 0; a < idx.size(); ++a) {
          const int pa = support[static_cast<std::size_t>(idx[a])];
          for (std::size_t b = 0; b < idx.size(); ++b) {
            if (a == b) continue;
            const int pb = support[static_cast<std::size_t>(idx[b])];
            const double avail = values[static_cast<std::size_t>(pa)];
            if (avail <= 0.0) continue;
            std::vector<double> dir(values.size(), 0.0);
            dir[static_cast<std::size_t>(pa)] = -1.0;
            dir[static_cast<std::size_t>(pb)] = 1.0;
            const double cur = social_cost_of_values(net, paths, values);
            const auto mx =
                maximize_on_line_banded(net, paths, values, dir, 0.0, avail, eps, support);
            if (mx.feasible && mx.value > cur + 1e-14 * (1.0 + std::fabs(cur))) {
              values[static_cast<std::size_t>(pa)] -= mx.t;
              values[static_cast<std::size_t>(pb)] += mx.t;
              improved = true;
            }
          }
        }
      }
      if (!improved) break;
    }
  }
};

}  // namespace detail

// Grid oracle: exhaustively scan path flows on a per-trip simplex lattice with
// spacing `step_fraction * demand`, keep the best eps-indifferent point.  Cost
// grows combinatorially with the number of free dimensions; intended for
// small certification instances and tests.
inline WorstBrueResult worst_brue_grid(const Network& net, const PathSet& paths, double eps,
                                       double step_fraction = 1e-4,
                                       std::optional<double> support_tol_opt = std::nullopt) {
  const double support_tol = support_tol_opt.value_or(default_support_tol(net));
  const int m = std::max(1, static_cast<int>(std::llround(1.0 / step_fraction)));

  // Refuse scans that would take too long: count lattice points.
  double total = 1.0;
  for (int t = 0; t < net.trip_count(); ++t) {
    auto [b, e] = paths.range(t);
    const int k = e - b;
    double pts = 1.0;
    for (int i = 1; i < k; ++i) pts *= static_cast<double>(m + i) / static_cast<double>(i);
    total *= pts;
    if (total > 2e8) throw Error("grid oracle lattice exceeds 2e8 points");
  }

  const std::size_t E = static_cast<std::size_t>(net.edge_count());
  std::vector<double> flow(E, 0.0), cost(E, 0.0);
  std::vector<double> values(static_cast<std::size_t>(paths.count()), 0.0);
  std::vector<double> best_values, loose_values;
  double best_psi = -std::numeric_limits<double>::infinity();
  double loose_psi = -std::numeric_limits<double>::infinity();

  // Admission is two-tier.  Strictly feasible lattice points (threshold within
  // roundoff of eps) keep the reported value a true lower bound on the worst
  // case.  When the feasible set is a sliver that dodges the lattice entirely
  // — tiny eps around an off-lattice equilibrium — fall back to points whose
  // overshoot stays within one lattice step's worth of cost movement.
  const double strict_tol = 1e-9 * (1.0 + std::fabs(eps));
  const double D = net.total_demand();
  double slope_sum = 0.0;
  for (int e = 0; e < net.edge_count(); ++e) slope_sum += net.edge(e).cost.slope(D);
  const double loose_tol = std::max(strict_tol, step_fraction * D * slope_sum);

  auto add_flow = [&](int p, double v) {
    values[static_cast<std::size_t>(p)] += v;
    for (int e : paths.path(p).edges) flow[static_cast<std::size_t>(e)] += v;
  };

  auto leaf = [&]() {
    for (std::size_t e = 0; e < E; ++e) cost[e] = net.edge(static_cast<int>(e)).cost(flow[e]);
    double worst = 0.0;
    for (int t = 0; t < net.trip_count(); ++t) {
      auto [b, en] = paths.range(t);
      double cmin = std::numeric_limits<double>::infinity();
      double cmax_used = -std::numeric_limits<double>::infinity();
      for (int p = b; p < en; ++p) {
        double c = 0.0;
        for (int e : paths.path(p).edges) c += cost[static_cast<std::size_t>(e)];
        cmin = std::min(cmin, c);
        if (values[static_cast<std::size_t>(p)] > support_tol) cmax_used = std::max(cmax_used, c);
      }
      if (cmax_used > -std::numeric_limits<double>::infinity())
        worst = std::max(worst, cmax_used - cmin);
    }
    if (worst > eps + loose_tol) return;
    double psi = 0.0;
    for (std::size_t e = 0; e < E; ++e) psi += flow[e] * cost[e];
    if (worst <= eps + strict_tol) {
      if (psi > best_psi) {
        best_psi = psi;
        best_values = values;
      }
    } else if (psi > loose_psi) {
      loose_psi = psi;
      loose_values = values;
    }
  };

  // Recurse trip by trip, path by path; the last path of a trip absorbs the
  // remaining demand.
  auto scan = [&](auto&& self, int t, int p, double remaining) -> void {
    if (t == net.trip_count()) {
      leaf();
      return;
    }
    auto [b, e] = paths.range(t);
    if (p < 0) {
      p = b;
      remaining = net.trip(t).demand;
    }
    if (p == e - 1) {
      add_flow(p, remaining);
      self(self, t + 1, -1, 0.0);
      add_flow(p, -remaining);
      return;
    }
    const double d = net.trip(t).demand;
    for (int j = 0; j <= m; ++j) {
      const double v = d * static_cast<double>(j) / static_cast<double>(m);
      if (v > remaining + 1e-12 * d) break;
      const double put = std::min(v, remaining);
      add_flow(p, put);
      self(self, t, p + 1, std::max(remaining - put, 0.0));
      add_flow(p, -put);
    }
  };
  scan(scan, 0, -1, 0.0);

  if (best_values.empty()) {
    best_values = std::move(loose_values);
    best_psi = loose_psi;
  }
  if (best_values.empty()) throw Error("grid oracle found no feasible point");

  WorstBrueResult res{best_psi,
                      PathFlow(net, paths, best_values),
                      {},
                      WorstBrueMethod::grid_oracle,
                      false};
  for (int p = 0; p < paths.count(); ++p)
    if (res.witness[p] > support_tol) res.support.push_back(p);
  return res;
}

// Worst-case social cost over the eps-indifferent flows, by support
// enumeration.  Every support induces a subproblem whose band constraints keep
// all supported paths within eps of their trip optimum; singleton-difference
// supports reduce to exact univariate polynomial maximization, larger ones use
// the multi-start ascent.  The union over supports covers the whole
// eps-indifferent set, so the best subproblem value is the supremum.
inline WorstBrueResult worst_brue(const Network& net, const PathSet& paths, double eps,
                                  const WorstBrueOptions& options = {}) {
  if (!(eps >= 0.0)) throw Error("eps must be nonnegative");
  if (paths.count() > options.max_support_paths)
    throw PathExplosion("support enumeration over " + std::to_string(paths.count()) +
                        " paths refused (cap " + std::to_string(options.max_support_paths) + ")");
  const double support_tol = options.support_tol.value_or(default_support_tol(net));
  const double accept_tol = 1e-9 * (1.0 + std::fabs(eps));

  // The user equilibrium is always eps-indifferent, so it seeds the incumbent.
  UESolveOptions ue_opts;
  ue_opts.paths = &paths;
  const UESolution ue = solve_ue(net, ue_opts);
  std::vector<double> best_values = ue.flow.values();
  double best_psi = detail::social_cost_of_values(net, paths, best_values);

  auto consider = [&](const std::vector<double>& values) {
    if (detail::threshold_of_values(net, paths, values, support_tol) > eps + accept_tol) return;
    const double psi = detail::social_cost_of_values(net, paths, values);
    if (psi > best_psi) {
      best_psi = psi;
      best_values = values;
    }
  };

  // Enumerate supports as one nonempty path subset per trip.
  const int T = net.trip_count();
  const std::uint64_t rng_root = options.seed ^ 0x5bd1e995u;

  auto solve_support = [&](const std::vector<int>& support) {
    detail::SupportProblem sp{net, paths, support, {}, eps, support_tol, {}};
    sp.by_trip.assign(static_cast<std::size_t>(T), {});
    for (std::size_t i = 0; i < support.size(); ++i)
      sp.by_trip[static_cast<std::size_t>(paths.path(support[i]).trip)].push_back(
          static_cast<int>(i));
    sp.build_bands();
    int free_dims = 0;
    for (const auto& idx : sp.by_trip) free_dims += static_cast<int>(idx.size()) - 1;

    if (free_dims == 0) {
      std::vector<double> values(static_cast<std::size_t>(paths.count()), 0.0);
      for (std::size_t i = 0; i < support.size(); ++i)
        values[static_cast<std::size_t>(support[i])] =
            net.trip(paths.path(support[i]).trip).demand;
      consider(values);
      return;
    }

    if (free_dims == 1) {
      // Exactly one trip has two supported paths; restrict to its transfer line.
      std::vector<double> g0(static_cast<std::size_t>(paths.count()), 0.0);
      std::vector<double> dir(static_cast<std::size_t>(paths.count()), 0.0);
      double span = 0.0;
      for (int t = 0; t < T; ++t) {
        const auto& idx = sp.by_trip[static_cast<std::size_t>(t)];
        const double d = net.trip(t).demand;
        if (idx.size() == 1) {
          g0[static_cast<std::size_t>(support[static_cast<std::size_t>(idx[0])])] = d;
        } else {
          g0[static_cast<std::size_t>(support[static_cast<std::size_t>(idx[0])])] = d;
          dir[static_cast<std::size_t>(support[static_cast<std::size_t>(idx[0])])] = -1.0;
          dir[static_cast<std::size_t>(support[static_cast<std::size_t>(idx[1])])] = 1.0;
          span = d;
        }
      }
      const auto mx =
          detail::maximize_on_line_banded(net, paths, g0, dir, 0.0, span, eps, support);
      if (mx.feasible) {
        for (std::size_t p = 0; p < g0.size(); ++p) g0[p] = std::max(g0[p] + mx.t * dir[p], 0.0);
        consider(g0);
      }
      return;
    }

    // Multi-start ascent for two or more free dimensions.
    for (int s = 0; s < std::max(1, options.starts); ++s) {
      std::vector<double> z(support.size(), 0.0);
      if (s == 0) {
        for (int t = 0; t < T; ++t)
          for (int k : sp.by_trip[static_cast<std::size_t>(t)])
            z[static_cast<std::size_t>(k)] =
                net.trip(t).demand /
                static_cast<double>(sp.by_trip[static_cast<std::size_t>(t)].size());
      } else {
        std::uint64_t rng = rng_root + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(s);
        for (int t = 0; t < T; ++t) {
          double sum = 0.0;
          const auto& idx = sp.by_trip[static_cast<std::size_t>(t)];
          for (int k : idx) {
            const double u = std::max(detail::uniform01(rng), 1e-12);
            z[static_cast<std::size_t>(k)] = -std::log(u);
            sum += z[static_cast<std::size_t>(k)];
          }
          for (int k : idx) z[static_cast<std::size_t>(k)] *= net.trip(t).demand / sum;
        }
      }
      z = sp.ascend(std::move(z));
      auto values = sp.full_values(z);
      for (double& v : values)
        if (v < support_tol) v = 0.0;
      sp.polish(values);
      consider(values);
    }
  };

  // Odometer over per-trip nonempty subsets, smallest masks first.
  std::vector<int> support;
  auto enumerate = [&](auto&& self, int t) -> void {
    if (t == T) {
      solve_support(support);
      return;
    }
    auto [b, e] = paths.range(t);
    const int k = e - b;
    for (std::uint32_t mask = 1; mask < (1u << k); ++mask) {
      const std::size_t keep = support.size();
      for (int i = 0; i < k; ++i)
        if (mask & (1u << i)) support.push_back(b + i);
      self(self, t + 1);
      support.resize(keep);
    }
  };
  enumerate(enumerate, 0);

  WorstBrueResult res{best_psi,
                      PathFlow(net, paths, best_values),
                      {},
                      WorstBrueMethod::support_enum,
                      false};
  for (int p = 0; p < paths.count(); ++p)
    if (res.witness[p] > support_tol) res.support.push_back(p);

  if (options.certify && paths.count() <= 6) {
    int free_dims = 0;
    for (int t = 0; t < T; ++t) {
      auto [b, e] = paths.range(t);
      free_dims += (e - b) - 1;
    }
    // The lattice scan is only affordable for at most two free dimensions
    // (three already cost ~10^12 points at step 1e-4); anything larger
    // returns certified=false.
    if (free_dims <= 2) {
      const auto grid = worst_brue_grid(net, paths, eps, 1e-4, support_tol);
      res.certified = std::fabs(res.psi_eps - grid.psi_eps) <= 1e-3;
    }
  }
  return res;
}

struct ExcessTimeReport {
  double psi = 0.0;        // average excess time (social cost gap over total demand)
  double eps = 0.0;        // indifference threshold of the flow
  double ratio = 0.0;      // psi / eps, 0 when both vanish
  double demand_l1 = 0.0;
};

inline ExcessTimeReport average_excess_time(const PathFlow& g, double psi0) {
  ExcessTimeReport r;
  r.demand_l1 = g.network().total_demand();
  r.psi = (social_cost(g) - psi0) / r.demand_l1;
  r.eps = epsilon_threshold(g);
  if (r.eps > 0.0)
    r.ratio = r.psi / r.eps;
  else
    r.ratio = r.psi <= 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return r;
}

// Cheap upper bound on any indifference threshold: the costliest path cost
// when every edge carries the whole demand.  No feasible flow can price a path
// above it, so every flow is eps-indifferent once eps reaches this bound and
// worst-case curves are constant beyond it.
inline double epsilon_bar_upper_bound(const Network& net, const PathSet& paths) {
  const double D = net.total_demand();
  std::vector<double> full(static_cast<std::size_t>(net.edge_count()));
  for (int e = 0; e < net.edge_count(); ++e)
    full[static_cast<std::size_t>(e)] = net.edge(e).cost(D);
  double bound = 0.0;
  for (int p = 0; p < paths.count(); ++p)
    bound = std::max(bound, path_cost_from_edge_costs(paths, p, full));
  return bound;
}

// Worst-case curve eps -> Psi_eps on an ascending grid.  Sanity of the result
// is enforced: the curve must be nondecreasing and flat beyond the threshold
// upper bound.
inline std::vector<std::pair<double, double>> psi_eps_curve(const Network& net,
                                                            const PathSet& paths,
                                                            std::vector<double> eps_grid,
                                                            WorstBrueOptions options = {}) {
  options.certify = false;  // certification is per-point business, not the curve's
  std::sort(eps_grid.begin(), eps_grid.end());
  std::vector<std::pair<double, double>> curve;
  curve.reserve(eps_grid.size());
  for (double eps : eps_grid)
    curve.emplace_back(eps, worst_brue(net, paths, eps, options).psi_eps);

  const double bar = epsilon_bar_upper_bound(net, paths);
  for (std::size_t i = 0; i + 1 < curve.size(); ++i) {
    if (curve[i + 1].second < curve[i].second - 1e-6)
      throw Error("worst-case curve is not nondecreasing");
    if (curve[i].first >= bar && std::fabs(curve[i + 1].second - curve[i].second) > 1e-6)
      throw Error("worst-case curve is not constant beyond the threshold bound");
  }
  return curve;
}

namespace detail {

// Full-space local ascent: pairwise transfers with true-threshold feasibility,
// swept to a local maximum.  Donors are restricted to currently used paths.
inline std::pair<std::vector<double>, double> ascend_true(const Network& net,
                                                          const PathSet& paths,
                                                          std::vector<double> values, double eps,
                                                          double support_tol) {
  double cur = social_cost_of_values(net, paths, values);
  for (int sweep = 0; sweep < 60; ++sweep) {
    bool improved = false;
    for (int t = 0; t < net.trip_count(); ++t) {
      auto [b, e] = paths.range(t);
      for (int pa = b; pa < e; ++pa) {
        for (int pb = b; pb < e; ++pb) {
          if (pb == pa) continue;
          // re-read after every accepted transfer; a stale budget would let
          // the donor hand out the same mass twice
          const double avail = values[static_cast<std::size_t>(pa)];
          if (avail <= support_tol) break;
          std::vector<double> dir(values.size(), 0.0);
          dir[static_cast<std::size_t>(pa)] = -1.0;
          dir[static_cast<std::size_t>(pb)] = 1.0;
          const auto mx =
              maximize_on_line_true(net, paths, values, dir, 0.0, avail, eps, support_tol);
          if (mx.feasible && mx.value > cur + 1e-14 * (1.0 + std::fabs(cur))) {
            const double step = std::clamp(mx.t, 0.0, avail);
            values[static_cast<std::size_t>(pa)] = avail - step;
            values[static_cast<std::size_t>(pb)] += step;
            cur = social_cost_of_values(net, paths, values);
            improved = true;
          }
        }
      }
    }
    if (!improved) break;
  }
  return {std::move(values), cur};
}

// Decomposition dust — vanishing path weights left over by the equilibrium
// solver — counts as "used" and can pin the threshold to a worthless path.
// Sweep such weights onto the trip's largest path before climbing.
inline void drop_dust(const Network& net, const PathSet& paths, std::vector<double>& v,
                      double fraction = 1e-6) {
  for (int t = 0; t < net.trip_count(); ++t) {
    auto [b, e] = paths.range(t);
    int big = b;
    for (int p = b; p < e; ++p)
      if (v[static_cast<std::size_t>(p)] > v[static_cast<std::size_t>(big)]) big = p;
    double moved = 0.0;
    for (int p = b; p < e; ++p)
      if (p != big && v[static_cast<std::size_t>(p)] <= fraction * net.trip(t).demand) {
        moved += v[static_cast<std::size_t>(p)];
        v[static_cast<std::size_t>(p)] = 0.0;
      }
    v[static_cast<std::size_t>(big)] += moved;
  }
}

}  // namespace detail

// Heuristic lower bound on the inefficiency factor: for each grid eps, climb
// from the equilibrium (and a few random feasible restarts) to a locally worst
// eps-indifferent flow and take the best ratio psi / eps.  Works on path sets
// far beyond support-enumeration reach; the result is a certified-from-below
// estimate only.
inline double estimate_inefficiency_factor(const Network& net, const PathSet& paths,
                                           const std::vector<double>& eps_grid,
                                           const WorstBrueOptions& options = {}) {
  const double support_tol = options.support_tol.value_or(default_support_tol(net));
  UESolveOptions ue_opts;
  ue_opts.paths = &paths;
  const UESolution ue = solve_ue(net, ue_opts);
  const double psi0 = detail::social_cost_of_values(net, paths, ue.flow.values());
  const double D = net.total_demand();
  // Random restarts ascend from dense supports, which is quadratically more
  // expensive than climbing from the sparse equilibrium; ration them on large
  // path sets.
  const int restarts = std::max(1, options.starts / (paths.count() > 32 ? 16 : 4));

  double best_ratio = 0.0;
  for (double eps : eps_grid) {
    if (!(eps > 0.0)) continue;
    double best_psi = psi0;
    // hard feasibility gate: candidates never count on trust (tolerance matches
    // the line maximizer's feas_tol, the tightest bound the ascent guarantees)
    const auto consider = [&](const std::vector<double>& v) {
      if (detail::threshold_of_values(net, paths, v, support_tol) <=
          eps + 1e-9 * (1.0 + std::fabs(eps)))
        best_psi = std::max(best_psi, detail::social_cost_of_values(net, paths, v));
    };
    for (int s = 0; s < restarts; ++s) {
      std::vector<double> start = ue.flow.values();
      if (s > 0) {
        std::uint64_t rng = options.seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(s);
        std::vector<double> rnd(start.size(), 0.0);
        for (int t = 0; t < net.trip_count(); ++t) {
          auto [b, e] = paths.range(t);
          double sum = 0.0;
          for (int p = b; p < e; ++p) {
            rnd[static_cast<std::size_t>(p)] = -std::log(std::max(detail::uniform01(rng), 1e-12));
            sum += rnd[static_cast<std::size_t>(p)];
          }
          for (int p = b; p < e; ++p)
            rnd[static_cast<std::size_t>(p)] *= net.trip(t).demand / sum;
        }
        // Shrink toward the equilibrium until eps-indifferent.
        for (int k = 32; k >= 0; --k) {
          const double a = static_cast<double>(k) / 32.0;
          std::vector<double> mixv(start.size());
          for (std::size_t p = 0; p < start.size(); ++p)
            mixv[p] = (1.0 - a) * start[p] + a * rnd[p];
          if (detail::threshold_of_values(net, paths, mixv, support_tol) <= eps) {
            start = std::move(mixv);
            break;
          }
        }
      }
      if (s == 0) {
        // Climb from the equilibrium both as decomposed and with dust swept;
        // sweeping usually unblocks the budget but is not guaranteed to help.
        consider(detail::ascend_true(net, paths, start, eps, support_tol).first);
        detail::drop_dust(net, paths, start);
        consider(detail::ascend_true(net, paths, start, eps, support_tol).first);
      } else {
        detail::drop_dust(net, paths, start);
        consider(detail::ascend_true(net, paths, start, eps, support_tol).first);
      }
    }
    best_ratio = std::max(best_ratio, (best_psi - psi0) / (D * eps));
  }
  return std::max(best_ratio, 0.0);
}

}  // namespace brue
