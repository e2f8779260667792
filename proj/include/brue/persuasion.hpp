#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "stochastic.hpp"
#include "worst_case.hpp"

namespace brue {

// Public signal: a distribution over messages per state, or equivalently a
// Bayes-plausible distribution over posterior beliefs.
class SignalScheme {
 public:
  // Build from posteriors and message probabilities; the conditional kernel
  // pi(m | w) = tau_m mu_m(w) / nu(w) follows by Bayes inversion.
  static SignalScheme from_posteriors(std::vector<Belief> posteriors, std::vector<double> weights,
                                      const std::vector<double>& prior) {
    if (posteriors.size() != weights.size() || posteriors.empty())
      throw Error("signal scheme needs matching posteriors and weights");
    const int n = static_cast<int>(prior.size());

    // Drop null messages, check plausibility.
    SignalScheme s;
    double wsum = 0.0;
    for (std::size_t m = 0; m < posteriors.size(); ++m) {
      if (posteriors[m].size() != n) throw Error("posterior dimension mismatch");
      if (!(weights[m] >= -1e-12)) throw Error("negative message probability");
      if (weights[m] <= 1e-12) continue;
      s.posteriors_.push_back(posteriors[m]);
      s.weights_.push_back(weights[m]);
      wsum += weights[m];
    }
    if (s.posteriors_.empty()) throw Error("signal scheme has no message");
    for (double& w : s.weights_) w /= wsum;
    for (int w = 0; w < n; ++w) {
      double mean = 0.0;
      for (std::size_t m = 0; m < s.posteriors_.size(); ++m)
        mean += s.weights_[m] * s.posteriors_[m][w];
      if (std::fabs(mean - prior[static_cast<std::size_t>(w)]) > 1e-9)
        throw Error("posteriors do not average back to the prior");
    }

    s.conditional_.assign(static_cast<std::size_t>(n),
                          std::vector<double>(s.posteriors_.size(), 0.0));
    for (int w = 0; w < n; ++w) {
      const double nu = prior[static_cast<std::size_t>(w)];
      for (std::size_t m = 0; m < s.posteriors_.size(); ++m)
        s.conditional_[static_cast<std::size_t>(w)][m] =
            nu > 0.0 ? s.weights_[m] * s.posteriors_[m][w] / nu : s.weights_[m];
    }
    return s;
  }

  static SignalScheme no_revelation(const std::vector<double>& prior) {
    return from_posteriors({Belief(prior)}, {1.0}, prior);
  }

  static SignalScheme full_revelation(const std::vector<double>& prior) {
    std::vector<Belief> posts;
    std::vector<double> weights;
    for (std::size_t w = 0; w < prior.size(); ++w) {
      if (prior[w] <= 0.0) continue;
      std::vector<double> unit(prior.size(), 0.0);
      unit[w] = 1.0;
      posts.push_back(Belief(std::move(unit)));
      weights.push_back(prior[w]);
    }
    return from_posteriors(std::move(posts), std::move(weights), prior);
  }

  int message_count() const { return static_cast<int>(posteriors_.size()); }
  const std::vector<Belief>& posteriors() const { return posteriors_; }
  const std::vector<double>& weights() const { return weights_; }
  // conditional()[w][m] = probability of message m in state w
  const std::vector<std::vector<double>>& conditional() const { return conditional_; }

  bool is_no_revelation(double tol = 1e-9) const {
    if (posteriors_.size() == 1) return true;
    for (std::size_t m = 1; m < posteriors_.size(); ++m)
      for (int w = 0; w < posteriors_[0].size(); ++w)
        if (std::fabs(posteriors_[m][w] - posteriors_[0][w]) > tol) return false;
    return true;
  }

  bool is_full_revelation(double tol = 1e-9) const {
    for (const Belief& mu : posteriors_) {
      double mx = 0.0;
      for (int w = 0; w < mu.size(); ++w) mx = std::max(mx, mu[w]);
      if (mx < 1.0 - tol) return false;
    }
    return true;
  }

 private:
  std::vector<Belief> posteriors_;
  std::vector<double> weights_;
  std::vector<std::vector<double>> conditional_;
};

// Worst-case social cost at a fixed belief.
inline double psi_eps_at_belief(const StochasticNetwork& snet, const Belief& belief, double eps,
                                WorstBrueOptions options = {}) {
  const Network net = posterior_network(snet, belief);
  const PathSet paths = enumerate_paths(net);
  return worst_brue(net, paths, eps, options).psi_eps;
}

enum class BlackwellOrder { equal, more_informative, less_informative, incomparable };

// Blackwell comparison for two-state schemes: with the same mean, a scheme
// dominates iff its posterior interval contains the other's (a mean-preserving
// spread).  Schemes with different means are incomparable.
inline BlackwellOrder blackwell_compare(const SignalScheme& a, const SignalScheme& b) {
  if (a.posteriors().empty() || b.posteriors().empty() || a.posteriors()[0].size() != 2 ||
      b.posteriors()[0].size() != 2)
    throw UnsupportedStateSpace("Blackwell comparison implemented for two states only");

  auto summary = [](const SignalScheme& s) {
    double mean = 0.0, lo = 1.0, hi = 0.0;
    for (int m = 0; m < s.message_count(); ++m) {
      const double p = s.posteriors()[static_cast<std::size_t>(m)][1];
      mean += s.weights()[static_cast<std::size_t>(m)] * p;
      lo = std::min(lo, p);
      hi = std::max(hi, p);
    }
    return std::array<double, 3>{mean, lo, hi};
  };
  const auto sa = summary(a), sb = summary(b);
  if (std::fabs(sa[0] - sb[0]) > 1e-9) return BlackwellOrder::incomparable;

  auto points = [](const SignalScheme& s) {
    std::vector<std::pair<double, double>> pts;
    for (int m = 0; m < s.message_count(); ++m)
      pts.emplace_back(s.posteriors()[static_cast<std::size_t>(m)][1],
                       s.weights()[static_cast<std::size_t>(m)]);
    std::sort(pts.begin(), pts.end());
    // merge coincident posteriors
    std::vector<std::pair<double, double>> out;
    for (auto& pt : pts) {
      if (!out.empty() && std::fabs(pt.first - out.back().first) <= 1e-9)
        out.back().second += pt.second;
      else
        out.push_back(pt);
    }
    return out;
  };
  const auto pa = points(a), pb = points(b);
  bool same = pa.size() == pb.size();
  for (std::size_t i = 0; same && i < pa.size(); ++i)
    same = std::fabs(pa[i].first - pb[i].first) <= 1e-9 &&
           std::fabs(pa[i].second - pb[i].second) <= 1e-9;
  if (same) return BlackwellOrder::equal;

  // With at most two distinct posteriors each (binary states need no more),
  // interval containment decides the order.
  const bool a_wider = sa[1] <= sb[1] + 1e-12 && sa[2] >= sb[2] - 1e-12;
  const bool b_wider = sb[1] <= sa[1] + 1e-12 && sb[2] >= sa[2] - 1e-12;
  if (a_wider && pa.size() <= 2 && pb.size() <= 2) return BlackwellOrder::more_informative;
  if (b_wider && pa.size() <= 2 && pb.size() <= 2) return BlackwellOrder::less_informative;
  return BlackwellOrder::incomparable;
}

struct DesignOptions {
  int grid_size = 2001;         // belief grid resolution for the envelope
  std::uint64_t seed = 0;
  bool best_effort = false;     // sampling fallback for more than two states
  WorstBrueOptions worst;       // per-belief options; certification is forced off
  double value_tol = 1e-9;      // contact tolerance when classifying no-revelation
};

struct SignalDesign {
  SignalScheme scheme;
  double expected_cost = 0.0;
  bool approximate = false;
};

namespace detail {

// Lower convex hull of (x, y) points with strictly increasing x (monotone
// chain); returns indices of hull vertices.
inline std::vector<int> lower_hull(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<int> hull;
  for (int i = 0; i < static_cast<int>(x.size()); ++i) {
    while (hull.size() >= 2) {
      const int a = hull[hull.size() - 2], b = hull.back();
      const double cross = (x[static_cast<std::size_t>(b)] - x[static_cast<std::size_t>(a)]) *
                               (y[static_cast<std::size_t>(i)] - y[static_cast<std::size_t>(a)]) -
                           (x[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(a)]) *
                               (y[static_cast<std::size_t>(b)] - y[static_cast<std::size_t>(a)]);
      if (cross <= 0.0)
        hull.pop_back();
      else
        break;
    }
    hull.push_back(i);
  }
  return hull;
}

}  // namespace detail

// Optimal public signal for a binary state space by convexification over the
// belief line: evaluate the worst-case cost on a grid of posteriors, take the
// lower convex envelope, and read off the (at most two) posteriors whose chord
// supports the prior.  The contact points are then sharpened by ternary search
// in their grid neighborhoods.
inline SignalDesign design_signal(const StochasticNetwork& snet, double eps,
                                  DesignOptions options = {}) {
  options.worst.certify = false;
  const auto& prior = snet.prior();

  if (snet.state_count() != 2) {
    if (!options.best_effort)
      throw UnsupportedStateSpace("exact design needs a binary state space (best_effort opts in)");
    // Sampling fallback: random conditional kernels are Bayes-plausible by
    // construction; keep the cheapest found, alongside the two benchmarks.
    SignalDesign best;
    best.scheme = SignalScheme::no_revelation(prior);
    best.approximate = true;
    auto value_of = [&](const SignalScheme& s) {
      double v = 0.0;
      for (int m = 0; m < s.message_count(); ++m)
        v += s.weights()[static_cast<std::size_t>(m)] *
             psi_eps_at_belief(snet, s.posteriors()[static_cast<std::size_t>(m)], eps,
                               options.worst);
      return v;
    };
    best.expected_cost = value_of(best.scheme);
    const SignalScheme full = SignalScheme::full_revelation(prior);
    if (const double v = value_of(full); v < best.expected_cost) {
      best.expected_cost = v;
      best.scheme = full;
    }
    std::uint64_t rng = options.seed ^ 0xa02bdbf7bb3c0a7ULL;
    const int n = snet.state_count();
    for (int trial = 0; trial < std::max(0, options.grid_size); ++trial) {
      const int k = 2 + static_cast<int>(detail::splitmix64(rng) % static_cast<std::uint64_t>(n - 1));
      std::vector<std::vector<double>> kernel(static_cast<std::size_t>(n),
                                              std::vector<double>(static_cast<std::size_t>(k)));
      for (int w = 0; w < n; ++w) {
        double sum = 0.0;
        for (int m = 0; m < k; ++m) {
          kernel[static_cast<std::size_t>(w)][static_cast<std::size_t>(m)] =
              -std::log(std::max(detail::uniform01(rng), 1e-12));
          sum += kernel[static_cast<std::size_t>(w)][static_cast<std::size_t>(m)];
        }
        for (int m = 0; m < k; ++m) kernel[static_cast<std::size_t>(w)][static_cast<std::size_t>(m)] /= sum;
      }
      std::vector<Belief> posts;
      std::vector<double> weights;
      for (int m = 0; m < k; ++m) {
        double tau = 0.0;
        std::vector<double> mu(static_cast<std::size_t>(n), 0.0);
        for (int w = 0; w < n; ++w)
          tau += prior[static_cast<std::size_t>(w)] *
                 kernel[static_cast<std::size_t>(w)][static_cast<std::size_t>(m)];
        if (tau <= 1e-12) continue;
        for (int w = 0; w < n; ++w)
          mu[static_cast<std::size_t>(w)] = prior[static_cast<std::size_t>(w)] *
                                            kernel[static_cast<std::size_t>(w)][static_cast<std::size_t>(m)] / tau;
        posts.push_back(Belief(std::move(mu)));
        weights.push_back(tau);
      }
      if (posts.empty()) continue;
      SignalScheme s = SignalScheme::from_posteriors(std::move(posts), std::move(weights), prior);
      if (const double v = value_of(s); v < best.expected_cost) {
        best.expected_cost = v;
        best.scheme = std::move(s);
      }
    }
    return best;
  }

  // --- exact binary-state design ---
  const double nu = prior[1];
  auto value_at = [&](double mu) {
    return psi_eps_at_belief(snet, Belief::binary(mu), eps, options.worst);
  };

  const int G = std::max(options.grid_size, 9);
  std::vector<double> xs;
  xs.reserve(static_cast<std::size_t>(G) + 1);
  for (int i = 0; i < G; ++i) xs.push_back(static_cast<double>(i) / static_cast<double>(G - 1));
  xs.push_back(nu);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end(),
                       [](double a, double b) { return std::fabs(a - b) < 1e-15; }),
           xs.end());
  std::vector<double> ys(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) ys[i] = value_at(xs[i]);

  const double v_nu = value_at(nu);
  const auto hull = detail::lower_hull(xs, ys);

  // Locate the hull segment bracketing the prior.
  int left = hull.front(), right = hull.back();
  for (std::size_t k = 0; k + 1 < hull.size(); ++k) {
    if (xs[static_cast<std::size_t>(hull[k])] <= nu &&
        nu <= xs[static_cast<std::size_t>(hull[k + 1])]) {
      left = hull[k];
      right = hull[k + 1];
      break;
    }
  }

  const double tol = options.value_tol * (1.0 + std::fabs(v_nu));
  auto no_rev = [&]() {
    SignalDesign d;
    d.scheme = SignalScheme::no_revelation(prior);
    d.expected_cost = v_nu;
    return d;
  };

  if (xs[static_cast<std::size_t>(left)] == nu || xs[static_cast<std::size_t>(right)] == nu)
    return no_rev();

  double q = xs[static_cast<std::size_t>(left)], vq = ys[static_cast<std::size_t>(left)];
  double r = xs[static_cast<std::size_t>(right)], vr = ys[static_cast<std::size_t>(right)];
  auto chord_at_nu = [&](double x0, double y0, double x1, double y1) {
    if (x1 - x0 < 1e-12) return std::min(y0, y1);
    return y0 + (y1 - y0) * (nu - x0) / (x1 - x0);
  };
  if (v_nu - chord_at_nu(q, vq, r, vr) <= tol) return no_rev();

  // Sharpen each contact point within one grid cell of its initial position.
  const double h = 1.0 / static_cast<double>(G - 1);
  for (int round = 0; round < 3; ++round) {
    {
      double lo = std::max(0.0, q - h), hi = std::min(nu, q + h);
      for (int it = 0; it < 80; ++it) {
        const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
        if (chord_at_nu(m1, value_at(m1), r, vr) <= chord_at_nu(m2, value_at(m2), r, vr))
          hi = m2;
        else
          lo = m1;
      }
      q = 0.5 * (lo + hi);
      vq = value_at(q);
    }
    {
      double lo = std::max(nu, r - h), hi = std::min(1.0, r + h);
      for (int it = 0; it < 80; ++it) {
        const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
        if (chord_at_nu(q, vq, m1, value_at(m1)) <= chord_at_nu(q, vq, m2, value_at(m2)))
          hi = m2;
        else
          lo = m1;
      }
      r = 0.5 * (lo + hi);
      vr = value_at(r);
    }
  }

  // Snap posteriors that converged onto the simplex corners.
  if (q < 1e-9) q = 0.0;
  if (r > 1.0 - 1e-9) r = 1.0;
  vq = value_at(q);
  vr = value_at(r);

  const double cost = chord_at_nu(q, vq, r, vr);
  if (r - q <= 1e-9 || v_nu <= cost + tol) return no_rev();

  SignalDesign d;
  d.expected_cost = cost;
  d.scheme = SignalScheme::from_posteriors({Belief::binary(q), Belief::binary(r)},
                                           {(r - nu) / (r - q), (nu - q) / (r - q)}, prior);
  return d;
}

// Expected worst-case cost when travelers calibrated to eps_actual receive the
// scheme's messages: sum over messages of tau_m * Psi_{eps_actual}(mu_m).
inline double expected_realized_cost(const StochasticNetwork& snet, const SignalScheme& scheme,
                                     double eps_actual, WorstBrueOptions options = {}) {
  options.certify = false;
  double v = 0.0;
  for (int m = 0; m < scheme.message_count(); ++m)
    v += scheme.weights()[static_cast<std::size_t>(m)] *
         psi_eps_at_belief(snet, scheme.posteriors()[static_cast<std::size_t>(m)], eps_actual,
                           options);
  return v;
}

struct SchemeExcessReport {
  double mean_excess = 0.0;     // excess time averaged over messages
  double mean_threshold = 0.0;  // indifference threshold averaged over messages
  double ratio = 0.0;           // mean_excess / mean_threshold, 0 when both vanish
  std::vector<ExcessTimeReport> per_message;
};

// Realized inefficiency of a signaling scheme: for caller-supplied flows (one
// per message, each living on the corresponding posterior network), average
// the per-message excess time and indifference threshold under the message
// weights.  The ratio is the scheme-level analogue of the single-network
// excess-per-threshold factor and stays below it.
inline SchemeExcessReport scheme_excess_report(const SignalScheme& scheme,
                                               const std::vector<PathFlow>& flows,
                                               const UESolveOptions& ue_options = {}) {
  if (static_cast<int>(flows.size()) != scheme.message_count())
    throw Error("need exactly one flow per message");

  SchemeExcessReport rep;
  for (int m = 0; m < scheme.message_count(); ++m) {
    const PathFlow& g = flows[static_cast<std::size_t>(m)];
    UESolveOptions opts = ue_options;
    opts.paths = nullptr;
    const double psi0 = solve_ue(g.network(), opts).psi0;
    const ExcessTimeReport r = average_excess_time(g, psi0);
    rep.mean_excess += scheme.weights()[static_cast<std::size_t>(m)] * r.psi;
    rep.mean_threshold += scheme.weights()[static_cast<std::size_t>(m)] * r.eps;
    rep.per_message.push_back(r);
  }
  if (rep.mean_threshold > 0.0)
    rep.ratio = rep.mean_excess / rep.mean_threshold;
  else
    rep.ratio = rep.mean_excess <= 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return rep;
}

}  // namespace brue
