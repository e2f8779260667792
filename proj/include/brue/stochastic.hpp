#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "network.hpp"
#include "polynomial.hpp"

namespace brue {

// Probability vector over states (or over anything finite).
class Belief {
 public:
  explicit Belief(std::vector<double> p) : p_(std::move(p)) {
    if (p_.empty()) throw Error("belief needs at least one entry");
    double sum = 0.0;
    for (double v : p_) {
      if (!(v >= -1e-12) || !std::isfinite(v)) throw Error("belief entries must be probabilities");
      sum += v;
    }
    if (std::fabs(sum - 1.0) > 1e-9) throw Error("belief does not sum to one");
    for (double& v : p_) v = std::max(v, 0.0) / sum;
  }

  // Two-state belief from the probability of state 1.
  static Belief binary(double p1) { return Belief(std::vector<double>{1.0 - p1, p1}); }

  int size() const { return static_cast<int>(p_.size()); }
  double operator[](int i) const { return p_[static_cast<std::size_t>(i)]; }
  const std::vector<double>& probs() const { return p_; }

 private:
  std::vector<double> p_;
};

struct StateCosts {
  std::string name;
  std::vector<CostPolynomial> costs;  // one per edge
};

// A network whose latencies depend on a finite random state with known prior.
class StochasticNetwork {
 public:
  StochasticNetwork(Network base, std::vector<StateCosts> states, std::vector<double> prior)
      : base_(std::move(base)), states_(std::move(states)), prior_(std::move(prior)) {
    if (states_.empty()) throw InvalidNetwork("stochastic network needs at least one state");
    if (prior_.size() != states_.size())
      throw InvalidNetwork("prior size does not match state count");
    double sum = 0.0;
    for (double v : prior_) {
      if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidNetwork("prior entries must be nonnegative");
      sum += v;
    }
    if (std::fabs(sum - 1.0) > 1e-12) throw InvalidNetwork("prior does not sum to one");
    for (double& v : prior_) v /= sum;
    for (const StateCosts& s : states_)
      if (static_cast<int>(s.costs.size()) != base_.edge_count())
        throw InvalidNetwork("state '" + s.name + "' costs do not cover every edge");
  }

  const Network& base() const { return base_; }
  int state_count() const { return static_cast<int>(states_.size()); }
  const std::vector<StateCosts>& states() const { return states_; }
  const std::vector<double>& prior() const { return prior_; }
  Belief prior_belief() const { return Belief(prior_); }

  Network state_network(int w) const {
    return base_.with_costs(states_[static_cast<std::size_t>(w)].costs);
  }

 private:
  Network base_;
  std::vector<StateCosts> states_;
  std::vector<double> prior_;
};

// Network seen by travelers holding `belief`: every edge carries its expected
// latency polynomial.
inline Network posterior_network(const StochasticNetwork& snet, const Belief& belief) {
  if (belief.size() != snet.state_count())
    throw Error("belief dimension does not match state count");
  std::vector<CostPolynomial> costs;
  costs.reserve(static_cast<std::size_t>(snet.base().edge_count()));
  for (int e = 0; e < snet.base().edge_count(); ++e) {
    std::vector<const CostPolynomial*> polys;
    polys.reserve(static_cast<std::size_t>(snet.state_count()));
    for (int w = 0; w < snet.state_count(); ++w)
      polys.push_back(&snet.states()[static_cast<std::size_t>(w)].costs[static_cast<std::size_t>(e)]);
    costs.push_back(mix(polys, belief.probs()));
  }
  return snet.base().with_costs(std::move(costs));
}

struct EpsilonInfinity {
  double value = 0.0;  // every flow is eps-indifferent at every belief for eps >= value
  bool exact = false;  // attained by some flow (guaranteed for single-trip networks)
};

// Saturation threshold: the largest path cost over states when every edge of
// the path carries the whole demand.  Posterior costs are state mixtures, so
// the maximum over beliefs is attained at a pure state.
inline EpsilonInfinity epsilon_infinity(const StochasticNetwork& snet,
                                        std::size_t path_cap = kDefaultPathCap) {
  const PathSet paths = enumerate_paths(snet.base(), path_cap);
  const double D = snet.base().total_demand();
  double value = 0.0;
  for (int w = 0; w < snet.state_count(); ++w) {
    const auto& costs = snet.states()[static_cast<std::size_t>(w)].costs;
    for (int p = 0; p < paths.count(); ++p) {
      double c = 0.0;
      for (int e : paths.path(p).edges) c += costs[static_cast<std::size_t>(e)](D);
      value = std::max(value, c);
    }
  }
  return {value, snet.base().trip_count() == 1};
}

}  // namespace brue
