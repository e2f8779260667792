#pragma once

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace brue {

// Signed polynomial in one variable, coefficients in ascending degree order.
// Used internally for line restrictions of costs and constraints; supports
// exact-ish root isolation via the derivative recursion.
struct Poly {
  std::vector<double> c;  // c[k] multiplies x^k; empty vector is the zero polynomial

  Poly() = default;
  explicit Poly(std::vector<double> coef) : c(std::move(coef)) {}
  Poly(std::initializer_list<double> coef) : c(coef) {}

  static Poly constant(double a) { return Poly{std::vector<double>{a}}; }

  int degree() const {
    for (int k = static_cast<int>(c.size()) - 1; k >= 0; --k)
      if (c[static_cast<std::size_t>(k)] != 0.0) return k;
    return -1;
  }

  double eval(double x) const {
    double v = 0.0;
    for (std::size_t k = c.size(); k-- > 0;) v = v * x + c[k];
    return v;
  }

  Poly derivative() const {
    if (c.size() <= 1) return Poly{};
    std::vector<double> d(c.size() - 1);
    for (std::size_t k = 1; k < c.size(); ++k) d[k - 1] = c[k] * static_cast<double>(k);
    return Poly{std::move(d)};
  }

  Poly& operator+=(const Poly& o) {
    if (o.c.size() > c.size()) c.resize(o.c.size(), 0.0);
    for (std::size_t k = 0; k < o.c.size(); ++k) c[k] += o.c[k];
    return *this;
  }

  Poly& operator-=(const Poly& o) {
    if (o.c.size() > c.size()) c.resize(o.c.size(), 0.0);
    for (std::size_t k = 0; k < o.c.size(); ++k) c[k] -= o.c[k];
    return *this;
  }

  Poly scaled(double s) const {
    Poly r = *this;
    for (double& v : r.c) v *= s;
    return r;
  }

  // p(a + b t) as a polynomial in t (Horner with polynomial accumulator).
  Poly composed_affine(double a, double b) const {
    Poly r;
    for (std::size_t k = c.size(); k-- > 0;) {
      // r <- r * (a + b t) + c[k]
      Poly next;
      next.c.assign(r.c.size() + 1, 0.0);
      for (std::size_t j = 0; j < r.c.size(); ++j) {
        next.c[j] += r.c[j] * a;
        next.c[j + 1] += r.c[j] * b;
      }
      r = std::move(next);
      if (r.c.empty()) r.c.push_back(0.0);
      r.c[0] += c[k];
    }
    return r;
  }

  // p(t) * (a + b t).
  Poly times_affine(double a, double b) const {
    Poly r;
    r.c.assign(c.size() + 1, 0.0);
    for (std::size_t k = 0; k < c.size(); ++k) {
      r.c[k] += c[k] * a;
      r.c[k + 1] += c[k] * b;
    }
    return r;
  }

  // All real roots in [lo, hi], ascending, de-duplicated.  Recursive critical
  // point isolation plus bisection; near-zero local extrema are reported as
  // (touching) roots, which errs on the side of extra candidate points.
  std::vector<double> real_roots_in(double lo, double hi) const;
};

inline std::vector<double> Poly::real_roots_in(double lo, double hi) const {
  std::vector<double> roots;
  if (!(lo <= hi)) return roots;

  // Work with coefficients trimmed of relatively negligible high-order noise.
  double cmax = 0.0;
  for (double v : c) cmax = std::max(cmax, std::fabs(v));
  if (cmax == 0.0) return roots;  // identically zero: treated as root-free
  std::vector<double> t = c;
  while (t.size() > 1 && std::fabs(t.back()) <= 1e-14 * cmax) t.pop_back();
  Poly p{t};
  const int deg = p.degree();

  if (deg <= 0) return roots;
  if (deg == 1) {
    double r = -p.c[0] / p.c[1];
    if (r >= lo && r <= hi) roots.push_back(r);
    return roots;
  }
  if (deg == 2) {
    const double a = p.c[2], b = p.c[1], cc = p.c[0];
    const double disc = b * b - 4.0 * a * cc;
    if (disc >= 0.0) {
      const double sq = std::sqrt(disc);
      const double q = -0.5 * (b + (b >= 0.0 ? sq : -sq));
      double r1 = q / a;
      double r2 = (q != 0.0) ? cc / q : r1;
      if (r1 > r2) std::swap(r1, r2);
      if (r1 >= lo && r1 <= hi) roots.push_back(r1);
      if (r2 >= lo && r2 <= hi && r2 != r1) roots.push_back(r2);
    }
    return roots;
  }

  std::vector<double> pts = p.derivative().real_roots_in(lo, hi);
  pts.push_back(lo);
  pts.push_back(hi);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

  double fscale = 1e-300;
  for (double x : pts) fscale = std::max(fscale, std::fabs(p.eval(x)));

  auto push = [&](double r) {
    if (roots.empty() || std::fabs(r - roots.back()) > 1e-13 * (1.0 + std::fabs(r)))
      roots.push_back(r);
  };

  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    double a = pts[i], b = pts[i + 1];
    double fa = p.eval(a), fb = p.eval(b);
    if (std::fabs(fa) <= 1e-12 * fscale) push(a);
    if (fa * fb < 0.0) {
      for (int it = 0; it < 200 && b - a > 0.0; ++it) {
        double m = 0.5 * (a + b);
        double fm = p.eval(m);
        if (fm == 0.0) { a = b = m; break; }
        if ((fa < 0.0) == (fm < 0.0)) { a = m; fa = fm; } else { b = m; }
      }
      push(0.5 * (a + b));
    }
  }
  if (std::fabs(p.eval(pts.back())) <= 1e-12 * fscale) push(pts.back());
  std::sort(roots.begin(), roots.end());
  return roots;
}

// Link latency function: polynomial with nonnegative coefficients, so it is
// nonnegative and nondecreasing on x >= 0 and the Beckmann integrand is convex.
class CostPolynomial {
 public:
  CostPolynomial() = default;  // identically zero cost

  explicit CostPolynomial(std::vector<double> coef) : coef_(std::move(coef)) {
    for (double a : coef_)
      if (!(a >= 0.0) || !std::isfinite(a))
        throw InvalidNetwork("cost polynomial coefficients must be finite and nonnegative");
    while (!coef_.empty() && coef_.back() == 0.0) coef_.pop_back();
  }

  CostPolynomial(std::initializer_list<double> coef)
      : CostPolynomial(std::vector<double>(coef)) {}

  static CostPolynomial constant(double a) { return CostPolynomial{std::vector<double>{a}}; }

  const std::vector<double>& coefficients() const { return coef_; }
  int degree() const { return static_cast<int>(coef_.size()) - 1; }
  bool is_constant() const { return coef_.size() <= 1; }

  double operator()(double x) const {
    double v = 0.0;
    for (std::size_t k = coef_.size(); k-- > 0;) v = v * x + coef_[k];
    return v;
  }

  // d/dx at x.
  double slope(double x) const {
    double v = 0.0;
    for (std::size_t k = coef_.size(); k-- > 1;) v = v * x + coef_[k] * static_cast<double>(k);
    return v;
  }

  // Integral from 0 to x (Beckmann term).
  double integral(double x) const {
    double v = 0.0;
    for (std::size_t k = coef_.size(); k-- > 0;)
      v = v * x + coef_[k] / static_cast<double>(k + 1);
    return v * x;
  }

  // Marginal cost c(x) + x c'(x): coefficient k becomes (k+1) * a_k.
  CostPolynomial marginal() const {
    std::vector<double> m(coef_.size());
    for (std::size_t k = 0; k < coef_.size(); ++k) m[k] = coef_[k] * static_cast<double>(k + 1);
    return CostPolynomial{std::move(m)};
  }

  Poly as_poly() const { return Poly{coef_}; }

  friend bool operator==(const CostPolynomial& a, const CostPolynomial& b) {
    return a.coef_ == b.coef_;
  }

 private:
  std::vector<double> coef_;
};

// Convex combination sum(w[i] * polys[i]); used for expected latencies.
inline CostPolynomial mix(const std::vector<const CostPolynomial*>& polys,
                          const std::vector<double>& w) {
  std::vector<double> out;
  for (std::size_t i = 0; i < polys.size(); ++i) {
    const auto& cs = polys[i]->coefficients();
    if (cs.size() > out.size()) out.resize(cs.size(), 0.0);
    for (std::size_t k = 0; k < cs.size(); ++k) out[k] += w[i] * cs[k];
  }
  // Mixing nonnegative coefficients with nonnegative weights stays nonnegative,
  // but guard against -0.0 artifacts.
  for (double& v : out) v = std::max(v, 0.0);
  return CostPolynomial{std::move(out)};
}

}  // namespace brue
