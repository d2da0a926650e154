#include <atomic>
#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <stdexcept>

#include "exseq/refsimplex.hpp"

namespace exseq {

namespace {

// Jacobi polynomial P_n^{(a,b)} and its derivative by the three-term recurrence.
void jacobi_eval(int n, double a, double b, double x, double& p, double& dp) {
  double p0 = 1.0, p1 = 0.5 * (a - b + (a + b + 2.0) * x);
  if (n == 0) {
    p = 1.0;
    dp = 0.0;
    return;
  }
  for (int k = 2; k <= n; ++k) {
    const double c = 2.0 * k + a + b;
    const double a1 = 2.0 * k * (k + a + b) * (c - 2.0);
    const double a2 = (c - 1.0) * (a * a - b * b);
    const double a3 = (c - 2.0) * (c - 1.0) * c;
    const double a4 = 2.0 * (k + a - 1.0) * (k + b - 1.0) * c;
    const double p2 = ((a2 + a3 * x) * p1 - a4 * p0) / a1;
    p0 = p1;
    p1 = p2;
  }
  p = p1;
  // derivative identity d/dx P_n = (n+a+b+1)/2 P_{n-1}^{(a+1,b+1)}
  if (n >= 1) {
    double q0 = 1.0, q1 = 0.5 * ((a + 1) - (b + 1) + (a + b + 4.0) * x);
    if (n - 1 == 0) {
      q1 = 1.0;
    } else {
      const double aa = a + 1, bb = b + 1;
      for (int k = 2; k <= n - 1; ++k) {
        const double c = 2.0 * k + aa + bb;
        const double a1 = 2.0 * k * (k + aa + bb) * (c - 2.0);
        const double a2 = (c - 1.0) * (aa * aa - bb * bb);
        const double a3 = (c - 2.0) * (c - 1.0) * c;
        const double a4 = 2.0 * (k + aa - 1.0) * (k + bb - 1.0) * c;
        const double q2 = ((a2 + a3 * x) * q1 - a4 * q0) / a1;
        q0 = q1;
        q1 = q2;
      }
    }
    dp = 0.5 * (n + a + b + 1.0) * q1;
  }
}

}  // namespace

void gauss_jacobi(int n, double a, double b, Vec& x, Vec& w) {
  if (n < 1) throw std::runtime_error("gauss_jacobi: need at least one node");
  Mat J = Mat::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    const double c = 2.0 * k + a + b;
    J(k, k) = (k == 0) ? (b - a) / (a + b + 2.0) : (b * b - a * a) / (c * (c + 2.0));
    if (k + 1 < n) {
      const double kk = k + 1;
      const double cc = 2.0 * kk + a + b;
      double num = 4.0 * kk * (kk + a) * (kk + b) * (kk + a + b);
      double den = cc * cc * (cc + 1.0) * (cc - 1.0);
      const double off = std::sqrt(num / den);
      J(k, k + 1) = off;
      J(k + 1, k) = off;
    }
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(J);
  x = es.eigenvalues();
  const double mu0 = std::pow(2.0, a + b + 1.0) * std::tgamma(a + 1.0) * std::tgamma(b + 1.0) / std::tgamma(a + b + 2.0);
  w.resize(n);
  // Newton polish of the nodes, then weights from the derivative formula.
  for (int i = 0; i < n; ++i) {
    double xi = x(i);
    for (int it = 0; it < 3; ++it) {
      double p, dp;
      jacobi_eval(n, a, b, xi, p, dp);
      if (dp == 0.0) break;
      xi -= p / dp;
    }
    x(i) = xi;
  }
  const double lg = std::lgamma(n + a + 1.0) + std::lgamma(n + b + 1.0) - std::lgamma(n + 1.0) - std::lgamma(n + a + b + 1.0);
  const double cst = std::pow(2.0, a + b + 1.0) * std::exp(lg);
  for (int i = 0; i < n; ++i) {
    double p, dp;
    jacobi_eval(n, a, b, x(i), p, dp);
    w(i) = cst / ((1.0 - x(i) * x(i)) * dp * dp);
  }
  // guard: keep the normalization exact
  w *= mu0 / w.sum();
}

QuadratureRule unit_simplex_rule(int dim, int degree) {
  static std::mutex mtx;
  static std::map<std::pair<int, int>, QuadratureRule> cache;
  static std::atomic<bool> warned{false};
  if (degree > max_quadrature_degree) {
    if (!warned.exchange(true))
      std::fprintf(stderr, "warning: quadrature degree %d capped at %d\n", degree, max_quadrature_degree);
    degree = max_quadrature_degree;
  }
  if (degree < 0) degree = 0;
  std::lock_guard<std::mutex> lock(mtx);
  auto key = std::make_pair(dim, degree);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  const int n = degree / 2 + 1;  // 2n-1 >= degree
  QuadratureRule r;
  r.degree = degree;
  if (dim == 1) {
    Vec x, w;
    gauss_jacobi(n, 0, 0, x, w);
    r.points = ((x.array() + 1.0) * 0.5).matrix();
    r.weights = 0.5 * w;
  } else if (dim == 2) {
    Vec xs, ws, xt, wt;
    gauss_jacobi(n, 0, 0, xs, ws);
    gauss_jacobi(n, 1, 0, xt, wt);
    r.points.resize(n * n, 2);
    r.weights.resize(n * n);
    int k = 0;
    for (int j = 0; j < n; ++j) {
      const double t = 0.5 * (1.0 + xt(j));
      for (int i = 0; i < n; ++i) {
        const double s = 0.5 * (1.0 + xs(i));
        r.points(k, 0) = s * (1.0 - t);
        r.points(k, 1) = t;
        r.weights(k) = 0.5 * ws(i) * 0.25 * wt(j);
        ++k;
      }
    }
  } else if (dim == 3) {
    Vec xs, ws, xt, wt, xw, ww;
    gauss_jacobi(n, 0, 0, xs, ws);
    gauss_jacobi(n, 1, 0, xt, wt);
    gauss_jacobi(n, 2, 0, xw, ww);
    r.points.resize(n * n * n, 3);
    r.weights.resize(n * n * n);
    int k = 0;
    for (int l = 0; l < n; ++l) {
      const double w3 = 0.5 * (1.0 + xw(l));
      for (int j = 0; j < n; ++j) {
        const double t = 0.5 * (1.0 + xt(j));
        for (int i = 0; i < n; ++i) {
          const double s = 0.5 * (1.0 + xs(i));
          r.points(k, 0) = s * (1.0 - t) * (1.0 - w3);
          r.points(k, 1) = t * (1.0 - w3);
          r.points(k, 2) = w3;
          r.weights(k) = 0.5 * ws(i) * 0.25 * wt(j) * 0.125 * ww(l);
          ++k;
        }
      }
    }
  } else {
    throw std::runtime_error("unit_simplex_rule: dimension must be 1, 2 or 3");
  }
  cache.emplace(key, r);
  return r;
}

}  // namespace exseq
