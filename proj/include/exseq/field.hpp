#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <Eigen/Dense>
#include <unsupported/Eigen/AutoDiff>

#include "exseq/polyspace.hpp"

namespace exseq {

// Values and derivatives of a field at a set of points.
// jac(:, c*d + l) = d_l u_c ; hess(:, (c*d + l)*d + k) = d_l d_k u_c
struct FieldJets {
  int value_dim = 1;
  int dim = 3;
  Mat val;
  Mat jac;
  Mat hess;
};

class AnalyticField {
 public:
  using Evaluator = std::function<FieldJets(const Mat& pts, int order)>;

  AnalyticField() = default;
  AnalyticField(std::string name, int dim, int value_dim, int max_order, Evaluator ev,
                double smoothness = std::numeric_limits<double>::infinity())
      : name_(std::move(name)), dim_(dim), value_dim_(value_dim), max_order_(max_order), ev_(std::move(ev)),
        smoothness_(smoothness) {}

  const std::string& name() const { return name_; }
  int dim() const { return dim_; }
  int value_dim() const { return value_dim_; }
  int max_order() const { return max_order_; }
  double smoothness() const { return smoothness_; }
  bool entire() const { return std::isinf(smoothness_); }

  FieldJets eval(const Mat& pts, int order) const;
  Mat values(const Mat& pts) const { return eval(pts, 0).val; }

 private:
  std::string name_;
  int dim_ = 3;
  int value_dim_ = 1;
  int max_order_ = 0;
  Evaluator ev_;
  double smoothness_ = std::numeric_limits<double>::infinity();
};

// Jet scalar types for the generic field functors.
using Jet1 = Eigen::AutoDiffScalar<Eigen::Vector3d>;
using Jet2 = Eigen::AutoDiffScalar<Eigen::Matrix<Jet1, 3, 1>>;

// x^a for positive x, written through exp/log so nested jets work
template <class T>
T rpow(const T& x, double a) {
  using std::exp;
  using std::log;
  return exp(a * log(x));
}

namespace detail {

inline double plain(const double& v) { return v; }

template <class F>
FieldJets eval_generic(const F& f, int dim, int m, const Mat& pts, int order) {
  const int np = static_cast<int>(pts.rows());
  FieldJets out;
  out.value_dim = m;
  out.dim = dim;
  out.val.resize(np, m);
  if (order >= 1) out.jac.resize(np, m * dim);
  if (order >= 2) out.hess.resize(np, m * dim * dim);
  for (int i = 0; i < np; ++i) {
    if (order == 0) {
      std::array<double, 3> x{0, 0, 0};
      for (int l = 0; l < dim; ++l) x[l] = pts(i, l);
      auto r = f(x);
      for (int c = 0; c < m; ++c) out.val(i, c) = r[c];
    } else if (order == 1) {
      std::array<Jet1, 3> x;
      for (int l = 0; l < 3; ++l) x[l] = Jet1(l < dim ? pts(i, l) : 0.0, Eigen::Vector3d::Unit(l));
      auto r = f(x);
      for (int c = 0; c < m; ++c) {
        out.val(i, c) = r[c].value();
        for (int l = 0; l < dim; ++l) out.jac(i, c * dim + l) = r[c].derivatives().size() ? r[c].derivatives()(l) : 0.0;
      }
    } else {
      std::array<Jet2, 3> x;
      for (int l = 0; l < 3; ++l) {
        x[l].value() = Jet1(l < dim ? pts(i, l) : 0.0, Eigen::Vector3d::Unit(l));
        x[l].derivatives().resize(3);
        for (int k = 0; k < 3; ++k) x[l].derivatives()(k) = Jet1(k == l ? 1.0 : 0.0, Eigen::Vector3d::Zero());
      }
      auto r = f(x);
      for (int c = 0; c < m; ++c) {
        out.val(i, c) = r[c].value().value();
        const bool has = r[c].derivatives().size() > 0;
        for (int l = 0; l < dim; ++l) {
          out.jac(i, c * dim + l) = has ? r[c].derivatives()(l).value() : 0.0;
          for (int k = 0; k < dim; ++k) {
            double h = 0.0;
            if (has && r[c].derivatives()(l).derivatives().size()) h = r[c].derivatives()(l).derivatives()(k);
            out.hess(i, (c * dim + l) * dim + k) = h;
          }
        }
      }
    }
  }
  return out;
}

}  // namespace detail

// Wrap a generic functor `std::array<T,3> f(const std::array<T,3>& x)`.
// Components beyond value_dim and coordinates beyond dim are ignored.
template <class F>
AnalyticField make_field(std::string name, int dim, int value_dim, F f,
                         double smoothness = std::numeric_limits<double>::infinity()) {
  auto ev = [f, dim, value_dim](const Mat& pts, int order) {
    return detail::eval_generic(f, dim, value_dim, pts, order);
  };
  return AnalyticField(std::move(name), dim, value_dim, 2, ev, smoothness);
}

// Derived fields (one derivative order fewer).
AnalyticField grad_of(const AnalyticField& u);    // scalar -> vector
AnalyticField curl_of(const AnalyticField& u);    // 3D vector -> vector
AnalyticField div_of(const AnalyticField& u);     // vector -> scalar
AnalyticField rot_of(const AnalyticField& u);     // 2D scalar -> (d2 u, -d1 u)
AnalyticField curl2d_of(const AnalyticField& u);  // 2D vector -> scalar
AnalyticField sum_of(const AnalyticField& a, const AnalyticField& b, double sb = 1.0);
// Polynomial as a field (orders up to 2).
AnalyticField poly_field(const Poly& p, std::string name = "poly");

// Named test fields used by studies and tests.
AnalyticField named_field(const std::string& name);
std::vector<std::string> field_names(int dim, int value_dim);

}  // namespace exseq
