#include "exseq/field.hpp"

#include <stdexcept>

namespace exseq {

FieldJets AnalyticField::eval(const Mat& pts, int order) const {
  if (!ev_) throw std::runtime_error("AnalyticField: empty field");
  if (order > max_order_) throw std::runtime_error("AnalyticField " + name_ + ": derivative order not available");
  if (pts.cols() != dim_) throw std::runtime_error("AnalyticField " + name_ + ": point dimension mismatch");
  return ev_(pts, order);
}

namespace {

// Build a derived field whose jets of order k come from jets of order k+1 of u.
template <class Fn>
AnalyticField derived(const AnalyticField& u, std::string name, int value_dim, Fn fn) {
  if (u.max_order() < 1) throw std::runtime_error("derived field needs differentiable input");
  auto ev = [u, fn, value_dim](const Mat& pts, int order) {
    FieldJets a = u.eval(pts, order + 1);
    FieldJets out;
    out.value_dim = value_dim;
    out.dim = a.dim;
    fn(a, out, order);
    return out;
  };
  return AnalyticField(std::move(name), u.dim(), value_dim, u.max_order() - 1, ev, u.smoothness() - 1);
}

}  // namespace

AnalyticField grad_of(const AnalyticField& u) {
  if (u.value_dim() != 1) throw std::runtime_error("grad_of: scalar field expected");
  const int d = u.dim();
  return derived(u, "grad(" + u.name() + ")", d, [d](const FieldJets& a, FieldJets& o, int order) {
    o.val = a.jac;
    if (order >= 1) o.jac = a.hess;
    (void)d;
  });
}

AnalyticField curl_of(const AnalyticField& u) {
  if (u.value_dim() != 3 || u.dim() != 3) throw std::runtime_error("curl_of: 3D vector field expected");
  return derived(u, "curl(" + u.name() + ")", 3, [](const FieldJets& a, FieldJets& o, int order) {
    const int np = static_cast<int>(a.val.rows());
    o.val.resize(np, 3);
    if (order >= 1) o.jac.resize(np, 9);
    for (int i = 0; i < 3; ++i) {
      const int j = (i + 1) % 3, k = (i + 2) % 3;
      o.val.col(i) = a.jac.col(k * 3 + j) - a.jac.col(j * 3 + k);
      if (order >= 1)
        for (int l = 0; l < 3; ++l)
          o.jac.col(i * 3 + l) = a.hess.col((k * 3 + j) * 3 + l) - a.hess.col((j * 3 + k) * 3 + l);
    }
  });
}

AnalyticField div_of(const AnalyticField& u) {
  const int d = u.dim();
  if (u.value_dim() != d) throw std::runtime_error("div_of: vector field expected");
  return derived(u, "div(" + u.name() + ")", 1, [d](const FieldJets& a, FieldJets& o, int order) {
    const int np = static_cast<int>(a.val.rows());
    o.val = Mat::Zero(np, 1);
    if (order >= 1) o.jac = Mat::Zero(np, d);
    for (int c = 0; c < d; ++c) {
      o.val.col(0) += a.jac.col(c * d + c);
      if (order >= 1)
        for (int l = 0; l < d; ++l) o.jac.col(l) += a.hess.col((c * d + c) * d + l);
    }
  });
}

AnalyticField rot_of(const AnalyticField& u) {
  if (u.value_dim() != 1 || u.dim() != 2) throw std::runtime_error("rot_of: 2D scalar field expected");
  return derived(u, "rot(" + u.name() + ")", 2, [](const FieldJets& a, FieldJets& o, int order) {
    const int np = static_cast<int>(a.val.rows());
    o.val.resize(np, 2);
    o.val.col(0) = a.jac.col(1);
    o.val.col(1) = -a.jac.col(0);
    if (order >= 1) {
      o.jac.resize(np, 4);
      for (int l = 0; l < 2; ++l) {
        o.jac.col(0 * 2 + l) = a.hess.col(1 * 2 + l);
        o.jac.col(1 * 2 + l) = -a.hess.col(0 * 2 + l);
      }
    }
  });
}

AnalyticField curl2d_of(const AnalyticField& u) {
  if (u.value_dim() != 2 || u.dim() != 2) throw std::runtime_error("curl2d_of: 2D vector field expected");
  return derived(u, "curl2d(" + u.name() + ")", 1, [](const FieldJets& a, FieldJets& o, int order) {
    const int np = static_cast<int>(a.val.rows());
    o.val.resize(np, 1);
    o.val.col(0) = a.jac.col(1 * 2 + 0) - a.jac.col(0 * 2 + 1);
    if (order >= 1) {
      o.jac.resize(np, 2);
      for (int l = 0; l < 2; ++l) o.jac.col(l) = a.hess.col((1 * 2 + 0) * 2 + l) - a.hess.col((0 * 2 + 1) * 2 + l);
    }
  });
}

AnalyticField sum_of(const AnalyticField& a, const AnalyticField& b, double sb) {
  if (a.dim() != b.dim() || a.value_dim() != b.value_dim()) throw std::runtime_error("sum_of: shape mismatch");
  auto ev = [a, b, sb](const Mat& pts, int order) {
    FieldJets x = a.eval(pts, order), y = b.eval(pts, order);
    x.val += sb * y.val;
    if (order >= 1) x.jac += sb * y.jac;
    if (order >= 2) x.hess += sb * y.hess;
    return x;
  };
  return AnalyticField(a.name() + "+" + b.name(), a.dim(), a.value_dim(), std::min(a.max_order(), b.max_order()), ev,
                       std::min(a.smoothness(), b.smoothness()));
}

AnalyticField poly_field(const Poly& p, std::string name) {
  auto ev = [p](const Mat& pts, int order) {
    const auto t = p.cell->basis().tabulate(pts, p.degree, order);
    const int s = static_cast<int>(t.val.cols()), d = p.cell->dim(), m = p.value_dim;
    const int np = static_cast<int>(pts.rows());
    FieldJets o;
    o.value_dim = m;
    o.dim = d;
    o.val.resize(np, m);
    if (order >= 1) o.jac.resize(np, m * d);
    if (order >= 2) o.hess.resize(np, m * d * d);
    for (int c = 0; c < m; ++c) {
      auto cc = p.coeffs.segment(c * s, s);
      o.val.col(c) = t.val * cc;
      for (int l = 0; l < d && order >= 1; ++l) o.jac.col(c * d + l) = t.d1[l] * cc;
      for (int l = 0; l < d * d && order >= 2; ++l) o.hess.col(c * d * d + l) = t.d2[l] * cc;
    }
    return o;
  };
  return AnalyticField(std::move(name), p.cell->dim(), p.value_dim, 2, ev);
}

namespace {

template <class T>
using A3 = std::array<T, 3>;

struct PhiEntire3 {
  template <class T>
  A3<T> operator()(const A3<T>& x) const {
    using std::cos;
    using std::exp;
    using std::sin;
    T v = exp(0.8 * x[0] - 0.5 * x[1] + 0.6 * x[2]) * sin(3.1 * x[0] + 2.2 * x[1] - 2.6 * x[2]) + cos(2.4 * x[1] + 2.9 * x[2]);
    return {v, T(0.0), T(0.0)};
  }
};

struct URpow3 {
  // singular at the vertex (0,0,1)
  double a;
  int vector;
  template <class T>
  A3<T> operator()(const A3<T>& x) const {
    T z = x[2] - 1.0;
    T r2 = x[0] * x[0] + x[1] * x[1] + z * z;
    T ra = rpow(r2, 0.5 * a);
    if (!vector) return {ra, T(0.0), T(0.0)};
    return {T(ra * (1.0 + x[1])), T(ra * (0.5 - x[0])), T(ra * (x[0] + 0.3 * x[1]))};
  }
};

struct UEntire3 {
  template <class T>
  A3<T> operator()(const A3<T>& x) const {
    using std::cos;
    using std::exp;
    using std::sin;
    T a = sin(2.9 * x[1] + 1.7 * x[2]) * exp(0.6 * x[0]);
    T b = cos(2.6 * x[0] - 2.3 * x[2]) + 0.5 * sin(3.2 * x[1]);
    T c = exp(-0.7 * x[1]) * cos(2.8 * x[0] + 1.9 * x[2]);
    return {a, b, c};
  }
};

struct PhiEntire2 {
  template <class T>
  A3<T> operator()(const A3<T>& x) const {
    using std::cos;
    using std::exp;
    using std::sin;
    T v = exp(0.9 * x[0] - 0.6 * x[1]) * sin(3.2 * x[0] + 2.8 * x[1]) + cos(2.5 * x[0] - 2.7 * x[1]);
    return {v, T(0.0), T(0.0)};
  }
};

struct URpow2 {
  // singular at the vertex (0,1)
  double a;
  int vector;
  template <class T>
  A3<T> operator()(const A3<T>& x) const {
    T z = x[1] - 1.0;
    T r2 = x[0] * x[0] + z * z;
    T ra = rpow(r2, 0.5 * a);
    if (!vector) return {ra, T(0.0), T(0.0)};
    return {T(ra * (1.0 + x[1])), T(ra * (0.5 - x[0])), T(0.0)};
  }
};

struct UEntire2 {
  template <class T>
  A3<T> operator()(const A3<T>& x) const {
    using std::cos;
    using std::exp;
    using std::sin;
    T a = sin(3.0 * x[1] + 1.2 * x[0]) * exp(0.7 * x[0]);
    T b = cos(2.8 * x[0] - 1.6 * x[1]) + 0.3 * x[0] * x[1];
    return {a, b, T(0.0)};
  }
};

struct FEntire1 {
  template <class T>
  A3<T> operator()(const A3<T>& x) const {
    using std::cos;
    using std::exp;
    using std::sin;
    T v = exp(0.8 * x[0]) * sin(2.0 * x[0]) + cos(1.5 * x[0]);
    return {v, T(0.0), T(0.0)};
  }
};

struct FAbs1 {
  double a;
  template <class T>
  A3<T> operator()(const A3<T>& x) const {
    return {rpow(T(x[0] * x[0]), 0.5 * a), T(0.0), T(0.0)};
  }
};

struct FSmoothAbs1 {
  template <class T>
  A3<T> operator()(const A3<T>& x) const {
    return {rpow(T(x[0] * x[0] + 0.01), 0.75), T(0.0), T(0.0)};
  }
};

}  // namespace

AnalyticField named_field(const std::string& spec) {
  // finite-regularity fields accept an exponent suffix, e.g. "phi3_rpow@2.5"
  std::string name = spec;
  double a = 1.5;
  if (auto at = spec.find('@'); at != std::string::npos) {
    name = spec.substr(0, at);
    std::size_t used = 0;
    try {
      a = std::stod(spec.substr(at + 1), &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || at + 1 + used != spec.size() || !(a > 0.0))
      throw std::runtime_error("bad exponent in field name: " + spec);
    if (name != "phi3_rpow" && name != "u3_rpow" && name != "phi2_rpow" && name != "u2_rpow" && name != "f1_abs")
      throw std::runtime_error("field takes no exponent: " + spec);
  }
  if (name == "phi3_entire") return make_field(spec, 3, 1, PhiEntire3{});
  if (name == "phi3_rpow") return make_field(spec, 3, 1, URpow3{a, 0}, a + 1.5);
  if (name == "u3_entire") return make_field(spec, 3, 3, UEntire3{});
  if (name == "u3_rpow") return make_field(spec, 3, 3, URpow3{a, 1}, a + 1.5);
  if (name == "phi2_entire") return make_field(spec, 2, 1, PhiEntire2{});
  if (name == "phi2_rpow") return make_field(spec, 2, 1, URpow2{a, 0}, a + 1.0);
  if (name == "u2_entire") return make_field(spec, 2, 2, UEntire2{});
  if (name == "u2_rpow") return make_field(spec, 2, 2, URpow2{a, 1}, a + 1.0);
  if (name == "f1_entire") return make_field(spec, 1, 1, FEntire1{});
  if (name == "f1_abs15") return make_field(spec, 1, 1, FAbs1{1.5}, 2.0);
  if (name == "f1_abs") return make_field(spec, 1, 1, FAbs1{a}, a + 0.5);
  if (name == "f1_smoothabs") return make_field(spec, 1, 1, FSmoothAbs1{});
  throw std::runtime_error("unknown field: " + spec);
}

std::vector<std::string> field_names(int dim, int value_dim) {
  if (dim == 3 && value_dim == 1) return {"phi3_entire", "phi3_rpow"};
  if (dim == 3 && value_dim == 3) return {"u3_entire", "u3_rpow"};
  if (dim == 2 && value_dim == 1) return {"phi2_entire", "phi2_rpow"};
  if (dim == 2 && value_dim == 2) return {"u2_entire", "u2_rpow"};
  if (dim == 1) return {"f1_entire", "f1_abs15", "f1_smoothabs"};
  throw std::runtime_error("field_names: no fields for this shape");
}

}  // namespace exseq
